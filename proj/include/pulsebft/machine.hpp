#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsebft/value.hpp"

namespace pulsebft {

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic state machine driven by agreed inputs. Built-in kinds:
///   counter      states 0..m-1, delta(q, in) = (q + in) mod m, any input
///   register     state is the last input, delta(q, in) = in
///   price_oracle register semantics; state is the last agreed quote
///   table        explicit transition rows over states 0..m-1 and a finite
///                input alphabet; delta must be total on states x alphabet
struct StateMachineSpec {
  enum class Kind { Counter, Register, PriceOracle, Table };

  Kind kind = Kind::Counter;
  std::int64_t state_count = 0;          // counter/table
  std::vector<std::int64_t> alphabet;    // table, sorted ascending
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> table;

  static StateMachineSpec counter(std::int64_t m) {
    StateMachineSpec s;
    s.kind = Kind::Counter;
    s.state_count = m;
    return s;
  }
  static StateMachineSpec reg() {
    StateMachineSpec s;
    s.kind = Kind::Register;
    return s;
  }
  static StateMachineSpec price_oracle() {
    StateMachineSpec s;
    s.kind = Kind::PriceOracle;
    return s;
  }

  /// True when the machine enumerates its states (so out-of-range agreed
  /// states must be normalized). Register machines accept any domain value.
  bool bounded_states() const { return kind == Kind::Counter || kind == Kind::Table; }

  bool valid_state(std::int64_t q) const {
    return !bounded_states() || (q >= 0 && q < state_count);
  }

  /// Clamps an out-of-range agreed state to the nearest valid index.
  std::int64_t clamp_state(std::int64_t q) const {
    if (!bounded_states()) return q;
    return std::clamp<std::int64_t>(q, 0, state_count - 1);
  }

  bool in_alphabet(std::int64_t in) const {
    if (kind != Kind::Table) return true;  // counter/register read the whole domain
    return std::binary_search(alphabet.begin(), alphabet.end(), in);
  }

  /// Maps an agreed input into the alphabet: nearest element, ties toward the
  /// smaller one. Identity for machines whose alphabet is the whole domain.
  std::int64_t sanitize_input(std::int64_t in) const {
    if (kind != Kind::Table || alphabet.empty()) return in;
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), in);
    if (it == alphabet.end()) return alphabet.back();
    if (it == alphabet.begin()) return alphabet.front();
    std::int64_t hi = *it, lo = *(it - 1);
    return (in - lo) <= (hi - in) ? lo : hi;
  }

  std::int64_t apply(std::int64_t state, std::int64_t input) const {
    switch (kind) {
      case Kind::Counter: {
        std::int64_t m = state_count;
        std::int64_t r = (state % m + input % m) % m;
        if (r < 0) r += m;
        return r;
      }
      case Kind::Register:
      case Kind::PriceOracle:
        return input;
      case Kind::Table: {
        if (!valid_state(state)) throw MachineError("state out of range: " + std::to_string(state));
        auto it = table.find({state, input});
        if (it == table.end())
          throw MachineError("input not in alphabet: " + std::to_string(input));
        return it->second;
      }
    }
    throw MachineError("bad machine kind");
  }

  /// Structural validation; messages name the offending piece.
  void check() const {
    switch (kind) {
      case Kind::Counter:
        if (state_count < 1) throw MachineError("counter machine needs m >= 1");
        break;
      case Kind::Register:
      case Kind::PriceOracle:
        break;
      case Kind::Table: {
        if (state_count < 1) throw MachineError("table machine needs states >= 1");
        if (alphabet.empty()) throw MachineError("table machine needs a nonempty alphabet");
        if (!std::is_sorted(alphabet.begin(), alphabet.end()))
          throw MachineError("alphabet must be sorted ascending");
        if (std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end())
          throw MachineError("alphabet has duplicates");
        for (std::int64_t q = 0; q < state_count; ++q)
          for (std::int64_t in : alphabet) {
            auto it = table.find({q, in});
            if (it == table.end())
              throw MachineError("transition table not total: missing (" + std::to_string(q) +
                                 ", " + std::to_string(in) + ")");
            if (it->second < 0 || it->second >= state_count)
              throw MachineError("transition target out of range at (" + std::to_string(q) +
                                 ", " + std::to_string(in) + ")");
          }
        break;
      }
    }
  }
};

/// delta as a free function, the agreement stack's only hook into the machine.
inline std::int64_t apply_transition(const StateMachineSpec& spec, std::int64_t state,
                                     std::int64_t input) {
  if (!spec.valid_state(state)) throw MachineError("state out of range: " + std::to_string(state));
  if (!spec.in_alphabet(input)) throw MachineError("input not in alphabet: " + std::to_string(input));
  return spec.apply(state, input);
}

}  // namespace pulsebft
