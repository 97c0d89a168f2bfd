#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <string>

namespace pulsebft {

/// An element of the agreement domain: a 64-bit signed integer, or the
/// out-of-band default "bottom". Bottom compares unequal to every domain
/// value and is excluded from ordering; the representation INT64_MIN is
/// reserved as its marker, so the usable domain is [INT64_MIN+1, INT64_MAX].
class Value {
 public:
  constexpr Value() : rep_(kBottomRep) {}

  static constexpr Value bottom() { return Value(); }

  static constexpr Value of(std::int64_t payload) {
    Value v;
    v.rep_ = payload == kBottomRep ? kBottomRep + 1 : payload;  // saturate into the domain
    return v;
  }

  constexpr bool is_bottom() const { return rep_ == kBottomRep; }

  std::int64_t payload() const {
    assert(!is_bottom());
    return rep_;
  }

  friend constexpr bool operator==(Value a, Value b) { return a.rep_ == b.rep_; }
  friend constexpr bool operator!=(Value a, Value b) { return a.rep_ != b.rep_; }

  /// Domain order only; callers must filter bottoms first.
  friend bool operator<(Value a, Value b) {
    assert(!a.is_bottom() && !b.is_bottom());
    return a.rep_ < b.rep_;
  }

  std::string str() const { return is_bottom() ? "_|_" : std::to_string(rep_); }

  /// Raw representation, bottom included. For wire encoding and hashing only.
  constexpr std::int64_t rep() const { return rep_; }
  static constexpr Value from_rep(std::int64_t r) {
    Value v;
    v.rep_ = r;
    return v;
  }

 private:
  static constexpr std::int64_t kBottomRep = std::numeric_limits<std::int64_t>::min();
  std::int64_t rep_;
};

/// Process identifier, 1-based: valid ids are 1..n.
using ProcessId = int;

}  // namespace pulsebft
