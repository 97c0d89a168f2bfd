#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pulsebft/value.hpp"

namespace pulsebft {

using Bytes = std::vector<std::uint8_t>;

/// Protocol frame tags. A round message is a concatenation of frames; all
/// integers are little-endian fixed width.
///
///   0x01 initial-value   [tag u8][instance u16][marker u8][payload i64]
///   0x02 perplexed       [tag u8][instance u16]
///   0x03 phase-king vote [tag u8][instance u16][phase u16][bit u8]
///   0x04 king broadcast  [tag u8][instance u16][phase u16][bit u8]
///
/// marker 1 means the value is bottom (payload ignored). Instance 0 is the
/// outer broadcast of a median-agreement run (or a standalone session);
/// instances 1..n are the parallel weak-agreement instances.
enum class Tag : std::uint8_t {
  InitialValue = 0x01,
  Perplexed = 0x02,
  PhaseKingVote = 0x03,
  KingBroadcast = 0x04,
};

struct Frame {
  Tag tag = Tag::InitialValue;
  std::uint16_t instance = 0;
  std::uint16_t phase = 0;  // phase-king frames only
  bool bit = false;         // phase-king frames only
  Value value;              // initial-value frames only

  static Frame initial(std::uint16_t instance, Value v) {
    Frame f;
    f.tag = Tag::InitialValue;
    f.instance = instance;
    f.value = v;
    return f;
  }
  static Frame perplexed(std::uint16_t instance) {
    Frame f;
    f.tag = Tag::Perplexed;
    f.instance = instance;
    return f;
  }
  static Frame vote(std::uint16_t instance, std::uint16_t phase, bool bit) {
    Frame f;
    f.tag = Tag::PhaseKingVote;
    f.instance = instance;
    f.phase = phase;
    f.bit = bit;
    return f;
  }
  static Frame king(std::uint16_t instance, std::uint16_t phase, bool bit) {
    Frame f;
    f.tag = Tag::KingBroadcast;
    f.instance = instance;
    f.phase = phase;
    f.bit = bit;
    return f;
  }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.tag == b.tag && a.instance == b.instance && a.phase == b.phase &&
           a.bit == b.bit && a.value == b.value;
  }
};

namespace wire_detail {

inline void put_u16(Bytes& out, std::uint16_t x) {
  out.push_back(static_cast<std::uint8_t>(x & 0xff));
  out.push_back(static_cast<std::uint8_t>(x >> 8));
}

inline void put_i64(Bytes& out, std::int64_t x) {
  auto u = static_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

inline std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::int64_t get_i64(const std::uint8_t* p) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

}  // namespace wire_detail

inline void append_frame(Bytes& out, const Frame& f) {
  out.push_back(static_cast<std::uint8_t>(f.tag));
  wire_detail::put_u16(out, f.instance);
  switch (f.tag) {
    case Tag::InitialValue:
      out.push_back(f.value.is_bottom() ? 1 : 0);
      wire_detail::put_i64(out, f.value.is_bottom() ? 0 : f.value.payload());
      break;
    case Tag::Perplexed:
      break;
    case Tag::PhaseKingVote:
    case Tag::KingBroadcast:
      wire_detail::put_u16(out, f.phase);
      out.push_back(f.bit ? 1 : 0);
      break;
  }
}

inline Bytes encode_frames(const std::vector<Frame>& frames) {
  Bytes out;
  for (const Frame& f : frames) append_frame(out, f);
  return out;
}

/// Parses a round message front to back. The first malformed prefix ends the
/// parse; frames decoded before it are kept. Stray bit bytes are normalized
/// (nonzero reads as 1), so any byte string decodes deterministically.
inline std::vector<Frame> parse_frames(const Bytes& in) {
  std::vector<Frame> out;
  std::size_t i = 0;
  const std::size_t size = in.size();
  while (i < size) {
    const std::uint8_t tag = in[i];
    Frame f;
    switch (tag) {
      case 0x01: {
        if (size - i < 12) return out;
        f.tag = Tag::InitialValue;
        f.instance = wire_detail::get_u16(&in[i + 1]);
        if (in[i + 3] != 0) {
          f.value = Value::bottom();
        } else {
          std::int64_t payload = wire_detail::get_i64(&in[i + 4]);
          f.value = Value::from_rep(payload);
          if (f.value.is_bottom()) f.value = Value::of(payload);  // reserved rep, saturate
        }
        i += 12;
        break;
      }
      case 0x02: {
        if (size - i < 3) return out;
        f.tag = Tag::Perplexed;
        f.instance = wire_detail::get_u16(&in[i + 1]);
        i += 3;
        break;
      }
      case 0x03:
      case 0x04: {
        if (size - i < 6) return out;
        f.tag = tag == 0x03 ? Tag::PhaseKingVote : Tag::KingBroadcast;
        f.instance = wire_detail::get_u16(&in[i + 1]);
        f.phase = wire_detail::get_u16(&in[i + 3]);
        f.bit = in[i + 5] != 0;
        i += 6;
        break;
      }
      default:
        return out;  // unknown tag: drop the rest
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace pulsebft
