#pragma once

// Byte-level codec for the four protocol packets.
//
// All multi-byte integers are big-endian.  Layouts (offsets in bytes):
//
//   level building, 6 bytes:
//     [0] kind=1  [1] level  [2..3] source  [4..5] seq
//   level back, 10 bytes:
//     [0] kind=2  [1] pad=0  [2] ttl  [3] level
//     [4..5] seq  [6..7] target  [8..9] source
//   query, 10 bytes:
//     [0] kind=3  [1] pad=0  [2] hop_count  [3] ttl
//     [4..5] seq  [6..7] target  [8..9] source
//   data back, 10+n bytes:
//     [0] kind=4  [1] pad=0  [2] ttl  [3] data_len=n
//     [4..5] seq  [6..7] target  [8..9] source  [10..] data
//
// decode() is an exact inverse of encode(): padding bytes must be zero and a
// data-back frame must end exactly data_len bytes after the header, so every
// accepted byte string re-encodes to itself.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lbf/packets.hpp"

namespace lbf::wire {

enum class Kind : std::uint8_t {
    LevelBuilding = 1,
    LevelBack = 2,
    Query = 3,
    DataBack = 4,
};

// Packets that have a wire form (the baseline flood packets do not).
using WirePacket = std::variant<LevelBuildingPacket, LevelBackPacket, QueryPacket, DataBackPacket>;

enum class DecodeError {
    UnknownKind,     // first byte is not a known kind
    Truncated,       // fewer bytes than the kind's fixed header requires
    LengthMismatch,  // buffer length disagrees with the layout / data_len
    BadPadding,      // a reserved byte is non-zero
};

const char* to_string(DecodeError err);

std::vector<std::uint8_t> encode(const WirePacket& pkt);

using DecodeResult = std::variant<WirePacket, DecodeError>;

DecodeResult decode(std::span<const std::uint8_t> bytes);

inline bool is_error(const DecodeResult& r) { return std::holds_alternative<DecodeError>(r); }

// "03 00 02 ..." rendering for the CLI hex-dump mode and for test output.
std::string to_hex(std::span<const std::uint8_t> bytes);

// Inverse of to_hex; accepts any whitespace between byte pairs.  Returns
// false on bad input (odd digit count, non-hex character).
bool from_hex(const std::string& text, std::vector<std::uint8_t>& out);

}  // namespace lbf::wire
