#include "lbf/wire.hpp"

#include <cctype>

namespace lbf::wire {
namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

}  // namespace

const char* to_string(DecodeError err) {
    switch (err) {
        case DecodeError::UnknownKind: return "unknown kind";
        case DecodeError::Truncated: return "truncated";
        case DecodeError::LengthMismatch: return "length mismatch";
        case DecodeError::BadPadding: return "bad padding";
    }
    return "?";
}

std::vector<std::uint8_t> encode(const WirePacket& pkt) {
    std::vector<std::uint8_t> out;
    std::visit(
        [&out](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LevelBuildingPacket>) {
                out.reserve(6);
                out.push_back(static_cast<std::uint8_t>(Kind::LevelBuilding));
                out.push_back(p.level);
                put16(out, p.source);
                put16(out, p.seq);
            } else if constexpr (std::is_same_v<T, LevelBackPacket>) {
                out.reserve(10);
                out.push_back(static_cast<std::uint8_t>(Kind::LevelBack));
                out.push_back(0);
                out.push_back(p.ttl);
                out.push_back(p.level);
                put16(out, p.seq);
                put16(out, p.target);
                put16(out, p.source);
            } else if constexpr (std::is_same_v<T, QueryPacket>) {
                out.reserve(10);
                out.push_back(static_cast<std::uint8_t>(Kind::Query));
                out.push_back(0);
                out.push_back(p.hop_count);
                out.push_back(p.ttl);
                put16(out, p.seq);
                put16(out, p.target);
                put16(out, p.source);
            } else {
                static_assert(std::is_same_v<T, DataBackPacket>);
                out.reserve(10 + p.data.size());
                out.push_back(static_cast<std::uint8_t>(Kind::DataBack));
                out.push_back(0);
                out.push_back(p.ttl);
                out.push_back(static_cast<std::uint8_t>(p.data.size()));
                put16(out, p.seq);
                put16(out, p.target);
                put16(out, p.source);
                out.insert(out.end(), p.data.begin(), p.data.end());
            }
        },
        pkt);
    return out;
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return DecodeError::Truncated;
    switch (bytes[0]) {
        case 1: {  // level building
            if (bytes.size() < 6) return DecodeError::Truncated;
            if (bytes.size() != 6) return DecodeError::LengthMismatch;
            LevelBuildingPacket p;
            p.level = bytes[1];
            p.source = get16(bytes, 2);
            p.seq = get16(bytes, 4);
            return WirePacket(p);
        }
        case 2: {  // level back
            if (bytes.size() < 10) return DecodeError::Truncated;
            if (bytes.size() != 10) return DecodeError::LengthMismatch;
            if (bytes[1] != 0) return DecodeError::BadPadding;
            LevelBackPacket p;
            p.ttl = bytes[2];
            p.level = bytes[3];
            p.seq = get16(bytes, 4);
            p.target = get16(bytes, 6);
            p.source = get16(bytes, 8);
            return WirePacket(p);
        }
        case 3: {  // query
            if (bytes.size() < 10) return DecodeError::Truncated;
            if (bytes.size() != 10) return DecodeError::LengthMismatch;
            if (bytes[1] != 0) return DecodeError::BadPadding;
            QueryPacket p;
            p.hop_count = bytes[2];
            p.ttl = bytes[3];
            p.seq = get16(bytes, 4);
            p.target = get16(bytes, 6);
            p.source = get16(bytes, 8);
            return WirePacket(p);
        }
        case 4: {  // data back
            if (bytes.size() < 10) return DecodeError::Truncated;
            if (bytes[1] != 0) return DecodeError::BadPadding;
            const std::size_t want = 10u + bytes[3];
            if (bytes.size() != want) return DecodeError::LengthMismatch;
            DataBackPacket p;
            p.ttl = bytes[2];
            p.seq = get16(bytes, 4);
            p.target = get16(bytes, 6);
            p.source = get16(bytes, 8);
            p.data.assign(bytes.begin() + 10, bytes.end());
            return WirePacket(p);
        }
        default:
            return DecodeError::UnknownKind;
    }
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i) out.push_back(' ');
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0xf]);
    }
    return out;
}

bool from_hex(const std::string& text, std::vector<std::uint8_t>& out) {
    out.clear();
    int nibbles = 0;
    std::uint8_t cur = 0;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (nibbles == 1) return false;  // split byte
            continue;
        }
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else return false;
        cur = static_cast<std::uint8_t>((cur << 4) | v);
        if (++nibbles == 2) {
            out.push_back(cur);
            nibbles = 0;
            cur = 0;
        }
    }
    return nibbles == 0;
}

}  // namespace lbf::wire
