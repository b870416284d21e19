#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kcq/rng.hpp"

namespace kcq {

using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

// Parses a string of '0'/'1' characters, first character = index 0.
inline BitVector bits_from_string(std::string_view text) {
    BitVector out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        out.push_back(static_cast<Bit>(c - '0'));
    }
    return out;
}

inline std::string bits_to_string(std::span<const Bit> bits) {
    std::string out;
    out.reserve(bits.size());
    for (Bit b : bits) out.push_back(b ? '1' : '0');
    return out;
}

// Hex packing, most significant bit first; the final nibble is zero-padded.
inline std::string bits_to_hex(std::span<const Bit> bits) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned nibble = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            nibble <<= 1;
            if (i + k < bits.size()) nibble |= bits[i + k] & 1u;
        }
        out.push_back(digits[nibble]);
    }
    return out;
}

inline BitVector random_bits(Rng& rng, std::size_t count) {
    BitVector out(count);
    for (auto& b : out) b = rng.bit();
    return out;
}

inline bool is_zero(std::span<const Bit> bits) {
    for (Bit b : bits)
        if (b) return false;
    return true;
}

inline std::size_t hamming_distance(std::span<const Bit> a, std::span<const Bit> b) {
    if (a.size() != b.size()) throw std::domain_error("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] ^ b[i]) & 1u;
    return d;
}

// Packs bits little-endian into 64-bit words: bit i lands in word i/64, position i%64.
inline std::vector<std::uint64_t> pack_words(std::span<const Bit> bits) {
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
    return words;
}

}  // namespace kcq
