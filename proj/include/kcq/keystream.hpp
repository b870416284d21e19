#pragma once

// Seed-key expansion into running keys of basis selectors.

#include <algorithm>
#include <bit>
#include <charconv>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kcq/bits.hpp"
#include "kcq/qubit.hpp"

namespace kcq {

/// Secret seed key K_s.
class SeedKey {
public:
    explicit SeedKey(BitVector bits) : bits_(std::move(bits)) {
        if (bits_.empty()) throw std::domain_error("seed key must have at least one bit");
        for (auto& b : bits_) b &= 1u;
    }
    static SeedKey parse(std::string_view text) { return SeedKey(bits_from_string(text)); }

    std::size_t size() const { return bits_.size(); }
    const BitVector& bits() const { return bits_; }
    bool is_zero() const { return kcq::is_zero(bits_); }
    std::string to_string() const { return bits_to_string(bits_); }

    friend bool operator==(const SeedKey&, const SeedKey&) = default;

private:
    BitVector bits_;
};

/// Connection polynomial of a Fibonacci LFSR, in the "L:t1,t2,..." tap
/// notation where tap t means the term x^t of x^L + ... + 1.
///
/// Register stages are numbered 1..L from the output end. Each step outputs
/// stage 1, shifts every stage down by one, and writes the XOR of the tapped
/// stages into stage L. Tap t reads stage L - t + 1, so tap L is always the
/// output stage and the recurrence is s[k+L] = XOR over taps t of s[k+L-t].
class LfsrSpec {
public:
    LfsrSpec(std::size_t length, std::vector<std::size_t> taps) : length_(length), taps_(std::move(taps)) {
        std::sort(taps_.begin(), taps_.end(), std::greater<>());
        taps_.erase(std::unique(taps_.begin(), taps_.end()), taps_.end());
        if (length_ == 0) throw std::domain_error("LFSR length must be positive");
        if (taps_.empty() || taps_.front() != length_)
            throw std::domain_error("LFSR highest tap must equal the register length");
        if (taps_.back() < 1) throw std::domain_error("LFSR tap positions must be in [1, L]");
        // x + 1 is the only degree-1 polynomial; otherwise a lone x^L tap is degenerate.
        if (length_ > 1 && taps_.size() < 2) throw std::domain_error("LFSR needs at least two taps");
    }

    static LfsrSpec parse(std::string_view text) {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("LFSR spec must look like L:tap,tap,...");
        const std::size_t length = parse_number(text.substr(0, colon));
        std::vector<std::size_t> taps;
        std::string_view rest = text.substr(colon + 1);
        while (true) {
            const auto comma = rest.find(',');
            taps.push_back(parse_number(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return LfsrSpec(length, std::move(taps));
    }

    std::size_t length() const { return length_; }
    const std::vector<std::size_t>& taps() const { return taps_; }

    std::string to_string() const {
        std::string out = std::to_string(length_) + ":";
        for (std::size_t i = 0; i < taps_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(taps_[i]);
        }
        return out;
    }

    friend bool operator==(const LfsrSpec&, const LfsrSpec&) = default;

private:
    static std::size_t parse_number(std::string_view s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw std::invalid_argument("bad number in LFSR spec: '" + std::string(s) + "'");
        return v;
    }

    std::size_t length_;
    std::vector<std::size_t> taps_;
};

/// Maximal-length tap sets (x^L + ... + 1 primitive over GF(2)).
inline std::optional<LfsrSpec> primitive_lfsr(std::size_t length) {
    static const std::vector<std::vector<std::size_t>> table = {
        {},             {1},            {2, 1},         {3, 2},         {4, 3},         {5, 3},
        {6, 5},         {7, 6},         {8, 6, 5, 4},   {9, 5},         {10, 7},        {11, 9},
        {12, 6, 4, 1},  {13, 4, 3, 1},  {14, 5, 3, 1},  {15, 14},       {16, 15, 13, 4}, {17, 14},
        {18, 11},       {19, 6, 2, 1},  {20, 17},       {21, 19},       {22, 21},       {23, 18},
        {24, 23, 22, 17}, {25, 22},     {26, 6, 2, 1},  {27, 5, 2, 1},  {28, 25},       {29, 27},
        {30, 6, 4, 1},  {31, 28},       {32, 22, 2, 1},
    };
    if (length == 64) return LfsrSpec(64, {64, 63, 61, 60});
    if (length == 0 || length >= table.size()) return std::nullopt;
    return LfsrSpec(length, table[length]);
}

/// A deterministic bit source. `next()` returns nullopt once a finite source
/// is exhausted.
template <class G>
concept BitGenerator = requires(G g) {
    { g.next() } -> std::same_as<std::optional<Bit>>;
};

class Lfsr {
public:
    Lfsr(const LfsrSpec& spec, const SeedKey& seed) : length_(spec.length()), state_(seed.bits()) {
        if (seed.size() != spec.length()) throw std::domain_error("seed length must equal LFSR length");
        if (seed.is_zero()) throw std::domain_error("all-zero seed is a degenerate LFSR state");
        for (std::size_t t : spec.taps()) stages_.push_back(length_ - t);
    }

    std::optional<Bit> next() { return step(); }

    Bit step() {
        const Bit out = state_[head_];
        Bit feedback = 0;
        for (std::size_t offset : stages_) feedback ^= state_[(head_ + offset) % length_];
        // Stage 1 leaves; the freed slot becomes stage L.
        state_[head_] = feedback;
        head_ = (head_ + 1) % length_;
        return out;
    }

    // Current register contents, stage 1 first.
    BitVector state() const {
        BitVector out(length_);
        for (std::size_t i = 0; i < length_; ++i) out[i] = state_[(head_ + i) % length_];
        return out;
    }

private:
    std::size_t length_;
    BitVector state_;
    std::vector<std::size_t> stages_;  // zero-based stage offsets from the output end
    std::size_t head_ = 0;
};

/// Replays a fixed bit vector, then reports exhaustion.
class VectorBitSource {
public:
    explicit VectorBitSource(BitVector bits) : bits_(std::move(bits)) {}
    std::optional<Bit> next() {
        if (pos_ >= bits_.size()) return std::nullopt;
        return bits_[pos_++];
    }

private:
    BitVector bits_;
    std::size_t pos_ = 0;
};

inline BitVector lfsr_stream(const LfsrSpec& spec, const SeedKey& seed, std::size_t count) {
    Lfsr lfsr(spec, seed);
    BitVector out(count);
    for (auto& b : out) b = lfsr.step();
    return out;
}

/// Cycle length of the register state, by direct simulation.
inline std::uint64_t lfsr_period(const LfsrSpec& spec, const SeedKey& seed) {
    const std::size_t length = spec.length();
    if (length > 24) throw std::domain_error("lfsr_period supports L <= 24");
    if (seed.size() != length) throw std::domain_error("seed length must equal LFSR length");
    if (seed.is_zero()) throw std::domain_error("all-zero seed is a degenerate LFSR state");
    // bit (stage - 1) of `state` holds stage `stage`
    std::uint32_t tap_mask = 0, start = 0;
    for (std::size_t t : spec.taps()) tap_mask |= 1u << (length - t);
    for (std::size_t i = 0; i < length; ++i) start |= static_cast<std::uint32_t>(seed.bits()[i]) << i;
    std::uint32_t state = start;
    std::uint64_t steps = 0;
    do {
        const std::uint32_t feedback = std::popcount(state & tap_mask) & 1u;
        state = (state >> 1) | (feedback << (length - 1));
        ++steps;
    } while (state != start);
    return steps;
}

/// Basis selectors K_r, each in [0, m).
class RunningKey {
public:
    RunningKey(std::vector<std::uint32_t> selectors, std::uint32_t m) : selectors_(std::move(selectors)), m_(m) {
        for (auto s : selectors_)
            if (s >= m_) throw std::domain_error("running key selector out of range");
    }

    std::size_t size() const { return selectors_.size(); }
    std::uint32_t operator[](std::size_t i) const { return selectors_[i]; }
    const std::vector<std::uint32_t>& selectors() const { return selectors_; }
    std::uint32_t m() const { return m_; }

    friend bool operator==(const RunningKey&, const RunningKey&) = default;

private:
    std::vector<std::uint32_t> selectors_;
    std::uint32_t m_;
};

/// Groups log2(m) consecutive bits per selector, first bit most significant.
template <BitGenerator G>
RunningKey expand_running_key(G& generator, std::size_t n, const BasisAlphabet& alphabet) {
    const unsigned width = alphabet.bits_per_selector();
    std::vector<std::uint32_t> selectors(n);
    for (auto& s : selectors) {
        std::uint32_t v = 0;
        for (unsigned k = 0; k < width; ++k) {
            const auto bit = generator.next();
            if (!bit) throw std::runtime_error("keystream exhausted");
            v = (v << 1) | (*bit & 1u);
        }
        s = v;
    }
    return RunningKey(std::move(selectors), alphabet.m());
}

/// Repetition layout: key bit i covers the i-th contiguous block of
/// ceil(n / |key|) positions; the final block is shorter when |key| does not divide n.
inline RunningKey repetition_running_key(const SeedKey& key, std::size_t n) {
    const std::size_t block = std::max<std::size_t>(1, (n + key.size() - 1) / key.size());
    std::vector<std::uint32_t> selectors(n);
    for (std::size_t i = 0; i < n; ++i) selectors[i] = key.bits()[i / block];
    return RunningKey(std::move(selectors), 2);
}

inline std::size_t repetition_block_length(std::size_t key_bits, std::size_t n) {
    return std::max<std::size_t>(1, (n + key_bits - 1) / key_bits);
}

}  // namespace kcq
