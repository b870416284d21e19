#pragma once

// Keyed-basis key generation: transmission without sifting, rate gate,
// idealized reconciliation, Toeplitz privacy amplification, keyed key
// verification and secret-bit accounting. Also the direct-encryption mode.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kcq/bits.hpp"
#include "kcq/info.hpp"
#include "kcq/keystream.hpp"
#include "kcq/qubit.hpp"
#include "kcq/rng.hpp"

namespace kcq {

struct ChannelModel {
    double flip_probability = 0.0;  // p_c
    double loss = 0.0;

    void validate() const {
        if (!(flip_probability >= 0.0 && flip_probability < 0.5))
            throw std::domain_error("channel flip probability must lie in [0, 0.5)");
        if (!(loss >= 0.0 && loss < 1.0)) throw std::domain_error("channel loss must lie in [0, 1)");
    }
};

enum class Mode { key_generation, direct_encryption };

struct KeystreamConfig {
    enum class Kind { lfsr, repetition };
    Kind kind = Kind::lfsr;
    std::optional<LfsrSpec> lfsr;  // set iff kind == lfsr
    SeedKey seed = SeedKey(BitVector{1});

    static KeystreamConfig make_lfsr(LfsrSpec spec, SeedKey seed) {
        return {Kind::lfsr, std::move(spec), std::move(seed)};
    }
    static KeystreamConfig make_repetition(SeedKey key) { return {Kind::repetition, std::nullopt, std::move(key)}; }
};

struct ProtocolConfig {
    std::size_t n = 0;
    BasisAlphabet alphabet;
    KeystreamConfig keystream;
    ChannelModel channel;
    double code_rate = 0.5;
    std::size_t pa_security_bits = 0;
    std::size_t verification_len = 1;
    Mode mode = Mode::key_generation;

    void validate() const {
        if (n < 1) throw std::domain_error("n must be at least 1");
        if (!(code_rate > 0.0 && code_rate < 1.0)) throw std::domain_error("code rate must lie in (0, 1)");
        if (verification_len < 1) throw std::domain_error("verification length must be at least 1");
        channel.validate();
        if (keystream.kind == KeystreamConfig::Kind::lfsr) {
            if (!keystream.lfsr) throw std::domain_error("LFSR keystream needs a connection polynomial");
            if (keystream.seed.size() != keystream.lfsr->length())
                throw std::domain_error("seed length must equal LFSR length");
            if (keystream.seed.is_zero()) throw std::domain_error("all-zero LFSR seed");
        } else if (alphabet.m() != 2) {
            throw std::domain_error("repetition keystream is defined for two bases only");
        }
    }
};

inline RunningKey make_running_key(const KeystreamConfig& ks, std::size_t n, const BasisAlphabet& alphabet) {
    if (ks.kind == KeystreamConfig::Kind::repetition) return repetition_running_key(ks.seed, n);
    Lfsr generator(*ks.lfsr, ks.seed);
    return expand_running_key(generator, n, alphabet);
}

/// Bits aligned over the positions that survived loss.
struct RawFrame {
    BitVector alice;
    BitVector bob;
    std::vector<std::size_t> detected;
};

struct PassThrough {
    StateAngle operator()(std::size_t, StateAngle s, Rng&) const { return s; }
};

/// Sends `data` over the keyed channel. `tap(i, state, rng)` sees every
/// transmitted state before the channel and returns what continues to Bob.
template <class Tap = PassThrough>
RawFrame transmit(const RunningKey& key, const BasisAlphabet& alphabet, std::span<const Bit> data,
                  const ChannelModel& channel, Rng& rng, Tap&& tap = {}) {
    if (key.size() != data.size()) throw std::domain_error("running key and data lengths differ");
    RawFrame frame;
    frame.alice.reserve(data.size());
    frame.bob.reserve(data.size());
    frame.detected.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint32_t j = key[i];
        StateAngle s = tap(i, encode_state(data[i], j, alphabet), rng);
        const bool lost = rng.uniform() < channel.loss;
        const bool flipped = rng.uniform() < channel.flip_probability;
        if (lost) continue;
        if (flipped) s = s.orthogonal();
        const Bit outcome = measure(s, alphabet.basis(j), rng);
        frame.alice.push_back(data[i]);
        frame.bob.push_back(decode_outcome(outcome, j, alphabet));
        frame.detected.push_back(i);
    }
    return frame;
}

inline RawFrame transmit_round(const ProtocolConfig& config, Rng& rng) {
    config.validate();
    const RunningKey key = make_running_key(config.keystream, config.n, config.alphabet);
    const BitVector data = random_bits(rng, config.n);
    return transmit(key, config.alphabet, data, config.channel, rng);
}

enum class RateVerdict { ok, rate_too_high, rate_too_low_for_security };

inline const char* to_string(RateVerdict v) {
    switch (v) {
        case RateVerdict::ok: return "ok";
        case RateVerdict::rate_too_high: return "rate_too_high";
        case RateVerdict::rate_too_low_for_security: return "rate_too_low_for_security";
    }
    return "?";
}

inline RateVerdict rate_gate(double p_c_hat, double rate) {
    const RateWindow w = rate_window(p_c_hat);
    if (!(rate < w.upper)) return RateVerdict::rate_too_high;
    if (!(rate > w.lower)) return RateVerdict::rate_too_low_for_security;
    return RateVerdict::ok;
}

inline constexpr double reconcile_margin = 0.02;

struct ReconcileResult {
    BitVector corrected;
    std::size_t leaked_bits = 0;
    bool success = false;
    double error_rate = 0.0;
};

/// Shannon-limit reconciliation stand-in: decoding succeeds iff
/// h2(error rate) <= 1 - R - margin, after which Bob holds Alice's bits.
inline ReconcileResult reconcile(std::span<const Bit> alice, std::span<const Bit> bob, double rate) {
    if (alice.size() != bob.size()) throw std::domain_error("reconcile: length mismatch");
    ReconcileResult r;
    if (alice.empty()) {
        r.success = true;
        return r;
    }
    r.error_rate = static_cast<double>(hamming_distance(alice, bob)) / static_cast<double>(alice.size());
    r.success = h2(r.error_rate) <= (1.0 - rate) - reconcile_margin;
    if (r.success) {
        r.corrected.assign(alice.begin(), alice.end());
        r.leaked_bits = static_cast<std::size_t>(std::ceil(static_cast<double>(alice.size()) * (1.0 - rate)));
    } else {
        r.corrected.assign(bob.begin(), bob.end());
    }
    return r;
}

/// Binary Toeplitz hash: out[i] = XOR_j T[i][j] & in[j] with
/// T[i][j] = seed[i - j + in.size() - 1].
inline BitVector toeplitz_hash(std::span<const Bit> input, std::size_t out_len, std::span<const Bit> seed) {
    const std::size_t len = input.size();
    if (out_len > len) throw std::domain_error("hash output longer than input");
    if (out_len == 0) return {};
    if (seed.size() != len + out_len - 1) throw std::domain_error("Toeplitz seed must have in + out - 1 bits");

    // out[i] = parity over k of seed[i + k] & input[len - 1 - k]
    BitVector reversed(input.rbegin(), input.rend());
    const auto x = pack_words(reversed);
    auto s = pack_words(seed);
    s.push_back(0);
    s.push_back(0);
    BitVector out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < x.size(); ++w) {
            const std::size_t bit = i + 64 * w;
            const std::size_t q = bit / 64, r = bit % 64;
            const std::uint64_t window = r == 0 ? s[q] : (s[q] >> r) | (s[q + 1] << (64 - r));
            acc ^= window & x[w];
        }
        out[i] = static_cast<Bit>(std::popcount(acc) & 1);
    }
    return out;
}

inline BitVector privacy_amplify(std::span<const Bit> bits, std::size_t out_len, std::span<const Bit> hash_seed) {
    return toeplitz_hash(bits, out_len, hash_seed);
}

inline std::size_t pa_output_length(std::size_t reconciled, double rate, double eve_capacity_bits, std::size_t security_bits) {
    const double margin = static_cast<double>(reconciled) * (rate - eve_capacity_bits);
    if (!(margin > 0.0)) return 0;
    const auto raw = static_cast<std::size_t>(std::floor(margin));
    return raw > security_bits ? raw - security_bits : 0;
}

inline std::size_t pa_output_length(std::size_t reconciled, double rate, const BasisAlphabet& alphabet, std::size_t security_bits) {
    return pa_output_length(reconciled, rate, eve_capacity(alphabet), security_bits);
}

/// Keyed hash used for key verification and message authentication.
/// The first half of `verification_key` selects a Toeplitz matrix (expanded
/// through a seeded generator); the second half is a one-time pad on the tag.
inline BitVector keyed_tag(std::span<const Bit> message, std::span<const Bit> verification_key) {
    if (verification_key.empty() || verification_key.size() % 2 != 0)
        throw std::domain_error("verification key must hold 2*|K_v| bits");
    const std::size_t tag_len = verification_key.size() / 2;
    const auto selector = verification_key.first(tag_len);
    const auto pad = verification_key.subspan(tag_len);

    std::vector<std::uint32_t> seed_words{static_cast<std::uint32_t>(tag_len)};
    for (std::uint64_t w : pack_words(selector)) {
        seed_words.push_back(static_cast<std::uint32_t>(w));
        seed_words.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq seq(seed_words.begin(), seed_words.end());
    std::mt19937_64 expander(seq);

    // Pad short messages so the tag length never exceeds the hash input.
    BitVector input(message.begin(), message.end());
    if (input.size() < tag_len) input.resize(tag_len, 0);
    BitVector matrix_seed(input.size() + tag_len - 1);
    for (std::size_t i = 0; i < matrix_seed.size(); i += 64) {
        const std::uint64_t word = expander();
        for (std::size_t k = 0; k < 64 && i + k < matrix_seed.size(); ++k) matrix_seed[i + k] = (word >> k) & 1u;
    }
    BitVector tag = toeplitz_hash(input, tag_len, matrix_seed);
    for (std::size_t i = 0; i < tag_len; ++i) tag[i] ^= pad[i];
    return tag;
}

inline bool verify_key(std::span<const Bit> alice_key, std::span<const Bit> bob_key, std::span<const Bit> verification_key) {
    if (alice_key.size() != bob_key.size()) return false;
    return keyed_tag(alice_key, verification_key) == keyed_tag(bob_key, verification_key);
}

struct KeyLedger {
    std::int64_t consumed_seed = 0;
    std::int64_t consumed_verification = 0;
    std::int64_t generated = 0;

    std::int64_t consumed() const { return consumed_seed + consumed_verification; }
    std::int64_t net() const { return generated - consumed(); }
};

struct ProtocolOutcome {
    BitVector alice_key;
    BitVector bob_key;
    double qber_raw = 0.0;       // over every detected bit, before correction
    double qber_estimate = 0.0;  // from the disclosed sample
    std::size_t sample_size = 0;
    std::vector<std::size_t> detected_positions;
    RateVerdict rate_verdict = RateVerdict::ok;
    std::size_t reconciled_length = 0;
    std::size_t leaked_bits = 0;
    bool verified = false;
    KeyLedger ledger;
    std::optional<std::string> abort_reason;
};

inline constexpr double qber_sample_fraction = 0.05;

namespace detail {
// Chooses ceil(fraction * size) distinct indices, returned sorted.
inline std::vector<std::size_t> sample_indices(std::size_t size, double fraction, Rng& rng) {
    const auto count = std::min(size, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size))));
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(size - i)]);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}
}  // namespace detail

inline ProtocolOutcome run_protocol(const ProtocolConfig& config, Rng& rng) {
    config.validate();
    ProtocolOutcome out;
    out.ledger.consumed_seed = static_cast<std::int64_t>(config.keystream.seed.size());
    out.ledger.consumed_verification = static_cast<std::int64_t>(2 * config.verification_len);

    RawFrame frame = transmit_round(config, rng);
    out.detected_positions = frame.detected;
    if (frame.detected.empty()) {
        out.abort_reason = "no_detections";
        return out;
    }
    out.qber_raw = static_cast<double>(hamming_distance(frame.alice, frame.bob)) /
                   static_cast<double>(frame.alice.size());

    // Disclose a random sample for channel estimation; it leaves the key material.
    const auto sample = detail::sample_indices(frame.alice.size(), qber_sample_fraction, rng);
    BitVector alice, bob;
    std::size_t sample_errors = 0;
    for (std::size_t i = 0, s = 0; i < frame.alice.size(); ++i) {
        if (s < sample.size() && sample[s] == i) {
            sample_errors += frame.alice[i] != frame.bob[i];
            ++s;
            continue;
        }
        alice.push_back(frame.alice[i]);
        bob.push_back(frame.bob[i]);
    }
    out.sample_size = sample.size();
    out.qber_estimate = static_cast<double>(sample_errors) / static_cast<double>(sample.size());

    out.rate_verdict = rate_gate(std::min(out.qber_estimate, 0.5 - 1e-12), config.code_rate);
    if (out.rate_verdict != RateVerdict::ok) {
        out.abort_reason = "rate_gate";
        return out;
    }

    const ReconcileResult rec = reconcile(alice, bob, config.code_rate);
    if (!rec.success) {
        out.abort_reason = "reconciliation";
        return out;
    }
    out.reconciled_length = alice.size();
    out.leaked_bits = rec.leaked_bits;

    const std::size_t key_len =
        pa_output_length(alice.size(), config.code_rate, config.alphabet, config.pa_security_bits);
    if (key_len == 0) {
        out.abort_reason = "empty_key";
        return out;
    }
    const BitVector hash_seed = random_bits(rng, alice.size() + key_len - 1);
    out.alice_key = privacy_amplify(alice, key_len, hash_seed);
    out.bob_key = privacy_amplify(rec.corrected, key_len, hash_seed);

    const BitVector verification_key = random_bits(rng, 2 * config.verification_len);
    out.verified = verify_key(out.alice_key, out.bob_key, verification_key);
    if (!out.verified) {
        out.abort_reason = "verification";
        return out;
    }
    out.ledger.generated = static_cast<std::int64_t>(key_len);
    return out;
}

struct DirectEncryptionResult {
    std::vector<StateAngle> ciphertext;  // transmitted states, one per qubit
    std::vector<std::size_t> detected_positions;
    BitVector recovered;
    double channel_error_rate = 0.0;
    bool decoded = false;
    bool authenticated = false;
    bool success() const { return decoded && authenticated; }
};

/// Direct encryption: the plaintext (plus idealized parity filler up to n
/// bits) is sent as keyed-basis qubits and decoded by Bob. Decoding succeeds
/// iff R <= (1 - erasure rate)(1 - h2(error rate)) - margin, which reduces to
/// the reconcile() condition on a lossless channel. The message tag uses the
/// same keyed hash as key verification.
inline DirectEncryptionResult run_direct_encryption(const ProtocolConfig& config, std::span<const Bit> plaintext, Rng& rng) {
    config.validate();
    if (config.mode != Mode::direct_encryption) throw std::domain_error("config is not in direct-encryption mode");
    const auto capacity = static_cast<std::size_t>(std::floor(static_cast<double>(config.n) * config.code_rate));
    if (plaintext.size() > capacity) throw std::domain_error("plaintext longer than n*R");

    const RunningKey key = make_running_key(config.keystream, config.n, config.alphabet);
    BitVector codeword(plaintext.begin(), plaintext.end());
    const BitVector filler = random_bits(rng, config.n - plaintext.size());
    codeword.insert(codeword.end(), filler.begin(), filler.end());

    DirectEncryptionResult result;
    result.ciphertext.reserve(config.n);
    auto record = [&](std::size_t, StateAngle s, Rng&) {
        result.ciphertext.push_back(s);
        return s;
    };
    const RawFrame frame = transmit(key, config.alphabet, codeword, config.channel, rng, record);
    result.detected_positions = frame.detected;

    const double erasure = 1.0 - static_cast<double>(frame.detected.size()) / static_cast<double>(config.n);
    result.channel_error_rate =
        frame.alice.empty() ? 0.0
                            : static_cast<double>(hamming_distance(frame.alice, frame.bob)) / static_cast<double>(frame.alice.size());
    result.decoded = config.code_rate <= (1.0 - erasure) * bsc_capacity(result.channel_error_rate) - reconcile_margin;

    if (result.decoded) {
        result.recovered.assign(plaintext.begin(), plaintext.end());
    } else {
        // Best effort: raw keyed decisions, erased positions read as 0.
        BitVector received(config.n, 0);
        for (std::size_t k = 0; k < frame.detected.size(); ++k) received[frame.detected[k]] = frame.bob[k];
        result.recovered.assign(received.begin(), received.begin() + static_cast<std::ptrdiff_t>(plaintext.size()));
    }
    const BitVector auth_key = random_bits(rng, 2 * config.verification_len);
    result.authenticated = verify_key(plaintext, result.recovered, auth_key);
    return result;
}

}  // namespace kcq
