#pragma once

// Eavesdropper strategies with analytic predictions and Monte Carlo estimates.
//
// Every Monte Carlo trial draws a fresh secret key, fresh data and runs one
// n-qubit transmission with Eve in the line; trial i uses Rng(seed + i).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kcq/bits.hpp"
#include "kcq/info.hpp"
#include "kcq/keystream.hpp"
#include "kcq/parallel.hpp"
#include "kcq/protocol.hpp"
#include "kcq/qubit.hpp"

namespace kcq {

struct AttackStrategy {
    enum class Kind { intercept_resend_random, fixed_basis, key_guess, block_guess };
    Kind kind = Kind::intercept_resend_random;
    double phi = 0.0;             // fixed_basis
    std::size_t k_blocks = 1;     // block_guess
    double fraction = 1.0;        // intercept_resend_random: share of qubits attacked

    static AttackStrategy intercept(double fraction = 1.0) {
        AttackStrategy s;
        s.fraction = fraction;
        s.validate();
        return s;
    }
    static AttackStrategy fixed(double phi) {
        AttackStrategy s;
        s.kind = Kind::fixed_basis;
        s.phi = phi;
        s.validate();
        return s;
    }
    static AttackStrategy breidbart() { return fixed(pi / 8); }
    static AttackStrategy key_guess() {
        AttackStrategy s;
        s.kind = Kind::key_guess;
        return s;
    }
    static AttackStrategy block_guess(std::size_t k) {
        AttackStrategy s;
        s.kind = Kind::block_guess;
        s.k_blocks = k;
        s.validate();
        return s;
    }

    void validate() const {
        if (kind == Kind::fixed_basis && !(phi >= 0.0 && phi < half_pi))
            throw std::domain_error("fixed-basis angle must lie in [0, pi/2)");
        if (kind == Kind::block_guess && k_blocks < 1) throw std::domain_error("block guess needs k >= 1");
        if (kind == Kind::intercept_resend_random && !(fraction >= 0.0 && fraction <= 1.0))
            throw std::domain_error("attack fraction must lie in [0, 1]");
    }

    /// Grammar: intercept[:fraction] | fixed:<phi> | breidbart | keyguess | blockguess:<k>
    static AttackStrategy parse(std::string_view text) {
        const auto colon = text.find(':');
        const std::string_view head = text.substr(0, colon);
        const std::optional<std::string_view> arg =
            colon == std::string_view::npos ? std::nullopt : std::optional(text.substr(colon + 1));
        auto number = [&](auto& out) {
            if (!arg || arg->empty()) throw std::invalid_argument("strategy '" + std::string(head) + "' needs an argument");
            const auto [ptr, ec] = std::from_chars(arg->data(), arg->data() + arg->size(), out);
            if (ec != std::errc{} || ptr != arg->data() + arg->size())
                throw std::invalid_argument("bad strategy argument '" + std::string(*arg) + "'");
        };
        auto no_arg = [&] {
            if (arg) throw std::invalid_argument("strategy '" + std::string(head) + "' takes no argument");
        };
        if (head == "intercept") {
            double f = 1.0;
            if (arg) number(f);
            return intercept(f);
        }
        if (head == "fixed") {
            double phi = 0.0;
            number(phi);
            return fixed(phi);
        }
        if (head == "breidbart") {
            no_arg();
            return breidbart();
        }
        if (head == "keyguess") {
            no_arg();
            return key_guess();
        }
        if (head == "blockguess") {
            std::size_t k = 0;
            number(k);
            return block_guess(k);
        }
        throw std::invalid_argument("unknown attack strategy '" + std::string(text) + "'");
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::intercept_resend_random:
                return fraction == 1.0 ? "intercept" : "intercept:" + std::to_string(fraction);
            case Kind::fixed_basis: return "fixed:" + std::to_string(phi);
            case Kind::key_guess: return "keyguess";
            case Kind::block_guess: return "blockguess:" + std::to_string(k_blocks);
        }
        return "?";
    }
};

struct AttackCounts {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t eve_errors = 0;
    std::uint64_t eve_bits = 0;     // positions Eve measured
    std::uint64_t user_errors = 0;
    std::uint64_t user_bits = 0;    // positions entering the induced-QBER figure
    std::uint64_t success_errors = 0;  // user errors on attacked positions in successful trials

    AttackCounts& operator+=(const AttackCounts& o) {
        trials += o.trials;
        successes += o.successes;
        eve_errors += o.eve_errors;
        eve_bits += o.eve_bits;
        user_errors += o.user_errors;
        user_bits += o.user_bits;
        success_errors += o.success_errors;
        return *this;
    }
};

struct AttackReport {
    std::string strategy;
    AttackCounts counts;
    Estimate eve_bit_error;
    std::optional<double> eve_bit_error_analytic;
    Estimate induced_qber;
    std::optional<double> induced_qber_analytic;
    std::optional<Estimate> success_probability;
    std::optional<double> success_probability_analytic;
    std::optional<double> info_fraction;
};

/// Eve's decision for an outcome of basis `phi` once she knows the keyed basis j:
/// read outcome 0 as whichever bit's state lies nearer the basis vector at phi.
inline Bit eve_decode(Bit outcome, double phi, std::uint32_t j, const BasisAlphabet& alphabet) {
    const double c = std::cos(encode_state(0, j, alphabet).theta() - phi);
    return c * c >= 0.5 ? outcome : static_cast<Bit>(outcome ^ 1u);
}

/// Bob's error rate when a qubit he measures in basis theta was re-prepared
/// by a measurement in basis phi: 2 sin^2 cos^2 = sin^2(2 delta) / 2.
inline double resend_error(double delta) {
    const double s = std::sin(2.0 * delta);
    return 0.5 * s * s;
}

inline double through_channel(double error, const ChannelModel& channel) {
    const double p = channel.flip_probability;
    return error * (1.0 - p) + (1.0 - error) * p;
}

namespace detail {

inline SeedKey random_nonzero_seed(std::size_t bits, Rng& rng) {
    BitVector b = random_bits(rng, bits);
    while (is_zero(b)) b = random_bits(rng, bits);
    return SeedKey(std::move(b));
}

// Fresh secret key of the configured shape.
inline RunningKey random_running_key(const ProtocolConfig& config, Rng& rng) {
    KeystreamConfig ks = config.keystream;
    ks.seed = random_nonzero_seed(ks.seed.size(), rng);
    return make_running_key(ks, config.n, config.alphabet);
}

inline Estimate rate(std::uint64_t errors, std::uint64_t bits) {
    return bits == 0 ? Estimate{} : binomial_ci(errors, bits);
}

inline AttackReport finish(const AttackStrategy& s, const AttackCounts& c) {
    AttackReport r;
    r.strategy = s.to_string();
    r.counts = c;
    r.eve_bit_error = rate(c.eve_errors, c.eve_bits);
    r.induced_qber = rate(c.user_errors, c.user_bits);
    return r;
}

}  // namespace detail

inline AttackReport attack_intercept_resend(const ProtocolConfig& config, double fraction, std::uint64_t trials,
                                            std::uint64_t seed, unsigned threads = 1) {
    config.validate();
    const AttackStrategy strategy = AttackStrategy::intercept(fraction);
    const BasisAlphabet& alphabet = config.alphabet;
    const auto counts = run_trials<AttackCounts>(trials, threads, seed, [&](std::uint64_t, Rng& rng, AttackCounts& acc) {
        const RunningKey key = detail::random_running_key(config, rng);
        const BitVector data = random_bits(rng, config.n);
        auto tap = [&](std::size_t i, StateAngle s, Rng& r) {
            if (!(r.uniform() < fraction)) return s;
            const auto eve_basis = static_cast<std::uint32_t>(r.below(alphabet.m()));
            const double phi = alphabet.basis_angle(eve_basis);
            const Bit outcome = measure(s, MeasBasis(phi), r);
            acc.eve_errors += eve_decode(outcome, phi, key[i], alphabet) != data[i];
            ++acc.eve_bits;
            return MeasBasis(phi).state(outcome);
        };
        const RawFrame frame = transmit(key, alphabet, data, config.channel, rng, tap);
        acc.user_errors += hamming_distance(frame.alice, frame.bob);
        acc.user_bits += frame.alice.size();
        ++acc.trials;
    });

    AttackReport report = detail::finish(strategy, counts);
    double eve = 0.0, induced = 0.0;
    for (std::uint32_t a = 0; a < alphabet.m(); ++a)
        for (std::uint32_t j = 0; j < alphabet.m(); ++j) {
            const double delta = alphabet.basis_angle(j) - alphabet.basis_angle(a);
            eve += misalignment_error(delta);
            induced += resend_error(delta);
        }
    const double cases = static_cast<double>(alphabet.m()) * alphabet.m();
    report.eve_bit_error_analytic = eve / cases;
    report.induced_qber_analytic = through_channel(fraction * induced / cases, config.channel);
    return report;
}

/// Eve measures every qubit in basis phi, keeps the outcome and re-sends the
/// projected state; she is given the running key afterwards.
inline AttackReport attack_fixed_basis(const ProtocolConfig& config, MeasBasis phi, std::uint64_t trials,
                                       std::uint64_t seed, unsigned threads = 1) {
    config.validate();
    const AttackStrategy strategy = AttackStrategy::fixed(phi.phi());
    const BasisAlphabet& alphabet = config.alphabet;
    const auto counts = run_trials<AttackCounts>(trials, threads, seed, [&](std::uint64_t, Rng& rng, AttackCounts& acc) {
        const RunningKey key = detail::random_running_key(config, rng);
        const BitVector data = random_bits(rng, config.n);
        auto tap = [&](std::size_t i, StateAngle s, Rng& r) {
            const Bit outcome = measure(s, phi, r);
            acc.eve_errors += eve_decode(outcome, phi.phi(), key[i], alphabet) != data[i];
            ++acc.eve_bits;
            return phi.state(outcome);
        };
        const RawFrame frame = transmit(key, alphabet, data, config.channel, rng, tap);
        acc.user_errors += hamming_distance(frame.alice, frame.bob);
        acc.user_bits += frame.alice.size();
        ++acc.trials;
    });

    AttackReport report = detail::finish(strategy, counts);
    double induced = 0.0;
    for (std::uint32_t j = 0; j < alphabet.m(); ++j) induced += resend_error(alphabet.basis_angle(j) - phi.phi());
    report.eve_bit_error_analytic = eve_error_key_granted(phi, alphabet);
    report.induced_qber_analytic = through_channel(induced / alphabet.m(), config.channel);
    return report;
}

/// Eve guesses the whole LFSR seed up front, measures and re-sends in the
/// guessed bases. A correct guess gives her every bit and leaves no trace.
inline AttackReport attack_key_guess(const ProtocolConfig& config, std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads = 1) {
    config.validate();
    if (config.keystream.kind != KeystreamConfig::Kind::lfsr)
        throw std::domain_error("key-guess attack needs an LFSR keystream");
    const BasisAlphabet& alphabet = config.alphabet;
    const std::size_t seed_bits = config.keystream.seed.size();
    const auto counts = run_trials<AttackCounts>(trials, threads, seed, [&](std::uint64_t, Rng& rng, AttackCounts& acc) {
        const SeedKey actual = detail::random_nonzero_seed(seed_bits, rng);
        const BitVector guess = random_bits(rng, seed_bits);
        const bool success = guess == actual.bits();

        const RunningKey key =
            make_running_key(KeystreamConfig::make_lfsr(*config.keystream.lfsr, actual), config.n, alphabet);
        // The zero state is a fixed point of the register: an all-zero guess selects basis 0 throughout.
        const RunningKey guessed = is_zero(guess)
                                       ? RunningKey(std::vector<std::uint32_t>(config.n, 0), alphabet.m())
                                       : make_running_key(KeystreamConfig::make_lfsr(*config.keystream.lfsr, SeedKey(guess)),
                                                          config.n, alphabet);
        const BitVector data = random_bits(rng, config.n);
        auto tap = [&](std::size_t i, StateAngle s, Rng& r) {
            const MeasBasis basis = alphabet.basis(guessed[i]);
            const Bit outcome = measure(s, basis, r);
            acc.eve_errors += decode_outcome(outcome, guessed[i], alphabet) != data[i];
            ++acc.eve_bits;
            return basis.state(outcome);
        };
        const RawFrame frame = transmit(key, alphabet, data, config.channel, rng, tap);
        const std::size_t errors = hamming_distance(frame.alice, frame.bob);
        acc.user_errors += errors;
        acc.user_bits += frame.alice.size();
        if (success) {
            ++acc.successes;
            acc.success_errors += errors;
        }
        ++acc.trials;
    });

    AttackReport report = detail::finish(AttackStrategy::key_guess(), counts);
    report.success_probability = binomial_ci(counts.successes, counts.trials);
    report.success_probability_analytic = std::ldexp(1.0, -static_cast<int>(seed_bits));
    report.info_fraction = 1.0;
    return report;
}

/// Attack on the repetition layout: Eve guesses the basis bit of the first
/// k blocks and intercept/re-sends only those qubits. Rates are reported over
/// the attacked positions; the channel is noiseless.
inline AttackReport attack_block_guess(std::size_t n, std::size_t key_bits, std::size_t k_blocks, std::uint64_t trials,
                                       std::uint64_t seed, unsigned threads = 1) {
    const AttackStrategy strategy = AttackStrategy::block_guess(k_blocks);
    if (key_bits < 1 || n < 1) throw std::domain_error("block guess needs n >= 1 and a non-empty key");
    if (k_blocks > key_bits) throw std::domain_error("cannot attack more blocks than key bits");
    const BasisAlphabet alphabet(2);
    const std::size_t block = repetition_block_length(key_bits, n);
    const std::size_t attacked = std::min(n, k_blocks * block);
    const auto counts = run_trials<AttackCounts>(trials, threads, seed, [&](std::uint64_t, Rng& rng, AttackCounts& acc) {
        const SeedKey secret(random_bits(rng, key_bits));
        const RunningKey key = repetition_running_key(secret, n);
        const BitVector guess = random_bits(rng, k_blocks);
        bool success = true;
        for (std::size_t b = 0; b < k_blocks; ++b) success = success && guess[b] == secret.bits()[b];

        const BitVector data = random_bits(rng, n);
        auto tap = [&](std::size_t i, StateAngle s, Rng& r) {
            if (i >= attacked) return s;
            const auto j = static_cast<std::uint32_t>(guess[i / block]);
            const MeasBasis basis = alphabet.basis(j);
            const Bit outcome = measure(s, basis, r);
            acc.eve_errors += decode_outcome(outcome, j, alphabet) != data[i];
            ++acc.eve_bits;
            return basis.state(outcome);
        };
        const RawFrame frame = transmit(key, alphabet, data, ChannelModel{}, rng, tap);
        std::size_t errors = 0;
        for (std::size_t k = 0; k < frame.detected.size() && frame.detected[k] < attacked; ++k)
            errors += frame.alice[k] != frame.bob[k];
        acc.user_errors += errors;
        acc.user_bits += attacked;
        if (success) {
            ++acc.successes;
            acc.success_errors += errors;
        }
        ++acc.trials;
    });

    AttackReport report = detail::finish(strategy, counts);
    report.eve_bit_error_analytic = 0.25;  // wrong block guess with probability 1/2, then coin-flip bits
    report.induced_qber_analytic = 0.25;
    report.success_probability = binomial_ci(counts.successes, counts.trials);
    report.success_probability_analytic = std::ldexp(1.0, -static_cast<int>(k_blocks));
    report.info_fraction = static_cast<double>(k_blocks) / static_cast<double>(key_bits);
    return report;
}

/// Dispatches on the strategy. Block guessing takes n from the config and the
/// repetition key length from the configured seed length.
inline AttackReport run_attack(const AttackStrategy& strategy, const ProtocolConfig& config, std::uint64_t trials,
                               std::uint64_t seed, unsigned threads = 1) {
    strategy.validate();
    switch (strategy.kind) {
        case AttackStrategy::Kind::intercept_resend_random:
            return attack_intercept_resend(config, strategy.fraction, trials, seed, threads);
        case AttackStrategy::Kind::fixed_basis:
            return attack_fixed_basis(config, MeasBasis(strategy.phi), trials, seed, threads);
        case AttackStrategy::Kind::key_guess: return attack_key_guess(config, trials, seed, threads);
        case AttackStrategy::Kind::block_guess:
            return attack_block_guess(config.n, config.keystream.seed.size(), strategy.k_blocks, trials, seed, threads);
    }
    throw std::logic_error("unhandled attack kind");
}

/// Ensemble state seen by a ciphertext-only attacker at each position: the two
/// data states of the keyed basis weighted by the data prior.
inline std::vector<DensityMatrix> ciphertext_only_state(const RunningKey& key, const BasisAlphabet& alphabet,
                                                        double p_zero = 0.5) {
    if (key.m() != alphabet.m()) throw std::domain_error("running key and alphabet disagree on m");
    std::vector<DensityMatrix> out;
    out.reserve(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
        const WeightedState parts[] = {{p_zero, encode_state(0, key[i], alphabet)},
                                       {1.0 - p_zero, encode_state(1, key[i], alphabet)}};
        out.push_back(density_of_mixture(parts));
    }
    return out;
}

}  // namespace kcq
