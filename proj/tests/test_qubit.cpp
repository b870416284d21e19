#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kcq/qubit.hpp"
#include "oracles.hpp"

using namespace kcq;

namespace {
const double breidbart_error = (2.0 - std::sqrt(2.0)) / 4.0;

BasisAlphabet fixed_alphabet(std::uint32_t m) { return BasisAlphabet(m, BitLabeling::fixed); }
}  // namespace

TEST(Encode, FixedLabelingFollowsAngleFormula) {
    EXPECT_NEAR(encode_state(0, 0, fixed_alphabet(2)).theta(), 0.0, 1e-12);
    EXPECT_NEAR(encode_state(0, 1, fixed_alphabet(2)).theta(), pi / 4, 1e-12);
    EXPECT_NEAR(encode_state(1, 1, fixed_alphabet(2)).theta(), 3 * pi / 4, 1e-12);
    EXPECT_NEAR(encode_state(1, 3, fixed_alphabet(4)).theta(), 7 * pi / 8, 1e-12);
}

TEST(Encode, AlternatingLabelingSwapsOddBases) {
    const BasisAlphabet a(4);
    EXPECT_NEAR(encode_state(0, 0, a).theta(), 0.0, 1e-12);
    EXPECT_NEAR(encode_state(1, 0, a).theta(), pi / 2, 1e-12);
    EXPECT_NEAR(encode_state(0, 1, a).theta(), pi / 8 + pi / 2, 1e-12);
    EXPECT_NEAR(encode_state(1, 3, a).theta(), 3 * pi / 8, 1e-12);
    // Both labelings use the same state set per basis.
    for (std::uint32_t j = 0; j < 4; ++j) {
        const double x = encode_state(0, j, a).theta(), y = encode_state(1, j, a).theta();
        const double u = encode_state(0, j, fixed_alphabet(4)).theta(), v = encode_state(1, j, fixed_alphabet(4)).theta();
        EXPECT_NEAR(std::min(x, y), std::min(u, v), 1e-12);
        EXPECT_NEAR(std::max(x, y), std::max(u, v), 1e-12);
    }
}

TEST(Encode, RejectsBadBasisIndexAndAlphabet) {
    EXPECT_THROW(encode_state(0, 2, BasisAlphabet(2)), std::domain_error);
    EXPECT_THROW(BasisAlphabet(3), std::domain_error);
    EXPECT_THROW(BasisAlphabet(1), std::domain_error);
}

TEST(Encode, KeyedDecodingRecoversEveryBit) {
    for (std::uint32_t m : {2u, 4u, 16u})
        for (auto lab : {BitLabeling::fixed, BitLabeling::alternating}) {
            const BasisAlphabet a(m, lab);
            for (std::uint32_t j = 0; j < m; ++j)
                for (Bit b : {Bit{0}, Bit{1}}) {
                    const StateAngle s = encode_state(b, j, a);
                    const double p0 = outcome_probability(s, a.basis(j));
                    const Bit outcome = p0 > 0.5 ? 0 : 1;
                    EXPECT_NEAR(std::max(p0, 1 - p0), 1.0, 1e-12);
                    EXPECT_EQ(decode_outcome(outcome, j, a), b);
                }
        }
}

TEST(Angles, NormalizeIntoCanonicalRange) {
    EXPECT_NEAR(StateAngle(pi + 0.25).theta(), 0.25, 1e-12);
    EXPECT_NEAR(StateAngle(-0.25).theta(), pi - 0.25, 1e-12);
    EXPECT_NEAR(MeasBasis(half_pi + 0.1).phi(), 0.1, 1e-12);
    EXPECT_EQ(StateAngle(pi).theta(), 0.0);
}

TEST(Measure, ExactProbabilities) {
    EXPECT_NEAR(outcome_probability(StateAngle(0), MeasBasis(0)), 1.0, 1e-12);
    EXPECT_NEAR(outcome_probability(StateAngle(pi / 4), MeasBasis(0)), 0.5, 1e-12);
    EXPECT_NEAR(outcome_probability(StateAngle(pi / 8), MeasBasis(0)), 0.8535533905932737, 1e-12);
}

TEST(Measure, ComplementaryOutcomesSumToOne) {
    for (int i = 0; i < 200; ++i)
        for (int k = 0; k < 50; ++k) {
            const StateAngle s(i * 0.0311);
            const MeasBasis b(k * 0.0287);
            const double p = outcome_probability(s, b);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            EXPECT_NEAR(p + outcome_probability(s.orthogonal(), b), 1.0, 1e-12);
        }
}

TEST(Measure, FrequenciesConvergeOnGrid) {
    Rng rng(7);
    const int n = 100000;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const StateAngle s(i * pi / 4 + 0.1);
            const MeasBasis b(k * pi / 8);
            const double p = outcome_probability(s, b);
            int zeros = 0;
            for (int t = 0; t < n; ++t) zeros += measure(s, b, rng) == 0;
            const double sigma = std::sqrt(p * (1 - p) / n);
            EXPECT_LE(std::abs(zeros / double(n) - p), 4 * sigma + 1e-12) << "theta=" << s.theta() << " phi=" << b.phi();
        }
}

TEST(Measure, PiOverEightAtOneMillion) {
    Rng rng(99);
    const int n = 1000000;
    int zeros = 0;
    for (int t = 0; t < n; ++t) zeros += measure(StateAngle(pi / 8), MeasBasis(0), rng) == 0;
    const double p = std::pow(std::cos(pi / 8), 2);
    EXPECT_LE(std::abs(zeros / double(n) - p), 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Measure, DeterministicForSeed) {
    Rng a(5), b(5);
    for (int t = 0; t < 1000; ++t) EXPECT_EQ(measure(StateAngle(0.7), MeasBasis(0.2), a), measure(StateAngle(0.7), MeasBasis(0.2), b));
}

TEST(Density, MixtureExamples) {
    const std::vector<WeightedState> pure{{1.0, StateAngle(0)}};
    const auto r = density_of_mixture(pure);
    EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-12);
    EXPECT_NEAR(r(1, 1).real(), 0.0, 1e-12);

    const std::vector<WeightedState> two{{0.5, StateAngle(0)}, {0.5, StateAngle(pi / 2)}};
    EXPECT_LT(density_of_mixture(two).max_abs_deviation(DensityMatrix::maximally_mixed()), 1e-12);

    const std::vector<WeightedState> bb84{
        {0.25, StateAngle(0)}, {0.25, StateAngle(pi / 4)}, {0.25, StateAngle(pi / 2)}, {0.25, StateAngle(3 * pi / 4)}};
    EXPECT_LT(density_of_mixture(bb84).max_abs_deviation(DensityMatrix::maximally_mixed()), 1e-12);
}

TEST(Density, RejectsBadWeightsAndMatrices) {
    const std::vector<WeightedState> short_sum{{0.5, StateAngle(0)}, {0.4, StateAngle(1)}};
    EXPECT_THROW(density_of_mixture(short_sum), std::domain_error);
    const std::vector<WeightedState> negative{{1.5, StateAngle(0)}, {-0.5, StateAngle(1)}};
    EXPECT_THROW(density_of_mixture(negative), std::domain_error);
    using C = std::complex<double>;
    EXPECT_THROW(DensityMatrix::from_entries({C(0.6), C(0.0), C(0.0), C(0.6)}), std::domain_error);
    EXPECT_THROW(DensityMatrix::from_entries({C(0.5), C(0.1), C(0.2), C(0.5)}), std::domain_error);
    EXPECT_THROW(DensityMatrix::from_entries({C(1.2), C(0.0), C(0.0), C(-0.2)}), std::domain_error);
}

TEST(Density, UniformAlphabetMixtureIsMaximallyMixed) {
    for (std::uint32_t m = 2; m <= 1024; m *= 2) {
        std::vector<WeightedState> parts;
        for (std::uint32_t j = 0; j < m; ++j) {
            const double t = j * pi / (2.0 * m);
            parts.push_back({0.5 / m, StateAngle(t)});
            parts.push_back({0.5 / m, StateAngle(t + pi / 2)});
        }
        const auto rho = density_of_mixture(parts);
        EXPECT_LT(rho.max_abs_deviation(DensityMatrix::maximally_mixed()), 1e-12) << "m=" << m;
    }
}

TEST(Helstrom, TrivialCases) {
    const auto mixed = DensityMatrix::maximally_mixed();
    EXPECT_NEAR(helstrom_error(mixed, mixed, 0.5), 0.5, 1e-12);
    EXPECT_NEAR(helstrom_error(DensityMatrix::pure(StateAngle(0)), DensityMatrix::pure(StateAngle(pi / 2)), 0.5), 0.0, 1e-12);
    EXPECT_THROW(helstrom_error(mixed, mixed, 1.5), std::domain_error);
}

TEST(Helstrom, BB84HalfMixturesMatchScanOracle) {
    const std::vector<WeightedState> zero{{0.5, StateAngle(0)}, {0.5, StateAngle(pi / 4)}};
    const std::vector<WeightedState> one{{0.5, StateAngle(pi / 2)}, {0.5, StateAngle(3 * pi / 4)}};
    const double e = helstrom_error(density_of_mixture(zero), density_of_mixture(one), 0.5);
    const double scanned = oracle::scan_discrimination_error(oracle::ensemble(0, 2, false), oracle::ensemble(1, 2, false), 0.5);
    EXPECT_NEAR(scanned, breidbart_error, 1e-9);
    EXPECT_NEAR(e, scanned, 1e-9);
}

TEST(Helstrom, SymmetricAndBoundedOverRandomPairs) {
    Rng rng(11);
    for (int t = 0; t < 300; ++t) {
        const std::vector<WeightedState> a{{0.3, StateAngle(rng.uniform() * pi)}, {0.7, StateAngle(rng.uniform() * pi)}};
        const std::vector<WeightedState> b{{0.6, StateAngle(rng.uniform() * pi)}, {0.4, StateAngle(rng.uniform() * pi)}};
        const auto ra = density_of_mixture(a), rb = density_of_mixture(b);
        const double p0 = rng.uniform();
        const double e = helstrom_error(ra, rb, p0);
        EXPECT_NEAR(e, helstrom_error(rb, ra, 1 - p0), 1e-12);
        EXPECT_LE(e, std::min(p0, 1 - p0) + 1e-12);
        EXPECT_GE(e, 0.0);
        oracle::Mat ma{ra(0, 0).real(), ra(0, 1).real(), ra(1, 0).real(), ra(1, 1).real()};
        oracle::Mat mb{rb(0, 0).real(), rb(0, 1).real(), rb(1, 0).real(), rb(1, 1).real()};
        EXPECT_NEAR(e, oracle::scan_discrimination_error(ma, mb, p0, 20000), 1e-8);
    }
}

TEST(EveKeyGranted, Examples) {
    const BasisAlphabet a(2);
    EXPECT_NEAR(eve_error_key_granted(MeasBasis(0), a), 0.25, 1e-12);
    EXPECT_NEAR(eve_error_key_granted(MeasBasis(pi / 8), a), breidbart_error, 1e-12);
    EXPECT_NEAR(eve_error_key_granted(MeasBasis(pi / 8 + pi / 4), a), breidbart_error, 1e-12);
}

TEST(EveKeyGranted, MatchesMaximumLikelihoodOracle) {
    for (std::uint32_t m : {2u, 4u, 8u, 32u})
        for (int i = 0; i < 97; ++i) {
            const double phi = i * (pi / 2) / 97;
            EXPECT_NEAR(eve_error_key_granted(MeasBasis(phi), BasisAlphabet(m)), oracle::ml_eve_error(phi, m), 1e-12);
        }
}

TEST(EveKeyGranted, PeriodicAndCappedAtQuarter) {
    for (std::uint32_t m = 2; m <= 256; m *= 2) {
        const BasisAlphabet a(m);
        const double period = (pi / 2) / m;
        for (int i = 0; i < 40; ++i) {
            const double phi = 0.013 * i;
            EXPECT_NEAR(eve_error_key_granted(MeasBasis(phi), a), eve_error_key_granted(MeasBasis(phi + period), a), 1e-12);
            EXPECT_NEAR(eve_error_key_granted(MeasBasis(phi), a), eve_error_key_granted(MeasBasis(phi + pi / 2), a), 1e-12);
        }
        EXPECT_LE(optimal_fixed_basis(a).error, 0.25);
    }
}

TEST(OptimalFixedBasis, FindsBreidbartForTwoBases) {
    const auto opt = optimal_fixed_basis(BasisAlphabet(2));
    EXPECT_NEAR(opt.error, breidbart_error, 1e-9);
    EXPECT_NEAR(opt.basis.phi(), pi / 8, 1e-9);
}

TEST(OptimalFixedBasis, FourBasesAgreeWithBruteForceAndClosedForm) {
    double argmin = 0;
    const double brute = oracle::brute_force_min_eve_error(4, 1000000, &argmin);
    const double centered = 0.25 * (2 - std::cos(pi / 8) - std::cos(3 * pi / 8));
    const auto opt = optimal_fixed_basis(BasisAlphabet(4));
    EXPECT_NEAR(brute, centered, 1e-9);
    EXPECT_NEAR(opt.error, brute, 1e-9);
    EXPECT_NEAR(opt.basis.phi(), pi / 16, 1e-8);
    EXPECT_NEAR(opt.error, 0.17335925878090586, 1e-9);
}

TEST(OptimalFixedBasis, NonDecreasingInBasisCount) {
    double previous = 0;
    for (std::uint32_t m = 2; m <= 1024; m *= 2) {
        const double e = optimal_fixed_basis(BasisAlphabet(m)).error;
        EXPECT_GE(e, previous - 1e-12) << "m=" << m;
        previous = e;
    }
}

TEST(OptimalFixedBasis, LargeAlphabetApproachesIntegralLimit) {
    const double e = optimal_fixed_basis(BasisAlphabet(1u << 12)).error;
    EXPECT_NEAR(e, 0.5 - 1 / pi, 2e-3);
}

TEST(Keyless, TwoBasesCoincideWithKeyGranted) {
    for (auto lab : {BitLabeling::fixed, BitLabeling::alternating}) {
        const BasisAlphabet a(2, lab);
        EXPECT_NEAR(keyless_error(a), breidbart_error, 1e-12);
        EXPECT_NEAR(keyless_error(a), optimal_fixed_basis(a).error, 1e-9);
    }
}

TEST(Keyless, MatchesScanOracleForBothLabelings) {
    for (std::uint32_t m : {4u, 8u, 64u})
        for (bool alt : {false, true}) {
            const BasisAlphabet a(m, alt ? BitLabeling::alternating : BitLabeling::fixed);
            const double scanned = oracle::scan_discrimination_error(oracle::ensemble(0, m, alt), oracle::ensemble(1, m, alt), 0.5);
            EXPECT_NEAR(keyless_error(a), scanned, 1e-9) << "m=" << m << " alt=" << alt;
        }
    EXPECT_NEAR(keyless_error(BasisAlphabet(4)), 0.3647009749634508, 1e-9);
    EXPECT_NEAR(keyless_error(fixed_alphabet(4)), 0.17335925878090586, 1e-9);
}

TEST(Keyless, AlternatingLabelingReachesOneHalf) {
    EXPECT_GE(keyless_error(BasisAlphabet(1u << 16)), 0.499);
    double previous = 0;
    for (std::uint32_t m = 2; m <= 4096; m *= 2) {
        const double e = keyless_error(BasisAlphabet(m));
        EXPECT_GE(e, previous - 1e-12);
        EXPECT_LE(e, 0.5);
        previous = e;
    }
}

TEST(Keyless, FixedLabelingSaturatesBelowOneHalf) {
    // Bit-0 states then fill only half of the circle.
    EXPECT_NEAR(keyless_error(fixed_alphabet(1u << 16)), 0.5 - 1 / pi, 1e-6);
}
