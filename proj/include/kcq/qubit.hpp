#pragma once

// Real-plane qubit algebra: keyed-basis encoding, projective measurement,
// 2x2 density matrices, minimum-error discrimination and the error rates of
// an eavesdropper who measures every qubit in one fixed orthogonal basis.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kcq/bits.hpp"
#include "kcq/rng.hpp"

namespace kcq {

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2;
inline constexpr double angle_tolerance = 1e-12;

namespace detail {
inline double wrap(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    // fmod can land a hair below the period for inputs just under a multiple.
    if (r >= period - angle_tolerance * period) r = 0.0;
    return r;
}
}  // namespace detail

/// Pure real qubit state (cos θ, sin θ), θ kept in [0, π).
class StateAngle {
public:
    constexpr StateAngle() = default;
    explicit StateAngle(double theta) : theta_(detail::wrap(theta, pi)) {}

    double theta() const { return theta_; }
    StateAngle orthogonal() const { return StateAngle(theta_ + half_pi); }

    friend bool operator==(const StateAngle&, const StateAngle&) = default;

private:
    double theta_ = 0.0;
};

/// Orthogonal measurement basis {(cos φ, sin φ), (-sin φ, cos φ)}, φ in [0, π/2).
/// Outcome 0 is the vector at φ.
class MeasBasis {
public:
    constexpr MeasBasis() = default;
    explicit MeasBasis(double phi) : phi_(detail::wrap(phi, half_pi)) {}

    double phi() const { return phi_; }
    StateAngle state(Bit outcome) const { return StateAngle(phi_ + (outcome ? half_pi : 0.0)); }

    friend bool operator==(const MeasBasis&, const MeasBasis&) = default;

private:
    double phi_ = 0.0;
};

/// How data bits map onto the two states of basis j.
///
/// `fixed`: bit b sits at angle(j) + b·π/2 in every basis.
/// `alternating`: odd-indexed bases swap the labels, so bit-0 states are
/// spread over the whole half circle and each bit ensemble tends to I/2 as the
/// basis count grows. For m = 2 both labelings are BB84 with one of its two
/// usual bit assignments.
enum class BitLabeling { fixed, alternating };

class BasisAlphabet {
public:
    explicit BasisAlphabet(std::uint32_t m = 2, BitLabeling labeling = BitLabeling::alternating)
        : m_(m), labeling_(labeling) {
        if (m < 2 || (m & (m - 1)) != 0)
            throw std::domain_error("basis count must be a power of two and at least 2");
    }

    std::uint32_t m() const { return m_; }
    BitLabeling labeling() const { return labeling_; }

    unsigned bits_per_selector() const {
        unsigned k = 0;
        while ((1u << k) < m_) ++k;
        return k;
    }

    double basis_angle(std::uint32_t j) const {
        check(j);
        return static_cast<double>(j) * half_pi / static_cast<double>(m_);
    }

    // Bit carried by the vector at basis_angle(j).
    Bit zero_vector_bit(std::uint32_t j) const {
        check(j);
        return labeling_ == BitLabeling::alternating ? static_cast<Bit>(j & 1u) : Bit{0};
    }

    MeasBasis basis(std::uint32_t j) const { return MeasBasis(basis_angle(j)); }

    void check(std::uint32_t j) const {
        if (j >= m_) throw std::domain_error("basis index out of range");
    }

    friend bool operator==(const BasisAlphabet&, const BasisAlphabet&) = default;

private:
    std::uint32_t m_;
    BitLabeling labeling_;
};

inline StateAngle encode_state(Bit bit, std::uint32_t basis_index, const BasisAlphabet& alphabet) {
    const Bit shifted = (bit ^ alphabet.zero_vector_bit(basis_index)) & 1u;
    return StateAngle(alphabet.basis_angle(basis_index) + (shifted ? half_pi : 0.0));
}

/// Keyed decoding of a measurement made in basis `basis_index`.
inline Bit decode_outcome(Bit outcome, std::uint32_t basis_index, const BasisAlphabet& alphabet) {
    return (outcome ^ alphabet.zero_vector_bit(basis_index)) & 1u;
}

inline double outcome_probability(StateAngle state, MeasBasis basis) {
    const double c = std::cos(state.theta() - basis.phi());
    return c * c;
}

inline Bit measure(StateAngle state, MeasBasis basis, Rng& rng) {
    return rng.uniform() < outcome_probability(state, basis) ? Bit{0} : Bit{1};
}

/// 2x2 density matrix, row-major.
class DensityMatrix {
public:
    using complex = std::complex<double>;
    static constexpr double tolerance = 1e-12;

    static DensityMatrix from_entries(const std::array<complex, 4>& e) {
        DensityMatrix rho(e);
        rho.validate();
        return rho;
    }

    static DensityMatrix pure(StateAngle s) {
        const double c = std::cos(s.theta()), d = std::sin(s.theta());
        return DensityMatrix({complex(c * c), complex(c * d), complex(c * d), complex(d * d)});
    }

    static DensityMatrix maximally_mixed() { return DensityMatrix({0.5, 0.0, 0.0, 0.5}); }

    const complex& operator()(int r, int c) const { return e_[static_cast<std::size_t>(2 * r + c)]; }
    const std::array<complex, 4>& entries() const { return e_; }

    // Eigenvalues of a Hermitian 2x2 matrix, ascending.
    static std::pair<double, double> hermitian_eigenvalues(const std::array<complex, 4>& e) {
        const double a = e[0].real(), d = e[3].real();
        const double mean = 0.5 * (a + d);
        const double r = std::hypot(0.5 * (a - d), std::abs(e[1]));
        return {mean - r, mean + r};
    }

    std::pair<double, double> eigenvalues() const { return hermitian_eigenvalues(e_); }

    double max_abs_deviation(const DensityMatrix& other) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(e_[i] - other.e_[i]));
        return worst;
    }

    void validate() const {
        if (std::abs(e_[1] - std::conj(e_[2])) > tolerance || std::abs(e_[0].imag()) > tolerance ||
            std::abs(e_[3].imag()) > tolerance)
            throw std::domain_error("density matrix is not Hermitian");
        if (std::abs(e_[0].real() + e_[3].real() - 1.0) > tolerance)
            throw std::domain_error("density matrix trace is not 1");
        if (eigenvalues().first < -tolerance)
            throw std::domain_error("density matrix is not positive semidefinite");
    }

private:
    explicit DensityMatrix(const std::array<complex, 4>& e) : e_(e) {}
    std::array<complex, 4> e_;
};

struct WeightedState {
    double weight;
    StateAngle state;
};

inline DensityMatrix density_of_mixture(std::span<const WeightedState> components) {
    double total = 0.0;
    std::array<DensityMatrix::complex, 4> acc{};
    for (const auto& [w, s] : components) {
        if (w < 0) throw std::domain_error("mixture weights must be non-negative");
        total += w;
        const auto p = DensityMatrix::pure(s).entries();
        for (std::size_t i = 0; i < 4; ++i) acc[i] += w * p[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::domain_error("mixture weights must sum to 1");
    return DensityMatrix::from_entries(acc);
}

/// Minimum error probability for telling rho0 (prior p0) from rho1.
inline double helstrom_error(const DensityMatrix& rho0, const DensityMatrix& rho1, double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::domain_error("prior must lie in [0, 1]");
    rho0.validate();
    rho1.validate();
    const double p1 = 1.0 - p0;
    std::array<DensityMatrix::complex, 4> diff{};
    for (std::size_t i = 0; i < 4; ++i) diff[i] = p1 * rho1.entries()[i] - p0 * rho0.entries()[i];
    const auto [lo, hi] = DensityMatrix::hermitian_eigenvalues(diff);
    const double error = 0.5 * (1.0 - (std::abs(lo) + std::abs(hi)));
    return std::clamp(error, 0.0, 0.5);
}

// Error of deciding a bit from one projective outcome when the state is off
// the measurement axis by `delta`, decoding toward the nearer axis.
inline double misalignment_error(double delta) {
    const double s = std::sin(delta), c = std::cos(delta);
    return std::min(s * s, c * c);
}

/// Eve's average bit error when she measures every qubit in basis phi and
/// is handed the running key afterwards. Independent of bit labeling.
inline double eve_error_key_granted(MeasBasis phi, const BasisAlphabet& alphabet) {
    double sum = 0.0;
    for (std::uint32_t j = 0; j < alphabet.m(); ++j) sum += misalignment_error(alphabet.basis_angle(j) - phi.phi());
    return sum / alphabet.m();
}

struct FixedBasisOptimum {
    MeasBasis basis;
    double error;
};

/// Minimizes eve_error_key_granted over φ by grid scan and slope bisection.
/// The objective has period (π/2)/m, so the scan covers one period; among
/// co-minimizers the smallest φ is returned.
inline FixedBasisOptimum optimal_fixed_basis(const BasisAlphabet& alphabet, std::size_t grid_points = 4096) {
    grid_points = std::max<std::size_t>(grid_points, 4096);
    const double period = half_pi / alphabet.m();
    const double step = period / static_cast<double>(grid_points);
    auto objective = [&](double phi) {
        double sum = 0.0;
        for (std::uint32_t j = 0; j < alphabet.m(); ++j) sum += misalignment_error(alphabet.basis_angle(j) - phi);
        return sum / alphabet.m();
    };

    std::vector<double> values(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) values[i] = objective(static_cast<double>(i) * step);
    const double lowest = *std::min_element(values.begin(), values.end());
    std::size_t best = 0;
    while (values[best] > lowest + 1e-12) ++best;

    // Piecewise sinusoidal, so the slope changes sign at smooth minima and kinks alike.
    auto slope = [&](double phi) {
        double sum = 0.0;
        for (std::uint32_t j = 0; j < alphabet.m(); ++j) {
            const double d = alphabet.basis_angle(j) - phi;
            const double s = std::sin(d), c = std::cos(d);
            sum += (s * s <= c * c ? -1.0 : 1.0) * std::sin(2 * d);
        }
        return sum;
    };
    double a = static_cast<double>(best) * step - step;
    double b = static_cast<double>(best) * step + step;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        if (slope(mid) < 0.0) a = mid;
        else b = mid;
    }
    double phi = 0.5 * (a + b);
    if (std::abs(phi) < 1e-9) phi = 0.0;
    phi = detail::wrap(phi, period);
    return {MeasBasis(phi), objective(phi)};
}

/// Density matrix of bit `bit` averaged uniformly over every basis of the alphabet.
inline DensityMatrix bit_ensemble(Bit bit, const BasisAlphabet& alphabet) {
    std::vector<WeightedState> parts;
    parts.reserve(alphabet.m());
    const double w = 1.0 / alphabet.m();
    for (std::uint32_t j = 0; j < alphabet.m(); ++j) parts.push_back({w, encode_state(bit, j, alphabet)});
    return density_of_mixture(parts);
}

/// Eve's best bit error when the running key is never revealed.
inline double keyless_error(const BasisAlphabet& alphabet) {
    return helstrom_error(bit_ensemble(0, alphabet), bit_ensemble(1, alphabet), 0.5);
}

}  // namespace kcq
