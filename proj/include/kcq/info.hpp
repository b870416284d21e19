#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "kcq/qubit.hpp"

namespace kcq {

/// Error rate at which a fixed-basis eavesdropper on the BB84 alphabet saturates;
/// the code rate must beat the capacity of a BSC with this crossover.
inline constexpr double eve_threshold_error = 0.15;

inline double h2(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("h2: probability outside [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double bsc_capacity(double p) { return 1.0 - h2(p); }

/// Admissible code rates: users can decode (R < upper) and Eve cannot (R > lower).
struct RateWindow {
    double p_c;
    double lower;
    double upper;
    bool nonempty;
};

inline RateWindow rate_window(double p_c) {
    if (!(p_c >= 0.0 && p_c < 0.5)) throw std::domain_error("channel error rate must lie in [0, 0.5)");
    const double lower = bsc_capacity(eve_threshold_error);
    const double upper = bsc_capacity(p_c);
    return {p_c, lower, upper, upper > lower};
}

inline double eve_capacity(const BasisAlphabet& alphabet) {
    return bsc_capacity(optimal_fixed_basis(alphabet).error);
}

/// Point estimate with a 4-sigma normal-approximation half width; the
/// interval bounds are clamped to [0, 1].
struct Estimate {
    double value = 0.0;
    double half_width = 0.0;

    double lower() const { return std::max(0.0, value - half_width); }
    double upper() const { return std::min(1.0, value + half_width); }
    bool covers(double x) const { return x >= lower() && x <= upper(); }
};

inline Estimate binomial_ci(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::domain_error("binomial_ci needs at least one trial");
    if (successes > trials) throw std::domain_error("binomial_ci: successes exceed trials");
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double hw = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return {p, hw};
}

}  // namespace kcq
