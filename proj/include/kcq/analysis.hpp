#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcq/info.hpp"
#include "kcq/protocol.hpp"
#include "kcq/qubit.hpp"

namespace kcq {

struct SweepRow {
    std::uint32_t m;
    double e_key_granted;
    std::optional<double> e_keyless;
    double phi_star;
};

inline constexpr std::uint32_t max_keyless_sweep_m = 1u << 16;

inline std::vector<SweepRow> sweep_m(std::span<const std::uint32_t> m_values, bool include_keyless = true,
                                     BitLabeling labeling = BitLabeling::alternating) {
    std::vector<SweepRow> rows;
    rows.reserve(m_values.size());
    for (std::uint32_t m : m_values) {
        const BasisAlphabet alphabet(m, labeling);
        if (include_keyless && m > max_keyless_sweep_m) throw std::domain_error("keyless sweep limited to m <= 2^16");
        const auto opt = optimal_fixed_basis(alphabet);
        SweepRow row{m, opt.error, std::nullopt, opt.basis.phi()};
        if (include_keyless) row.e_keyless = keyless_error(alphabet);
        rows.push_back(row);
    }
    return rows;
}

/// %.9g, the precision used for every number written to disk.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "m,e_key_granted,e_keyless,phi_star\n";
    for (const auto& r : rows) {
        os << r.m << ',' << format_number(r.e_key_granted) << ','
           << (r.e_keyless ? format_number(*r.e_keyless) : std::string{}) << ',' << format_number(r.phi_star) << '\n';
    }
}

inline double net_key_rate(const ProtocolOutcome& outcome, std::size_t n) {
    if (n == 0) throw std::domain_error("net_key_rate needs n >= 1");
    return static_cast<double>(outcome.ledger.net()) / static_cast<double>(n);
}

}  // namespace kcq
