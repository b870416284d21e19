#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kcq/analysis.hpp"

using namespace kcq;

TEST(Sweep, TwoBasisRowCoincides) {
    const std::uint32_t ms[] = {2};
    const auto rows = sweep_m(ms);
    ASSERT_EQ(rows.size(), 1u);
    const double e = (2 - std::sqrt(2.0)) / 4;
    EXPECT_NEAR(rows[0].e_key_granted, e, 1e-9);
    EXPECT_NEAR(*rows[0].e_keyless, e, 1e-9);
    EXPECT_NEAR(rows[0].phi_star, pi / 8, 1e-9);
}

TEST(Sweep, MonotoneAndBounded) {
    std::vector<std::uint32_t> ms;
    for (std::uint32_t m = 2; m <= 1024; m *= 2) ms.push_back(m);
    const auto rows = sweep_m(ms);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_LE(rows[i].e_key_granted, 0.5);
        EXPECT_LE(*rows[i].e_keyless, 0.5);
        EXPECT_GE(*rows[i].e_keyless, 0.0);
        if (i) {
            EXPECT_GE(rows[i].e_key_granted, rows[i - 1].e_key_granted - 1e-12);
            EXPECT_GE(*rows[i].e_keyless, *rows[i - 1].e_keyless - 1e-12);
        }
    }
}

TEST(Sweep, Limits) {
    const std::uint32_t big[] = {1u << 12};
    EXPECT_NEAR(sweep_m(big, false)[0].e_key_granted, 0.5 - 1 / pi, 2e-3);
    EXPECT_FALSE(sweep_m(big, false)[0].e_keyless.has_value());
    const std::uint32_t huge[] = {1u << 16};
    EXPECT_GE(*sweep_m(huge)[0].e_keyless, 0.499);
    const std::uint32_t too_big[] = {1u << 17};
    EXPECT_THROW(sweep_m(too_big), std::domain_error);
}

TEST(Sweep, CsvShape) {
    const std::uint32_t ms[] = {2, 4, 8};
    std::ostringstream os;
    write_sweep_csv(os, sweep_m(ms));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "m,e_key_granted,e_keyless,phi_star");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_NE(os.str().find("2,0.146446609,0.146446609,0.392699082"), std::string::npos) << os.str();
}

TEST(NetKeyRate, AbortIsNegativeConsumption) {
    ProtocolOutcome o;
    o.ledger.consumed_seed = 64;
    o.ledger.consumed_verification = 64;
    EXPECT_DOUBLE_EQ(net_key_rate(o, 1000), -0.128);
    EXPECT_THROW(net_key_rate(o, 0), std::domain_error);
}

TEST(Format, NineSignificantDigits) {
    EXPECT_EQ(format_number(0.1464466094067262), "0.146446609");
    EXPECT_EQ(format_number(3.0517578125e-05), "3.05175781e-05");
    EXPECT_EQ(format_number(0.5), "0.5");
}
