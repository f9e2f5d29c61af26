#include <gtest/gtest.h>

#include <cmath>

#include "stlab/family.hpp"

using namespace stlab;

namespace {

HeckeTraceEngine& engine()
{
    static HeckeTraceEngine e;
    return e;
}

} // namespace

TEST(FactoredInteger, Basics)
{
    const FactoredInteger n(5 * 5 * 7 * 11);
    EXPECT_EQ(n.value(), 1925);
    EXPECT_EQ(n.radical(), 385);
    EXPECT_EQ(n.divisor_count(), 12);
    EXPECT_EQ(n.omega(), 3);
    EXPECT_EQ(FactoredInteger(1).radical(), 1);
    EXPECT_EQ(FactoredInteger::prime_power(7, 3).value(), 343);
    EXPECT_EQ(FactoredInteger::prime_power(7, 0).value(), 1);
    EXPECT_THROW(FactoredInteger(6), std::domain_error);
    EXPECT_THROW(FactoredInteger(0), std::domain_error);
    EXPECT_THROW(FactoredInteger::prime_power(9, 2), std::domain_error);
}

TEST(S0, ClosedFormValues)
{
    // Even m: -(1 - 1/p) p^{-(m/2+1)} (sigma_{m+2}(T_p) + 1).
    EXPECT_NEAR(s0_formula(5, 0, engine()), 0.8, 1e-15);
    EXPECT_NEAR(s0_formula(5, 2, engine()), -0.032, 1e-15);
    EXPECT_NEAR(s0_formula(5, 10, engine()), -0.8 * 4831 / 15625.0, 1e-15);
    EXPECT_NEAR(s0_formula(7, 10, engine()), -(6.0 / 7) * (-16744 + 1) / std::pow(7.0, 6), 1e-15);
    for (std::int64_t p : {5, 7, 11, 13})
        for (int m : {2, 4, 6, 8})
            EXPECT_NEAR(s0_formula(p, m, engine()), -(1 - 1.0 / p) * std::pow(p, -(m / 2 + 1.0)), 1e-15) << p << ' ' << m;
    EXPECT_EQ(s0_exact({12, 5, 4830, TraceMethod::Miller}, 10), mpq_class(-4 * 4831, 78125));
    EXPECT_THROW(s0_exact({12, 5, 4830, TraceMethod::Miller}, 8), std::invalid_argument);
}

TEST(S0, GridExamples)
{
    EXPECT_NEAR(s0_brute(5, 10), -0.2473472, 1e-10);
    EXPECT_NEAR(s0_brute(5, 2), -0.032, 1e-12);
    EXPECT_NEAR(s0_brute(5, 0), 0.8, 1e-12);
    for (std::int64_t p : {5, 7, 11, 31})
        for (int m : {1, 3, 5, 7, 9, 11})
            EXPECT_NEAR(s0_brute(p, m), 0.0, 1e-12) << p << ' ' << m;
}

TEST(S0, GridMatchesTraceFormula)
{
    for (std::int64_t p : primes_between(4, 100))
        for (int m = 0; m <= 12; ++m)
            ASSERT_NEAR(s0_brute(p, m), s0_formula(p, m, engine()), 1e-10) << p << ' ' << m;
}

TEST(S0, Errors)
{
    EXPECT_THROW(s0_brute(9, 2), std::domain_error);
    EXPECT_THROW(s0_brute(307, 2), BudgetError);
    EXPECT_THROW(s0_brute(5, -1), std::domain_error);
}

TEST(S12, Examples)
{
    EXPECT_NEAR(s12_brute(7, 2).s1, -6.0 / 49, 1e-15);
    for (std::int64_t p : {7, 11, 19, 23, 43})
        for (int m : {1, 3, 5})
            EXPECT_NEAR(s12_brute(p, m).s1, 0.0, 1e-12) << p << ' ' << m;
    // E(0, b) is supersingular for p = 2 mod 3
    for (std::int64_t p : {5, 11, 17, 23})
        for (int m : {1, 3, 5})
            EXPECT_NEAR(s12_brute(p, m).s2, 0.0, 1e-12) << p << ' ' << m;
}

TEST(S12, Bound)
{
    for (std::int64_t p : primes_between(4, 120))
        for (int m = 0; m <= 8; ++m) {
            const auto r = s12_brute(p, m);
            ASSERT_LE(std::abs(r.s1), (m + 1.0) / p + 1e-12);
            ASSERT_LE(std::abs(r.s2), (m + 1.0) / p + 1e-12);
        }
}

TEST(S, PrimePowerMatchesGrid)
{
    for (std::int64_t p : {5, 7, 11, 13, 17})
        for (int m = 0; m <= 6; ++m) {
            const double brute = s_brute(FactoredInteger::prime_power(p, m));
            EXPECT_NEAR(brute, s_prime_power(p, m, engine()), 1e-12) << p << ' ' << m;
        }
    EXPECT_EQ(s_brute(FactoredInteger(1)), 1.0);
    EXPECT_EQ(s_multiplicative(FactoredInteger(1), engine()), 1.0);
}

TEST(S, Multiplicative)
{
    const std::vector<std::pair<std::int64_t, std::int64_t>> pairs{
        {5, 7},   {5, 11},  {5, 13},  {5, 17},  {5, 19},  {5, 23},  {5, 29},  {5, 37},  {7, 11},  {7, 13},
        {7, 17},  {7, 19},  {7, 31},  {7, 37},  {11, 13}, {11, 17}, {11, 19}, {25, 7},  {5, 49},  {125, 11}};
    for (const auto& [a, b] : pairs) {
        const double whole = s_brute(FactoredInteger(a * b));
        const double product = s_brute(FactoredInteger(a)) * s_brute(FactoredInteger(b));
        ASSERT_NEAR(whole, product, 1e-9) << a << ' ' << b;
        ASSERT_NEAR(whole, s_multiplicative(FactoredInteger(a * b), engine()), 1e-9) << a << ' ' << b;
    }
}

TEST(S, RadicalCap)
{
    EXPECT_THROW(s_brute(FactoredInteger(17 * 19)), BudgetError);
    EXPECT_NO_THROW(s_brute(FactoredInteger(17 * 19), 400));
}

TEST(CoefficientOracle, DoublyPeriodic)
{
    for (std::int64_t n : {5, 7, 25, 35, 49, 175}) {
        const FactoredInteger f(n);
        const std::int64_t s = f.radical();
        auto direct = [&](std::int64_t a, std::int64_t b) {
            double v = 1;
            for (const auto& [p, e] : f.factors())
                v *= normalized_coeff(curve_ap(p, {a, b}), p, e);
            return v;
        };
        for (std::int64_t a = -s; a <= s; ++a)
            for (std::int64_t b = -s; b <= s; ++b) {
                if (CurveParams(a, b).singular() || CurveParams(a + s, b + s).singular())
                    continue;
                ASSERT_DOUBLE_EQ(direct(a, b), direct(a + s, b + s)) << n << ' ' << a << ' ' << b;
                ASSERT_DOUBLE_EQ(direct(a, b), direct(a + s, b)) << n << ' ' << a << ' ' << b;
            }
    }
}

TEST(CoefficientOracle, MatchesDirect)
{
    const FactoredInteger n(5 * 5 * 13);
    const CoefficientOracle c(n);
    for (std::int64_t a = -20; a <= 20; ++a)
        for (std::int64_t b = -20; b <= 20; ++b) {
            if (c.excluded(a, b, false))
                continue;
            const double v = f_eval(2, curve_ap(5, {a, b}).ap / std::sqrt(5.0))
                * f_eval(1, curve_ap(13, {a, b}).ap / std::sqrt(13.0));
            ASSERT_NEAR(c(a, b), v, 1e-12);
        }
    EXPECT_TRUE(c.excluded(0, 1, true));
    EXPECT_FALSE(c.excluded(1, 1, true));
}

TEST(BoxAverage, TrivialN)
{
    const auto r = box_average(FactoredInteger(1), 20, 30, BoxCondition::AbDelta, engine());
    std::int64_t nonsingular = 0;
    for (std::int64_t a = -20; a <= 20; ++a)
        for (std::int64_t b = -30; b <= 30; ++b)
            nonsingular += !CurveParams(a, b).singular();
    EXPECT_EQ(r.admissible, nonsingular);
    EXPECT_DOUBLE_EQ(r.sum, static_cast<double>(nonsingular));
    EXPECT_DOUBLE_EQ(r.prediction, 4.0 * 20 * 30);
    EXPECT_LE(std::abs(r.residual), 2.0 * (20 + 30) + 1);
}

TEST(BoxAverage, FiveAtFifty)
{
    for (auto cond : {BoxCondition::AbDelta, BoxCondition::DeltaOnly}) {
        const auto r = box_average(FactoredInteger(5), 50, 50, cond, engine());
        EXPECT_LE(std::abs(r.residual), 10 * r.bound_shape);
        EXPECT_NEAR(r.bound_shape, 2 * std::pow(5.0, 0.6) * 100, 1e-9);
    }
}

TEST(BoxAverage, MatchesPeriodicSumOnFullPeriods)
{
    // With both box sides a multiple of s(n) the residual is only the boundary row/column.
    const FactoredInteger n(7 * 7);
    const auto r = box_average(n, 35, 35, BoxCondition::DeltaOnly, engine());
    EXPECT_LE(std::abs(r.residual), 10 * r.bound_shape);
    EXPECT_THROW(box_average(n, 0, 5, BoxCondition::DeltaOnly, engine()), std::domain_error);
    EXPECT_THROW(box_average(n, 5000, 5000, BoxCondition::DeltaOnly, engine(), 0.1, 1000), BudgetError);
}
