#ifndef STLAB_FAMILY_HPP
#define STLAB_FAMILY_HPP

// Family averages of normalized coefficients a~_E(n) over the Weierstrass family
// E(a, b): the local factors S0, S1, S2 at prime powers, the multiplicative S(n),
// and raw box sums over |a| <= A, |b| <= B.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "chebycomb.hpp"
#include "curves.hpp"
#include "hecke.hpp"

namespace stlab {

inline constexpr std::int64_t kDefaultBruteCap = 300;

/// n >= 1 with all prime factors >= 5.
class FactoredInteger {
public:
    FactoredInteger() = default;

    explicit FactoredInteger(std::int64_t n) : n_(n)
    {
        if (n < 1)
            throw std::domain_error("FactoredInteger: n must be >= 1");
        std::int64_t r = n;
        for (std::int64_t p = 2; p * p <= r; ++p) {
            int e = 0;
            while (r % p == 0) {
                r /= p;
                ++e;
            }
            if (e)
                factors_.emplace_back(p, e);
        }
        if (r > 1)
            factors_.emplace_back(r, 1);
        for (const auto& [p, e] : factors_)
            if (p < 5)
                throw std::domain_error("FactoredInteger: prime factor " + std::to_string(p)
                                        + " < 5 in n = " + std::to_string(n));
    }

    static FactoredInteger prime_power(std::int64_t p, int m)
    {
        if (p < 5 || !is_prime(p) || m < 0)
            throw std::domain_error("FactoredInteger: need prime p >= 5 and m >= 0");
        FactoredInteger f;
        f.n_ = 1;
        for (int i = 0; i < m; ++i)
            f.n_ *= p;
        if (m > 0)
            f.factors_.emplace_back(p, m);
        return f;
    }

    std::int64_t value() const { return n_; }
    const std::vector<std::pair<std::int64_t, int>>& factors() const { return factors_; }

    /// s(n), the largest squarefree divisor.
    std::int64_t radical() const
    {
        std::int64_t s = 1;
        for (const auto& [p, e] : factors_)
            s *= p;
        return s;
    }

    std::int64_t divisor_count() const
    {
        std::int64_t d = 1;
        for (const auto& [p, e] : factors_)
            d *= e + 1;
        return d;
    }

    int omega() const { return static_cast<int>(factors_.size()); }

private:
    std::int64_t n_ = 1;
    std::vector<std::pair<std::int64_t, int>> factors_;
};

namespace detail {

    inline void require_brute(std::int64_t p, std::int64_t cap)
    {
        if (p < 5 || !is_prime(p))
            throw std::domain_error("family average: p must be a prime >= 5, got " + std::to_string(p));
        if (p > cap)
            throw BudgetError("family average: p = " + std::to_string(p) + " exceeds brute cap "
                              + std::to_string(cap));
    }

    /// sum over a_p values r with multiplicity h[r + off] of f_m(r / sqrt p).
    inline double weighted_f_sum(const std::vector<std::int64_t>& h, std::int32_t off, std::int64_t p, int m)
    {
        const double sp = std::sqrt(static_cast<double>(p));
        double s = 0;
        for (std::size_t i = 0; i < h.size(); ++i)
            if (h[i])
                s += static_cast<double>(h[i]) * f_eval(m, (static_cast<double>(i) - off) / sp);
        return s;
    }

} // namespace detail

/// S0(p^m) = p^{-2} sum over (a, b) mod p with p not dividing Delta of a~(p^m), from the residue grid.
inline double s0_brute(std::int64_t p, int m, std::int64_t cap = kDefaultBruteCap)
{
    detail::require_brute(p, cap);
    if (m < 0)
        throw std::domain_error("s0_brute: m must be nonnegative");
    const ApTable table(p);
    return detail::weighted_f_sum(table.good_histogram(), table.offset(), p, m) / static_cast<double>(p * p);
}

/// S0(p^m) from the weight m+2 trace, exact:
///   1 - 1/p                                          for m = 0,
///   0                                                for odd m,
///   -(1 - 1/p) p^{-(m/2 + 1)} (sigma_{m+2}(T_p) + 1)   for even m >= 2.
/// This is what the class-number moment expansion gives once A_{l,k} = [l = k] is applied.
inline mpq_class s0_exact(const TraceRecord& trace, int m)
{
    if (m < 0)
        throw std::domain_error("s0_formula: m must be nonnegative");
    if (m % 2)
        return 0;
    const mpq_class local(trace.p - 1, trace.p);
    if (m == 0)
        return local;
    if (trace.k != m + 2)
        throw std::invalid_argument("s0_formula: trace must have weight m + 2 = " + std::to_string(m + 2));
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(trace.p), static_cast<unsigned long>(m / 2 + 1));
    mpq_class q(trace.trace + 1, den);
    q.canonicalize();
    return -local * q;
}

inline double s0_formula(std::int64_t p, int m, HeckeTraceEngine& engine)
{
    if (m < 0)
        throw std::domain_error("s0_formula: m must be nonnegative");
    if (m % 2)
        return 0.0;
    if (m == 0)
        return 1.0 - 1.0 / static_cast<double>(p);
    return s0_exact(engine.trace(m + 2, p), m).get_d();
}

/// S1 over E(a, 0), a = 1..p-1, and S2 over E(0, b), b = 1..p-1, both normalized by p^{-2}.
struct S12 {
    double s1 = 0;
    double s2 = 0;
};

inline S12 s12_brute(std::int64_t p, int m, std::int64_t cap = kDefaultBruteCap)
{
    detail::require_brute(p, cap);
    if (m < 0)
        throw std::domain_error("s12_brute: m must be nonnegative");
    const double sp = std::sqrt(static_cast<double>(p));
    S12 r;
    for (std::int64_t c = 1; c < p; ++c) {
        r.s1 += f_eval(m, curve_ap(p, {c, 0}).ap / sp);
        r.s2 += f_eval(m, curve_ap(p, {0, c}).ap / sp);
    }
    r.s1 /= static_cast<double>(p * p);
    r.s2 /= static_cast<double>(p * p);
    return r;
}

/// S(p^m) = S0(p^m) - S1(p^m) - S2(p^m), with S0 from the Hecke trace.
inline double s_prime_power(std::int64_t p, int m, HeckeTraceEngine& engine)
{
    if (m == 0)
        return 1.0;
    const S12 r = s12_brute(p, m, std::max<std::int64_t>(p, kDefaultBruteCap));
    return s0_formula(p, m, engine) - r.s1 - r.s2;
}

/// S(n) as the product of its prime-power factors.
inline double s_multiplicative(const FactoredInteger& n, HeckeTraceEngine& engine)
{
    double s = 1.0;
    for (const auto& [p, e] : n.factors())
        s *= s_prime_power(p, e, engine);
    return s;
}

/// S0(n) as the product of S0 over prime powers.
inline double s0_multiplicative(const FactoredInteger& n, HeckeTraceEngine& engine)
{
    double s = 1.0;
    for (const auto& [p, e] : n.factors())
        s *= s0_formula(p, e, engine);
    return s;
}

/// a~_{E(a,b)}(n) for a curve with p not dividing Delta for every p | n, via per-prime tables.
class CoefficientOracle {
public:
    explicit CoefficientOracle(const FactoredInteger& n) : n_(n)
    {
        for (const auto& [p, e] : n_.factors())
            tables_.emplace_back(p);
    }

    const FactoredInteger& n() const { return n_; }

    /// Product over p^e || n of f_e(a_p / sqrt p); the curve must be good at each p.
    double operator()(std::int64_t a, std::int64_t b) const
    {
        double v = 1.0;
        const auto& fs = n_.factors();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto [p, e] = fs[i];
            const TraceValue& tv = tables_[i].at(a, b);
            v *= normalized_coeff(tv, p, e);
        }
        return v;
    }

    /// Whether p divides a*b*Delta (with_ab) or Delta for some p | n.
    bool excluded(std::int64_t a, std::int64_t b, bool with_ab) const
    {
        const auto& fs = n_.factors();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::int64_t p = fs[i].first;
            if (!tables_[i].at(a, b).good())
                return true;
            if (with_ab && (mod(a, p) == 0 || mod(b, p) == 0))
                return true;
        }
        return false;
    }

private:
    FactoredInteger n_;
    std::vector<ApTable> tables_;
};

/// S(n) from its definition: s^{-2} sum over 1 <= a, b <= s(n) with (ab Delta, n) = 1 of a~(n).
inline double s_brute(const FactoredInteger& n, std::int64_t cap = kDefaultBruteCap)
{
    const std::int64_t s = n.radical();
    if (s > cap)
        throw BudgetError("s_brute: radical " + std::to_string(s) + " exceeds cap " + std::to_string(cap));
    if (s == 1)
        return 1.0;
    const CoefficientOracle coeff(n);
    double sum = 0;
    for (std::int64_t a = 1; a <= s; ++a)
        for (std::int64_t b = 1; b <= s; ++b)
            if (!coeff.excluded(a, b, true))
                sum += coeff(a, b);
    return sum / static_cast<double>(s * s);
}

enum class BoxCondition { AbDelta, DeltaOnly };

struct BoxAverage {
    double sum = 0;
    double prediction = 0;
    double residual = 0;
    /// d(n) s(n)^{1/2 + eps} (A + B).
    double bound_shape = 0;
    std::int64_t admissible = 0;
};

inline constexpr std::int64_t kDefaultBoxCap = 50'000'000;

/// Sum of a~_{E(a,b)}(n) over |a| <= A, |b| <= B (Delta(a,b) = 0 excluded), against 4AB S(n)
/// (AbDelta) or 4AB S0(n) (DeltaOnly).
inline BoxAverage box_average(const FactoredInteger& n, std::int64_t A, std::int64_t B, BoxCondition condition,
                              HeckeTraceEngine& engine, double eps = 0.1,
                              std::int64_t cap = kDefaultBoxCap)
{
    if (A < 1 || B < 1)
        throw std::domain_error("box_average: A and B must be >= 1");
    if ((2 * A + 1) * (2 * B + 1) > cap)
        throw BudgetError("box_average: box exceeds budget");
    const bool with_ab = condition == BoxCondition::AbDelta;
    const CoefficientOracle coeff(n);
    BoxAverage r;
    for (std::int64_t a = -A; a <= A; ++a) {
        for (std::int64_t b = -B; b <= B; ++b) {
            if (CurveParams{a, b}.singular() || coeff.excluded(a, b, with_ab))
                continue;
            r.sum += coeff(a, b);
            ++r.admissible;
        }
    }
    const double local = with_ab ? s_multiplicative(n, engine) : s0_multiplicative(n, engine);
    r.prediction = 4.0 * static_cast<double>(A) * static_cast<double>(B) * local;
    r.residual = r.sum - r.prediction;
    r.bound_shape = static_cast<double>(n.divisor_count())
        * std::pow(static_cast<double>(n.radical()), 0.5 + eps) * static_cast<double>(A + B);
    return r;
}

} // namespace stlab

#endif
