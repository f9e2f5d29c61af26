#ifndef STLAB_CURVES_HPP
#define STLAB_CURVES_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "chebycomb.hpp"

namespace stlab {

/// The Weierstrass curve y^2 = x^3 + a x + b.
struct CurveParams {
    static constexpr std::int64_t kMaxA = 1'000'000;
    static constexpr std::int64_t kMaxB = 100'000'000;

    std::int64_t a = 0;
    std::int64_t b = 0;

    CurveParams() = default;
    CurveParams(std::int64_t a_, std::int64_t b_) : a(a_), b(b_)
    {
        if (a < -kMaxA || a > kMaxA || b < -kMaxB || b > kMaxB)
            throw std::domain_error("CurveParams: coefficients out of supported range");
    }

    /// 4a^3 + 27b^2; fits in 64 bits on the supported coefficient range.
    std::int64_t delta() const { return 4 * a * a * a + 27 * b * b; }

    bool singular() const { return delta() == 0; }

    bool bad_at(std::int64_t p) const { return mod(delta(), p) == 0; }

    friend bool operator==(const CurveParams&, const CurveParams&) = default;
};

enum class Reduction : std::uint8_t { Good, Node, Cusp };

inline const char* to_string(Reduction r)
{
    switch (r) {
    case Reduction::Good: return "good";
    case Reduction::Node: return "node";
    case Reduction::Cusp: return "cusp";
    }
    return "?";
}

/// a_E(p) together with the reduction type of E at p.
struct TraceValue {
    Reduction kind = Reduction::Good;
    std::int32_t ap = 0;

    bool good() const { return kind == Reduction::Good; }
    friend bool operator==(const TraceValue&, const TraceValue&) = default;
};

namespace detail {

    /// -sum_x (x^3 + a x + b / p) using finite differences of the cubic.
    inline std::int32_t character_sum_trace(std::int64_t a, std::int64_t b, std::int64_t p,
                                            const std::vector<std::int8_t>& chi)
    {
        // g(x) = x^3 + a x + b, d1 = g(x+1)-g(x) = 3x^2+3x+1+a, d2 = 6x+6, d3 = 6
        std::int64_t g = mod(b, p);
        std::int64_t d1 = mod(1 + a, p);
        std::int64_t d2 = 6 % p;
        const std::int64_t d3 = 6 % p;
        std::int64_t s = 0;
        for (std::int64_t x = 0; x < p; ++x) {
            s += chi[static_cast<std::size_t>(g)];
            g += d1;
            if (g >= p)
                g -= p;
            d1 += d2;
            if (d1 >= p)
                d1 -= p;
            d2 += d3;
            if (d2 >= p)
                d2 -= p;
        }
        return static_cast<std::int32_t>(-s);
    }

    /// Reduction type and trace of a singular cubic y^2 = x^3 + a x + b over F_p.
    inline TraceValue singular_trace(std::int64_t a, std::int64_t b, std::int64_t p)
    {
        a = mod(a, p);
        b = mod(b, p);
        if (a == 0 && b == 0)
            return {Reduction::Cusp, 0};
        // double root x0 = -3b/(2a); tangent directions at the node are the square roots of 3 x0
        const std::int64_t x0 = mod(-3 * b % p * invmod(2 * a, p), p);
        const int split = legendre(3 * x0, p);
        return {Reduction::Node, split == 1 ? 1 : -1};
    }

} // namespace detail

/// a_E(p) for p >= 5, by the character sum at good primes and by the shape of
/// the singular point at bad ones.
inline TraceValue curve_ap(std::int64_t p, const CurveParams& curve)
{
    if (p < 5)
        throw std::domain_error("curve_ap: p must be a prime >= 5, got " + std::to_string(p));
    const std::int64_t a = mod(curve.a, p), b = mod(curve.b, p);
    const std::int64_t disc = mod(4 * mulmod(mulmod(a, a, p), a, p) + 27 * mulmod(b, b, p), p);
    if (disc == 0)
        return detail::singular_trace(a, b, p);
    std::int64_t s = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        const std::int64_t g = mod(mulmod(mulmod(x, x, p), x, p) + mulmod(a, x, p) + b, p);
        s += legendre(g, p);
    }
    return {Reduction::Good, static_cast<std::int32_t>(-s)};
}

inline constexpr std::int64_t kDefaultApTableCap = 8192;

/// All a_p(a, b) for (a mod p, b mod p), row-major by a then b.
///
/// Built one isomorphism class at a time: E(a,b) and E(u^4 a, u^6 b) are
/// isomorphic over F_p, so each orbit needs a single O(p) character sum.
class ApTable {
public:
    ApTable() = default;

    explicit ApTable(std::int64_t p, std::int64_t cap = kDefaultApTableCap) : p_(p)
    {
        if (p < 5 || !is_prime(p))
            throw std::domain_error("ApTable: p must be a prime >= 5, got " + std::to_string(p));
        if (p > cap)
            throw BudgetError("ApTable: p = " + std::to_string(p) + " exceeds table cap "
                              + std::to_string(cap));
        build();
    }

    /// Wraps precomputed values, e.g. from the on-disk cache.
    ApTable(std::int64_t p, std::vector<TraceValue> entries) : p_(p), entries_(std::move(entries))
    {
        if (entries_.size() != static_cast<std::size_t>(p * p))
            throw std::invalid_argument("ApTable: entry count does not match p^2");
    }

    std::int64_t p() const { return p_; }

    const TraceValue& at(std::int64_t a, std::int64_t b) const
    {
        return entries_[static_cast<std::size_t>(mod(a, p_) * p_ + mod(b, p_))];
    }

    const std::vector<TraceValue>& entries() const { return entries_; }

    /// Number of residue pairs with each a_p value among good entries, indexed by ap + offset().
    std::vector<std::int64_t> good_histogram() const
    {
        std::vector<std::int64_t> h(static_cast<std::size_t>(2 * offset() + 1), 0);
        for (const auto& e : entries_)
            if (e.good())
                ++h[static_cast<std::size_t>(e.ap + offset())];
        return h;
    }

    /// Largest |a_p| permitted by the Hasse bound.
    std::int32_t offset() const
    {
        auto r = static_cast<std::int32_t>(std::floor(2.0 * std::sqrt(static_cast<double>(p_))));
        while (static_cast<std::int64_t>(r + 1) * (r + 1) <= 4 * p_)
            ++r;
        while (static_cast<std::int64_t>(r) * r > 4 * p_)
            --r;
        return r;
    }

private:
    void build()
    {
        const std::int64_t p = p_;
        const auto chi = legendre_table(p);
        std::vector<std::int64_t> u4(static_cast<std::size_t>(p)), u6(static_cast<std::size_t>(p));
        for (std::int64_t u = 1; u < p; ++u) {
            const std::int64_t u2 = u * u % p;
            u4[u] = u2 * u2 % p;
            u6[u] = u4[u] * u2 % p;
        }
        entries_.assign(static_cast<std::size_t>(p * p), TraceValue{});
        std::vector<bool> done(static_cast<std::size_t>(p * p), false);
        for (std::int64_t a = 0; a < p; ++a) {
            for (std::int64_t b = 0; b < p; ++b) {
                if (done[static_cast<std::size_t>(a * p + b)])
                    continue;
                const std::int64_t disc = (4 * (a * a % p) % p * a + 27 * (b * b % p)) % p;
                const TraceValue tv = disc == 0
                    ? detail::singular_trace(a, b, p)
                    : TraceValue{Reduction::Good, detail::character_sum_trace(a, b, p, chi)};
                for (std::int64_t u = 1; u < p; ++u) {
                    const std::size_t idx = static_cast<std::size_t>((u4[u] * a % p) * p + u6[u] * b % p);
                    entries_[idx] = tv;
                    done[idx] = true;
                }
            }
        }
    }

    std::int64_t p_ = 0;
    std::vector<TraceValue> entries_;
};

/// a_E(p^m)/p^{m/2}. At good primes this is f_m(a_p/sqrt p); at bad primes the
/// coefficient a_p in {-1, 0, 1} itself is raised to the m-th power.
inline double normalized_coeff(const TraceValue& tv, std::int64_t p, int m)
{
    if (m < 0)
        throw std::domain_error("normalized_coeff: m must be nonnegative");
    if (m == 0)
        return 1.0;
    if (tv.good())
        return f_eval(m, tv.ap / std::sqrt(static_cast<double>(p)));
    return std::pow(static_cast<double>(tv.ap), m);
}

/// I = [2 cos beta, 2 cos alpha] for 0 <= alpha < beta <= pi.
struct Interval {
    double alpha = 0;
    double beta = std::numbers::pi;
    double lo = -2;
    double hi = 2;
    /// Use [lo, hi) instead of the closed interval.
    bool half_open = false;

    Interval() = default;

    static Interval from_angles(double alpha, double beta, bool half_open = false)
    {
        if (!(0 <= alpha && alpha < beta && beta <= std::numbers::pi))
            throw std::domain_error("Interval: need 0 <= alpha < beta <= pi");
        Interval I;
        I.alpha = alpha;
        I.beta = beta;
        I.lo = snap(2 * std::cos(beta));
        I.hi = snap(2 * std::cos(alpha));
        I.half_open = half_open;
        return I;
    }

    /// [lo, hi] inside [-2, 2]; lo == hi is allowed here and matches exact hits only.
    static Interval from_endpoints(double lo, double hi, bool half_open = false)
    {
        if (!(-2 <= lo && lo <= hi && hi <= 2))
            throw std::domain_error("Interval: need -2 <= lo <= hi <= 2");
        Interval I;
        I.lo = lo;
        I.hi = hi;
        I.alpha = std::acos(hi / 2);
        I.beta = std::acos(lo / 2);
        I.half_open = half_open;
        return I;
    }

    static Interval full() { return from_angles(0, std::numbers::pi); }

    bool contains(double t) const { return half_open ? (lo <= t && t < hi) : (lo <= t && t <= hi); }

    /// Whether a_p / sqrt(p) lies in the interval.
    bool contains_trace(std::int64_t ap, std::int64_t p) const
    {
        return contains(static_cast<double>(ap) / std::sqrt(static_cast<double>(p)));
    }

private:
    // 2 cos(pi/2) is 1.2e-16, not 0; endpoints that are integers up to rounding are made exact
    static double snap(double v)
    {
        const double r = std::round(v);
        return std::abs(v - r) < 1e-12 ? r : v;
    }
};

/// N_I(E, x): primes p in (x/2, x] with p not dividing Delta and a_p/sqrt(p) in I.
inline std::int64_t count_in_interval(const CurveParams& curve, double x, const Interval& I)
{
    if (curve.singular())
        throw std::domain_error("count_in_interval: singular curve (Delta = 0)");
    std::int64_t n = 0;
    for (std::int64_t p : primes_in_window(x).primes) {
        const TraceValue tv = curve_ap(p, curve);
        if (tv.good() && I.contains_trace(tv.ap, p))
            ++n;
    }
    return n;
}

} // namespace stlab

#endif
