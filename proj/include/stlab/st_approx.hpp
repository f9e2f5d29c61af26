#ifndef STLAB_ST_APPROX_HPP
#define STLAB_ST_APPROX_HPP

// Trigonometric approximation of the indicator of the symmetric arc +-[alpha, beta]:
// exact Fourier truncation, and one-sided majorant/minorant polynomials, both
// rewritten in the basis f_m(2 cos theta).
//
// A cosine polynomial  c_0 + sum_{m=1}^{D} c_m 2cos(m theta)  with D <= M equals
//   u_0 + sum_{m=1}^{M} u_m f_m(2 cos theta),   u_m = c_m - c_{m+2},
// because 2cos(m theta) = f_m - f_{m-2} (with f_{-1} = 0).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "chebycomb.hpp"
#include "curves.hpp"

namespace stlab {

/// mu(I) = (beta - alpha)/pi - (sin 2beta - sin 2alpha)/(2 pi).
inline double st_measure(const Interval& I)
{
    using std::numbers::pi;
    return (I.beta - I.alpha) / pi - (std::sin(2 * I.beta) - std::sin(2 * I.alpha)) / (2 * pi);
}

enum class BSMode { Exact, MajorantSandwich, MinorantSandwich };
enum class Side { Major, Minor };

inline const char* to_string(BSMode m)
{
    switch (m) {
    case BSMode::Exact: return "exact";
    case BSMode::MajorantSandwich: return "major";
    case BSMode::MinorantSandwich: return "minor";
    }
    return "?";
}

/// Coefficients of a degree-M approximation; index 0 holds the constant term.
struct BSCoefficients {
    int M = 0;
    BSMode mode = BSMode::Exact;
    double alpha = 0;
    double beta = std::numbers::pi;
    /// s[m]: coefficient of 2cos(m theta); s[0] the constant term.
    std::vector<double> s;
    /// u[m]: coefficient of f_m(2cos theta); u[0] the constant term.
    std::vector<double> u;
    /// Z = sum_{m=1}^{M} u_m^2.
    double z = 0;
    /// max_m m |u_m|.
    double decay_constant = 0;
    /// Sandwich modes: max_m |u_m - u_m(exact)| and the smoothing parameters used.
    std::optional<double> cert;
    double shift = 0;
    double margin = 0;

    double constant() const { return u.at(0); }

    /// Value at theta from the cosine form.
    double eval_cos(double theta) const
    {
        double v = s[0];
        for (int m = 1; m <= M; ++m)
            if (s[m] != 0)
                v += s[m] * 2 * std::cos(m * theta);
        return v;
    }

    /// Value at t = 2 cos theta from the f-basis form.
    double eval_f(double t) const
    {
        double v = u[0];
        double fm2 = 1, fm1 = t; // f_0, f_1
        if (M >= 1)
            v += u[1] * fm1;
        for (int m = 2; m <= M; ++m) {
            const double fm = t * fm1 - fm2;
            v += u[m] * fm;
            fm2 = fm1;
            fm1 = fm;
        }
        return v;
    }

    /// CSV rows m, s, u for m = 1..M.
    void write_csv(std::ostream& os) const
    {
        os << "m,s,u\n";
        os.precision(17);
        for (int m = 1; m <= M; ++m)
            os << m << ',' << s[m] << ',' << u[m] << '\n';
    }
};

namespace detail {

    /// Fills u, z and decay_constant from s.
    inline void telescope(BSCoefficients& c)
    {
        const int M = c.M;
        c.u.assign(static_cast<std::size_t>(M) + 1, 0.0);
        auto s_at = [&](int m) { return m <= M ? c.s[m] : 0.0; };
        for (int m = 0; m <= M; ++m)
            c.u[m] = m <= M - 2 ? s_at(m) - s_at(m + 2) : s_at(m);
        c.z = 0;
        c.decay_constant = 0;
        for (int m = 1; m <= M; ++m) {
            c.z += c.u[m] * c.u[m];
            c.decay_constant = std::max(c.decay_constant, m * std::abs(c.u[m]));
        }
    }

    /// Fourier coefficients (sin m b - sin m a)/(m pi) of the indicator of +-[a, b], m = 0..M.
    inline std::vector<double> arc_coeffs(double a, double b, int M)
    {
        using std::numbers::pi;
        std::vector<double> s(static_cast<std::size_t>(M) + 1);
        s[0] = (b - a) / pi;
        for (int m = 1; m <= M; ++m)
            s[m] = (std::sin(m * b) - std::sin(m * a)) / (m * pi);
        return s;
    }

    /// Normalized coefficients of the squared Fejer kernel of order n (degree 2n-2), k[0] = 1.
    inline std::vector<double> jackson_coeffs(int n)
    {
        const int D = 2 * n - 2;
        std::vector<double> k(static_cast<std::size_t>(D) + 1, 0.0);
        for (int m = 0; m <= D; ++m) {
            double g = 0;
            for (int j = std::max(-(n - 1), m - (n - 1)); j <= std::min(n - 1, m + n - 1); ++j)
                g += (1.0 - std::abs(j) / static_cast<double>(n)) * (1.0 - std::abs(m - j) / static_cast<double>(n));
            k[m] = g;
        }
        const double k0 = k[0];
        for (auto& v : k)
            v /= k0;
        return k;
    }

    /// Kernel mass outside [-delta, delta] (normalized total mass 1), with a rounding allowance.
    inline double jackson_tail(const std::vector<double>& k, double delta)
    {
        using std::numbers::pi;
        double inner = 2 * delta;
        double magnitude = 2 * delta;
        for (std::size_t m = 1; m < k.size(); ++m) {
            const double term = k[m] * 4 * std::sin(static_cast<double>(m) * delta) / static_cast<double>(m);
            inner += term;
            magnitude += std::abs(term);
        }
        const double tail = 1.0 - inner / (2 * pi);
        const double slack = 1e-13 + 64 * std::numeric_limits<double>::epsilon() * magnitude;
        return std::max(tail, 0.0) + slack;
    }

} // namespace detail

/// Truncated Fourier expansion of the indicator in the f-basis.
/// s_m = (sin m beta - sin m alpha)/(m pi); u_m for m <= M-2 are the exact coefficients
/// of the indicator against the Sato-Tate orthonormal system f_m(2 cos theta).
inline BSCoefficients exact_st_coeffs(const Interval& I, int M)
{
    if (M < 3)
        throw std::domain_error("exact_st_coeffs: M must be >= 3");
    BSCoefficients c;
    c.M = M;
    c.mode = BSMode::Exact;
    c.alpha = I.alpha;
    c.beta = I.beta;
    c.s = detail::arc_coeffs(I.alpha, I.beta, M);
    detail::telescope(c);
    return c;
}

/// One-sided approximation: the indicator of a widened (Major) or narrowed (Minor) arc,
/// smoothed by a normalized Jackson kernel of degree 2 floor(M/2) - 2 <= M - 2, shifted by
/// the kernel mass outside the margin. Pointwise on [0, pi]:
///   Minor <= indicator of [alpha, beta] <= Major.
inline BSCoefficients sandwich_coeffs(const Interval& I, int M, Side side)
{
    using std::numbers::pi;
    if (M < 16)
        throw std::domain_error("sandwich_coeffs: M must be >= 16");
    const int n = M / 2;
    const auto k = detail::jackson_coeffs(n);
    const bool left_free = I.alpha <= 0;
    const bool right_free = I.beta >= pi;

    BSCoefficients c;
    c.M = M;
    c.mode = side == Side::Major ? BSMode::MajorantSandwich : BSMode::MinorantSandwich;
    c.alpha = I.alpha;
    c.beta = I.beta;

    if (left_free && right_free) {
        c.s.assign(static_cast<std::size_t>(M) + 1, 0.0);
        c.s[0] = 1.0;
    } else {
        // margin delta = q n^{-3/4}; q picked to minimize the constant-term cost 2 delta / pi + tail
        double best_cost = std::numeric_limits<double>::infinity(), delta = 0, tail = 0;
        for (double q = 0.5; q <= 6.0; q += 0.25) {
            const double d = q * std::pow(static_cast<double>(n), -0.75);
            if (d >= pi / 2)
                continue;
            const double t = detail::jackson_tail(k, d);
            const double cost = 2 * d / pi + t;
            if (cost < best_cost) {
                best_cost = cost;
                delta = d;
                tail = t;
            }
        }
        double a = I.alpha, b = I.beta;
        if (side == Side::Major) {
            a = std::max(0.0, a - delta);
            b = std::min(pi, b + delta);
        } else {
            if (!left_free)
                a += delta;
            if (!right_free)
                b -= delta;
            if (!(a < b))
                throw std::domain_error("sandwich_coeffs: arc of width " + std::to_string(I.beta - I.alpha)
                                        + " is narrower than the minorant margin at M = " + std::to_string(M));
        }
        c.margin = delta;
        if (a <= 0 && b >= pi) {
            c.s.assign(static_cast<std::size_t>(M) + 1, 0.0);
            c.s[0] = 1.0;
        } else {
            c.s = detail::arc_coeffs(a, b, M);
            for (int m = 0; m <= M; ++m)
                c.s[m] *= m < static_cast<int>(k.size()) ? k[m] : 0.0;
            c.shift = side == Side::Major ? tail : -tail;
            c.s[0] += c.shift;
        }
    }
    detail::telescope(c);

    const BSCoefficients ex = exact_st_coeffs(I, M);
    double dev = 0;
    for (int m = 0; m <= M; ++m)
        dev = std::max(dev, std::abs(c.u[m] - ex.u[m]));
    c.cert = dev;
    return c;
}

struct ParsevalResult {
    double z = 0;
    double mu_term = 0;
    double gap = 0;
    /// 20 log(2M) / M.
    double bound = 0;
};

/// Z = sum_{m <= M} u_m^2 against mu(I) - mu(I)^2 for the exact coefficients.
inline ParsevalResult parseval_check(const Interval& I, int M)
{
    const auto c = exact_st_coeffs(I, M);
    const double mu = st_measure(I);
    ParsevalResult r;
    r.z = c.z;
    r.mu_term = mu - mu * mu;
    r.gap = std::abs(r.z - r.mu_term);
    r.bound = 20 * std::log(2.0 * M) / M;
    return r;
}

enum class PrimeCondition { SkipBadOnly, SkipBadAndAb };

/// Whether p enters the sum for E(a, b) under the given condition.
inline bool prime_admitted(const TraceValue& tv, const CurveParams& curve, std::int64_t p, PrimeCondition cond)
{
    if (!tv.good())
        return false;
    if (cond == PrimeCondition::SkipBadAndAb && (mod(curve.a, p) == 0 || mod(curve.b, p) == 0))
        return false;
    return true;
}

/// sum_{m=1}^{M} u_m sum_p f_m(t_p) for normalized traces t_p, index 0 of u ignored.
inline double p_sum_from_traces(const std::vector<double>& u, const std::vector<double>& traces)
{
    const int M = static_cast<int>(u.size()) - 1;
    double total = 0;
    for (double t : traces) {
        double fm2 = 1, fm1 = t, v = M >= 1 ? u[1] * t : 0.0;
        for (int m = 2; m <= M; ++m) {
            const double fm = t * fm1 - fm2;
            v += u[m] * fm;
            fm2 = fm1;
            fm1 = fm;
        }
        total += v;
    }
    return total;
}

/// Normalized traces a_p / sqrt p at the admitted primes of the window (x/2, x].
inline std::vector<double> admitted_traces(const CurveParams& curve, double x, PrimeCondition cond)
{
    if (curve.singular())
        throw std::domain_error("polynomial sum: singular curve (Delta = 0)");
    std::vector<double> out;
    for (std::int64_t p : primes_in_window(x).primes) {
        if (p < 5)
            continue;
        const TraceValue tv = curve_ap(p, curve);
        if (prime_admitted(tv, curve, p, cond))
            out.push_back(tv.ap / std::sqrt(static_cast<double>(p)));
    }
    return out;
}

/// P(E, x) = sum_{m=1}^{M} u_m sum_{p admitted} a~_E(p^m).
inline double p_polynomial_sum(const CurveParams& curve, double x, const BSCoefficients& coeffs,
                               PrimeCondition cond = PrimeCondition::SkipBadOnly)
{
    return p_sum_from_traces(coeffs.u, admitted_traces(curve, x, cond));
}

/// Bracket  lower <= N_I(E, x) - pi~(x) mu(I) <= upper  from the two one-sided polynomials.
struct SandwichBracket {
    double lower = 0;
    double upper = 0;
    double error = 0;
    double p_minus = 0;
    double p_plus = 0;
    std::int64_t good_primes = 0;

    bool holds() const { return lower <= error && error <= upper; }
};

inline SandwichBracket sandwich_error_bound(const CurveParams& curve, double x, const BSCoefficients& minor,
                                            const BSCoefficients& major, const Interval& I)
{
    const auto traces = admitted_traces(curve, x, PrimeCondition::SkipBadOnly);
    const double pi_tilde = static_cast<double>(primes_in_window(x).count());
    const double main = pi_tilde * st_measure(I);
    SandwichBracket r;
    r.good_primes = static_cast<std::int64_t>(traces.size());
    r.p_minus = p_sum_from_traces(minor.u, traces);
    r.p_plus = p_sum_from_traces(major.u, traces);
    const double g = static_cast<double>(r.good_primes);
    r.lower = r.p_minus + g * minor.constant() - main;
    r.upper = r.p_plus + g * major.constant() - main;
    std::int64_t n = 0;
    for (double t : traces)
        n += I.contains(t);
    r.error = static_cast<double>(n) - main;
    return r;
}

inline SandwichBracket sandwich_error_bound(const CurveParams& curve, double x, const Interval& I, int M)
{
    return sandwich_error_bound(curve, x, sandwich_coeffs(I, M, Side::Minor), sandwich_coeffs(I, M, Side::Major), I);
}

enum class Profile { Unconditional, MRH, Hypotheses };

inline const char* to_string(Profile p)
{
    switch (p) {
    case Profile::Unconditional: return "unconditional";
    case Profile::MRH: return "mrh";
    case Profile::Hypotheses: return "hypotheses";
    }
    return "?";
}

inline Profile parse_profile(const std::string& s)
{
    if (s == "unconditional")
        return Profile::Unconditional;
    if (s == "mrh")
        return Profile::MRH;
    if (s == "hypotheses")
        return Profile::Hypotheses;
    throw std::invalid_argument("unknown profile '" + s + "' (expected unconditional|mrh|hypotheses)");
}

/// Degree for the moment pipeline: ceil(x^{1/4} (log x)^{c/(2t)}), ceil(pi~(x)^{1/2}),
/// or ceil(x^{1/2} (log x)^{c/(2t)}).
inline int select_M(Profile profile, double x, int t, double c = 1.0)
{
    if (t < 1)
        throw std::domain_error("select_M: t must be >= 1");
    const double L = std::pow(std::log(x), c / (2.0 * t));
    switch (profile) {
    case Profile::Unconditional: return static_cast<int>(std::ceil(std::pow(x, 0.25) * L));
    case Profile::MRH: return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(primes_in_window(x).count()))));
    case Profile::Hypotheses: return static_cast<int>(std::ceil(std::sqrt(x) * L));
    }
    return 0;
}

} // namespace stlab

#endif
