#ifndef STLAB_HECKE_HPP
#define STLAB_HECKE_HPP

// Traces of Hecke operators T_p on level-one cusp forms S_k, computed two ways:
// from an echelonized q-expansion basis, and by inverting the class-number
// moment identities, which are unit lower-triangular in the unknown traces.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "chebycomb.hpp"
#include "classnumbers.hpp"

namespace stlab {

class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Truncated power series sum_{n=0}^{N} c_n q^n with integer coefficients.
struct QSeries {
    int weight = 0;
    std::vector<mpz_class> coeffs;

    std::size_t precision() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    const mpz_class& operator[](std::size_t n) const { return coeffs.at(n); }

    friend QSeries operator*(const QSeries& x, const QSeries& y)
    {
        const std::size_t n = std::min(x.coeffs.size(), y.coeffs.size());
        QSeries r{x.weight + y.weight, std::vector<mpz_class>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            if (x.coeffs[i] == 0)
                continue;
            for (std::size_t j = 0; i + j < n; ++j)
                r.coeffs[i + j] += x.coeffs[i] * y.coeffs[j];
        }
        return r;
    }

    /// this -= c * other, coefficientwise up to the shorter precision.
    void subtract_multiple(const mpz_class& c, const QSeries& other)
    {
        const std::size_t n = std::min(coeffs.size(), other.coeffs.size());
        coeffs.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            coeffs[i] -= c * other.coeffs[i];
    }
};

namespace detail {

    /// sigma_r(n) for 0 <= n <= N (entry 0 unused).
    inline std::vector<mpz_class> divisor_power_sums(std::size_t N, unsigned r)
    {
        std::vector<mpz_class> s(N + 1, 0);
        for (std::size_t d = 1; d <= N; ++d) {
            mpz_class dr;
            mpz_ui_pow_ui(dr.get_mpz_t(), d, r);
            for (std::size_t m = d; m <= N; m += d)
                s[m] += dr;
        }
        return s;
    }

    inline QSeries eisenstein(std::size_t N, unsigned r, long scale, int weight)
    {
        auto sig = divisor_power_sums(N, r);
        QSeries e{weight, std::vector<mpz_class>(N + 1)};
        e.coeffs[0] = 1;
        for (std::size_t n = 1; n <= N; ++n)
            e.coeffs[n] = scale * sig[n];
        return e;
    }

    inline QSeries power(const QSeries& base, int e, std::size_t N)
    {
        QSeries r{0, std::vector<mpz_class>(N + 1, 0)};
        r.coeffs[0] = 1;
        for (int i = 0; i < e; ++i)
            r = r * base;
        return r;
    }

} // namespace detail

/// E_4 = 1 + 240 sum sigma_3(n) q^n.
inline QSeries eisenstein_e4(std::size_t N) { return detail::eisenstein(N, 3, 240, 4); }

/// E_6 = 1 - 504 sum sigma_5(n) q^n.
inline QSeries eisenstein_e6(std::size_t N) { return detail::eisenstein(N, 5, -504, 6); }

/// Delta = (E_4^3 - E_6^2) / 1728.
inline QSeries delta_series(std::size_t N)
{
    const QSeries e4 = eisenstein_e4(N), e6 = eisenstein_e6(N);
    QSeries d = e4 * e4 * e4;
    d.subtract_multiple(1, e6 * e6);
    for (auto& c : d.coeffs) {
        if (!mpz_divisible_ui_p(c.get_mpz_t(), 1728))
            throw std::logic_error("delta_series: coefficient not divisible by 1728");
        c /= 1728;
    }
    d.weight = 12;
    return d;
}

/// dim S_k(SL_2(Z)).
inline int dim_cusp_forms(int k)
{
    if (k < 0)
        throw std::domain_error("dim_cusp_forms: k must be nonnegative");
    if (k % 2 || k == 2)
        return 0;
    return k % 12 == 2 ? k / 12 - 1 : k / 12;
}

/// Basis f_1..f_d of S_k with a_i(f_j) = delta_ij for 1 <= i, j <= d, integral coefficients.
struct MillerBasis {
    int weight = 0;
    std::vector<QSeries> forms;

    int dim() const { return static_cast<int>(forms.size()); }
    std::size_t precision() const { return forms.empty() ? 0 : forms.front().precision(); }
};

/// Echelonized basis from the monomials Delta^j E_4^alpha E_6^beta, 4 alpha + 6 beta = k - 12 j.
inline MillerBasis miller_basis(int k, std::size_t n_terms)
{
    const int d = dim_cusp_forms(k);
    MillerBasis basis{k, {}};
    if (d == 0)
        return basis;
    if (n_terms < static_cast<std::size_t>(d) + 1)
        throw PrecisionError("miller_basis: need at least dim + 1 = " + std::to_string(d + 1)
                             + " terms for weight " + std::to_string(k));
    const std::size_t N = n_terms - 1;
    const QSeries e4 = eisenstein_e4(N), e6 = eisenstein_e6(N), delta = delta_series(N);

    std::vector<QSeries> g;
    QSeries delta_pow = delta;
    for (int j = 1; j <= d; ++j) {
        const int rest = k - 12 * j;
        const int beta = (rest % 4 == 0) ? 0 : 1;
        const int alpha = (rest - 6 * beta) / 4;
        QSeries m = delta_pow * detail::power(e4, alpha, N) * detail::power(e6, beta, N);
        m.weight = k;
        g.push_back(std::move(m));
        delta_pow = delta_pow * delta;
    }
    // g_j = q^j + O(q^{j+1}); clear coefficients j+1..d using the already reduced forms.
    for (int j = d; j >= 1; --j) {
        QSeries& f = g[j - 1];
        for (int i = j + 1; i <= d; ++i) {
            const mpz_class c = f.coeffs[i];
            if (c != 0)
                f.subtract_multiple(c, g[i - 1]);
        }
    }
    basis.forms = std::move(g);
    return basis;
}

enum class TraceMethod { Miller, Birch };

inline const char* to_string(TraceMethod m) { return m == TraceMethod::Miller ? "miller" : "birch"; }

/// sigma_k(T_p), the trace of T_p on S_k(SL_2(Z)).
struct TraceRecord {
    int k = 0;
    std::int64_t p = 0;
    mpz_class trace;
    TraceMethod method = TraceMethod::Miller;
};

/// |sigma_k(T_p)| <= 2 dim(S_k) p^{(k-1)/2}, checked as trace^2 <= 4 d^2 p^{k-1}.
inline bool deligne_ok(const TraceRecord& r)
{
    const int d = dim_cusp_forms(r.k);
    if (d == 0)
        return r.trace == 0;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(r.p), static_cast<unsigned long>(r.k - 1));
    return r.trace * r.trace <= 4 * d * d * pk;
}

/// sigma_k(T_p) / p^{(k-1)/2}.
inline double normalized_trace(const TraceRecord& r)
{
    if (r.trace == 0)
        return 0.0;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(r.p), static_cast<unsigned long>((r.k - 2) / 2));
    const mpq_class q(r.trace, pk);
    return q.get_d() / std::sqrt(static_cast<double>(r.p));
}

/// Traces from q-expansions: sigma_k(T_p) = sum_j a_j(T_p f_j), a_n(T_p f) = a_{np}(f) + p^{k-1} a_{n/p}(f).
/// Caches one basis per weight and grows its precision on demand. Not thread-safe.
class HeckeTraceEngine {
public:
    explicit HeckeTraceEngine(std::size_t max_terms = 20000) : max_terms_(max_terms) {}

    const MillerBasis& basis(int k, std::size_t n_terms)
    {
        auto it = cache_.find(k);
        if (it != cache_.end() && (it->second.dim() == 0 || it->second.precision() + 1 >= n_terms))
            return it->second;
        if (n_terms > max_terms_)
            throw PrecisionError("HeckeTraceEngine: " + std::to_string(n_terms)
                                 + " q-expansion terms requested, cap is " + std::to_string(max_terms_));
        std::size_t grow = n_terms;
        if (it != cache_.end())
            grow = std::min(max_terms_, std::max(n_terms, 2 * (it->second.precision() + 1)));
        cache_[k] = miller_basis(k, grow);
        return cache_[k];
    }

    TraceRecord trace(int k, std::int64_t p)
    {
        if (p < 2 || !is_prime(p))
            throw std::domain_error("hecke_trace: p must be prime, got " + std::to_string(p));
        TraceRecord rec{k, p, 0, TraceMethod::Miller};
        const int d = dim_cusp_forms(k);
        if (d == 0)
            return rec;
        const MillerBasis& b = basis(k, static_cast<std::size_t>(d) * static_cast<std::size_t>(p) + 1);
        mpz_class pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
        for (int j = 1; j <= d; ++j) {
            const QSeries& f = b.forms[j - 1];
            rec.trace += f[static_cast<std::size_t>(j * p)];
            if (j % p == 0)
                rec.trace += pk * f[static_cast<std::size_t>(j / p)];
        }
        return rec;
    }

private:
    std::size_t max_terms_;
    std::map<int, MillerBasis> cache_;
};

inline TraceRecord hecke_trace(int k, std::int64_t p)
{
    HeckeTraceEngine engine;
    return engine.trace(k, p);
}

/// Weights 4, 6, ..., 2J+2 from the class-number moments
///   (1/2) sum r^{2j} H(4p - r^2) = C_j p^{j+1} - sum_{l=1}^{j} (2l+1)(2j)!/((j-l)!(j+l+1)!) p^{j-l} (sigma_{2l+2}(T_p) + 1),
/// solved successively in j (the l = j coefficient is 1).
inline std::vector<TraceRecord> traces_via_birch(std::int64_t p, int J, const HurwitzTable& table)
{
    if (p < 5 || !is_prime(p))
        throw std::domain_error("traces_via_birch: p must be a prime >= 5");
    if (J < 1)
        throw std::domain_error("traces_via_birch: J must be >= 1");
    if (table.max_n() < 4 * p)
        throw std::out_of_range("traces_via_birch: Hurwitz table must cover 4p = " + std::to_string(4 * p));

    const mpz_class P(p);
    auto ppow = [&](long e) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), P.get_mpz_t(), static_cast<unsigned long>(e));
        return r;
    };

    std::vector<mpz_class> shifted; // shifted[l-1] = sigma_{2l+2}(T_p) + 1
    std::vector<TraceRecord> out;
    for (int j = 1; j <= J; ++j) {
        const mpz_class twelve_sum = weighted_class_sum_twelve(p, 2 * j, table);
        if (twelve_sum % 24 != 0)
            throw std::logic_error("traces_via_birch: moment not integral");
        const mpz_class moment = twelve_sum / 24;

        mpz_class rhs = factorial(2 * j) / (factorial(j) * factorial(j + 1)) * ppow(j + 1) - moment;
        for (int l = 1; l < j; ++l) {
            const mpz_class num = (2 * l + 1) * factorial(2 * j);
            const mpz_class den = factorial(j - l) * factorial(j + l + 1);
            rhs -= (num / den) * ppow(j - l) * shifted[l - 1];
        }
        shifted.push_back(rhs);
        out.push_back({2 * j + 2, p, rhs - 1, TraceMethod::Birch});
    }
    return out;
}

/// sum_{k <= K} (1/k) |sum_{x/2 < p <= x} sigma~_k(T_p)| and its ratio to K sqrt(x).
struct TraceAverageProbe {
    double value = 0;
    double ratio = 0;
};

inline TraceAverageProbe trace_average_probe(int K, double x, HeckeTraceEngine& engine)
{
    const auto window = primes_in_window(x);
    TraceAverageProbe r;
    for (int k = 1; k <= K; ++k) {
        if (dim_cusp_forms(k) == 0)
            continue;
        double s = 0;
        for (std::int64_t p : window.primes)
            s += normalized_trace(engine.trace(k, p));
        r.value += std::abs(s) / k;
    }
    r.ratio = K > 0 ? r.value / (K * std::sqrt(x)) : 0.0;
    return r;
}

/// sum_{x/2 < p <= x} sigma~_k(T_p) sigma~_l(T_p).
inline double trace_pair_probe(int k, int l, double x, HeckeTraceEngine& engine)
{
    if (dim_cusp_forms(k) == 0 || dim_cusp_forms(l) == 0)
        return 0.0;
    double s = 0;
    for (std::int64_t p : primes_in_window(x).primes)
        s += normalized_trace(engine.trace(k, p)) * normalized_trace(engine.trace(l, p));
    return s;
}

} // namespace stlab

#endif
