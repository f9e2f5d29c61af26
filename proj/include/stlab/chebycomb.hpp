#ifndef STLAB_CHEBYCOMB_HPP
#define STLAB_CHEBYCOMB_HPP

// Exact combinatorics behind the moment computations: the Hecke polynomials
// f_m, product expansions in the f_m basis, Melzak's finite-difference
// identity, the A_{l,k} sums, and set-partition inclusion-exclusion.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"

namespace stlab {

inline mpz_class binomial(long n, long k)
{
    if (k < 0 || n < 0 || k > n)
        return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

inline mpz_class factorial(long n)
{
    if (n < 0)
        throw std::domain_error("factorial of negative number");
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

/// Integer polynomial in the power basis; coeffs[i] multiplies x^i.
struct PowerPoly {
    std::vector<mpz_class> coeffs;

    PowerPoly() = default;
    explicit PowerPoly(std::vector<mpz_class> c) : coeffs(std::move(c)) { trim(); }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    void trim()
    {
        while (!coeffs.empty() && coeffs.back() == 0)
            coeffs.pop_back();
    }

    mpq_class operator()(const mpq_class& x) const
    {
        mpq_class acc = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = acc * x + mpq_class(*it);
        return acc;
    }

    double operator()(double x) const
    {
        double acc = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = acc * x + it->get_d();
        return acc;
    }

    friend PowerPoly operator+(const PowerPoly& a, const PowerPoly& b)
    {
        std::vector<mpz_class> c(std::max(a.coeffs.size(), b.coeffs.size()));
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            c[i] += a.coeffs[i];
        for (std::size_t i = 0; i < b.coeffs.size(); ++i)
            c[i] += b.coeffs[i];
        return PowerPoly(std::move(c));
    }

    friend PowerPoly operator-(const PowerPoly& a, const PowerPoly& b)
    {
        std::vector<mpz_class> c(std::max(a.coeffs.size(), b.coeffs.size()));
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            c[i] += a.coeffs[i];
        for (std::size_t i = 0; i < b.coeffs.size(); ++i)
            c[i] -= b.coeffs[i];
        return PowerPoly(std::move(c));
    }

    friend PowerPoly operator*(const PowerPoly& a, const PowerPoly& b)
    {
        if (a.coeffs.empty() || b.coeffs.empty())
            return {};
        std::vector<mpz_class> c(a.coeffs.size() + b.coeffs.size() - 1);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs.size(); ++j)
                c[i + j] += a.coeffs[i] * b.coeffs[j];
        return PowerPoly(std::move(c));
    }

    /// Multiplication by the monomial x.
    PowerPoly shifted() const
    {
        std::vector<mpz_class> c(coeffs.size() + 1);
        std::copy(coeffs.begin(), coeffs.end(), c.begin() + 1);
        return PowerPoly(std::move(c));
    }

    friend bool operator==(const PowerPoly& a, const PowerPoly& b) { return a.coeffs == b.coeffs; }
};

/// f_m(x) = sum_j (-1)^j binom(m-j, j) x^{m-2j}, so that f_m(2 cos t) = sin((m+1)t)/sin t.
inline PowerPoly f_poly(int m)
{
    if (m < 0)
        throw std::domain_error("f_poly: m must be nonnegative");
    std::vector<mpz_class> c(static_cast<std::size_t>(m) + 1);
    for (int j = 0; 2 * j <= m; ++j) {
        mpz_class b = binomial(m - j, j);
        c[static_cast<std::size_t>(m - 2 * j)] = (j % 2 == 0) ? b : mpz_class(-b);
    }
    return PowerPoly(std::move(c));
}

/// f_m(x) by the three-term recurrence. Negative m follows f_{-m} = -f_{m-2}.
inline double f_eval(int m, double x)
{
    if (m < 0)
        return m == -1 ? 0.0 : -f_eval(-m - 2, x);
    double prev = 1.0, cur = x;
    if (m == 0)
        return prev;
    for (int k = 1; k < m; ++k) {
        const double next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// f_0(x), ..., f_{max_m}(x).
inline std::vector<double> f_values(int max_m, double x)
{
    std::vector<double> out(static_cast<std::size_t>(std::max(max_m, 0)) + 1);
    out[0] = 1.0;
    if (max_m >= 1)
        out[1] = x;
    for (int k = 2; k <= max_m; ++k)
        out[k] = x * out[k - 1] - out[k - 2];
    return out;
}

/// Coefficients D(m_1..m_r; m) of prod_i f_{m_i} = sum_m D(...; m) f_m.
using UBasisExpansion = std::map<int, mpz_class>;

/// Left fold of the Hecke product rule f_i f_j = sum_{l <= min(i,j)} f_{i+j-2l}.
inline UBasisExpansion u_product_expand(std::span<const int> ms)
{
    if (ms.empty())
        throw std::invalid_argument("u_product_expand: empty multiset");
    UBasisExpansion acc;
    for (int m : ms)
        if (m < 0)
            throw std::domain_error("u_product_expand: negative index");
    acc[ms[0]] = 1;
    for (std::size_t i = 1; i < ms.size(); ++i) {
        UBasisExpansion next;
        const int mj = ms[i];
        for (const auto& [mi, c] : acc)
            for (int l = 0; l <= std::min(mi, mj); ++l)
                next[mi + mj - 2 * l] += c;
        acc = std::move(next);
    }
    return acc;
}

inline UBasisExpansion u_product_expand(std::initializer_list<int> ms)
{
    return u_product_expand(std::span<const int>(ms.begin(), ms.size()));
}

/// Both sides of Melzak's identity
///   f(x+y) = x binom(x+n, n) sum_{a=0}^n (-1)^a binom(n,a) f(y-a)/(x+a)
/// for a polynomial of degree <= n.
inline std::pair<mpq_class, mpq_class> melzak_eval(const PowerPoly& f, const mpq_class& x,
                                                   const mpq_class& y, int n)
{
    if (n < 0)
        throw std::domain_error("melzak_eval: n must be nonnegative");
    if (f.degree() > n)
        throw std::domain_error("melzak_eval: polynomial degree exceeds n");
    for (int a = 0; a <= n; ++a)
        if (x + a == 0)
            throw std::domain_error("melzak_eval: x is a pole (x in {0,-1,...,-n})");

    const mpq_class lhs = f(mpq_class(x + y));

    mpq_class binom_xn = 1; // binom(x+n, n) = prod_{i=1}^n (x+i)/i
    for (int i = 1; i <= n; ++i)
        binom_xn *= (x + i) / mpq_class(i);

    mpq_class sum = 0;
    for (int a = 0; a <= n; ++a) {
        mpq_class term = mpq_class(binomial(n, a)) * f(mpq_class(y - a)) / (x + a);
        if (a % 2)
            sum -= term;
        else
            sum += term;
    }
    return {lhs, mpq_class(x * binom_xn * sum)};
}

/// A_{l,k} = (2l+1) sum_{j=l}^k (-1)^{k-j} binom(k+j, k-j) (2j)! / ((j-l)! (j+l+1)!).
inline mpq_class a_lk(int l, int k)
{
    if (l < 0 || k < 0)
        throw std::domain_error("a_lk: indices must be nonnegative");
    if (l > k)
        throw std::domain_error("a_lk: requires l <= k");
    mpq_class sum = 0;
    for (int j = l; j <= k; ++j) {
        mpq_class term(binomial(k + j, k - j) * factorial(2 * j), factorial(j - l) * factorial(j + l + 1));
        term.canonicalize();
        if ((k - j) % 2)
            sum -= term;
        else
            sum += term;
    }
    return sum * (2 * l + 1);
}

/// A partition of {0, ..., n-1} into disjoint nonempty blocks.
struct SetPartition {
    int n = 0;
    std::vector<std::vector<int>> blocks;

    bool valid() const
    {
        std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
        for (const auto& b : blocks) {
            if (b.empty())
                return false;
            for (int e : b) {
                if (e < 0 || e >= n || seen[e]++)
                    return false;
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    }
};

/// Visits every set partition of {0..n-1}, generated from restricted growth strings.
/// Blocks are ordered by their smallest element.
inline void for_each_set_partition(int n, const std::function<void(const SetPartition&)>& visit)
{
    if (n <= 0) {
        visit(SetPartition{0, {}});
        return;
    }
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    std::vector<int> maxima(static_cast<std::size_t>(n), 0);
    SetPartition part;
    part.n = n;
    while (true) {
        const int k = *std::max_element(rgs.begin(), rgs.end()) + 1;
        part.blocks.assign(static_cast<std::size_t>(k), {});
        for (int i = 0; i < n; ++i)
            part.blocks[rgs[i]].push_back(i);
        visit(part);

        int i = n - 1;
        while (i > 0 && rgs[i] == maxima[i - 1] + 1)
            --i;
        if (i == 0)
            return;
        ++rgs[i];
        maxima[i] = std::max(maxima[i - 1], rgs[i]);
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            maxima[j] = maxima[j - 1];
        }
    }
}

inline std::vector<SetPartition> set_partitions(int n)
{
    std::vector<SetPartition> out;
    for_each_set_partition(n, [&](const SetPartition& p) { out.push_back(p); });
    return out;
}

/// A(P) = (-1)^{n-k} prod_l (|M_l| - 1)!, the inclusion-exclusion weight of a partition
/// when a sum over pairwise distinct primes is rewritten as unrestricted block sums.
inline mpz_class partition_coeff(const SetPartition& p)
{
    if (!p.valid())
        throw std::invalid_argument("partition_coeff: not a set partition");
    mpz_class c = 1;
    for (const auto& b : p.blocks)
        c *= factorial(static_cast<long>(b.size()) - 1);
    const auto k = static_cast<int>(p.blocks.size());
    return ((p.n - k) % 2) ? mpz_class(-c) : c;
}

inline constexpr int kMaxDistinctSumOrder = 6;

template <class Scalar>
struct DistinctSums {
    Scalar direct;
    Scalar via_partitions;
};

/// For functions g_0..g_{n-1} on a common prime list (values[i][j] = g_i(p_j)), evaluates
///   sum over pairwise distinct (p_{j_0}, ..., p_{j_{n-1}}) of prod_i g_i(p_{j_i})
/// by direct enumeration and by the set-partition formula.
template <class Scalar>
DistinctSums<Scalar> separate_distinct_sums(const std::vector<std::vector<Scalar>>& values)
{
    const int n = static_cast<int>(values.size());
    if (n > kMaxDistinctSumOrder)
        throw BudgetError("separate_distinct_sums: order " + std::to_string(n) + " exceeds guard "
                          + std::to_string(kMaxDistinctSumOrder));
    if (n == 0)
        return {Scalar(1), Scalar(1)};
    const std::size_t np = values[0].size();
    for (const auto& row : values)
        if (row.size() != np)
            throw std::invalid_argument("separate_distinct_sums: ragged value table");

    Scalar direct(0);
    std::vector<std::size_t> pick(static_cast<std::size_t>(n));
    std::vector<bool> used(np, false);
    std::function<void(int, Scalar)> rec = [&](int depth, Scalar prod) {
        if (depth == n) {
            direct += prod;
            return;
        }
        for (std::size_t j = 0; j < np; ++j) {
            if (used[j])
                continue;
            used[j] = true;
            rec(depth + 1, prod * values[depth][j]);
            used[j] = false;
        }
    };
    rec(0, Scalar(1));

    Scalar via(0);
    for_each_set_partition(n, [&](const SetPartition& part) {
        Scalar term(partition_coeff(part).get_si());
        for (const auto& block : part.blocks) {
            Scalar s(0);
            for (std::size_t j = 0; j < np; ++j) {
                Scalar prod(1);
                for (int i : block)
                    prod *= values[i][j];
                s += prod;
            }
            term *= s;
        }
        via += term;
    });
    return {direct, via};
}

/// delta(t) t! / (2^{t/2} (t/2)!): zero for odd t, (t-1)!! for even t.
inline mpz_class gaussian_moment_constant(int t)
{
    if (t < 1)
        throw std::domain_error("gaussian_moment_constant: t must be >= 1");
    if (t % 2)
        return 0;
    mpz_class r = 1;
    for (int i = t - 1; i > 1; i -= 2)
        r *= i;
    return r;
}

} // namespace stlab

#endif
