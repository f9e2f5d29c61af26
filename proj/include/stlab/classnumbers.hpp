#ifndef STLAB_CLASSNUMBERS_HPP
#define STLAB_CLASSNUMBERS_HPP

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"

namespace stlab {

/// Positive definite form a x^2 + b xy + c y^2 of discriminant b^2 - 4ac = -N.
struct ReducedForm {
    std::int64_t a = 0, b = 0, c = 0;

    friend bool operator==(const ReducedForm&, const ReducedForm&) = default;
    friend auto operator<=>(const ReducedForm&, const ReducedForm&) = default;
};

namespace detail {

    inline void require_discriminant(std::int64_t N)
    {
        if (N <= 0 || (N % 4 != 0 && N % 4 != 3))
            throw std::domain_error("class number: need N > 0 with N = 0 or 3 mod 4, got "
                                    + std::to_string(N));
    }

    /// 12 times the weight of a reduced form in the Hurwitz count.
    inline std::int64_t twelve_weight(std::int64_t a, std::int64_t b, std::int64_t c)
    {
        if (a == b && b == c)
            return 4;
        if (b == 0 && a == c)
            return 6;
        return 12;
    }

} // namespace detail

/// All reduced forms of discriminant -N (|b| <= a <= c, b >= 0 if |b| = a or a = c),
/// including imprimitive ones.
inline std::vector<ReducedForm> reduced_forms(std::int64_t N)
{
    detail::require_discriminant(N);
    std::vector<ReducedForm> out;
    for (std::int64_t b = N % 2; 3 * b * b <= N; b += 2) {
        const std::int64_t ac = (b * b + N) / 4;
        for (std::int64_t a = std::max<std::int64_t>(b, 1); a * a <= ac; ++a) {
            if (ac % a)
                continue;
            const std::int64_t c = ac / a;
            out.push_back({a, b, c});
            if (b != 0 && b != a && a != c)
                out.push_back({a, -b, c});
        }
    }
    return out;
}

/// 12 H(N) for the Hurwitz class number H(N).
inline std::int64_t hurwitz_twelve(std::int64_t N)
{
    std::int64_t s = 0;
    for (const auto& f : reduced_forms(N))
        s += detail::twelve_weight(f.a, f.b, f.c);
    return s;
}

inline mpq_class hurwitz(std::int64_t N)
{
    mpq_class h(hurwitz_twelve(N), 12);
    h.canonicalize();
    return h;
}

/// 12 H(N) for 0 < N <= max_n, enumerated once over reduced (a, b, c) and binned by N.
/// Entries for N = 1, 2 mod 4 (and N = 0) are zero.
class HurwitzTable {
public:
    HurwitzTable() = default;

    explicit HurwitzTable(std::int64_t max_n) : max_n_(max_n)
    {
        if (max_n < 0)
            throw std::domain_error("HurwitzTable: max_n must be nonnegative");
        twelve_h_.assign(static_cast<std::size_t>(max_n) + 1, 0);
        for (std::int64_t a = 1; 3 * a * a <= max_n; ++a) {
            for (std::int64_t b = -a + 1; b <= a; ++b) {
                for (std::int64_t c = a;; ++c) {
                    const std::int64_t N = 4 * a * c - b * b;
                    if (N > max_n)
                        break;
                    if (c == a && b < 0)
                        continue;
                    twelve_h_[static_cast<std::size_t>(N)] += detail::twelve_weight(a, b, c);
                }
            }
        }
    }

    std::int64_t max_n() const { return max_n_; }

    std::int64_t twelve_h(std::int64_t N) const
    {
        if (N < 0 || N > max_n_)
            throw std::out_of_range("HurwitzTable: N = " + std::to_string(N) + " outside table of size "
                                    + std::to_string(max_n_));
        return twelve_h_[static_cast<std::size_t>(N)];
    }

    mpq_class h(std::int64_t N) const
    {
        mpq_class q(twelve_h(N), 12);
        q.canonicalize();
        return q;
    }

    /// CSV with columns N, twelve_h for N = 0, 3 mod 4.
    void write_csv(std::ostream& os) const
    {
        os << "N,twelve_h\n";
        for (std::int64_t N = 3; N <= max_n_; ++N)
            if (N % 4 == 0 || N % 4 == 3)
                os << N << ',' << twelve_h_[static_cast<std::size_t>(N)] << '\n';
    }

private:
    std::int64_t max_n_ = 0;
    std::vector<std::int64_t> twelve_h_;
};

/// Largest r >= 0 with r^2 <= 4p.
inline std::int64_t hasse_radius(std::int64_t p)
{
    auto r = static_cast<std::int64_t>(std::sqrt(4.0 * static_cast<double>(p)));
    while ((r + 1) * (r + 1) <= 4 * p)
        ++r;
    while (r * r > 4 * p)
        --r;
    return r;
}

/// sum_{|r| <= 2 sqrt p} r^g 12 H(4p - r^2), exact.
inline mpz_class weighted_class_sum_twelve(std::int64_t p, int g, const HurwitzTable& table)
{
    if (table.max_n() < 4 * p)
        throw std::out_of_range("weighted_class_sum: Hurwitz table does not cover 4p");
    const std::int64_t R = hasse_radius(p);
    mpz_class s = 0;
    for (std::int64_t r = -R; r <= R; ++r) {
        mpz_class term;
        mpz_pow_ui(term.get_mpz_t(), mpz_class(r).get_mpz_t(), static_cast<unsigned long>(g));
        s += term * table.twelve_h(4 * p - r * r);
    }
    return s;
}

/// 12 (sum_{r^2 <= 4p} H(4p - r^2) - 2p); zero for every prime p >= 5.
inline std::int64_t eichler_mass(std::int64_t p, const HurwitzTable& table)
{
    if (p < 5)
        throw std::domain_error("eichler_mass: p must be >= 5");
    return weighted_class_sum_twelve(p, 0, table).get_si() - 24 * p;
}

/// (p-1)/2 sum_{|r| <= 2 sqrt p} r^g H(r^2 - 4p), which equals the sum of a_p^g over the
/// residue pairs (a, b) mod p of good reduction.
inline mpz_class family_moment_classnum(std::int64_t p, int g, const HurwitzTable& table)
{
    if (p < 5)
        throw std::domain_error("family_moment_classnum: p must be >= 5");
    if (g < 0)
        throw std::domain_error("family_moment_classnum: g must be nonnegative");
    const mpz_class num = mpz_class(p - 1) * weighted_class_sum_twelve(p, g, table);
    if (num % 24 != 0)
        throw std::logic_error("family_moment_classnum: class-number sum not integral");
    return num / 24;
}

} // namespace stlab

#endif
