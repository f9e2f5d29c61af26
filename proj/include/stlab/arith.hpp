#ifndef STLAB_ARITH_HPP
#define STLAB_ARITH_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlab {

/// Raised when a computation would exceed a configured size or time cap.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Primes p with 2 <= p <= n, by the sieve of Eratosthenes.
inline std::vector<std::int64_t> sieve_primes(std::int64_t n)
{
    std::vector<std::int64_t> out;
    if (n < 2)
        return out;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (composite[i])
            continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= n; j += i)
            composite[j] = true;
    }
    return out;
}

inline bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/// The primes in the dyadic window (x/2, x].
struct PrimeWindow {
    double x = 0;
    std::vector<std::int64_t> primes;

    std::size_t count() const { return primes.size(); }
};

inline PrimeWindow primes_in_window(double x)
{
    if (!(x >= 10))
        throw std::domain_error("primes_in_window: x must be >= 10, got " + std::to_string(x));
    PrimeWindow w;
    w.x = x;
    const auto top = static_cast<std::int64_t>(std::floor(x));
    for (std::int64_t p : sieve_primes(top))
        if (2 * p > x)
            w.primes.push_back(p);
    return w;
}

/// Primes p >= 5 with lo < p <= hi.
inline std::vector<std::int64_t> primes_between(double lo, double hi)
{
    std::vector<std::int64_t> out;
    for (std::int64_t p : sieve_primes(static_cast<std::int64_t>(std::floor(hi))))
        if (p >= 5 && static_cast<double>(p) > lo)
            out.push_back(p);
    return out;
}

/// Nonnegative residue of n modulo m (m > 0).
inline std::int64_t mod(std::int64_t n, std::int64_t m)
{
    const std::int64_t r = n % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m)
{
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
}

inline std::int64_t powmod(std::int64_t base, std::uint64_t e, std::int64_t m)
{
    std::int64_t result = 1 % m;
    base = mod(base, m);
    while (e) {
        if (e & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return result;
}

/// Inverse of a modulo prime p; a must be nonzero mod p.
inline std::int64_t invmod(std::int64_t a, std::int64_t p)
{
    a = mod(a, p);
    if (a == 0)
        throw std::domain_error("invmod: zero has no inverse");
    return powmod(a, static_cast<std::uint64_t>(p - 2), p);
}

/// Quadratic residue symbol (n/p) for an odd prime p, via Euler's criterion.
inline int legendre(std::int64_t n, std::int64_t p)
{
    if (p < 3 || p % 2 == 0)
        throw std::domain_error("legendre: p must be an odd prime, got " + std::to_string(p));
    const std::int64_t r = mod(n, p);
    if (r == 0)
        return 0;
    return powmod(r, static_cast<std::uint64_t>((p - 1) / 2), p) == 1 ? 1 : -1;
}

/// Lookup table chi[v] = (v/p) for 0 <= v < p.
inline std::vector<std::int8_t> legendre_table(std::int64_t p)
{
    std::vector<std::int8_t> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    for (std::int64_t v = 1; v < p; ++v)
        chi[static_cast<std::size_t>(mulmod(v, v, p))] = 1;
    return chi;
}

} // namespace stlab

#endif
