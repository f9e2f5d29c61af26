#ifndef STLAB_VERIFY_HPP
#define STLAB_VERIFY_HPP

// Self-check suites run by `stlab verify`. Each check compares two independent
// computations of the same quantity, or a computed value against a closed form.

#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "chebycomb.hpp"
#include "classnumbers.hpp"
#include "curves.hpp"
#include "family.hpp"
#include "hecke.hpp"
#include "moments.hpp"
#include "st_approx.hpp"

namespace stlab {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
    double seconds = 0;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;

    bool ok() const
    {
        for (const auto& c : checks)
            if (!c.ok)
                return false;
        return true;
    }
};

namespace detail {

    inline CheckResult timed_check(const std::string& name, const std::function<bool(std::string&)>& body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r{name, false, "", 0};
        try {
            r.ok = body(r.detail);
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    inline std::vector<std::int64_t> primes_from_5(std::int64_t hi) { return primes_between(4, static_cast<double>(hi)); }

    /// Products of all multisets of positive integers with sum <= s_max, passed to visit.
    inline void for_each_multiset(int s_max, const std::function<void(const std::vector<int>&)>& visit)
    {
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int max_part, int remaining) {
            if (!cur.empty())
                visit(cur);
            for (int m = std::min(max_part, remaining); m >= 1; --m) {
                cur.push_back(m);
                rec(m, remaining - m);
                cur.pop_back();
            }
        };
        rec(s_max, s_max);
    }

} // namespace detail

/// D relations: zero above s, constant parity, nonnegative, the r = 1 and r = 2 closed forms,
/// and the explicit size bounds (s+1)^{r-2} for r >= 2, (s+1)^{r-3} at m = 0 for r >= 3.
inline bool check_dbounds(int s_max, std::string& detail)
{
    bool ok = true;
    std::int64_t n = 0;
    detail::for_each_multiset(s_max, [&](const std::vector<int>& ms) {
        ++n;
        const auto ex = u_product_expand(ms);
        int s = 0;
        for (int m : ms)
            s += m;
        const int r = static_cast<int>(ms.size());
        for (const auto& [m, d] : ex) {
            if (d < 0 || m > s || (s - m) % 2 || (d > 0 && m < 0))
                ok = false;
            if (r >= 2) {
                mpz_class cap;
                mpz_ui_pow_ui(cap.get_mpz_t(), static_cast<unsigned long>(s + 1), static_cast<unsigned long>(r - 2));
                if (d > cap)
                    ok = false;
            }
            if (r >= 3 && m == 0) {
                mpz_class cap;
                mpz_ui_pow_ui(cap.get_mpz_t(), static_cast<unsigned long>(s + 1), static_cast<unsigned long>(r - 3));
                if (d > cap)
                    ok = false;
            }
        }
        if (r == 1 && !(ex.size() == 1 && ex.begin()->first == ms[0] && ex.begin()->second == 1))
            ok = false;
        if (r == 2) {
            const auto it = ex.find(0);
            const mpz_class d0 = it == ex.end() ? mpz_class(0) : it->second;
            if (d0 != (ms[0] == ms[1] ? 1 : 0))
                ok = false;
        }
    });
    detail = std::to_string(n) + " multisets";
    return ok;
}

/// Suite "arith": prime windows, symbols, and residue-grid invariants for p <= 200.
inline SuiteResult verify_arith()
{
    SuiteResult s{"arith", {}};
    s.checks.push_back(detail::timed_check("prime windows", [](std::string& d) {
        d = "x = 10, 12, 20";
        return primes_in_window(20).count() == 4 && primes_in_window(10).count() == 1
            && primes_in_window(12).count() == 2;
    }));
    s.checks.push_back(detail::timed_check("legendre symbols", [](std::string& d) {
        d = "(1/5), (5/5), (2/5)";
        return legendre(1, 5) == 1 && legendre(5, 5) == 0 && legendre(2, 5) == -1;
    }));
    s.checks.push_back(detail::timed_check("ApTable invariants p <= 200", [](std::string& d) {
        std::int64_t tables = 0;
        for (std::int64_t p : detail::primes_from_5(200)) {
            const ApTable t(p);
            std::int64_t bad = 0, sum = 0;
            for (const auto& e : t.entries()) {
                if (!e.good()) {
                    ++bad;
                    continue;
                }
                sum += e.ap;
                if (static_cast<std::int64_t>(e.ap) * e.ap > 4 * p)
                    return false;
            }
            if (bad != p || sum != 0)
                return false;
            if (p <= 50)
                for (std::int64_t a = 0; a < p; ++a)
                    for (std::int64_t b = 0; b < p; ++b)
                        if (!(t.at(a, b) == curve_ap(p, {a, b})))
                            return false;
            ++tables;
        }
        d = std::to_string(tables) + " tables";
        return true;
    }));
    return s;
}

/// Suite "classnum": small Hurwitz numbers, the mass identity for p <= 2000, and the family
/// moment identity for p <= 100, g <= 6.
inline SuiteResult verify_classnum()
{
    SuiteResult s{"classnum", {}};
    s.checks.push_back(detail::timed_check("Hurwitz values", [](std::string& d) {
        const std::vector<std::pair<std::int64_t, mpq_class>> expect{
            {3, mpq_class(1, 3)}, {4, mpq_class(1, 2)}, {7, 1},  {8, 1},  {11, 1},
            {12, mpq_class(4, 3)}, {15, 2},             {16, mpq_class(3, 2)}, {19, 1}, {20, 2}};
        for (const auto& [N, h] : expect)
            if (hurwitz(N) != h) {
                d = "H(" + std::to_string(N) + ") = " + hurwitz(N).get_str();
                return false;
            }
        d = "10 values";
        return true;
    }));
    s.checks.push_back(detail::timed_check("Eichler mass p <= 2000", [](std::string& d) {
        const HurwitzTable table(4 * 2000);
        std::int64_t n = 0;
        for (std::int64_t p : detail::primes_from_5(2000)) {
            if (eichler_mass(p, table) != 0) {
                d = "residual at p = " + std::to_string(p);
                return false;
            }
            ++n;
        }
        d = std::to_string(n) + " primes";
        return true;
    }));
    s.checks.push_back(detail::timed_check("family moments p <= 100, g <= 6", [](std::string& d) {
        const HurwitzTable table(400);
        for (std::int64_t p : detail::primes_from_5(100)) {
            const ApTable t(p);
            for (int g = 0; g <= 6; ++g) {
                mpz_class brute = 0;
                for (const auto& e : t.entries())
                    if (e.good()) {
                        mpz_class v;
                        mpz_pow_ui(v.get_mpz_t(), mpz_class(e.ap).get_mpz_t(), static_cast<unsigned long>(g));
                        brute += v;
                    }
                if (brute != family_moment_classnum(p, g, table)) {
                    d = "p = " + std::to_string(p) + ", g = " + std::to_string(g);
                    return false;
                }
            }
        }
        d = "exact";
        return true;
    }));
    return s;
}

/// Suite "trace": both trace routes for p <= 200 and weights 4..26, Deligne bounds, tau values.
inline SuiteResult verify_trace()
{
    SuiteResult s{"trace", {}};
    s.checks.push_back(detail::timed_check("tau(2), tau(3), tau(5), tau(7)", [](std::string& d) {
        HeckeTraceEngine e;
        d = "weight 12";
        return e.trace(12, 2).trace == -24 && e.trace(12, 3).trace == 252 && e.trace(12, 5).trace == 4830
            && e.trace(12, 7).trace == -16744;
    }));
    s.checks.push_back(detail::timed_check("Birch vs Miller, p <= 200, k <= 26", [](std::string& d) {
        const HurwitzTable table(800);
        HeckeTraceEngine e;
        std::int64_t n = 0;
        for (std::int64_t p : detail::primes_from_5(200)) {
            for (const auto& rec : traces_via_birch(p, 12, table)) {
                const auto m = e.trace(rec.k, p);
                if (m.trace != rec.trace || !deligne_ok(rec)) {
                    d = "k = " + std::to_string(rec.k) + ", p = " + std::to_string(p);
                    return false;
                }
                ++n;
            }
        }
        d = std::to_string(n) + " records";
        return true;
    }));
    return s;
}

/// Suite "family": S0 by grid vs by trace for p <= 100, m <= 12; multiplicativity of S.
inline SuiteResult verify_family()
{
    SuiteResult s{"family", {}};
    s.checks.push_back(detail::timed_check("S0 grid vs trace, p <= 100, m <= 12", [](std::string& d) {
        HeckeTraceEngine e;
        double worst = 0;
        for (std::int64_t p : detail::primes_from_5(100))
            for (int m = 0; m <= 12; ++m)
                worst = std::max(worst, std::abs(s0_brute(p, m) - s0_formula(p, m, e)));
        d = "max deviation " + std::to_string(worst);
        return worst <= 1e-10;
    }));
    s.checks.push_back(detail::timed_check("S multiplicative", [](std::string& d) {
        const std::vector<std::pair<std::int64_t, std::int64_t>> pairs{{5, 7}, {5, 11}, {7, 11}, {25, 7}, {5, 13}};
        double worst = 0;
        for (const auto& [a, b] : pairs) {
            const double lhs = s_brute(FactoredInteger(a * b));
            const double rhs = s_brute(FactoredInteger(a)) * s_brute(FactoredInteger(b));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        d = "max deviation " + std::to_string(worst);
        return worst <= 1e-9;
    }));
    return s;
}

/// Suite "bs": combinatorial identities and the approximation properties.
inline SuiteResult verify_bs()
{
    SuiteResult s{"bs", {}};
    s.checks.push_back(detail::timed_check("A_{l,k} = [l = k], k <= 60", [](std::string& d) {
        for (int k = 0; k <= 60; ++k)
            for (int l = 0; l <= k; ++l)
                if (a_lk(l, k) != (l == k ? 1 : 0)) {
                    d = "l = " + std::to_string(l) + ", k = " + std::to_string(k);
                    return false;
                }
        d = "exact";
        return true;
    }));
    s.checks.push_back(detail::timed_check("Melzak identity, 200 instances", [](std::string& d) {
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<int> coef(-20, 20), deg(0, 6), num(-30, 30), den(1, 9);
        for (int i = 0; i < 200; ++i) {
            const int n = deg(rng);
            PowerPoly f;
            f.coeffs.resize(static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n)(rng)) + 1);
            for (auto& c : f.coeffs)
                c = coef(rng);
            f.trim();
            mpq_class x;
            do {
                x = mpq_class(num(rng), den(rng));
                x.canonicalize();
            } while (x.get_den() == 1 && x <= 0 && x >= -n);
            mpq_class y(num(rng), den(rng));
            y.canonicalize();
            const auto [lhs, rhs] = melzak_eval(f, x, y, n);
            if (lhs != rhs)
                return false;
        }
        d = "exact";
        return true;
    }));
    s.checks.push_back(detail::timed_check("D relations, sum <= 24", [](std::string& d) { return check_dbounds(24, d); }));
    s.checks.push_back(detail::timed_check("Parseval gap", [](std::string& d) {
        using std::numbers::pi;
        const std::vector<Interval> intervals{Interval::from_angles(0, pi / 2), Interval::from_angles(pi / 3, 2 * pi / 3),
                                              Interval::from_angles(0.4, 2.5)};
        for (const auto& I : intervals) {
            double prev = 1e300;
            for (int M : {100, 1000, 10000}) {
                const auto r = parseval_check(I, M);
                if (r.gap > r.bound || r.gap >= prev)
                    return false;
                prev = r.gap;
            }
        }
        d = "3 intervals";
        return true;
    }));
    s.checks.push_back(detail::timed_check("sandwich pointwise", [](std::string& d) {
        using std::numbers::pi;
        const Interval I = Interval::from_angles(0.7, 2.1);
        const auto lo = sandwich_coeffs(I, 256, Side::Minor);
        const auto hi = sandwich_coeffs(I, 256, Side::Major);
        double worst = 0;
        const int N = 20000;
        for (int i = 0; i <= N; ++i) {
            const double th = pi * i / N;
            const double chi = (th >= I.alpha && th <= I.beta) ? 1.0 : 0.0;
            const double t = 2 * std::cos(th);
            worst = std::min({worst, hi.eval_f(t) - chi, chi - lo.eval_f(t)});
        }
        d = "min slack " + std::to_string(worst);
        return worst >= -1e-12;
    }));
    return s;
}

/// Suite "pipeline": the expansion of the t-th moment of P against direct evaluation.
inline SuiteResult verify_pipeline()
{
    SuiteResult s{"pipeline", {}};
    s.checks.push_back(detail::timed_check("expansion vs direct, t <= 3, M <= 3", [](std::string& d) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ud(-1, 1);
        long double worst = 0;
        for (double x : {30.0, 60.0})
            for (std::int64_t A : {3, 6}) {
                const auto box = build_family_box(x, A, A);
                for (int M = 1; M <= 3; ++M) {
                    std::vector<double> U(static_cast<std::size_t>(M) + 1, 0.0);
                    for (int m = 1; m <= M; ++m)
                        U[m] = ud(rng);
                    for (int t = 1; t <= 3; ++t)
                        for (auto cond : {PrimeCondition::SkipBadOnly, PrimeCondition::SkipBadAndAb}) {
                            const auto r = moment_via_expansion(box, U, t, cond);
                            worst = std::max(worst, std::abs(r.difference()));
                        }
                }
            }
        d = "max deviation " + std::to_string(static_cast<double>(worst));
        return worst <= 1e-9L;
    }));
    return s;
}

inline std::vector<std::string> verify_suite_names() { return {"arith", "classnum", "trace", "family", "bs", "pipeline"}; }

inline SuiteResult run_suite(const std::string& name)
{
    if (name == "arith")
        return verify_arith();
    if (name == "classnum")
        return verify_classnum();
    if (name == "trace")
        return verify_trace();
    if (name == "family")
        return verify_family();
    if (name == "bs")
        return verify_bs();
    if (name == "pipeline")
        return verify_pipeline();
    throw std::invalid_argument("unknown suite '" + name + "'");
}

inline void print_suite(std::ostream& os, const SuiteResult& s)
{
    for (const auto& c : s.checks)
        os << (c.ok ? "ok   " : "FAIL ") << s.suite << ": " << c.name << " (" << c.detail << ", " << c.seconds
           << " s)\n";
}

} // namespace stlab

#endif
