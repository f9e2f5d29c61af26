// Acceptance run: one PASS/FAIL line per criterion. Criterion 10 is a soft
// diagnostic and prints WARN instead of failing. Exit status 1 if any hard
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stlab/stlab.hpp"

using namespace stlab;
using std::numbers::pi;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit;
    bool soft;
    std::function<Outcome()> body;
};

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

Outcome combinatorics()
{
    for (int k = 0; k <= 60; ++k)
        for (int l = 0; l <= k; ++l)
            if (a_lk(l, k) != (l == k ? 1 : 0))
                return {false, "A_{" + std::to_string(l) + "," + std::to_string(k) + "} wrong"};

    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<int> coef(-25, 25), deg(0, 7), num(-40, 40), den(1, 11);
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
            return {false, "Melzak instance " + std::to_string(i)};
    }

    std::string d;
    if (!check_dbounds(24, d))
        return {false, "D relations: " + d};
    return {true, "A_{l,k} k <= 60, 200 Melzak instances, D relations on " + d};
}

Outcome class_numbers()
{
    const std::vector<std::pair<std::int64_t, mpq_class>> expect{
        {3, mpq_class(1, 3)}, {4, mpq_class(1, 2)}, {7, 1},  {8, 1},  {11, 1},
        {12, mpq_class(4, 3)}, {15, 2},             {16, mpq_class(3, 2)}, {19, 1}, {20, 2}};
    for (const auto& [N, h] : expect)
        if (hurwitz(N) != h)
            return {false, "H(" + std::to_string(N) + ") = " + hurwitz(N).get_str()};
    const HurwitzTable table(8000);
    std::size_t n = 0;
    for (std::int64_t p : primes_between(4, 2000)) {
        if (eichler_mass(p, table) != 0)
            return {false, "mass identity fails at p = " + std::to_string(p)};
        ++n;
    }
    return {true, "10 values, mass identity at " + std::to_string(n) + " primes"};
}

Outcome class_number_moments()
{
    const HurwitzTable table(400);
    std::size_t n = 0;
    for (std::int64_t p : primes_between(4, 100)) {
        const ApTable t(p);
        for (int g = 0; g <= 6; ++g) {
            mpz_class brute = 0;
            for (const auto& e : t.entries())
                if (e.good()) {
                    mpz_class v;
                    mpz_pow_ui(v.get_mpz_t(), mpz_class(e.ap).get_mpz_t(), static_cast<unsigned long>(g));
                    brute += v;
                }
            const mpz_class via = family_moment_classnum(p, g, table);
            if (brute != via || (g % 2 && via != 0))
                return {false, "p = " + std::to_string(p) + ", g = " + std::to_string(g)};
            ++n;
        }
    }
    return {true, std::to_string(n) + " (p, g) pairs exact"};
}

Outcome trace_routes()
{
    const HurwitzTable table(800);
    HeckeTraceEngine engine;
    std::size_t n = 0;
    for (std::int64_t p : primes_between(4, 200))
        for (const auto& rec : traces_via_birch(p, 12, table)) {
            const auto m = engine.trace(rec.k, p);
            if (m.trace != rec.trace)
                return {false, "k = " + std::to_string(rec.k) + ", p = " + std::to_string(p)};
            if (!deligne_ok(rec) || !deligne_ok(m))
                return {false, "Deligne bound at k = " + std::to_string(rec.k) + ", p = " + std::to_string(p)};
            ++n;
        }
    const QSeries delta = delta_series(50);
    for (std::int64_t p = 2; p <= 50; ++p)
        if (is_prime(p) && engine.trace(12, p).trace != delta[static_cast<std::size_t>(p)])
            return {false, "tau(" + std::to_string(p) + ")"};
    return {true, std::to_string(n) + " records, tau(p) for p <= 50"};
}

Outcome local_average()
{
    HeckeTraceEngine engine;
    double worst = 0;
    for (std::int64_t p : primes_between(4, 100))
        for (int m = 0; m <= 12; ++m)
            worst = std::max(worst, std::abs(s0_brute(p, m) - s0_formula(p, m, engine)));
    return {worst <= 1e-10, "max |grid - trace formula| = " + fmt(worst)};
}

Outcome multiplicativity()
{
    const std::vector<std::pair<std::int64_t, std::int64_t>> pairs{
        {5, 7},   {5, 11},  {5, 13},  {5, 17},  {5, 19},  {5, 23},  {5, 29},  {5, 31},  {5, 37},  {7, 11},
        {7, 13},  {7, 17},  {7, 19},  {7, 23},  {7, 29},  {11, 13}, {11, 17}, {25, 7},  {5, 49},  {13, 19}};
    double worst = 0;
    for (const auto& [a, b] : pairs) {
        const double whole = s_brute(FactoredInteger(a * b));
        const double product = s_brute(FactoredInteger(a)) * s_brute(FactoredInteger(b));
        worst = std::max(worst, std::abs(whole - product));
    }
    return {worst <= 1e-9, std::to_string(pairs.size()) + " pairs, max deviation " + fmt(worst)};
}

const std::vector<Interval>& parseval_intervals()
{
    static const std::vector<Interval> v{Interval::from_angles(0, pi / 2), Interval::from_angles(pi / 3, 2 * pi / 3),
                                         Interval::from_angles(0.4, 2.5)};
    return v;
}

Outcome parseval()
{
    double worst_ratio = 0;
    for (const auto& I : parseval_intervals()) {
        double prev = 1e300;
        for (int M : {100, 1000, 10000}) {
            const auto r = parseval_check(I, M);
            if (r.gap > r.bound)
                return {false, "gap " + fmt(r.gap) + " > bound at M = " + std::to_string(M)};
            if (r.gap >= prev)
                return {false, "gap not decreasing at M = " + std::to_string(M)};
            prev = r.gap;
            worst_ratio = std::max(worst_ratio, r.gap / r.bound);
        }
    }
    return {true, "3 intervals x 3 degrees, max gap/bound " + fmt(worst_ratio)};
}

Outcome sandwich()
{
    const std::vector<Interval> intervals{Interval::from_angles(0, pi / 2), Interval::from_angles(0.7, 2.1),
                                          Interval::from_angles(1.2, pi)};
    const int N = 100000;
    double worst = 0;
    for (const auto& I : intervals) {
        const auto lo = sandwich_coeffs(I, 256, Side::Minor);
        const auto hi = sandwich_coeffs(I, 256, Side::Major);
        for (int i = 0; i <= N; ++i) {
            const double th = pi * i / N;
            const double chi = (th >= I.alpha && th <= I.beta) ? 1.0 : 0.0;
            const double t = 2 * std::cos(th);
            worst = std::min({worst, hi.eval_f(t) - chi, chi - lo.eval_f(t)});
        }
    }
    if (worst < -1e-12)
        return {false, "pointwise violation " + fmt(worst)};

    std::mt19937_64 rng(500);
    std::uniform_int_distribution<std::int64_t> d(-10000, 10000);
    const Interval I = intervals[1];
    const auto lo = sandwich_coeffs(I, 256, Side::Minor);
    const auto hi = sandwich_coeffs(I, 256, Side::Major);
    int violations = 0, curves = 0;
    while (curves < 200) {
        const CurveParams E(d(rng), d(rng));
        if (E.singular())
            continue;
        violations += !sandwich_error_bound(E, 500, lo, hi, I).holds();
        ++curves;
    }
    return {violations == 0, "min slack " + fmt(worst) + " on 3 x 1e5 points, " + std::to_string(violations)
                                 + " bracket violations in 200 curves"};
}

Outcome pipeline()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ud(-1, 1);
    long double worst = 0;
    std::size_t n = 0;
    for (double x : {30.0, 60.0, 100.0})
        for (std::int64_t A : {2, 4, 6}) {
            const auto box = build_family_box(x, A, A);
            for (int M = 1; M <= 3; ++M) {
                std::vector<double> U(static_cast<std::size_t>(M) + 1, 0.0);
                for (int m = 1; m <= M; ++m)
                    U[m] = ud(rng);
                for (int t = 1; t <= 3; ++t)
                    for (auto cond : {PrimeCondition::SkipBadOnly, PrimeCondition::SkipBadAndAb}) {
                        worst = std::max(worst, std::abs(moment_via_expansion(box, U, t, cond).difference()));
                        ++n;
                    }
            }
        }
    return {worst <= 1e-9L, std::to_string(n) + " configurations, max deviation " + fmt(static_cast<double>(worst))};
}

Outcome soft_diagnostics()
{
    const Interval I = Interval::from_angles(0, pi / 2);
    bool ok = true;
    std::ostringstream d;
    for (std::int64_t side : {50, 60}) {
        const auto box = build_family_box(2000, side, side);
        MomentPlan plan;
        plan.x = 2000;
        plan.A = plan.B = side;
        plan.interval = I;
        plan.orders = {2};
        const auto report = family_moments(plan, box);
        const double ratio = report.results[0].ratio.value_or(0);
        const auto clt = clt_histogram(box, I);
        ok = ok && ratio >= 0.5 && ratio <= 1.5 && clt.ks < 0.1;

        // informational: the same ratio over curves with ab != 0 (E(a, 0) and E(0, b) have CM)
        const auto counts = interval_counts(box, I);
        const double center = static_cast<double>(report.pi_tilde) * report.mu;
        double s2 = 0, n = 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (box.curves[i].a != 0 && box.curves[i].b != 0) {
                s2 += (counts[i] - center) * (counts[i] - center);
                ++n;
            }
        const double ratio_non_cm = s2 / n / report.results[0].main_term;
        d << "box " << side << ": t=2 ratio " << fmt(ratio) << " (ab != 0 only: " << fmt(ratio_non_cm) << "), KS "
          << fmt(clt.ks) << "; ";
        if (side == 50) {
            const auto aa = almost_all_report(box, I, 3, Profile::Hypotheses);
            d << "y=3 exceptions " << fmt(aa.fraction) << " vs y^-2 " << fmt(aa.y_inverse_square) << "; ";
        }
    }
    std::string s = d.str();
    s.resize(s.size() - 2);
    return {ok, s};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "combinatorial identities", 5, false, combinatorics},
        {2, "class numbers and mass identity", 60, false, class_numbers},
        {3, "class-number family moments", 30, false, class_number_moments},
        {4, "trace routes agree", 120, false, trace_routes},
        {5, "local averages by grid and by trace", 120, false, local_average},
        {6, "multiplicativity of S", 1e9, false, multiplicativity},
        {7, "Parseval gap", 1e9, false, parseval},
        {8, "sandwich polynomials", 1e9, false, sandwich},
        {9, "moment expansion", 1e9, false, pipeline},
        {10, "family statistics (soft)", 900, true, soft_diagnostics},
    };

    bool all_ok = true;
    double total = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        total += secs;
        if (o.ok && secs > c.time_limit) {
            o.ok = false;
            o.detail += "; over time limit " + fmt(c.time_limit) + " s";
        }
        const char* tag = o.ok ? "PASS" : (c.soft ? "WARN" : "FAIL");
        std::cout << tag << ' ' << std::setw(2) << c.id << "  " << c.title << ": " << o.detail << " ("
                  << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat << std::endl;
        if (!o.ok && !c.soft)
            all_ok = false;
    }
    std::cout << (all_ok ? "acceptance: all hard criteria passed" : "acceptance: FAILED") << " (" << std::fixed
              << std::setprecision(1) << total << " s)" << std::endl;
    return all_ok ? 0 : 1;
}
