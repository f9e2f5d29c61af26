#ifndef STLAB_MOMENTS_HPP
#define STLAB_MOMENTS_HPP

// Moments of the Sato-Tate error N_I(E, x) - pi~(x) mu(I) over the box
// |a| <= A, |b| <= B, computed directly from per-curve counts, plus the
// combinatorial expansion of the t-th moment of P(E, x) used as a cross-check.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arith.hpp"
#include "chebycomb.hpp"
#include "curves.hpp"
#include "st_approx.hpp"

namespace stlab {

inline constexpr std::int64_t kDefaultFamilyBudget = 60'000'000;

/// a_p for every curve of a box and every prime of the window (x/2, x].
/// Curves with Delta = 0 are left out; rows follow a ascending, then b ascending.
struct FamilyBox {
    double x = 0;
    std::int64_t A = 0;
    std::int64_t B = 0;
    PrimeWindow window;
    std::vector<CurveParams> curves;
    /// traces[i * primes + j] for curve i and window prime j.
    std::vector<TraceValue> traces;

    std::size_t prime_count() const { return window.count(); }

    const TraceValue& at(std::size_t curve, std::size_t prime) const
    {
        return traces[curve * prime_count() + prime];
    }

    /// 4AB, the normalization of box averages.
    double normalizer() const { return 4.0 * static_cast<double>(A) * static_cast<double>(B); }
};

/// Builds the trace grid. A residue table per prime is used when the box has at least
/// 4p curves (table cost ~4p^2), otherwise each curve is counted directly. Primes are
/// split across `threads` workers; each writes its own column, so the result does not
/// depend on the thread count.
inline FamilyBox build_family_box(double x, std::int64_t A, std::int64_t B,
                                  std::int64_t budget = kDefaultFamilyBudget,
                                  std::int64_t table_cap = kDefaultApTableCap, int threads = 1)
{
    if (A < 1 || B < 1)
        throw std::domain_error("family box: A and B must be >= 1");
    FamilyBox box;
    box.x = x;
    box.A = A;
    box.B = B;
    box.window = primes_in_window(x);
    for (std::int64_t a = -A; a <= A; ++a)
        for (std::int64_t b = -B; b <= B; ++b)
            if (!CurveParams{a, b}.singular())
                box.curves.emplace_back(a, b);

    const auto nc = static_cast<std::int64_t>(box.curves.size());
    const auto np = static_cast<std::int64_t>(box.prime_count());
    if (nc * np > budget)
        throw BudgetError("family box: " + std::to_string(nc) + " curves x " + std::to_string(np)
                          + " primes exceeds budget " + std::to_string(budget));
    if (box.window.primes.front() < 5)
        throw std::domain_error("family box: window contains p < 5; use x >= 10");
    box.traces.resize(static_cast<std::size_t>(nc * np));

    auto fill = [&](std::int64_t j) {
        const std::int64_t p = box.window.primes[j];
        if (p <= table_cap && nc >= 4 * p) {
            const ApTable table(p, table_cap);
            for (std::int64_t i = 0; i < nc; ++i)
                box.traces[i * np + j] = table.at(box.curves[i].a, box.curves[i].b);
        } else {
            for (std::int64_t i = 0; i < nc; ++i)
                box.traces[i * np + j] = curve_ap(p, box.curves[i]);
        }
    };
    const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(np, 1)));
    if (workers == 1) {
        for (std::int64_t j = 0; j < np; ++j)
            fill(j);
        return box;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::int64_t j = w; j < np; j += workers)
                        fill(j);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return box;
}

/// N_I(E, x) for every curve of the box.
inline std::vector<std::int64_t> interval_counts(const FamilyBox& box, const Interval& I)
{
    const std::size_t np = box.prime_count();
    std::vector<double> root(np);
    for (std::size_t j = 0; j < np; ++j)
        root[j] = std::sqrt(static_cast<double>(box.window.primes[j]));
    std::vector<std::int64_t> n(box.curves.size(), 0);
    for (std::size_t i = 0; i < box.curves.size(); ++i)
        for (std::size_t j = 0; j < np; ++j) {
            const TraceValue& tv = box.at(i, j);
            if (tv.good() && I.contains(tv.ap / root[j]))
                ++n[i];
        }
    return n;
}

/// N_I(E, x) - pi~(x) mu(I).
inline double error_term(const CurveParams& curve, double x, const Interval& I)
{
    const auto n = count_in_interval(curve, x, I);
    return static_cast<double>(n) - static_cast<double>(primes_in_window(x).count()) * st_measure(I);
}

/// eta(t) = max{t, 2(t-1)}.
inline int moment_eta(int t) { return std::max(t, 2 * (t - 1)); }

/// delta(t): 1 for even t, 0 for odd t.
inline int moment_delta(int t) { return t % 2 == 0 ? 1 : 0; }

struct MomentPlan {
    double x = 2000;
    std::int64_t A = 50;
    std::int64_t B = 50;
    Interval interval = Interval::from_angles(0, std::numbers::pi / 2);
    std::vector<int> orders{1, 2, 3, 4};
    /// 0 selects M from the profile using the largest order.
    int M = 0;
    Profile profile = Profile::Unconditional;
    PrimeCondition condition = PrimeCondition::SkipBadOnly;
    /// Report-only constants for the profile scalings and thresholds.
    double c = 1.0;
    double eps = 0.1;

    int resolved_M() const
    {
        if (M > 0)
            return M;
        const int tmax = orders.empty() ? 1 : *std::max_element(orders.begin(), orders.end());
        return std::max(3, select_M(profile, x, tmax, c));
    }
};

struct MomentRow {
    int t = 0;
    double empirical = 0;
    double main_term = 0;
    std::optional<double> ratio;
    int eta = 0;
    /// x^{eta+eps}, x^{3 eta/2+eps}, x^{2 eta+eps}: box sizes AB beyond which the
    /// asymptotic holds under the hypotheses, MRH, and unconditionally.
    double threshold_hypotheses = 0;
    double threshold_mrh = 0;
    double threshold_unconditional = 0;
};

struct MomentReport {
    double x = 0;
    std::int64_t A = 0;
    std::int64_t B = 0;
    double alpha = 0;
    double beta = 0;
    int M = 0;
    Profile profile = Profile::Unconditional;
    double mu = 0;
    std::int64_t pi_tilde = 0;
    double Z = 0;
    std::int64_t curves = 0;
    std::vector<MomentRow> results;
};

/// (1/4AB) sum_{E in box} (N_I(E,x) - pi~ mu)^t for each t, exact integer counts up to the
/// final normalization.
inline MomentReport family_moments(const MomentPlan& plan, const FamilyBox& box)
{
    MomentReport r;
    r.x = plan.x;
    r.A = plan.A;
    r.B = plan.B;
    r.alpha = plan.interval.alpha;
    r.beta = plan.interval.beta;
    r.M = plan.resolved_M();
    r.profile = plan.profile;
    r.mu = st_measure(plan.interval);
    r.pi_tilde = static_cast<std::int64_t>(box.prime_count());
    r.Z = exact_st_coeffs(plan.interval, r.M).z;
    r.curves = static_cast<std::int64_t>(box.curves.size());

    // histogram of counts; sums taken in increasing count order
    std::map<std::int64_t, std::int64_t> hist;
    for (std::int64_t n : interval_counts(box, plan.interval))
        ++hist[n];
    const double center = static_cast<double>(r.pi_tilde) * r.mu;
    const double var = r.mu - r.mu * r.mu;

    for (int t : plan.orders) {
        if (t < 1)
            throw std::domain_error("family_moments: orders must be >= 1");
        MomentRow row;
        row.t = t;
        long double s = 0;
        for (const auto& [n, mult] : hist)
            s += static_cast<long double>(mult) * std::pow(static_cast<long double>(n) - center, t);
        row.empirical = static_cast<double>(s / box.normalizer());
        row.main_term = moment_delta(t) * gaussian_moment_constant(t).get_d()
            * std::pow(var * static_cast<double>(r.pi_tilde), t / 2.0);
        if (row.main_term != 0)
            row.ratio = row.empirical / row.main_term;
        row.eta = moment_eta(t);
        row.threshold_hypotheses = std::pow(plan.x, row.eta + plan.eps);
        row.threshold_mrh = std::pow(plan.x, 1.5 * row.eta + plan.eps);
        row.threshold_unconditional = std::pow(plan.x, 2.0 * row.eta + plan.eps);
        r.results.push_back(row);
    }
    return r;
}

inline MomentReport family_moments(const MomentPlan& plan)
{
    return family_moments(plan, build_family_box(plan.x, plan.A, plan.B));
}

/// Normalized traces of the admitted primes of curve i.
inline std::vector<double> admitted_traces(const FamilyBox& box, std::size_t i, PrimeCondition cond)
{
    std::vector<double> out;
    for (std::size_t j = 0; j < box.prime_count(); ++j) {
        const std::int64_t p = box.window.primes[j];
        const TraceValue& tv = box.at(i, j);
        if (prime_admitted(tv, box.curves[i], p, cond))
            out.push_back(tv.ap / std::sqrt(static_cast<double>(p)));
    }
    return out;
}

inline constexpr int kMaxExpansionOrder = 3;
inline constexpr int kMaxExpansionDegree = 6;

/// Coefficients C(alpha_1..alpha_u) of the opened t-th power
///   (sum_m U(m) sum_p f_m(t_p))^t = sum_u sum_alpha C(alpha) sum_{distinct q_1..q_u} prod_j f_{alpha_j}(t_{q_j}),
/// where C(alpha) = sum over set partitions Q of {1..t} into u blocks (ordered by least element)
/// and m in [1, M]^t of prod_i U(m_i) prod_j D(m restricted to Q_j; alpha_j).
class ExpansionCoefficients {
public:
    ExpansionCoefficients(const std::vector<double>& U, int t) : t_(t)
    {
        const int M = static_cast<int>(U.size()) - 1;
        if (t < 1 || t > kMaxExpansionOrder || M < 1 || M > kMaxExpansionDegree)
            throw BudgetError("moment expansion: requires 1 <= t <= 3 and 1 <= M <= 6");
        for_each_set_partition(t, [&](const SetPartition& part) {
            std::vector<int> m(static_cast<std::size_t>(t), 1);
            while (true) {
                long double weight = 1;
                for (int v : m)
                    weight *= U[v];
                if (weight != 0)
                    accumulate(part, m, weight);
                int i = 0;
                while (i < t && m[i] == M)
                    m[i++] = 1;
                if (i == t)
                    break;
                ++m[i];
            }
        });
    }

    int order() const { return t_; }

    /// C(alpha); zero for tuples that never occur.
    long double operator()(const std::vector<int>& alpha) const
    {
        auto it = table_.find(alpha);
        return it == table_.end() ? 0.0L : it->second;
    }

    const std::map<std::vector<int>, long double>& table() const { return table_; }

private:
    void accumulate(const SetPartition& part, const std::vector<int>& m, long double weight)
    {
        std::vector<UBasisExpansion> expansions;
        for (const auto& block : part.blocks) {
            std::vector<int> ms;
            for (int e : block)
                ms.push_back(m[e]);
            expansions.push_back(u_product_expand(ms));
        }
        std::vector<int> alpha(expansions.size());
        expand(expansions, 0, alpha, weight);
    }

    void expand(const std::vector<UBasisExpansion>& ex, std::size_t j, std::vector<int>& alpha, long double w)
    {
        if (j == ex.size()) {
            table_[alpha] += w;
            return;
        }
        for (const auto& [a, d] : ex[j]) {
            alpha[j] = a;
            expand(ex, j + 1, alpha, w * static_cast<long double>(d.get_d()));
        }
    }

    int t_;
    std::map<std::vector<int>, long double> table_;
};

/// n (n-1) ... (n-z+1), zero when z > n.
inline long double falling_factorial(std::int64_t n, int z)
{
    long double r = 1;
    for (int i = 0; i < z; ++i)
        r *= static_cast<long double>(n - i);
    return r;
}

/// sum over pairwise distinct q_1..q_u in G of prod_j f_{alpha_j}(t_{q_j}): zero indices
/// factor out as a falling factorial, the rest is separated by set partitions.
inline long double distinct_prime_sum(const std::vector<int>& alpha, const std::vector<double>& traces)
{
    std::vector<int> live;
    for (int a : alpha)
        if (a != 0)
            live.push_back(a);
    const int zeros = static_cast<int>(alpha.size() - live.size());
    const auto g = static_cast<std::int64_t>(traces.size());
    const long double ff = falling_factorial(g - static_cast<std::int64_t>(live.size()), zeros);
    if (ff == 0 || g < static_cast<std::int64_t>(live.size()))
        return 0;
    if (live.empty())
        return ff;

    const int n = static_cast<int>(live.size());
    std::vector<std::vector<long double>> f(static_cast<std::size_t>(n), std::vector<long double>(traces.size()));
    for (int i = 0; i < n; ++i)
        for (std::size_t q = 0; q < traces.size(); ++q)
            f[i][q] = f_eval(live[i], traces[q]);

    long double total = 0;
    for_each_set_partition(n, [&](const SetPartition& part) {
        long double term = static_cast<long double>(partition_coeff(part).get_si());
        for (const auto& block : part.blocks) {
            long double s = 0;
            for (std::size_t q = 0; q < traces.size(); ++q) {
                long double prod = 1;
                for (int i : block)
                    prod *= f[i][q];
                s += prod;
            }
            term *= s;
        }
        total += term;
    });
    return ff * total;
}

struct ExpansionCheck {
    long double expansion = 0;
    long double direct = 0;

    long double difference() const { return expansion - direct; }
};

/// (1/4AB) sum_E P(E)^t computed directly and through the coefficient expansion, with
/// P(E) = sum_{m=1}^{M} U(m) sum_{p admitted} f_m(a~_E(p)). U[0] is ignored.
inline ExpansionCheck moment_via_expansion(const FamilyBox& box, const std::vector<double>& U, int t,
                                           PrimeCondition cond)
{
    const ExpansionCoefficients C(U, t);
    ExpansionCheck r;
    for (std::size_t i = 0; i < box.curves.size(); ++i) {
        const auto traces = admitted_traces(box, i, cond);

        long double P = 0;
        for (double tp : traces)
            for (std::size_t m = 1; m < U.size(); ++m)
                P += static_cast<long double>(U[m]) * f_eval(static_cast<int>(m), tp);
        long double power = 1;
        for (int k = 0; k < t; ++k)
            power *= P;
        r.direct += power;

        for (const auto& [alpha, c] : C.table())
            if (c != 0)
                r.expansion += c * distinct_prime_sum(alpha, traces);
    }
    r.direct /= box.normalizer();
    r.expansion /= box.normalizer();
    return r;
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct CltSample {
    std::vector<CurveParams> curves;
    std::vector<std::int64_t> counts;
    std::vector<double> errors;
    std::vector<double> standardized;
    double mean = 0;
    double variance = 0;
    double ks = 0;
    std::vector<double> bin_edges;
    std::vector<std::int64_t> bin_counts;

    /// CSV rows a, b, n_i, error, standardized.
    void write_csv(std::ostream& os) const
    {
        os << "a,b,n_i,error,standardized\n";
        os.precision(17);
        for (std::size_t i = 0; i < curves.size(); ++i)
            os << curves[i].a << ',' << curves[i].b << ',' << counts[i] << ',' << errors[i] << ','
               << standardized[i] << '\n';
    }
};

/// Kolmogorov-Smirnov distance between the empirical CDF of the sample and the standard normal.
inline double ks_distance(std::vector<double> sample)
{
    if (sample.empty())
        return 0;
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = normal_cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

/// Standardized errors (N_I - pi~ mu) / sqrt(pi~ (mu - mu^2)) for a list of curves with their counts.
inline CltSample clt_sample(const std::vector<CurveParams>& curves, const std::vector<std::int64_t>& counts,
                            std::int64_t pi_tilde, const Interval& I, int bins = 40)
{
    const double mu = st_measure(I);
    const double scale = std::sqrt(static_cast<double>(pi_tilde) * (mu - mu * mu));
    if (!(scale > 0))
        throw std::domain_error("clt: interval has zero Sato-Tate variance");
    if (bins < 1)
        throw std::domain_error("clt: bins must be >= 1");
    CltSample s;
    s.curves = curves;
    s.counts = counts;
    const double center = static_cast<double>(pi_tilde) * mu;
    for (std::int64_t n : counts) {
        const double e = static_cast<double>(n) - center;
        s.errors.push_back(e);
        s.standardized.push_back(e / scale);
    }
    const double N = static_cast<double>(counts.size());
    for (double z : s.standardized)
        s.mean += z;
    s.mean = N > 0 ? s.mean / N : 0;
    for (double z : s.standardized)
        s.variance += (z - s.mean) * (z - s.mean);
    s.variance = N > 0 ? s.variance / N : 0;
    s.ks = ks_distance(s.standardized);

    const double lo = -4, hi = 4, w = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i)
        s.bin_edges.push_back(lo + i * w);
    s.bin_counts.assign(static_cast<std::size_t>(bins), 0);
    for (double z : s.standardized) {
        const int k = std::clamp(static_cast<int>(std::floor((z - lo) / w)), 0, bins - 1);
        ++s.bin_counts[k];
    }
    return s;
}

inline CltSample clt_histogram(const FamilyBox& box, const Interval& I, int bins = 40)
{
    return clt_sample(box.curves, interval_counts(box, I), static_cast<std::int64_t>(box.prime_count()), I, bins);
}

/// Sample over an explicit curve list.
inline CltSample clt_histogram(const std::vector<CurveParams>& curves, double x, const Interval& I, int bins = 40)
{
    std::vector<std::int64_t> counts;
    for (const auto& c : curves)
        counts.push_back(count_in_interval(c, x, I));
    return clt_sample(curves, counts, static_cast<std::int64_t>(primes_in_window(x).count()), I, bins);
}

struct AlmostAllReport {
    double y = 0;
    Profile profile = Profile::Unconditional;
    double threshold = 0;
    std::int64_t exceptions = 0;
    std::int64_t total = 0;
    double fraction = 0;
    double y_inverse_square = 0;
    /// log|error| / log x over curves with |error| >= 1.
    double exponent_mean = 0;
    double exponent_max = 0;
    std::int64_t exponent_samples = 0;
};

/// Exceptions to |N_I - pi~ mu| <= y * bound(profile), with bound
///   unconditional  x^{3/4} (log x)^{-c},
///   MRH            x^{1/2} (log x)^{1/2},
///   hypotheses     (mu - mu^2)^{1/2} pi~^{1/2} + x^{1/2} (log x)^{-c}.
inline AlmostAllReport almost_all_report(const FamilyBox& box, const Interval& I, double y, Profile profile,
                                         double c = 1.0)
{
    if (!(y > 0))
        throw std::domain_error("almost_all: y must be positive");
    const double x = box.x, L = std::log(x);
    const double mu = st_measure(I);
    const auto pi_tilde = static_cast<double>(box.prime_count());
    AlmostAllReport r;
    r.y = y;
    r.profile = profile;
    switch (profile) {
    case Profile::Unconditional: r.threshold = y * std::pow(x, 0.75) * std::pow(L, -c); break;
    case Profile::MRH: r.threshold = y * std::sqrt(x) * std::sqrt(L); break;
    case Profile::Hypotheses:
        r.threshold = y * (std::sqrt((mu - mu * mu) * pi_tilde) + std::sqrt(x) * std::pow(L, -c));
        break;
    }
    const auto counts = interval_counts(box, I);
    r.total = static_cast<std::int64_t>(counts.size());
    double exp_sum = 0;
    for (std::int64_t n : counts) {
        const double e = static_cast<double>(n) - pi_tilde * mu;
        if (std::abs(e) > r.threshold)
            ++r.exceptions;
        if (std::abs(e) >= 1) {
            const double k = std::log(std::abs(e)) / L;
            exp_sum += k;
            r.exponent_max = std::max(r.exponent_max, k);
            ++r.exponent_samples;
        }
    }
    r.fraction = r.total ? static_cast<double>(r.exceptions) / static_cast<double>(r.total) : 0;
    r.y_inverse_square = 1.0 / (y * y);
    r.exponent_mean = r.exponent_samples ? exp_sum / static_cast<double>(r.exponent_samples) : 0;
    return r;
}

struct Hypothesis2Probe {
    double value = 0;
    std::int64_t primes = 0;
    /// m x / log x, the scale the sum is compared against.
    double scale = 0;
};

/// sum_{y < p <= x, p >= 5, p not dividing Delta} a~_E(p^m).
inline Hypothesis2Probe hypothesis2_probe(const CurveParams& curve, int m, double y, double x)
{
    if (curve.singular())
        throw std::domain_error("hypothesis2_probe: singular curve (Delta = 0)");
    if (m < 0)
        throw std::domain_error("hypothesis2_probe: m must be nonnegative");
    Hypothesis2Probe r;
    for (std::int64_t p : primes_between(y, x)) {
        const TraceValue tv = curve_ap(p, curve);
        if (!tv.good())
            continue;
        r.value += normalized_coeff(tv, p, m);
        ++r.primes;
    }
    r.scale = std::max(m, 1) * x / std::log(x);
    return r;
}

} // namespace stlab

#endif
