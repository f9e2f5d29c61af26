#ifndef STLAB_CLI_HPP
#define STLAB_CLI_HPP

// The `stlab` command line. run() parses argv, dispatches one subcommand and
// returns the process exit code: 0 success, 1 failed check, 2 usage, 3 budget.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "cache.hpp"
#include "classnumbers.hpp"
#include "config.hpp"
#include "curves.hpp"
#include "family.hpp"
#include "hecke.hpp"
#include "moments.hpp"
#include "report.hpp"
#include "st_approx.hpp"
#include "verify.hpp"

namespace stlab {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitBudget = 3 };

namespace detail {

    struct IntervalArgs {
        double alpha = 0;
        double beta = std::numbers::pi / 2;
        bool half_open = false;

        void add_to(CLI::App* cmd)
        {
            cmd->add_option("--alpha", alpha, "left angle in radians (interval hi = 2cos alpha)")->capture_default_str();
            cmd->add_option("--beta", beta, "right angle in radians (interval lo = 2cos beta)")->capture_default_str();
            cmd->add_flag("--half-open", half_open, "use [lo, hi) instead of [lo, hi]");
        }

        Interval get() const { return Interval::from_angles(alpha, beta, half_open); }
    };

    struct BoxArgs {
        double x = 2000;
        std::int64_t A = 50;
        std::int64_t B = 50;

        void add_to(CLI::App* cmd)
        {
            cmd->add_option("--x", x, "window (x/2, x]")->capture_default_str()->check(CLI::Range(10.0, 1e9));
            cmd->add_option("--A", A, "box half-width in a")->capture_default_str()->check(CLI::PositiveNumber);
            cmd->add_option("--B", B, "box half-width in b")->capture_default_str()->check(CLI::PositiveNumber);
        }

        FamilyBox build(const RunConfig& cfg) const
        {
            return build_family_box(x, A, B, cfg.family_budget, cfg.ap_table_cap, cfg.threads);
        }
    };

    inline void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

    inline std::ofstream open_out(const std::string& path)
    {
        std::ofstream os(path);
        if (!os)
            throw std::invalid_argument("cannot open output file " + path);
        return os;
    }

    const std::vector<std::string> kProfiles{"unconditional", "mrh", "hypotheses"};

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sato-Tate error-term laboratory: curve families, class numbers, Hecke traces, moments", "stlab"};
    app.require_subcommand(1);

    std::string config_path, cache_dir;
    int threads = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--cache-dir", cache_dir, "a_p table cache (default $STLAB_CACHE_DIR or .stlab-cache)");
    app.add_option("--threads", threads, "worker threads for table builds")->check(CLI::PositiveNumber);

    // primes
    auto* primes_cmd = app.add_subcommand("primes", "count primes in (x/2, x]");
    double primes_x = 0;
    bool primes_list = false;
    primes_cmd->add_option("--x", primes_x, "upper end of the window")->required();
    primes_cmd->add_flag("--list", primes_list, "print the primes instead of the count");

    // ap
    auto* ap_cmd = app.add_subcommand("ap", "a_p of y^2 = x^3 + ax + b, or the full residue table");
    std::int64_t ap_p = 0, ap_a = 0, ap_b = 0;
    bool ap_table = false, ap_cache = false;
    std::string ap_out;
    ap_cmd->add_option("--p", ap_p, "prime >= 5")->required();
    auto* ap_a_opt = ap_cmd->add_option("--a", ap_a);
    auto* ap_b_opt = ap_cmd->add_option("--b", ap_b);
    ap_cmd->add_flag("--table", ap_table, "emit CSV a,b,ap,reduction for all residues");
    ap_cmd->add_flag("--cache", ap_cache, "read/write the table through the cache directory");
    ap_cmd->add_option("--out", ap_out, "CSV path for --table");
    ap_a_opt->needs(ap_b_opt);
    ap_b_opt->needs(ap_a_opt);

    // hurwitz
    auto* hurwitz_cmd = app.add_subcommand("hurwitz", "table of 12 H(N)");
    std::int64_t hurwitz_max = 0;
    std::string hurwitz_out;
    hurwitz_cmd->add_option("--max-n", hurwitz_max)->required()->check(CLI::PositiveNumber);
    hurwitz_cmd->add_option("--out", hurwitz_out, "CSV path (stdout if omitted)");

    // eichler-check
    auto* eichler_cmd = app.add_subcommand("eichler-check", "sum_r H(4p - r^2) = 2p for 5 <= p <= max-p");
    std::int64_t eichler_max = 2000;
    eichler_cmd->add_option("--max-p", eichler_max)->capture_default_str()->check(CLI::Range(5, 1000000));

    // trace
    auto* trace_cmd = app.add_subcommand("trace", "trace of T_p on S_k(SL_2(Z))");
    int trace_k = 12;
    std::int64_t trace_p = 2;
    std::string trace_method = "miller";
    trace_cmd->add_option("--k", trace_k)->required()->check(CLI::Range(0, 400));
    trace_cmd->add_option("--p", trace_p)->required();
    trace_cmd->add_option("--method", trace_method)->capture_default_str()->check(CLI::IsMember({"miller", "birch"}));

    // birch-check
    auto* birch_cmd = app.add_subcommand("birch-check", "compare class-number and q-expansion traces");
    std::int64_t birch_pmax = 200;
    int birch_jmax = 12;
    std::string birch_out;
    birch_cmd->add_option("--p-max", birch_pmax)->capture_default_str()->check(CLI::Range(5, 100000));
    birch_cmd->add_option("--j-max", birch_jmax)->capture_default_str()->check(CLI::Range(1, 40));
    birch_cmd->add_option("--out", birch_out, "CSV of the class-number traces (k,p,trace,method)");

    // s0
    auto* s0_cmd = app.add_subcommand("s0", "local family average S0(p^m), by grid and by trace");
    std::int64_t s0_p = 5;
    int s0_m = 2;
    s0_cmd->add_option("--p", s0_p)->required();
    s0_cmd->add_option("--m", s0_m)->required()->check(CLI::Range(0, 200));

    // bs
    auto* bs_cmd = app.add_subcommand("bs", "approximation coefficients (m, s, u) for an interval");
    detail::IntervalArgs bs_iv;
    int bs_M = 64;
    std::string bs_mode = "exact", bs_out;
    bs_iv.add_to(bs_cmd);
    bs_cmd->add_option("--M", bs_M)->required()->check(CLI::Range(1, 10000000));
    bs_cmd->add_option("--mode", bs_mode)->capture_default_str()->check(CLI::IsMember({"exact", "major", "minor"}));
    bs_cmd->add_option("--out", bs_out, "CSV path; a JSON summary goes to stdout");

    // parseval
    auto* parseval_cmd = app.add_subcommand("parseval", "sum of u_m^2 against mu - mu^2");
    detail::IntervalArgs pv_iv;
    int pv_M = 1000;
    pv_iv.add_to(parseval_cmd);
    parseval_cmd->add_option("--M", pv_M)->required()->check(CLI::Range(3, 10000000));

    // moments
    auto* moments_cmd = app.add_subcommand("moments", "family moments of N_I - pi~ mu over a box");
    detail::BoxArgs mo_box;
    detail::IntervalArgs mo_iv;
    std::vector<int> mo_t{1, 2, 3, 4};
    int mo_M = 0;
    std::string mo_profile = "unconditional", mo_out;
    mo_box.add_to(moments_cmd);
    mo_iv.add_to(moments_cmd);
    moments_cmd->add_option("--t", mo_t, "orders, comma separated")->delimiter(',')->capture_default_str()->check(
        CLI::Range(1, 12));
    moments_cmd->add_option("--M", mo_M, "polynomial degree for Z (0 = from profile)")->capture_default_str();
    moments_cmd->add_option("--profile", mo_profile)->capture_default_str()->check(CLI::IsMember(detail::kProfiles));
    moments_cmd->add_option("--out", mo_out, "also write the JSON report here");

    // clt
    auto* clt_cmd = app.add_subcommand("clt", "standardized error sample, histogram and KS distance");
    detail::BoxArgs clt_box;
    detail::IntervalArgs clt_iv;
    int clt_bins = 40;
    std::string clt_out;
    clt_box.add_to(clt_cmd);
    clt_iv.add_to(clt_cmd);
    clt_cmd->add_option("--bins", clt_bins)->capture_default_str()->check(CLI::Range(1, 10000));
    clt_cmd->add_option("--out", clt_out, "CSV of a,b,n_i,error,standardized");

    // almost-all
    auto* aa_cmd = app.add_subcommand("almost-all", "curves whose error exceeds y times the profile bound");
    detail::BoxArgs aa_box;
    detail::IntervalArgs aa_iv;
    double aa_y = 3;
    double aa_c = 1;
    std::string aa_profile = "hypotheses";
    aa_box.add_to(aa_cmd);
    aa_iv.add_to(aa_cmd);
    aa_cmd->add_option("--y", aa_y)->required()->check(CLI::PositiveNumber);
    aa_cmd->add_option("--c", aa_c, "log-power constant in the bound")->capture_default_str();
    aa_cmd->add_option("--profile", aa_profile)->capture_default_str()->check(CLI::IsMember(detail::kProfiles));

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "numeric probes of the trace hypotheses");
    probe_cmd->require_subcommand(1);
    auto* hyp1_cmd = probe_cmd->add_subcommand("hyp1", "sum_k (1/k) |sum_p normalized trace|");
    int hyp1_K = 12;
    double hyp1_x = 100;
    std::vector<int> hyp1_pair;
    hyp1_cmd->add_option("--K", hyp1_K)->capture_default_str()->check(CLI::Range(1, 60));
    hyp1_cmd->add_option("--x", hyp1_x)->capture_default_str()->check(CLI::Range(10.0, 5000.0));
    hyp1_cmd->add_option("--pair", hyp1_pair, "k,l for the paired sum")->delimiter(',')->expected(2);
    auto* hyp2_cmd = probe_cmd->add_subcommand("hyp2", "sum over y < p <= x of a~_E(p^m)");
    std::int64_t hyp2_a = 1, hyp2_b = 1;
    int hyp2_m = 1;
    double hyp2_y = 0, hyp2_x = 1000;
    hyp2_cmd->add_option("--a", hyp2_a)->capture_default_str();
    hyp2_cmd->add_option("--b", hyp2_b)->capture_default_str();
    hyp2_cmd->add_option("--m", hyp2_m)->capture_default_str()->check(CLI::Range(0, 1000));
    hyp2_cmd->add_option("--y", hyp2_y)->capture_default_str();
    hyp2_cmd->add_option("--x", hyp2_x)->capture_default_str();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run identity suites");
    std::string verify_suite = "all";
    std::vector<std::string> suites = verify_suite_names();
    suites.push_back("all");
    verify_cmd->add_option("--suite", verify_suite)->capture_default_str()->check(CLI::IsMember(suites));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\nrun with --help for usage\n";
        return kExitUsage;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (!cache_dir.empty())
            cfg.cache_dir = cache_dir;
        if (threads > 0)
            cfg.threads = threads;
        cfg.validate();
        out << std::setprecision(12);

        if (*primes_cmd) {
            const auto w = primes_in_window(primes_x);
            if (primes_list)
                for (auto p : w.primes)
                    out << p << '\n';
            else
                out << w.count() << '\n';
            return kExitOk;
        }

        if (*ap_cmd) {
            if (ap_table) {
                const ApTable t = ap_cache ? cached_table(cfg.cache_dir, ap_p, cfg.ap_table_cap) : ApTable(ap_p, cfg.ap_table_cap);
                std::ofstream file;
                if (!ap_out.empty())
                    file = detail::open_out(ap_out);
                std::ostream& os = ap_out.empty() ? out : file;
                os << "a,b,ap,reduction\n";
                for (std::int64_t a = 0; a < ap_p; ++a)
                    for (std::int64_t b = 0; b < ap_p; ++b) {
                        const auto& e = t.at(a, b);
                        os << a << ',' << b << ',' << e.ap << ',' << to_string(e.kind) << '\n';
                    }
                return kExitOk;
            }
            if (ap_a_opt->count() == 0)
                throw std::invalid_argument("ap: give --a and --b, or --table");
            if (!is_prime(ap_p))
                throw std::domain_error("ap: p must be prime");
            const auto tv = curve_ap(ap_p, CurveParams(ap_a, ap_b));
            out << tv.ap << ' ' << to_string(tv.kind) << '\n';
            return kExitOk;
        }

        if (*hurwitz_cmd) {
            const HurwitzTable t(hurwitz_max);
            if (hurwitz_out.empty()) {
                t.write_csv(out);
            } else {
                auto os = detail::open_out(hurwitz_out);
                t.write_csv(os);
                out << "wrote " << hurwitz_out << '\n';
            }
            return kExitOk;
        }

        if (*eichler_cmd) {
            const HurwitzTable t(4 * eichler_max);
            std::int64_t n = 0;
            std::vector<std::int64_t> failures;
            for (auto p : primes_between(4, static_cast<double>(eichler_max))) {
                ++n;
                if (eichler_mass(p, t) != 0)
                    failures.push_back(p);
            }
            detail::emit(out, {{"max_p", eichler_max}, {"primes", n}, {"failures", failures}});
            return failures.empty() ? kExitOk : kExitFailure;
        }

        if (*trace_cmd) {
            if (trace_method == "miller") {
                HeckeTraceEngine e(static_cast<std::size_t>(cfg.hecke_max_terms));
                out << e.trace(trace_k, trace_p).trace.get_str() << '\n';
                return kExitOk;
            }
            if (trace_k % 2 || trace_k < 4)
                throw std::domain_error("trace: the class-number route needs even k >= 4");
            const HurwitzTable t(4 * trace_p);
            const auto recs = traces_via_birch(trace_p, (trace_k - 2) / 2, t);
            out << recs.back().trace.get_str() << '\n';
            return kExitOk;
        }

        if (*birch_cmd) {
            const HurwitzTable t(4 * birch_pmax);
            HeckeTraceEngine e(static_cast<std::size_t>(cfg.hecke_max_terms));
            std::vector<TraceRecord> all;
            nlohmann::json mismatches = nlohmann::json::array();
            for (auto p : primes_between(4, static_cast<double>(birch_pmax)))
                for (const auto& rec : traces_via_birch(p, birch_jmax, t)) {
                    all.push_back(rec);
                    const auto m = e.trace(rec.k, p);
                    if (m.trace != rec.trace || !deligne_ok(rec))
                        mismatches.push_back({{"k", rec.k}, {"p", p}});
                }
            if (!birch_out.empty()) {
                auto os = detail::open_out(birch_out);
                write_trace_csv(os, all);
            }
            detail::emit(out, {{"records", all.size()}, {"mismatches", mismatches}});
            return mismatches.empty() ? kExitOk : kExitFailure;
        }

        if (*s0_cmd) {
            HeckeTraceEngine e(static_cast<std::size_t>(cfg.hecke_max_terms));
            const double formula = s0_formula(s0_p, s0_m, e);
            nlohmann::json j{{"p", s0_p}, {"m", s0_m}, {"formula", formula}};
            if (s0_p <= cfg.brute_cap) {
                const double brute = s0_brute(s0_p, s0_m, cfg.brute_cap);
                j["brute"] = brute;
                j["difference"] = brute - formula;
            }
            detail::emit(out, j);
            return kExitOk;
        }

        if (*bs_cmd) {
            const Interval I = bs_iv.get();
            const BSCoefficients c = bs_mode == "exact" ? exact_st_coeffs(I, bs_M)
                                                        : sandwich_coeffs(I, bs_M, bs_mode == "major" ? Side::Major : Side::Minor);
            if (bs_out.empty()) {
                c.write_csv(out);
            } else {
                auto os = detail::open_out(bs_out);
                c.write_csv(os);
                detail::emit(out, to_json(c));
            }
            return kExitOk;
        }

        if (*parseval_cmd) {
            const auto r = parseval_check(pv_iv.get(), pv_M);
            detail::emit(out, {{"M", pv_M}, {"z", r.z}, {"mu_term", r.mu_term}, {"gap", r.gap}, {"bound", r.bound}});
            return r.gap <= r.bound ? kExitOk : kExitFailure;
        }

        if (*moments_cmd) {
            MomentPlan plan;
            plan.x = mo_box.x;
            plan.A = mo_box.A;
            plan.B = mo_box.B;
            plan.interval = mo_iv.get();
            plan.orders = mo_t;
            plan.M = mo_M;
            plan.profile = parse_profile(mo_profile);
            const auto report = to_json(family_moments(plan, mo_box.build(cfg)));
            detail::emit(out, report);
            if (!mo_out.empty()) {
                auto os = detail::open_out(mo_out);
                os << report.dump(2) << '\n';
            }
            return kExitOk;
        }

        if (*clt_cmd) {
            const auto s = clt_histogram(clt_box.build(cfg), clt_iv.get(), clt_bins);
            if (!clt_out.empty()) {
                auto os = detail::open_out(clt_out);
                s.write_csv(os);
            }
            detail::emit(out, to_json(s));
            return kExitOk;
        }

        if (*aa_cmd) {
            const auto r = almost_all_report(aa_box.build(cfg), aa_iv.get(), aa_y, parse_profile(aa_profile), aa_c);
            detail::emit(out, to_json(r));
            return kExitOk;
        }

        if (*hyp1_cmd) {
            HeckeTraceEngine e(static_cast<std::size_t>(cfg.hecke_max_terms));
            const auto r = trace_average_probe(hyp1_K, hyp1_x, e);
            nlohmann::json j{{"K", hyp1_K}, {"x", hyp1_x}, {"value", r.value}, {"ratio_K_sqrt_x", r.ratio},
                             {"regime", "small K only"}};
            if (hyp1_pair.size() == 2)
                j["pair"] = {{"k", hyp1_pair[0]}, {"l", hyp1_pair[1]},
                             {"value", trace_pair_probe(hyp1_pair[0], hyp1_pair[1], hyp1_x, e)}};
            detail::emit(out, j);
            return kExitOk;
        }

        if (*hyp2_cmd) {
            const auto r = hypothesis2_probe(CurveParams(hyp2_a, hyp2_b), hyp2_m, hyp2_y, hyp2_x);
            detail::emit(out, {{"a", hyp2_a}, {"b", hyp2_b}, {"m", hyp2_m}, {"y", hyp2_y}, {"x", hyp2_x},
                               {"value", r.value}, {"primes", r.primes}, {"scale_m_x_over_log_x", r.scale}});
            return kExitOk;
        }

        if (*verify_cmd) {
            bool ok = true;
            for (const auto& name : verify_suite == "all" ? verify_suite_names() : std::vector<std::string>{verify_suite}) {
                const auto s = run_suite(name);
                print_suite(out, s);
                ok = ok && s.ok();
            }
            out << (ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
            return ok ? kExitOk : kExitFailure;
        }
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const PrecisionError& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"stlab"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace stlab

#endif
