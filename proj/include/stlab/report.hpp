#ifndef STLAB_REPORT_HPP
#define STLAB_REPORT_HPP

// JSON and CSV emission for the command-line reports.

#include <json.hpp>

#include <ostream>
#include <vector>

#include "hecke.hpp"
#include "moments.hpp"
#include "st_approx.hpp"

namespace stlab {

inline nlohmann::json to_json(const MomentReport& r)
{
    nlohmann::json results = nlohmann::json::array();
    for (const auto& row : r.results) {
        nlohmann::json j{{"t", row.t},
                         {"empirical", row.empirical},
                         {"main_term", row.main_term},
                         {"ratio", row.ratio ? nlohmann::json(*row.ratio) : nlohmann::json(nullptr)},
                         {"eta", row.eta},
                         {"thresholds",
                          {{"hypotheses", row.threshold_hypotheses},
                           {"mrh", row.threshold_mrh},
                           {"unconditional", row.threshold_unconditional}}}};
        results.push_back(std::move(j));
    }
    return {{"x", r.x},
            {"A", r.A},
            {"B", r.B},
            {"interval", {{"alpha", r.alpha}, {"beta", r.beta}}},
            {"M", r.M},
            {"profile", to_string(r.profile)},
            {"mu", r.mu},
            {"pi_tilde", r.pi_tilde},
            {"Z", r.Z},
            {"curves", r.curves},
            {"results", std::move(results)}};
}

/// Checks the keys and types of a moments report.
inline bool valid_moment_json(const nlohmann::json& j)
{
    for (const char* k : {"x", "A", "B", "M", "mu", "pi_tilde", "Z"})
        if (!j.contains(k) || !j.at(k).is_number())
            return false;
    if (!j.contains("profile") || !j.at("profile").is_string())
        return false;
    if (!j.contains("interval") || !j.at("interval").contains("alpha") || !j.at("interval").contains("beta"))
        return false;
    if (!j.contains("results") || !j.at("results").is_array())
        return false;
    for (const auto& row : j.at("results")) {
        for (const char* k : {"t", "empirical", "main_term"})
            if (!row.contains(k) || !row.at(k).is_number())
                return false;
        if (!row.contains("ratio") || !(row.at("ratio").is_number() || row.at("ratio").is_null()))
            return false;
    }
    return true;
}

inline nlohmann::json to_json(const CltSample& s)
{
    return {{"n", s.standardized.size()}, {"mean", s.mean},         {"variance", s.variance},
            {"ks", s.ks},                 {"bin_edges", s.bin_edges}, {"bin_counts", s.bin_counts}};
}

inline nlohmann::json to_json(const AlmostAllReport& r)
{
    return {{"y", r.y},
            {"profile", to_string(r.profile)},
            {"threshold", r.threshold},
            {"exceptions", r.exceptions},
            {"total", r.total},
            {"fraction", r.fraction},
            {"y_inverse_square", r.y_inverse_square},
            {"exponent_fit", {{"mean", r.exponent_mean}, {"max", r.exponent_max}, {"samples", r.exponent_samples}}}};
}

inline nlohmann::json to_json(const BSCoefficients& c)
{
    nlohmann::json j{{"M", c.M},         {"mode", to_string(c.mode)}, {"alpha", c.alpha},
                     {"beta", c.beta},   {"constant", c.u.at(0)},     {"Z", c.z},
                     {"decay_constant", c.decay_constant}};
    if (c.cert)
        j["cert"] = *c.cert;
    return j;
}

/// CSV rows k, p, trace, method.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& records)
{
    os << "k,p,trace,method\n";
    for (const auto& r : records)
        os << r.k << ',' << r.p << ',' << r.trace.get_str() << ',' << to_string(r.method) << '\n';
}

} // namespace stlab

#endif
