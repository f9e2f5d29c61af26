#ifndef STLAB_CONFIG_HPP
#define STLAB_CONFIG_HPP

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "cache.hpp"
#include "curves.hpp"
#include "family.hpp"
#include "moments.hpp"
#include "st_approx.hpp"

namespace stlab {

/// Settings shared by the command-line subcommands.
struct RunConfig {
    std::filesystem::path cache_dir = default_cache_dir();
    int threads = 1;
    std::int64_t ap_table_cap = kDefaultApTableCap;
    std::int64_t brute_cap = kDefaultBruteCap;
    std::int64_t family_budget = kDefaultFamilyBudget;
    std::int64_t hecke_max_terms = 20000;
    Profile profile = Profile::Unconditional;
    /// Named tolerance overrides, e.g. "s0" or "pipeline".
    std::map<std::string, double> tolerances;

    double tolerance(const std::string& name, double fallback) const
    {
        auto it = tolerances.find(name);
        return it == tolerances.end() ? fallback : it->second;
    }

    void validate() const
    {
        if (threads < 1)
            throw std::invalid_argument("config: threads must be >= 1");
        if (ap_table_cap < 5 || brute_cap < 5 || family_budget < 1 || hecke_max_terms < 2)
            throw std::invalid_argument("config: caps must be positive");
        for (const auto& [k, v] : tolerances)
            if (!(v > 0))
                throw std::invalid_argument("config: tolerance '" + k + "' must be positive");
    }

    /// Overlays keys present in a JSON object onto the current values.
    void merge(const nlohmann::json& j)
    {
        if (!j.is_object())
            throw std::invalid_argument("config: expected a JSON object");
        if (j.contains("cache_dir"))
            cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("threads"))
            threads = j.at("threads").get<int>();
        if (j.contains("ap_table_cap"))
            ap_table_cap = j.at("ap_table_cap").get<std::int64_t>();
        if (j.contains("brute_cap"))
            brute_cap = j.at("brute_cap").get<std::int64_t>();
        if (j.contains("family_budget"))
            family_budget = j.at("family_budget").get<std::int64_t>();
        if (j.contains("hecke_max_terms"))
            hecke_max_terms = j.at("hecke_max_terms").get<std::int64_t>();
        if (j.contains("profile"))
            profile = parse_profile(j.at("profile").get<std::string>());
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j.at("tolerances").items())
                tolerances[k] = v.get<double>();
        validate();
    }

    static RunConfig from_file(const std::filesystem::path& path)
    {
        std::ifstream is(path);
        if (!is)
            throw std::invalid_argument("config: cannot open " + path.string());
        RunConfig c;
        c.merge(nlohmann::json::parse(is));
        return c;
    }
};

} // namespace stlab

#endif
