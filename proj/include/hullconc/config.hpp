#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hullconc/common.hpp"
#include "hullconc/distributions.hpp"

namespace hullconc {

/// Raised for malformed or out-of-range configuration; the message always
/// names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed and validated experiment configuration. Defaults are filled at
/// parse time, so two configs that differ only in key order or omitted
/// defaults normalize to the same struct and the same hash.
struct ExperimentConfig {
    std::string experiment;  // theorem1 | corollary2 | strong_law | lemma4 | inclusion
    std::string model = "gaussian";
    int dimension = 1;
    std::vector<double> model_params;      // per-axis variances / half-widths / scales
    std::vector<std::int64_t> n_values;    // explicit sample sizes
    int schedule_min = 0;                  // n = 2^k schedule (strong_law, inclusion)
    int schedule_max = -1;
    std::vector<double> epsilons;          // theorem1 margins
    std::string margin_rule = "fixed";     // fixed | loglog
    long trials = 100;
    std::uint64_t seed = 1;
    std::string oracle_mode = "analytic";  // analytic | mc
    long mc_replicates = 10000;
    long brute_dirs = 10000;
    long inclusion_draws = 100000;
    long directions = 1000;                // corollary2 grid size
    std::vector<double> t_values;          // lemma4 deviations
    std::vector<std::string> laws;         // lemma4 base laws
    int threads = 1;
    std::string out_csv;
    std::string out_json;

    DistributionModel make_model() const {
        Vector p(dimension);
        for (int i = 0; i < dimension; ++i) p[i] = model_params[static_cast<std::size_t>(i)];
        if (model == "gaussian") {
            Matrix cov = Matrix::Zero(dimension, dimension);
            cov.diagonal() = p;
            return DistributionModel::gaussian(cov);
        }
        if (model == "uniform_box") return DistributionModel::uniform_box(p);
        return DistributionModel::laplace_product(p);
    }

    /// Sample sizes actually run: explicit list, else the 2^k schedule.
    std::vector<std::int64_t> schedule() const {
        if (!n_values.empty()) return n_values;
        std::vector<std::int64_t> out;
        for (int k = schedule_min; k <= schedule_max; ++k)
            out.push_back(std::int64_t{1} << k);
        return out;
    }

    nlohmann::json normalized() const {
        nlohmann::json j;
        j["experiment"] = experiment;
        j["model"] = model;
        j["dimension"] = dimension;
        j["model_params"] = model_params;
        j["n_values"] = n_values;
        j["schedule_min"] = schedule_min;
        j["schedule_max"] = schedule_max;
        j["epsilons"] = epsilons;
        j["margin_rule"] = margin_rule;
        j["trials"] = trials;
        j["seed"] = seed;
        j["oracle_mode"] = oracle_mode;
        j["mc_replicates"] = mc_replicates;
        j["brute_dirs"] = brute_dirs;
        j["inclusion_draws"] = inclusion_draws;
        j["directions"] = directions;
        j["t_values"] = t_values;
        j["laws"] = laws;
        // Output paths and worker count deliberately excluded: neither
        // affects the records an experiment produces.
        return j;
    }

    /// Canonical hash: stable under key reordering and omitted defaults.
    std::uint64_t hash() const { return fnv1a64(normalized().dump()); }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& key, const std::string& what) {
    throw ConfigError("config: key '" + key + "': " + what);
}

inline void require_type(const nlohmann::json& v, const std::string& key, bool ok,
                         const char* want) {
    if (!ok) config_fail(key, std::string("expected ") + want + ", got " + v.dump());
}

}  // namespace detail

inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
    using nlohmann::json;
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    bool have_laws = false, have_t = false;

    for (const auto& [key, v] : j.items()) {
        if (key == "experiment") {
            detail::require_type(v, key, v.is_string(), "string");
            c.experiment = v.get<std::string>();
        } else if (key == "model") {
            detail::require_type(v, key, v.is_string(), "string");
            c.model = v.get<std::string>();
        } else if (key == "dimension") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.dimension = v.get<int>();
        } else if (key == "model_params") {
            detail::require_type(v, key, v.is_array(), "array of reals");
            c.model_params = v.get<std::vector<double>>();
        } else if (key == "n_values") {
            detail::require_type(v, key, v.is_array(), "array of integers");
            c.n_values = v.get<std::vector<std::int64_t>>();
        } else if (key == "schedule_min") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.schedule_min = v.get<int>();
        } else if (key == "schedule_max") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.schedule_max = v.get<int>();
        } else if (key == "epsilons") {
            detail::require_type(v, key, v.is_array(), "array of reals");
            c.epsilons = v.get<std::vector<double>>();
        } else if (key == "margin_rule") {
            detail::require_type(v, key, v.is_string(), "string");
            c.margin_rule = v.get<std::string>();
        } else if (key == "trials") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.trials = v.get<long>();
        } else if (key == "seed") {
            detail::require_type(v, key, v.is_number_unsigned() || v.is_number_integer(),
                                 "integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "oracle_mode") {
            detail::require_type(v, key, v.is_string(), "string");
            c.oracle_mode = v.get<std::string>();
        } else if (key == "mc_replicates") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.mc_replicates = v.get<long>();
        } else if (key == "brute_dirs") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.brute_dirs = v.get<long>();
        } else if (key == "inclusion_draws") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.inclusion_draws = v.get<long>();
        } else if (key == "directions") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.directions = v.get<long>();
        } else if (key == "t_values") {
            detail::require_type(v, key, v.is_array(), "array of reals");
            c.t_values = v.get<std::vector<double>>();
            have_t = true;
        } else if (key == "laws") {
            detail::require_type(v, key, v.is_array(), "array of strings");
            c.laws = v.get<std::vector<std::string>>();
            have_laws = true;
        } else if (key == "threads") {
            detail::require_type(v, key, v.is_number_integer(), "integer");
            c.threads = v.get<int>();
        } else if (key == "out_csv") {
            detail::require_type(v, key, v.is_string(), "string");
            c.out_csv = v.get<std::string>();
        } else if (key == "out_json") {
            detail::require_type(v, key, v.is_string(), "string");
            c.out_json = v.get<std::string>();
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    // ---- defaults -------------------------------------------------------
    static const std::set<std::string> kExperiments = {"theorem1", "corollary2", "strong_law",
                                                       "lemma4", "inclusion"};
    if (c.experiment.empty()) detail::config_fail("experiment", "required key is missing");
    if (!kExperiments.count(c.experiment))
        detail::config_fail("experiment", "must be one of theorem1|corollary2|strong_law|"
                                          "lemma4|inclusion, got '" + c.experiment + "'");
    if (c.model_params.empty()) c.model_params.assign(static_cast<std::size_t>(
                                    std::max(1, c.dimension)), 1.0);
    if (c.n_values.empty() && c.schedule_max < c.schedule_min) {
        if (c.experiment == "strong_law" || c.experiment == "inclusion") {
            c.schedule_min = 4;
            c.schedule_max = 12;
        } else if (c.experiment == "lemma4") {
            c.n_values = {12, 100, 1000};
        } else if (c.experiment == "corollary2") {
            c.n_values = {12, 1000};
        } else {
            c.n_values = {1000};
        }
    }
    if (c.experiment == "theorem1" && c.epsilons.empty()) c.epsilons = {0.3};
    if (c.experiment == "inclusion" && c.margin_rule == "fixed" && c.epsilons.empty())
        c.margin_rule = "loglog";
    if (c.experiment == "strong_law") c.margin_rule = "loglog";
    if (!have_t && c.experiment == "lemma4")
        for (int i = 1; i <= 20; ++i) c.t_values.push_back(0.05 * i);
    if (!have_laws && c.experiment == "lemma4")
        c.laws = {"uniform", "normal", "shifted_exponential", "triangular"};

    // ---- validation -----------------------------------------------------
    if (c.dimension < 1) detail::config_fail("dimension", "must be >= 1");
    if (static_cast<int>(c.model_params.size()) != c.dimension)
        detail::config_fail("model_params", "needs exactly one entry per dimension");
    for (double p : c.model_params)
        if (!(p > 0.0)) detail::config_fail("model_params", "entries must be positive");
    if (c.model != "gaussian" && c.model != "uniform_box" && c.model != "laplace_product")
        detail::config_fail("model", "must be gaussian|uniform_box|laplace_product, got '" +
                                         c.model + "'");
    if (c.margin_rule != "fixed" && c.margin_rule != "loglog")
        detail::config_fail("margin_rule", "must be fixed|loglog");
    if (c.oracle_mode != "analytic" && c.oracle_mode != "mc")
        detail::config_fail("oracle_mode", "must be analytic|mc");
    if (c.trials < 1) detail::config_fail("trials", "must be >= 1");
    if (c.threads < 1) detail::config_fail("threads", "must be >= 1");
    if (c.mc_replicates < 2) detail::config_fail("mc_replicates", "must be >= 2");
    if (c.brute_dirs < 1000) detail::config_fail("brute_dirs", "must be >= 1000");
    if (c.inclusion_draws < 10000) detail::config_fail("inclusion_draws", "must be >= 10^4");
    if (c.directions < 1) detail::config_fail("directions", "must be >= 1");

    const auto ns = c.schedule();
    if (ns.empty()) detail::config_fail("n_values", "no sample sizes configured");
    for (const auto n : ns)
        if (n < c.dimension + 1)
            detail::config_fail("n_values", "every n must satisfy n >= d+1, got n=" +
                                                std::to_string(n));
    if (c.experiment == "theorem1") {
        for (double e : c.epsilons)
            if (!(e > 0.0 && e < 0.5))
                detail::config_fail(
                    "epsilons", "theorem1 requires ε ∈ (0,1/2), got " +
                                    std::to_string(e));
    }
    if (c.experiment == "corollary2" || c.experiment == "lemma4") {
        for (const auto n : ns)
            if (n < 12)
                detail::config_fail("n_values", "this experiment requires n >= 12, got n=" +
                                                    std::to_string(n));
        if (c.experiment == "corollary2" && c.model == "laplace_product")
            detail::config_fail("model",
                                "corollary2 demands an analytic model (gaussian or "
                                "uniform_box)");
    }
    if (c.experiment == "strong_law" || c.experiment == "inclusion") {
        for (const auto n : ns)
            if (n < 16)
                detail::config_fail("schedule_min",
                                    "log log n needs n >= 16; schedule starts below that");
    }
    if (c.experiment == "lemma4") {
        if (c.t_values.empty()) detail::config_fail("t_values", "must be non-empty");
        for (double t : c.t_values)
            if (!(t > 0.0)) detail::config_fail("t_values", "deviations must be positive");
        if (c.laws.empty()) detail::config_fail("laws", "must be non-empty");
        static const std::set<std::string> kLaws = {"uniform", "normal", "shifted_exponential",
                                                    "triangular"};
        for (const auto& l : c.laws)
            if (!kLaws.count(l))
                detail::config_fail("laws", "unknown law '" + l +
                                                "' (uniform|normal|shifted_exponential|"
                                                "triangular)");
    }
    if (c.experiment == "inclusion" && c.margin_rule == "fixed" && c.epsilons.empty())
        detail::config_fail("epsilons", "inclusion with fixed margins needs epsilons");
    return c;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: '" + path + "' is not well-formed JSON: " + e.what());
    }
    return parse_config_json(j);
}

}  // namespace hullconc
