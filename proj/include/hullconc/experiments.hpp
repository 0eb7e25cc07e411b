#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hullconc/bodies.hpp"
#include "hullconc/config.hpp"
#include "hullconc/report.hpp"

namespace hullconc {

/// Runs body(i) for i in [0, count) on `threads` workers claiming indices
/// from a shared counter. Every index is processed exactly once; results
/// must be written to per-index slots so the outcome is identical for any
/// worker count.
template <class F>
inline void parallel_for(long count, int threads, F&& body) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    const int workers = static_cast<int>(std::min<long>(threads, count));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// A finished experiment: the row table (strictly deterministic in config +
/// seed), a JSON summary (may carry timing), and a hard-failure flag for
/// violations that the theory forbids outright.
struct ExperimentResult {
    Table table;
    nlohmann::json summary;
    bool hard_failure = false;
    std::string failure_reason;
};

inline ScalarLaw law_by_name(const std::string& name) {
    if (name == "uniform") return ScalarLaw::uniform(-1.0, 1.0);
    if (name == "normal") return ScalarLaw::normal(1.0);
    if (name == "shifted_exponential") return ScalarLaw::shifted_exponential();
    if (name == "triangular") return ScalarLaw::triangular();
    throw std::invalid_argument("unknown law '" + name + "'");
}

// ---------------------------------------------------------------------------
// theorem1: Monte Carlo certification trials with brute-force cross-checks.
// ---------------------------------------------------------------------------

struct Theorem1Trial {
    long trial = 0;
    std::int64_t n = 0;
    int d = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    bool certified = false;
    std::string reason;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double delta = 0.0;
    bool delta_clamped = false;
    std::size_t net_size = 0;
    double eps_out = 0.0;
    double eps_in = 0.0;
    bool sound = true;
};

inline ExperimentResult run_theorem1(const ExperimentConfig& cfg) {
    const auto model = cfg.make_model();
    const auto ns = cfg.schedule();
    const long cells = static_cast<long>(ns.size() * cfg.epsilons.size());
    const long total = cells * cfg.trials;

    struct Cell {
        std::int64_t n;
        double epsilon;
        double delta;
        bool clamped;
        std::shared_ptr<ExpectedHullOracle> eh;
        std::shared_ptr<Net> net;
    };
    std::vector<Cell> cell_data;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
            Cell c;
            c.n = ns[ni];
            c.epsilon = cfg.epsilons[ei];
            const double prescribed =
                3.0 * std::pow(static_cast<double>(c.n),
                               -c.epsilon / (4.0 * cfg.dimension));
            c.clamped = prescribed > c.epsilon / 5.0;
            c.delta = c.clamped ? c.epsilon / 5.0 : prescribed;
            const auto mode = cfg.oracle_mode == "mc" ? ExpectedHullOracle::Mode::MonteCarlo
                                                      : ExpectedHullOracle::Mode::Analytic;
            const long ci = static_cast<long>(cell_data.size());
            c.eh = std::make_shared<ExpectedHullOracle>(
                model, c.n, mode, cfg.mc_replicates,
                Rng::derive(cfg.seed, 424243u + static_cast<std::uint64_t>(ci)));
            c.net = std::make_shared<Net>(
                build_net(expected_hull_polar_gauge(*c.eh), c.delta, cfg.dimension, 20000,
                          Rng::derive(cfg.seed, 999999937u + static_cast<std::uint64_t>(ci))));
            cell_data.push_back(std::move(c));
        }
    }

    std::vector<Theorem1Trial> records(static_cast<std::size_t>(total));
    parallel_for(total, cfg.threads, [&](long g) {
        const long ci = g / cfg.trials;
        const long t = g % cfg.trials;
        const Cell& cell = cell_data[static_cast<std::size_t>(ci)];
        Theorem1Trial rec;
        rec.trial = t;
        rec.n = cell.n;
        rec.d = cfg.dimension;
        rec.epsilon = cell.epsilon;
        rec.delta = cell.delta;
        rec.delta_clamped = cell.clamped;
        rec.net_size = cell.net->size();
        rec.seed = Rng::derive(cfg.seed, 1000003u * static_cast<std::uint64_t>(ci) +
                                             2u * static_cast<std::uint64_t>(t));
        const Polytope P{model.sample(cell.n, rec.seed)};
        const auto cert = certify_sandwich(P, *cell.eh, cell.epsilon, *cell.net, cell.delta);
        rec.certified = cert.certified;
        rec.reason = cert.reason;
        rec.min_ratio = cert.min_ratio;
        rec.max_ratio = cert.max_ratio;
        const auto defects =
            sandwich_bruteforce(P, *cell.eh, cfg.brute_dirs, Rng::derive(rec.seed, 1));
        rec.eps_out = defects.eps_out;
        rec.eps_in = defects.eps_in;
        rec.sound = !rec.certified ||
                    (rec.eps_out <= rec.epsilon && rec.eps_in <= rec.epsilon);
        records[static_cast<std::size_t>(g)] = std::move(rec);
    });

    ExperimentResult out;
    out.table.header = {"trial",     "n",        "d",         "epsilon",  "seed",
                        "certified", "reason",   "min_ratio", "max_ratio", "delta",
                        "delta_clamped", "net_size", "eps_out",  "eps_in",   "sound"};
    for (const auto& r : records) {
        if (!r.sound) {
            out.hard_failure = true;
            out.failure_reason = "soundness violated: certified trial with defect > epsilon";
        }
        out.table.add_row({format_int(r.trial), format_int(r.n), format_int(r.d),
                           format_real(r.epsilon), to_hex(r.seed), format_bool(r.certified),
                           r.reason.empty() ? "ok" : r.reason, format_real(r.min_ratio),
                           format_real(r.max_ratio), format_real(r.delta),
                           format_bool(r.delta_clamped),
                           format_int(static_cast<std::int64_t>(r.net_size)),
                           format_real(r.eps_out), format_real(r.eps_in),
                           format_bool(r.sound)});
    }

    nlohmann::json cells_json = nlohmann::json::array();
    for (long ci = 0; ci < cells; ++ci) {
        const Cell& cell = cell_data[static_cast<std::size_t>(ci)];
        long certified = 0;
        for (long t = 0; t < cfg.trials; ++t)
            if (records[static_cast<std::size_t>(ci * cfg.trials + t)].certified) ++certified;
        const auto wi = wilson95(certified, cfg.trials);
        const double bound =
            std::max(0.0, 1.0 - 3.0 * std::pow(static_cast<double>(cell.n),
                                               -cell.epsilon / 4.0));
        const double feas_threshold = std::exp(7.0 * cfg.dimension / cell.epsilon *
                                               std::log(1.0 / cell.epsilon));
        nlohmann::json cj;
        cj["n"] = cell.n;
        cj["epsilon"] = cell.epsilon;
        cj["trials"] = cfg.trials;
        cj["certified"] = certified;
        cj["p_hat"] = wi.estimate;
        cj["wilson_lo"] = wi.lo;
        cj["wilson_hi"] = wi.hi;
        cj["bound"] = bound;
        cj["delta"] = cell.delta;
        cj["delta_clamped"] = cell.clamped;
        cj["net_size"] = cell.net->size();
        cj["feasible_regime"] = static_cast<double>(cell.n) >= feas_threshold;
        cells_json.push_back(std::move(cj));
    }
    out.summary["experiment"] = "theorem1";
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["cells"] = std::move(cells_json);
    out.summary["hard_failure"] = out.hard_failure;
    return out;
}

// ---------------------------------------------------------------------------
// corollary2: deterministic directional floating-body vs expected-hull check.
// ---------------------------------------------------------------------------

inline ExperimentResult run_corollary2(const ExperimentConfig& cfg) {
    if (cfg.oracle_mode != "analytic")
        throw ConfigError("config: key 'oracle_mode': corollary2 demands exactness (analytic)");
    const auto model = cfg.make_model();
    const int d = cfg.dimension;

    // Grid plus adversarial directions: axes and covariance eigenvectors.
    Matrix dirs(d, cfg.directions + 2 * d);
    dirs.leftCols(cfg.directions) = direction_grid(d, cfg.directions, cfg.seed);
    for (int j = 0; j < d; ++j) {
        dirs.col(cfg.directions + 2 * j) = Vector::Unit(d, j);
        dirs.col(cfg.directions + 2 * j + 1) = -Vector::Unit(d, j);
    }

    ExperimentResult out;
    out.table.header = {"n",  "direction", "h_eh",        "g_float",    "lower_factor",
                        "upper_factor", "left_ok", "right_ok", "left_slack", "right_slack"};
    const double tol = 1e-8;
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto n : cfg.schedule()) {
        const ExpectedHullOracle eh(model, n);
        const FloatingBodyOracle fb(model, 1.0 / static_cast<double>(n));
        const double L = std::log(static_cast<double>(n));
        const double lo_factor = 1.0 - 3.0 / L;
        const double hi_factor = 1.0 + 1.0 / L;
        const double lo_sharp = 1.0 - std::log(18.0) / L;  // proof-grade left constant
        double worst_left = kInf, worst_right = kInf;
        bool sharp_all = true;
        for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
            const double h = eh.support(dirs.col(j));
            const double g = fb.support(dirs.col(j));
            const double left_slack = g - lo_factor * h;
            const double right_slack = hi_factor * h - g;
            const bool left_ok = left_slack >= -tol;
            const bool right_ok = right_slack >= -tol;
            if (!(left_ok && right_ok)) {
                out.hard_failure = true;
                out.failure_reason = "corollary2 directional inequality violated";
            }
            sharp_all = sharp_all && g >= lo_sharp * h - tol;
            worst_left = std::min(worst_left, left_slack);
            worst_right = std::min(worst_right, right_slack);
            out.table.add_row({format_int(n), format_int(j), format_real(h), format_real(g),
                               format_real(lo_factor), format_real(hi_factor),
                               format_bool(left_ok), format_bool(right_ok),
                               format_real(left_slack), format_real(right_slack)});
        }
        nlohmann::json nj;
        nj["n"] = n;
        nj["worst_left_slack"] = worst_left;
        nj["worst_right_slack"] = worst_right;
        nj["sharp_left_constant_holds"] = sharp_all;  // informational: log 18 variant
        per_n.push_back(std::move(nj));
    }
    out.summary["experiment"] = "corollary2";
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["per_n"] = std::move(per_n);
    out.summary["hard_failure"] = out.hard_failure;
    return out;
}

// ---------------------------------------------------------------------------
// strong_law: one growing sample path against the log log n / log n margins.
// ---------------------------------------------------------------------------

inline ExperimentResult run_strong_law(const ExperimentConfig& cfg) {
    const auto model = cfg.make_model();
    const int d = cfg.dimension;
    const auto ns = cfg.schedule();
    const std::int64_t n_max = ns.back();

    const Matrix draws = model.sample(n_max, cfg.seed);
    const Matrix dirs = direction_grid(d, cfg.brute_dirs, cfg.seed);

    ExperimentResult out;
    out.table.header = {"k",        "n",          "eps_out",    "eps_in",
                        "margin_out", "margin_in", "within_out", "within_in",
                        "exact_eps_out", "exact_eps_in"};

    Vector running_max = Vector::Constant(cfg.brute_dirs, -kInf);
    double run_min = kInf, run_max = -kInf;  // d=1 exact path
    std::int64_t consumed = 0;
    struct Row {
        std::int64_t n;
        double eps_out, eps_in, margin_out, margin_in;
        bool within_out, within_in;
        double exact_out = kNaN, exact_in = kNaN;
    };
    std::vector<Row> rows;

    for (const auto n : ns) {
        // Advance the prefix hull: incremental per-direction maxima, in
        // chunks so the draws x dirs product stays small.
        while (consumed < n) {
            const Eigen::Index chunk = std::min<std::int64_t>(1024, n - consumed);
            const auto block = draws.middleRows(consumed, chunk);
            running_max =
                running_max.cwiseMax((block * dirs).colwise().maxCoeff().transpose());
            if (d == 1) {
                run_min = std::min(run_min, block.minCoeff());
                run_max = std::max(run_max, block.maxCoeff());
            }
            consumed += chunk;
        }
        const ExpectedHullOracle eh(model, n);
        const auto h_eh = eh.support_batch(dirs).first;
        const Eigen::ArrayXd ratio = running_max.array() / h_eh.array();
        Row r;
        r.n = n;
        r.eps_out = ratio.maxCoeff() - 1.0;
        r.eps_in = 1.0 - ratio.minCoeff();
        const double L = std::log(static_cast<double>(n));
        const double LL = std::log(L);
        r.margin_in = 3.0 * LL / L;
        r.margin_out = 8.0 * LL / L;
        r.within_out = r.eps_out <= r.margin_out;
        r.within_in = r.eps_in <= r.margin_in;
        if (d == 1) {
            const double e_plus = eh.support(Vector::Constant(1, 1.0));
            const double e_minus = eh.support(Vector::Constant(1, -1.0));
            r.exact_out = std::max(run_max / e_plus, -run_min / e_minus) - 1.0;
            r.exact_in = 1.0 - std::min(run_max / e_plus, -run_min / e_minus);
        }
        rows.push_back(r);
    }

    // Smallest schedule index after which both margins hold for all larger n.
    long n_hat_index = -1;
    for (long i = static_cast<long>(rows.size()) - 1; i >= 0; --i) {
        if (rows[static_cast<std::size_t>(i)].within_out &&
            rows[static_cast<std::size_t>(i)].within_in)
            n_hat_index = i;
        else
            break;
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const int k = cfg.n_values.empty() ? cfg.schedule_min + static_cast<int>(i) : -1;
        out.table.add_row({format_int(k), format_int(r.n), format_real(r.eps_out),
                           format_real(r.eps_in), format_real(r.margin_out),
                           format_real(r.margin_in), format_bool(r.within_out),
                           format_bool(r.within_in),
                           d == 1 ? format_real(r.exact_out) : "",
                           d == 1 ? format_real(r.exact_in) : ""});
    }
    out.summary["experiment"] = "strong_law";
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["n_hat_index"] = n_hat_index;
    out.summary["n_hat"] =
        n_hat_index < 0 ? nlohmann::json("not yet")
                        : nlohmann::json(rows[static_cast<std::size_t>(n_hat_index)].n);
    out.summary["hard_failure"] = false;
    return out;
}

// ---------------------------------------------------------------------------
// lemma4: exact two-sided concentration sweep over (law, n, t).
// ---------------------------------------------------------------------------

inline ExperimentResult run_lemma4(const ExperimentConfig& cfg) {
    struct CellRef {
        std::size_t law_idx;
        std::int64_t n;
        double t;
    };
    std::vector<CellRef> grid;
    for (std::size_t li = 0; li < cfg.laws.size(); ++li)
        for (const auto n : cfg.schedule())
            for (const double t : cfg.t_values) grid.push_back({li, n, t});

    std::vector<ScalarLaw> laws;
    laws.reserve(cfg.laws.size());
    for (const auto& name : cfg.laws) laws.push_back(law_by_name(name));

    std::vector<Lemma4Report> reports(grid.size());
    parallel_for(static_cast<long>(grid.size()), cfg.threads, [&](long i) {
        const auto& c = grid[static_cast<std::size_t>(i)];
        reports[static_cast<std::size_t>(i)] = lemma4_verify(laws[c.law_idx], c.n, c.t);
    });

    ExperimentResult out;
    out.table.header = {"law",    "n",           "t",      "e_max",      "p_right",
                        "bound_right", "p_left", "bound_left", "holds_right", "holds_left"};
    long sharp_ok = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid[i];
        const auto& r = reports[i];
        if (!(r.holds_right && r.holds_left)) {
            out.hard_failure = true;
            out.failure_reason = "lemma4 bound violated";
        }
        if (r.p_left >= r.bound_left_sharp - 1e-8) ++sharp_ok;
        out.table.add_row({cfg.laws[c.law_idx], format_int(r.n), format_real(r.t),
                           format_real(r.e_max), format_real(r.p_right),
                           format_real(r.bound_right), format_real(r.p_left),
                           format_real(r.bound_left), format_bool(r.holds_right),
                           format_bool(r.holds_left)});
    }
    out.summary["experiment"] = "lemma4";
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["cells"] = grid.size();
    // Informational: the stronger exp(-9 n^{t/2}/20) left variant.
    out.summary["sharp_left_bound_holds"] = sharp_ok;
    out.summary["hard_failure"] = out.hard_failure;
    return out;
}

// ---------------------------------------------------------------------------
// inclusion: mu((1+eps) E P_n) along a schedule, with the summable bound.
// ---------------------------------------------------------------------------

inline ExperimentResult run_inclusion(const ExperimentConfig& cfg) {
    const auto model = cfg.make_model();
    ExperimentResult out;
    out.table.header = {"n",          "epsilon",    "estimate",      "wilson_lo",
                        "wilson_hi",  "bound",      "bound_complement", "partial_sum",
                        "certified_in", "certified_out", "indeterminate", "exact"};
    double partial = 0.0;
    long idx = 0;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto n : cfg.schedule()) {
        const double L = std::log(static_cast<double>(n));
        const double eps = cfg.margin_rule == "loglog" ? 8.0 * std::log(L) / L
                                                       : cfg.epsilons.front();
        const ExpectedHullOracle eh(model, n);
        const auto est = inclusion_probability(model, eh, eps, cfg.inclusion_draws,
                                               Rng::derive(cfg.seed, 31337u + idx));
        const double complement =
            6.0 * std::pow(static_cast<double>(n), -1.0 - eps / 4.0);
        const double bound = 1.0 - complement;
        partial += complement;
        out.table.add_row({format_int(n), format_real(eps), format_real(est.estimate),
                           format_real(est.wilson_lo), format_real(est.wilson_hi),
                           format_real(bound), format_real(complement), format_real(partial),
                           format_int(est.certified_in), format_int(est.certified_out),
                           format_int(est.indeterminate), format_bool(est.exact_membership)});
        nlohmann::json rj;
        rj["n"] = n;
        rj["epsilon"] = eps;
        rj["estimate"] = est.estimate;
        rj["bound"] = bound;
        rows.push_back(std::move(rj));
        ++idx;
    }
    out.summary["experiment"] = "inclusion";
    out.summary["schema_version"] = kSchemaVersion;
    out.summary["rows"] = std::move(rows);
    out.summary["partial_sum"] = partial;
    out.summary["hard_failure"] = false;
    return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "theorem1") return run_theorem1(cfg);
    if (cfg.experiment == "corollary2") return run_corollary2(cfg);
    if (cfg.experiment == "strong_law") return run_strong_law(cfg);
    if (cfg.experiment == "lemma4") return run_lemma4(cfg);
    return run_inclusion(cfg);
}

}  // namespace hullconc
