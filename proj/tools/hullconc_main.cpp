// hullconc command-line tool. One binary, eight subcommands:
//
//   order-stats   exact two-sided bounds for the sample maximum of a 1D law
//   net           boundary epsilon-net for a convex body, with probe audit
//   sandwich      Monte Carlo certification trials for one (model, n, eps)
//   theorem1      certification trial sweep from a config file
//   corollary2    floating body vs expected hull directional check
//   strong-law    one growing sample path against loglog/log margins
//   lemma4        (law, n, t) concentration sweep from a config file
//   inclusion     mu((1+eps) E P_n) estimates along a schedule
//
// Exit codes: 0 ok, 1 config error, 2 runtime error, 3 violated assertion
// (a certified trial with oversized defect, or a failed exact inequality).

#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <hullconc/hullconc.hpp>

namespace {

using namespace hullconc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAssertion = 3;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3) throw ConfigError("grid spec must be start:step:stop");
        const double start = std::stod(parts[0]);
        const double step = std::stod(parts[1]);
        const double stop = std::stod(parts[2]);
        if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
        for (double t = start; t <= stop + step * 0.5; t += step) out.push_back(t);
        return out;
    }
    for (const auto& p : split(spec, ',')) out.push_back(std::stod(p));
    return out;
}

/// "<kind>:<p1,p2,...>" with kind in {gaussian, box, laplace}; one parameter
/// per axis (variances, half-widths, scales), dimension = parameter count.
DistributionModel parse_model_spec(const std::string& spec) {
    const auto pos = spec.find(':');
    const std::string kind = spec.substr(0, pos);
    std::vector<double> params;
    if (pos != std::string::npos)
        for (const auto& p : split(spec.substr(pos + 1), ',')) params.push_back(std::stod(p));
    if (params.empty()) params = {1.0};
    const int d = static_cast<int>(params.size());
    Vector v = Eigen::Map<Vector>(params.data(), d);
    if (kind == "gaussian") {
        Matrix cov = v.asDiagonal();
        return DistributionModel::gaussian(cov);
    }
    if (kind == "box") return DistributionModel::uniform_box(v);
    if (kind == "laplace") return DistributionModel::laplace_product(v);
    throw ConfigError("model spec: unknown kind '" + kind + "' (gaussian|box|laplace)");
}

int thread_count(int flag_value) {
    if (const char* env = std::getenv("HULLCONC_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return flag_value;
}

std::string summary_path_for(const std::string& out) { return out + ".summary.json"; }
std::string manifest_path_for(const std::string& out) { return out + ".manifest.json"; }

/// Writes table + summary + manifest; returns the process exit code.
int emit(const ExperimentResult& result, const std::string& out_csv,
         std::uint64_t config_hash, std::uint64_t seed, const std::string& started) {
    RunManifest manifest;
    manifest.config_hash = to_hex(config_hash);
    manifest.seed = seed;
    manifest.started_at = started;
    manifest.outputs.push_back(write_report(out_csv, render_csv(result.table)));
    manifest.outputs.push_back(
        write_report(summary_path_for(out_csv), result.summary.dump(2) + "\n"));
    manifest.finished_at = utc_timestamp();
    write_text_file(manifest_path_for(out_csv), manifest.to_json().dump(2) + "\n");
    if (result.hard_failure) {
        std::cerr << "ASSERTION FAILED: " << result.failure_reason << "\n";
        return kExitAssertion;
    }
    return kExitOk;
}

int run_config_experiment(const std::string& experiment, const std::string& config_path,
                          long trials_override, std::int64_t seed_override,
                          const std::string& out_override, int threads_override) {
    ExperimentConfig cfg = parse_config(config_path);
    if (cfg.experiment != experiment)
        throw ConfigError("config: key 'experiment': file says '" + cfg.experiment +
                          "' but the subcommand is '" + experiment + "'");
    if (trials_override > 0) cfg.trials = trials_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_csv = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    cfg.threads = thread_count(cfg.threads);
    if (cfg.out_csv.empty()) cfg.out_csv = experiment + ".csv";

    const std::string started = utc_timestamp();
    std::cerr << "hullconc " << experiment << ": config " << to_hex(cfg.hash()) << ", seed "
              << cfg.seed << ", " << cfg.threads << " worker(s)\n";
    const ExperimentResult result = run_experiment(cfg);
    return emit(result, cfg.out_csv, cfg.hash(), cfg.seed, started);
}

int cmd_order_stats(const std::string& law_name, const std::vector<std::int64_t>& ns,
                    const std::string& t_grid, const std::string& out, int threads) {
    ExperimentConfig cfg;
    cfg.experiment = "lemma4";
    cfg.laws = {law_name};
    cfg.n_values = ns.empty() ? std::vector<std::int64_t>{12, 100, 1000} : ns;
    cfg.t_values = t_grid.empty() ? parse_grid("0.05:0.05:1.0") : parse_grid(t_grid);
    cfg.threads = thread_count(threads);
    for (const auto n : cfg.n_values)
        if (n < 12) throw ConfigError("order-stats: n must be >= 12");
    for (const double t : cfg.t_values)
        if (!(t > 0.0)) throw ConfigError("order-stats: t must be > 0");
    law_by_name(law_name);  // validates the name before any work
    const std::string started = utc_timestamp();
    const ExperimentResult result = run_lemma4(cfg);
    return emit(result, out, cfg.hash(), cfg.seed, started);
}

int cmd_net(const std::string& body_spec, double epsilon, std::uint64_t seed, long probes,
            const std::string& out) {
    GaugeOracle body;
    std::shared_ptr<ExpectedHullOracle> eh;  // keeps the oracle alive for the gauge
    if (body_spec == "interval") {
        Matrix V(2, 1);
        V << -1, 1;
        body = GaugeOracle::from_polytope(Polytope{V}, "interval");
    } else if (body_spec == "square") {
        Matrix V(4, 2);
        V << 1, 1, 1, -1, -1, 1, -1, -1;
        body = GaugeOracle::from_polytope(Polytope{V}, "square");
    } else if (body_spec == "triangle") {
        Matrix V(3, 2);
        V << 2, 0, -1, 1, -1, -1;
        body = GaugeOracle::from_polytope(Polytope{V}, "triangle");
    } else if (body_spec.rfind("gaussian-polar:", 0) == 0) {
        const std::int64_t n = std::stoll(body_spec.substr(15));
        if (n < 2) throw ConfigError("net: gaussian-polar needs n >= 2");
        eh = std::make_shared<ExpectedHullOracle>(
            DistributionModel::gaussian(Matrix::Identity(2, 2)), n);
        body = expected_hull_polar_gauge(*eh);
    } else {
        throw ConfigError(
            "net: unknown body '" + body_spec +
            "' (interval|square|triangle|gaussian-polar:<n>)");
    }

    const std::string started = utc_timestamp();
    const Net net = build_net(body, epsilon, body.dim, 20000, seed);

    // Probe audit: random boundary points must sit within epsilon of the net.
    const Matrix probe_dirs = random_directions(body.dim, probes, Rng::derive(seed, 0xa0d17));
    long covered = 0;
    double worst = 0.0;
    for (long i = 0; i < probes; ++i) {
        const Vector u = probe_dirs.col(i);
        const double g = body(u);
        if (!(g > 0.0)) continue;
        const double dist = net.nearest(u / g).first;
        worst = std::max(worst, dist);
        if (dist <= epsilon * (1.0 + 1e-9)) ++covered;
    }

    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["body"] = body_spec;
    j["epsilon"] = epsilon;
    j["seed"] = seed;
    j["size"] = net.size();
    j["cardinality_bound"] = net_cardinality_bound(epsilon, body.dim);
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : net.points)
        pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    j["points"] = std::move(pts);
    j["probe_coverage"] = {{"probes", probes},
                           {"covered", covered},
                           {"max_gauge_distance", worst}};

    nlohmann::json args;
    args["command"] = "net";
    args["body"] = body_spec;
    args["epsilon"] = epsilon;
    args["probes"] = probes;
    RunManifest manifest;
    manifest.config_hash = to_hex(fnv1a64(args.dump()));
    manifest.seed = seed;
    manifest.started_at = started;
    manifest.outputs.push_back(write_report(out, j.dump(2) + "\n"));
    manifest.finished_at = utc_timestamp();
    write_text_file(manifest_path_for(out), manifest.to_json().dump(2) + "\n");
    return covered == probes ? kExitOk : kExitAssertion;
}

int cmd_sandwich(const std::string& model_spec, std::int64_t n, double epsilon,
                 const std::string& mode, long trials, std::uint64_t seed,
                 const std::string& out, const std::string& cert_out, int threads) {
    const DistributionModel model = parse_model_spec(model_spec);
    ExperimentConfig cfg;
    cfg.experiment = "theorem1";
    cfg.model = model.kind() == DistributionModel::Kind::Gaussian ? "gaussian"
                : model.kind() == DistributionModel::Kind::UniformBox ? "uniform_box"
                                                                      : "laplace_product";
    cfg.dimension = model.dim();
    cfg.model_params.assign(model.dim(), 1.0);
    for (int i = 0; i < model.dim(); ++i)
        cfg.model_params[static_cast<std::size_t>(i)] =
            model.kind() == DistributionModel::Kind::Gaussian ? model.covariance()(i, i)
                                                              : model.widths()[i];
    cfg.n_values = {n};
    cfg.epsilons = {epsilon};
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.oracle_mode = mode;
    cfg.threads = thread_count(threads);
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ConfigError("sandwich: epsilon out of range, need ε ∈ (0,1/2)");
    if (mode != "analytic" && mode != "mc") throw ConfigError("sandwich: mode is analytic|mc");
    if (trials < 1) throw ConfigError("sandwich: trials must be >= 1");
    if (n < model.dim() + 1) throw ConfigError("sandwich: n must exceed the dimension");

    const std::string started = utc_timestamp();
    const ExperimentResult result = run_theorem1(cfg);

    // Certificate: the shared net/delta facts plus per-trial ratio band.
    const auto& cell = result.summary["cells"][0];
    nlohmann::json cert;
    cert["schema_version"] = kSchemaVersion;
    cert["model"] = model_spec;
    cert["n"] = n;
    cert["epsilon"] = epsilon;
    cert["delta"] = cell["delta"];
    cert["delta_clamped"] = cell["delta_clamped"];
    cert["net_size"] = cell["net_size"];
    cert["trials"] = cell["trials"];
    cert["certified"] = cell["certified"];
    nlohmann::json per_trial = nlohmann::json::array();
    const auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < result.table.header.size(); ++i)
            if (result.table.header[i] == name) return i;
        throw std::logic_error("missing column " + name);
    };
    const std::size_t c_cert = col("certified"), c_min = col("min_ratio"),
                      c_max = col("max_ratio"), c_reason = col("reason");
    for (const auto& row : result.table.rows) {
        nlohmann::json t;
        t["certified"] = row[c_cert] == "1";
        t["min_ratio"] = std::stod(row[c_min]);
        t["max_ratio"] = std::stod(row[c_max]);
        t["reason"] = row[c_reason];
        per_trial.push_back(std::move(t));
    }
    cert["trials_detail"] = std::move(per_trial);

    RunManifest manifest;
    manifest.config_hash = to_hex(cfg.hash());
    manifest.seed = seed;
    manifest.started_at = started;
    manifest.outputs.push_back(write_report(out, render_csv(result.table)));
    const std::string cert_path = cert_out.empty() ? out + ".certificate.json" : cert_out;
    manifest.outputs.push_back(write_report(cert_path, cert.dump(2) + "\n"));
    manifest.finished_at = utc_timestamp();
    write_text_file(manifest_path_for(out), manifest.to_json().dump(2) + "\n");
    if (result.hard_failure) {
        std::cerr << "ASSERTION FAILED: " << result.failure_reason << "\n";
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random polytope concentration toolkit"};
    app.require_subcommand(1);

    // order-stats
    std::string os_law = "uniform", os_tgrid, os_out = "order_stats.csv";
    std::vector<std::int64_t> os_n;
    int os_threads = 1;
    auto* os = app.add_subcommand("order-stats",
                                  "exact bounds for the sample maximum of a 1D law");
    os->add_option("--law", os_law, "uniform|normal|shifted_exponential|triangular");
    os->add_option("--n", os_n, "sample sizes (comma separated)")->delimiter(',');
    os->add_option("--t-grid", os_tgrid, "deviations: list 'a,b,c' or range 'start:step:stop'");
    os->add_option("--out", os_out, "output CSV path");
    os->add_option("--threads", os_threads, "worker count");

    // net
    std::string net_body = "square", net_out = "net.json";
    double net_eps = 0.25;
    std::uint64_t net_seed = 1;
    long net_probes = 10000;
    auto* net = app.add_subcommand("net", "boundary epsilon-net with probe audit");
    net->add_option("--body", net_body, "interval|square|triangle|gaussian-polar:<n>");
    net->add_option("--epsilon", net_eps, "net radius in (0,1)");
    net->add_option("--seed", net_seed, "candidate stream seed");
    net->add_option("--probes", net_probes, "boundary probes for the coverage audit");
    net->add_option("--out", net_out, "output JSON path");

    // sandwich
    std::string sw_model = "gaussian:1,1", sw_mode = "analytic", sw_out = "sandwich.csv",
                sw_cert;
    std::int64_t sw_n = 1000;
    double sw_eps = 0.3;
    long sw_trials = 20;
    std::uint64_t sw_seed = 1;
    int sw_threads = 1;
    auto* sw = app.add_subcommand("sandwich", "certification trials for one (model, n, eps)");
    sw->add_option("--model", sw_model, "model spec, e.g. gaussian:1,1 or box:1,2");
    sw->add_option("--n", sw_n, "draws per trial");
    sw->add_option("--epsilon", sw_eps, "target sandwich margin, ε ∈ (0,1/2)");
    sw->add_option("--mode", sw_mode, "expected-hull oracle: analytic|mc");
    sw->add_option("--trials", sw_trials, "independent trials");
    sw->add_option("--seed", sw_seed, "master seed");
    sw->add_option("--out", sw_out, "output CSV path");
    sw->add_option("--cert", sw_cert, "certificate JSON path (default <out>.certificate.json)");
    sw->add_option("--threads", sw_threads, "worker count");

    // config-file experiments
    struct ExpCmd {
        std::string name;
        std::string key;
        CLI::App* cmd = nullptr;
        std::string config;
        long trials = -1;
        std::int64_t seed = -1;
        std::string out;
        int threads = -1;
    };
    std::vector<ExpCmd> experiments;
    for (const auto& [name, key] :
         {std::pair{"theorem1", "theorem1"}, {"corollary2", "corollary2"},
          {"strong-law", "strong_law"}, {"lemma4", "lemma4"}, {"inclusion", "inclusion"}}) {
        ExpCmd e;
        e.name = name;
        e.key = key;
        experiments.push_back(std::move(e));
    }
    for (auto& e : experiments) {
        e.cmd = app.add_subcommand(e.name, "run the " + e.key + " experiment from a config");
        e.cmd->add_option("--config", e.config, "JSON config path")->required();
        e.cmd->add_option("--trials", e.trials, "override config trial count");
        e.cmd->add_option("--seed", e.seed, "override config master seed");
        e.cmd->add_option("--out", e.out, "override config CSV path");
        e.cmd->add_option("--threads", e.threads, "override config worker count");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (os->parsed())
            return cmd_order_stats(os_law, os_n, os_tgrid, os_out, os_threads);
        if (net->parsed()) return cmd_net(net_body, net_eps, net_seed, net_probes, net_out);
        if (sw->parsed())
            return cmd_sandwich(sw_model, sw_n, sw_eps, sw_mode, sw_trials, sw_seed, sw_out,
                                sw_cert, sw_threads);
        for (const auto& e : experiments)
            if (e.cmd->parsed())
                return run_config_experiment(e.key, e.config, e.trials, e.seed, e.out,
                                             e.threads);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "runtime error: " << err.what() << "\n";
        return kExitRuntime;
    }
}
