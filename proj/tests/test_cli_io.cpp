#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include <hullconc/hullconc.hpp>

using namespace hullconc;
using nlohmann::json;

namespace {

ExperimentConfig parse(const std::string& text) {
    return parse_config_json(json::parse(text));
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/hullconc_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("minimal config picks up documented defaults") {
    const auto c = parse(R"({"experiment":"theorem1","model":"gaussian","dimension":2})");
    CHECK(c.model_params == std::vector<double>{1.0, 1.0});
    CHECK(c.schedule() == std::vector<std::int64_t>{1000});
    CHECK(c.epsilons == std::vector<double>{0.3});
    CHECK(c.trials == 100);
    CHECK(c.seed == 1);
    CHECK(c.oracle_mode == "analytic");
    CHECK(c.margin_rule == "fixed");
    CHECK(c.threads == 1);
    CHECK(c.brute_dirs == 10000);
}

TEST_CASE("lemma4 defaults cover the full law and deviation grid") {
    const auto c = parse(R"({"experiment":"lemma4"})");
    CHECK(c.laws == std::vector<std::string>{"uniform", "normal", "shifted_exponential",
                                             "triangular"});
    REQUIRE(c.t_values.size() == 20);
    CHECK(c.t_values.front() == Catch::Approx(0.05));
    CHECK(c.t_values.back() == Catch::Approx(1.0));
    CHECK(c.schedule() == std::vector<std::int64_t>{12, 100, 1000});
}

TEST_CASE("strong_law and inclusion default to a power-of-two schedule") {
    const auto c = parse(R"({"experiment":"strong_law","dimension":1})");
    const auto ns = c.schedule();
    REQUIRE(ns.size() == 9);
    CHECK(ns.front() == 16);
    CHECK(ns.back() == 4096);
    CHECK(c.margin_rule == "loglog");
}

TEST_CASE("unknown keys are rejected by name") {
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"lemma4","frobnicate":1})"),
                        Catch::Matchers::ContainsSubstring("unknown key 'frobnicate'"));
}

TEST_CASE("theorem1 rejects epsilon outside the open half-unit interval") {
    REQUIRE_THROWS_WITH(
        parse(R"({"experiment":"theorem1","dimension":1,"epsilons":[0.6]})"),
        Catch::Matchers::ContainsSubstring("ε ∈ (0,1/2)"));
    REQUIRE_THROWS_WITH(
        parse(R"({"experiment":"theorem1","dimension":1,"epsilons":[0.5]})"),
        Catch::Matchers::ContainsSubstring("ε ∈ (0,1/2)"));
    REQUIRE_THROWS_AS(parse(R"({"experiment":"theorem1","epsilons":[0.0]})"), ConfigError);
}

TEST_CASE("config validation is specific about the offending key") {
    using Catch::Matchers::ContainsSubstring;
    REQUIRE_THROWS_WITH(parse(R"({"model":"gaussian"})"), ContainsSubstring("experiment"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"nope"})"), ContainsSubstring("experiment"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"lemma4","trials":"ten"})"),
                        ContainsSubstring("trials"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"lemma4","trials":0})"),
                        ContainsSubstring("trials"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"theorem1","dimension":0})"),
                        ContainsSubstring("dimension"));
    REQUIRE_THROWS_WITH(
        parse(R"({"experiment":"theorem1","dimension":2,"model_params":[1]})"),
        ContainsSubstring("model_params"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"theorem1","brute_dirs":999})"),
                        ContainsSubstring("brute_dirs"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"inclusion","inclusion_draws":9999})"),
                        ContainsSubstring("inclusion_draws"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"corollary2","model":"laplace_product"})"),
                        ContainsSubstring("model"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"lemma4","n_values":[11]})"),
                        ContainsSubstring("n >= 12"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"lemma4","laws":["cauchy"]})"),
                        ContainsSubstring("cauchy"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"theorem1","n_values":[2],"dimension":2})"),
                        ContainsSubstring("n >= d+1"));
    REQUIRE_THROWS_WITH(parse(R"({"experiment":"strong_law","dimension":1,"n_values":[8]})"),
                        ContainsSubstring("n >= 16"));
}

TEST_CASE("config hash ignores key order, omitted defaults, and output paths") {
    const auto a = parse(R"({"experiment":"theorem1","model":"gaussian","dimension":2})");
    const auto b = parse(R"({"dimension":2,"model":"gaussian","experiment":"theorem1"})");
    const auto c = parse(R"({"experiment":"theorem1","model":"gaussian","dimension":2,
                             "trials":100,"seed":1,"oracle_mode":"analytic"})");
    const auto d = parse(R"({"experiment":"theorem1","model":"gaussian","dimension":2,
                             "out_csv":"/tmp/elsewhere.csv","threads":8})");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() == c.hash());
    CHECK(a.hash() == d.hash());

    auto e = a;
    e.seed = 2;
    CHECK(a.hash() != e.hash());
    auto f = a;
    f.epsilons = {0.25};
    CHECK(a.hash() != f.hash());
}

TEST_CASE("normalized config survives a JSON round trip") {
    const auto a = parse(R"({"experiment":"inclusion","dimension":1,"seed":77})");
    const json j = a.normalized();
    const json reparsed = json::parse(j.dump());
    CHECK(reparsed == j);
}

TEST_CASE("parse_config reads files and reports unreadable or malformed ones") {
    TempFile f("config.json");
    write_text_file(f.path, R"({"experiment":"lemma4","n_values":[12]})");
    const auto c = parse_config(f.path);
    CHECK(c.experiment == "lemma4");

    REQUIRE_THROWS_WITH(parse_config("/nonexistent/nope.json"),
                        Catch::Matchers::ContainsSubstring("cannot open"));
    TempFile g("broken.json");
    write_text_file(g.path, "{ not json");
    REQUIRE_THROWS_WITH(parse_config(g.path),
                        Catch::Matchers::ContainsSubstring("not well-formed"));
}

TEST_CASE("reals are serialized with round-trip-exact precision") {
    const std::vector<double> xs = {1.0 / 3.0,
                                    0.1,
                                    -2.5000000000000004,
                                    1e-300,
                                    9.87654321e280,
                                    0.84615384615384626,
                                    1.0,
                                    -0.0};
    for (const double x : xs) {
        const std::string s = format_real(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_int(-42) == "-42");
    CHECK(format_bool(true) == "1");
    CHECK(format_bool(false) == "0");
}

TEST_CASE("csv rendering is deterministic with a fixed field order") {
    Table t;
    t.header = {"a", "b"};
    t.add_row({"1", format_real(1.0 / 3.0)});
    t.add_row({"2", "ratio_out_of_band"});
    const std::string got = render_csv(t);
    CHECK(got == "a,b\n1,0.33333333333333331\n2,ratio_out_of_band\n");
    CHECK(render_csv(t) == got);
    CHECK(got.back() == '\n');
}

TEST_CASE("empty record list renders a header-only csv") {
    Table t;
    t.header = {"n", "value"};
    CHECK(render_csv(t) == "n,value\n");
}

TEST_CASE("rows must match the header width") {
    Table t;
    t.header = {"a", "b"};
    REQUIRE_THROWS_AS(t.add_row({"only one"}), std::logic_error);
}

TEST_CASE("write_report returns the digest of what landed on disk") {
    TempFile f("report.csv");
    const std::string content = "n,value\n1,2\n";
    const auto entry = write_report(f.path, content);
    CHECK(entry.path == f.path);
    CHECK(entry.digest == to_hex(fnv1a64(content)));
    CHECK(read_text_file(f.path) == content);
    // Re-writing identical content leaves the digest unchanged.
    CHECK(write_report(f.path, content).digest == entry.digest);
}

TEST_CASE("manifest digests match the files they describe") {
    TempFile csv("run.csv");
    TempFile sum("run.json");
    RunManifest m;
    m.config_hash = to_hex(0x1234u);
    m.seed = 99;
    m.started_at = utc_timestamp();
    m.outputs.push_back(write_report(csv.path, "a,b\n1,2\n"));
    m.outputs.push_back(write_report(sum.path, "{}\n"));
    m.finished_at = utc_timestamp();
    const json j = m.to_json();
    CHECK(j["tool_version"] == kVersion);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["config_hash"] == m.config_hash);
    CHECK(j["seed"] == 99);
    REQUIRE(j["outputs"].size() == 2);
    for (const auto& o : j["outputs"]) {
        const std::string body = read_text_file(o["path"].get<std::string>());
        CHECK(o["digest"].get<std::string>() == to_hex(fnv1a64(body)));
    }
}

TEST_CASE("timestamps are UTC in a fixed shape") {
    const std::string ts = utc_timestamp();
    REQUIRE(ts.size() == 20);
    CHECK(ts[4] == '-');
    CHECK(ts[10] == 'T');
    CHECK(ts.back() == 'Z');
}

TEST_CASE("rendered reals parse back from a csv row") {
    Table t;
    t.header = {"x", "y"};
    const double x = 0.12345678901234567, y = -3.0000000000000004;
    t.add_row({format_real(x), format_real(y)});
    const std::string csv = render_csv(t);
    const auto line = csv.substr(csv.find('\n') + 1);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == x);
    CHECK(std::stod(line.substr(comma + 1)) == y);
}
