#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "manet/harness.hpp"
#include "manet/scenario.hpp"

using namespace manet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("manetsim_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ScenarioConfig small() {
    ScenarioConfig c;
    c.node_count = 20;
    c.sim_time_s = 8.0;
    c.traffic.flow_count = 3;
    c.replications = 2;
    return c;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(MANETSIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config text round-trips") {
    ScenarioConfig c;
    c.policy = Policy::Naive;
    c.adversary.malicious_fraction = 0.0625;
    c.traffic.start_window_s = 0.0;
    c.base_seed = 123456789012ull;
    const auto back = parse_config(to_text(c));
    CHECK(to_text(back) == to_text(c));
    CHECK(back.policy == Policy::Naive);
    CHECK(back.adversary.malicious_fraction == 0.0625);
}

TEST_CASE("every listed key can be read and written") {
    const ScenarioConfig c;
    for (auto key : config_keys()) {
        ScenarioConfig d;
        set_field(d, key, get_field(c, key));
        CHECK(get_field(d, key) == get_field(c, key));
    }
}

TEST_CASE("parser handles comments, blanks and whitespace") {
    const auto c = parse_config("# header\n\n  nodes.count = 30  # trailing\npolicy.name=none\r\n");
    CHECK(c.node_count == 30);
    CHECK(c.policy == Policy::None);
    CHECK(to_text(parse_config("")) == to_text(ScenarioConfig{}));
}

TEST_CASE("parser errors name the key and line") {
    try {
        parse_config("nodes.count = 10\nnodes.count = 11\nbogus.key = 1\npolicy.k = abc\nno equals\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const auto& is = e.issues();
        REQUIRE(is.size() == 4);
        CHECK(is[0].path == "nodes.count");
        CHECK(is[0].message.find("line 2") != std::string::npos);
        CHECK(is[1].path == "bogus.key");
        CHECK(is[2].path == "policy.k");
        CHECK(is[3].path == "line 5");
    }
    CHECK_THROWS_AS(parse_config("nodes.count = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("policy.name = aggressive\n"), ConfigError);
}

TEST_CASE("validation reports each bad field") {
    auto c = ScenarioConfig{};
    CHECK(validate(c).empty());
    c.policy_params.alpha = 0.0;
    c.motion.v_max = 1.0;
    c.motion.v_min = 5.0;
    c.adversary.malicious_fraction = 0.1;
    c.adversary.flood_rate_pps = 5.0;
    std::set<std::string> paths;
    for (const auto& i : validate(c)) paths.insert(i.path);
    CHECK(paths == std::set<std::string>{"policy.alpha", "mobility.v_max", "adversary.flood_rate_pps"});
}

TEST_CASE("speed alias sets both bounds") {
    ScenarioConfig c;
    set_field(c, "mobility.speed", "15");
    CHECK(c.motion.v_min == 15.0);
    CHECK(c.motion.v_max == 15.0);
    apply_override(c, "traffic.flow_count=7");
    CHECK(c.traffic.flow_count == 7);
    CHECK_THROWS_AS(apply_override(c, "traffic.flow_count"), ConfigError);
}

TEST_CASE("presets") {
    const auto desk = preset("desk");
    REQUIRE(desk);
    CHECK(desk->node_count == 50);
    CHECK(desk->width_m == 1000.0);
    const auto t1 = preset("table1");
    REQUIRE(t1);
    CHECK(t1->node_count == 450);
    CHECK(t1->width_m == 5000.0);
    CHECK(t1->height_m == 1000.0);
    CHECK(validate(*t1).empty());
    CHECK_FALSE(preset("huge"));
}

TEST_CASE("replications come back in seed order regardless of threads") {
    auto c = small();
    c.replications = 3;
    const auto a = run_replications(c, 1);
    const auto b = run_replications(c, 3);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a[i].seed == c.base_seed + i);
        CHECK(runs_csv_row({}, a[i]) == runs_csv_row({}, b[i]));
    }
}

TEST_CASE("invalid configs fail before any run") {
    auto c = small();
    c.node_count = 0;
    CHECK_THROWS_AS(run_replications(c), ConfigError);
}

TEST_CASE("named sweeps") {
    const ScenarioConfig base;
    for (auto name : named_sweeps()) CHECK(named_sweep(name, base));
    CHECK_FALSE(named_sweep("fig9", base));
    const auto f2 = named_sweep("fig2", base);
    CHECK(f2->field == "adversary.malicious_fraction");
    CHECK(f2->values.size() == 5);
    CHECK(f2->policies.size() == 2);
    CHECK(named_sweep("naive-vs-acrr", base)->policies.size() == 3);
    CHECK(named_sweep("fig3", base)->field == "traffic.flow_count");
    CHECK(named_sweep("fig4", base)->field == "mobility.speed");
}

TEST_CASE("custom sweep specs are checked up front") {
    const ScenarioConfig base;
    const auto s = parse_sweep_spec("policy.k=0.5,1,2", base, {Policy::Acrr});
    CHECK(s.name == "custom");
    CHECK(s.values == std::vector<std::string>{"0.5", "1", "2"});
    CHECK_THROWS_AS(parse_sweep_spec("policy.q=1", base, {Policy::Acrr}), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("policy.k=1,x", base, {Policy::Acrr}), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("policy.k", base, {Policy::Acrr}), ConfigError);
}

TEST_CASE("sweep output row counts") {
    auto base = small();
    base.sim_time_s = 4.0;
    const auto spec = *named_sweep("fig2", base);
    const auto points = run_sweep(spec);
    CHECK(points.size() == 10);
    const auto dir = scratch("fig2");
    const auto w = write_sweep_outputs(dir, spec, points);
    CHECK(w.run_rows == 2 * 2 * 5);
    CHECK(w.aggregate_rows == 10);
    CHECK(lines(slurp(dir / "runs.csv")) == 1 + 20);
    CHECK(lines(slurp(dir / "aggregate.csv")) == 1 + 10);
    CHECK(fs::exists(dir / "points" / "acrr__0.0625" / "aggregate.csv"));
    CHECK(slurp(dir / "meta.txt").find("# sweep = fig2") != std::string::npos);
}

TEST_CASE("csv schema is stable") {
    const auto h = runs_csv_header();
    CHECK(h.rfind("scenario,sweep,field,value,policy,seed,routes_requested,routes_formed,", 0) == 0);
    CHECK(h.find(",overhead_ratio,") != std::string::npos);
    const auto a = aggregate_csv_header();
    CHECK(a.rfind("scenario,sweep,field,value,policy,n,routes_requested_mean,routes_requested_ci95,", 0) == 0);
    const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
    CHECK(cols(h) == 6 + static_cast<long>(scalar_metric_names().size()));
    CHECK(cols(a) == 6 + 2 * static_cast<long>(scalar_metric_names().size()));
    MetricsReport r;
    CHECK(cols(runs_csv_row({"s", "single", "", "", "acrr"}, r)) == cols(h));
    CHECK_THROWS_AS(aggregate_csv_row({}, {r}), AggregationError);
}

TEST_CASE("run outputs are byte-identical across reruns") {
    const auto c = small();
    const auto d1 = scratch("rerun1");
    const auto d2 = scratch("rerun2");
    write_run_outputs(d1, c, run_replications(c));
    write_run_outputs(d2, c, run_replications(c, 2));
    for (auto f : {"runs.csv", "aggregate.csv", "meta.txt"}) CHECK(slurp(d1 / f) == slurp(d2 / f));
}

TEST_CASE("a single replication refuses to aggregate") {
    auto c = small();
    c.replications = 1;
    const auto d = scratch("single");
    std::ofstream(d / "aggregate.csv") << "stale\n";
    const auto w = write_run_outputs(d, c, run_replications(c));
    CHECK(w.run_rows == 1);
    REQUIRE(w.aggregation_skipped);
    CHECK(w.aggregation_skipped->find("needs at least 2") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "aggregate.csv"));
    CHECK(fs::exists(d / "runs.csv"));
}

TEST_CASE("meta.txt holds the resolved config") {
    const auto c = small();
    const auto d = scratch("meta");
    write_run_outputs(d, c, run_replications(c));
    auto text = slurp(d / "meta.txt");
    CHECK(to_text(parse_config(text)) == to_text(c));
}

TEST_CASE("cli exit codes") {
    const auto d = scratch("cli");
    {
        std::ofstream(d / "good.cfg") << "nodes.count = 20\nsim.time_s = 3\nrun.replications = 2\n";
        std::ofstream(d / "bad.cfg") << "policy.alpha = 2\n";
        std::ofstream(d / "broken.cfg") << "policy.alpha = high\n";
    }
    CHECK(cli("validate " + (d / "good.cfg").string()) == 0);
    CHECK(cli("validate " + (d / "bad.cfg").string()) == 1);
    CHECK(cli("validate " + (d / "broken.cfg").string()) == 2);
    CHECK(cli("run " + (d / "bad.cfg").string() + " --out " + (d / "o").string()) == 2);
    CHECK(cli("run " + (d / "good.cfg").string() + " --out " + (d / "o").string()) == 0);
    CHECK(fs::exists(d / "o" / "aggregate.csv"));
    CHECK(cli("run " + (d / "good.cfg").string() + " --set nodes.count=x --out " + (d / "o").string()) == 2);
    CHECK(cli("sweep fig9 --out " + (d / "s").string()) == 2);
    CHECK(cli("--kernel scalar sweep policy.k=1,2 --config " + (d / "good.cfg").string() +
              " --policies acrr --out " + (d / "s").string()) == 0);
    CHECK(lines(slurp(d / "s" / "runs.csv")) == 1 + 4);
}

TEST_CASE("cli kernels produce identical output") {
    const auto d = scratch("kernels");
    std::ofstream(d / "c.cfg") << "nodes.count = 25\nsim.time_s = 5\nrun.replications = 2\n"
                                  "adversary.malicious_fraction = 0.04\n";
    const auto cfg = (d / "c.cfg").string();
    REQUIRE(cli("--kernel scalar run " + cfg + " --out " + (d / "s").string()) == 0);
    REQUIRE(cli("--kernel avx2 run " + cfg + " --out " + (d / "v").string()) == 0);
    CHECK(slurp(d / "s" / "runs.csv") == slurp(d / "v" / "runs.csv"));
}
