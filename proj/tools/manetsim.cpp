// manetsim: run scenarios, sweeps, and validate config files.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "manet/harness.hpp"
#include "manet/kernels.hpp"
#include "manet/scenario.hpp"

namespace {

using namespace manet;

void print_issues(const std::vector<ConfigIssue>& issues) {
    for (const auto& i : issues) fmt::print(stderr, "error: {}: {}\n", i.path, i.message);
}

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> replications;
    std::optional<std::string> policy;
    std::vector<std::string> sets;
    unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Base seed (run i uses seed + i)");
    cmd->add_option("--replications", c.replications, "Runs per point");
    cmd->add_option("--policy", c.policy, "none | naive | acrr");
    cmd->add_option("--set", c.sets, "Override key=value (repeatable)");
    cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void apply_common(ScenarioConfig& cfg, const Common& c) {
    for (const auto& s : c.sets) apply_override(cfg, s);
    if (c.seed) cfg.base_seed = *c.seed;
    if (c.replications) cfg.replications = *c.replications;
    if (c.policy) set_field(cfg, "policy.name", *c.policy);
}

ScenarioConfig base_config(const std::string& path) {
    if (path.empty()) return *preset("desk");
    if (auto p = preset(path)) return *p;
    return load_config(path);
}

std::vector<Policy> parse_policies(const std::string& text) {
    std::vector<Policy> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(',', start);
        const auto name = text.substr(start, pos == std::string::npos ? pos : pos - start);
        auto p = parse_policy(name);
        if (!p) throw ConfigError(ConfigIssue{"--policies", fmt::format("unknown policy '{}'", name)});
        out.push_back(*p);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

void report_write(const WriteResult& w, const std::string& out) {
    fmt::print("wrote {} run rows, {} aggregate rows to {}\n", w.run_rows, w.aggregate_rows, out);
    if (w.aggregation_skipped) fmt::print(stderr, "note: {}\n", *w.aggregation_skipped);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MANET route-request flood simulator"};
    app.require_subcommand(1);

    std::string kernel;
    app.add_option("--kernel", kernel, "Force kernel ISA: scalar | avx2");

    Common run_opts;
    std::string run_config;
    std::string run_out = "out";
    auto* run = app.add_subcommand("run", "Run replications of one scenario");
    run->add_option("config", run_config, "Config file or preset name (desk, table1)")->required();
    run->add_option("--out", run_out, "Output directory");
    add_common(run, run_opts);

    Common sweep_opts;
    std::string sweep_name;
    std::string sweep_out;
    std::string sweep_config;
    std::string sweep_policies = "none,acrr";
    auto* sweep = app.add_subcommand("sweep", "Run a named sweep or key=v1,v2,...");
    sweep->add_option("sweep", sweep_name, "fig2..fig6, naive-vs-acrr, or key=v1,v2")->required();
    sweep->add_option("--out", sweep_out, "Output directory")->required();
    sweep->add_option("--config", sweep_config, "Base config file or preset");
    sweep->add_option("--policies", sweep_policies, "Policies for custom sweeps");
    add_common(sweep, sweep_opts);

    std::string validate_config;
    auto* val = app.add_subcommand("validate", "Check a config file");
    val->add_option("config", validate_config, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!kernel.empty()) {
            if (kernel == "scalar") {
                kernels::select_isa(kernels::Isa::Scalar);
            } else if (kernel == "avx2") {
                kernels::select_isa(kernels::Isa::Avx2);
            } else {
                fmt::print(stderr, "error: --kernel: unknown ISA '{}'\n", kernel);
                return 2;
            }
        }

        if (*run) {
            auto cfg = base_config(run_config);
            apply_common(cfg, run_opts);
            if (auto issues = validate(cfg); !issues.empty()) {
                print_issues(issues);
                return 2;
            }
            const auto reports = run_replications(cfg, run_opts.jobs);
            report_write(write_run_outputs(run_out, cfg, reports), run_out);
            return 0;
        }

        if (*sweep) {
            auto base = base_config(sweep_config);
            apply_common(base, sweep_opts);
            std::optional<SweepSpec> spec = named_sweep(sweep_name, base);
            if (!spec) {
                if (sweep_name.find('=') == std::string::npos) {
                    fmt::print(stderr, "error: unknown sweep '{}'; known:", sweep_name);
                    for (auto n : named_sweeps()) fmt::print(stderr, " {}", n);
                    fmt::print(stderr, "\n");
                    return 2;
                }
                spec = parse_sweep_spec(sweep_name, base, parse_policies(sweep_policies));
            } else if (sweep_opts.policy) {
                spec->policies = parse_policies(*sweep_opts.policy);
            }
            const auto points = run_sweep(*spec, sweep_opts.jobs);
            report_write(write_sweep_outputs(sweep_out, *spec, points), sweep_out);
            return 0;
        }

        if (*val) {
            const auto cfg = load_config(validate_config);
            const auto issues = validate(cfg);
            if (!issues.empty()) {
                print_issues(issues);
                return 1;
            }
            fmt::print("{}: ok\n", validate_config);
            return 0;
        }
    } catch (const ConfigError& e) {
        print_issues(e.issues());
        return 2;
    } catch (const RunFailure& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
