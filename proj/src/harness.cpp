#include "manet/harness.hpp"

#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "manet/simulator.hpp"

namespace manet {

RunFailure::RunFailure(std::uint64_t seed, const std::string& what)
    : std::runtime_error(fmt::format("run with seed {} failed: {}", seed, what)), seed_(seed) {}

namespace {

struct Task {
    const ScenarioConfig* config;
    std::uint64_t seed;
};

std::vector<MetricsReport> run_tasks(const std::vector<Task>& tasks, unsigned jobs) {
    std::vector<MetricsReport> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            try {
                out[i] = run_simulation(*tasks[i].config, tasks[i].seed);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw RunFailure(tasks[i].seed, e.what());
        } catch (...) {
            throw RunFailure(tasks[i].seed, "unknown error");
        }
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string key_columns(const RowKey& k) {
    return fmt::format("{},{},{},{},{}", k.scenario, k.sweep, k.field, k.value, k.policy);
}

std::string sanitize(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        if (ch == '/' || ch == ' ' || ch == ',') ch = '_';
    }
    return out;
}

std::string sweep_meta(const SweepSpec& spec) {
    std::string policies;
    for (auto p : spec.policies) {
        if (!policies.empty()) policies += ',';
        policies += to_string(p);
    }
    std::string values;
    for (const auto& v : spec.values) {
        if (!values.empty()) values += ',';
        values += v;
    }
    return fmt::format("# sweep = {}\n# field = {}\n# values = {}\n# policies = {}\n", spec.name,
                       spec.field, values, policies);
}

}  // namespace

std::vector<MetricsReport> run_replications(const ScenarioConfig& config, unsigned jobs) {
    if (auto issues = validate(config); !issues.empty()) throw ConfigError(std::move(issues));
    std::vector<Task> tasks;
    for (std::uint32_t i = 0; i < config.replications; ++i) {
        tasks.push_back({&config, config.base_seed + i});
    }
    return run_tasks(tasks, jobs);
}

const std::vector<std::string_view>& named_sweeps() {
    static const std::vector<std::string_view> names{"fig2", "fig3", "fig4",
                                                     "fig5", "fig6", "naive-vs-acrr"};
    return names;
}

std::optional<SweepSpec> named_sweep(std::string_view name, const ScenarioConfig& base) {
    const std::vector<std::string> fractions{"0", "0.0125", "0.025", "0.05", "0.0625"};
    SweepSpec s;
    s.name = std::string(name);
    s.base = base;
    s.policies = {Policy::None, Policy::Acrr};
    if (name == "fig2" || name == "fig5" || name == "fig6") {
        s.field = "adversary.malicious_fraction";
        s.values = fractions;
    } else if (name == "naive-vs-acrr") {
        s.field = "adversary.malicious_fraction";
        s.values = fractions;
        s.policies = {Policy::None, Policy::Naive, Policy::Acrr};
    } else if (name == "fig3") {
        s.field = "traffic.flow_count";
        s.values = {"4", "8", "12", "16", "20"};
        s.base.adversary.malicious_fraction = 0.025;
        s.base.motion.v_min = s.base.motion.v_max = 10.0;
    } else if (name == "fig4") {
        s.field = "mobility.speed";
        s.values = {"5", "10", "15", "20"};
        s.base.adversary.malicious_fraction = 0.025;
        s.base.traffic.flow_count = 12;
    } else {
        return std::nullopt;
    }
    return s;
}

SweepSpec parse_sweep_spec(std::string_view spec, const ScenarioConfig& base,
                           std::vector<Policy> policies) {
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ConfigError(ConfigIssue{std::string(spec), "sweep must be a known name or key=v1,v2,..."});
    }
    SweepSpec s;
    s.name = "custom";
    s.field = std::string(spec.substr(0, eq));
    s.values = split(spec.substr(eq + 1), ',');
    s.policies = std::move(policies);
    s.base = base;
    // Reject bad keys and values before anything runs.
    for (const auto& v : s.values) {
        ScenarioConfig probe = base;
        set_field(probe, s.field, v);
    }
    return s;
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, unsigned jobs) {
    std::vector<SweepPoint> points;
    for (const auto& v : spec.values) {
        for (auto p : spec.policies) {
            SweepPoint pt;
            pt.value = v;
            pt.policy = p;
            pt.config = spec.base;
            set_field(pt.config, spec.field, v);
            pt.config.policy = p;
            if (auto issues = validate(pt.config); !issues.empty()) throw ConfigError(std::move(issues));
            points.push_back(std::move(pt));
        }
    }

    std::vector<Task> tasks;
    for (const auto& pt : points) {
        for (std::uint32_t i = 0; i < pt.config.replications; ++i) {
            tasks.push_back({&pt.config, pt.config.base_seed + i});
        }
    }
    auto reports = run_tasks(tasks, jobs);
    std::size_t at = 0;
    for (auto& pt : points) {
        for (std::uint32_t i = 0; i < pt.config.replications; ++i) {
            pt.reports.push_back(std::move(reports[at++]));
        }
    }
    return points;
}

std::string runs_csv_header() {
    std::string h = "scenario,sweep,field,value,policy,seed";
    for (auto name : scalar_metric_names()) {
        h += ',';
        h += name;
    }
    return h;
}

std::string runs_csv_row(const RowKey& key, const MetricsReport& report) {
    std::string row = key_columns(key);
    row += fmt::format(",{}", report.seed);
    for (double v : scalar_metrics(report)) {
        row += ',';
        row += format_number(v);
    }
    return row;
}

std::string aggregate_csv_header() {
    std::string h = "scenario,sweep,field,value,policy,n";
    for (auto name : scalar_metric_names()) {
        h += fmt::format(",{}_mean,{}_ci95", name, name);
    }
    return h;
}

std::string aggregate_csv_row(const RowKey& key, const std::vector<MetricsReport>& reports) {
    const auto summary = aggregate(reports);
    std::string row = key_columns(key);
    row += fmt::format(",{}", reports.size());
    for (const auto& s : summary) {
        row += ',';
        row += format_number(s.mean);
        row += ',';
        row += format_number(s.ci95);
    }
    return row;
}

WriteResult write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                              const std::vector<MetricsReport>& reports) {
    std::filesystem::create_directories(dir);
    WriteResult result;
    const RowKey key{config.name, "single", "", "", std::string(to_string(config.policy))};

    std::string runs = runs_csv_header() + "\n";
    for (const auto& r : reports) {
        runs += runs_csv_row(key, r) + "\n";
        ++result.run_rows;
    }
    write_file(dir / "runs.csv", runs);

    if (reports.size() >= 2) {
        write_file(dir / "aggregate.csv",
                   aggregate_csv_header() + "\n" + aggregate_csv_row(key, reports) + "\n");
        result.aggregate_rows = 1;
    } else {
        std::filesystem::remove(dir / "aggregate.csv");
        result.aggregation_skipped = fmt::format(
            "aggregate.csv not written: {} replication(s); a 95% confidence interval needs at "
            "least 2",
            reports.size());
    }
    write_file(dir / "meta.txt", "# manetsim resolved configuration\n" + to_text(config));
    return result;
}

WriteResult write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec,
                                const std::vector<SweepPoint>& points) {
    std::filesystem::create_directories(dir);
    WriteResult result;

    std::string runs = runs_csv_header() + "\n";
    std::string agg = aggregate_csv_header() + "\n";
    for (const auto& pt : points) {
        const RowKey key{pt.config.name, spec.name, spec.field, pt.value,
                         std::string(to_string(pt.policy))};
        for (const auto& r : pt.reports) {
            runs += runs_csv_row(key, r) + "\n";
            ++result.run_rows;
        }
        if (pt.reports.size() >= 2) {
            const auto row = aggregate_csv_row(key, pt.reports);
            agg += row + "\n";
            ++result.aggregate_rows;
            const auto point_dir =
                dir / "points" / fmt::format("{}__{}", to_string(pt.policy), sanitize(pt.value));
            std::filesystem::create_directories(point_dir);
            write_file(point_dir / "aggregate.csv", aggregate_csv_header() + "\n" + row + "\n");
        }
    }
    write_file(dir / "runs.csv", runs);
    if (result.aggregate_rows > 0) {
        write_file(dir / "aggregate.csv", agg);
    } else {
        result.aggregation_skipped =
            "aggregate.csv not written: a 95% confidence interval needs at least 2 replications";
    }
    write_file(dir / "meta.txt",
               "# manetsim resolved configuration\n" + sweep_meta(spec) + to_text(spec.base));
    return result;
}

}  // namespace manet
