// Command-line harness: regime sweeps, policy benchmarks, virtual-blocking
// estimates, static pricing and the periodic DP oracle, all driven by a JSON
// config plus key=value overrides. Outputs are CSV files with a JSON run
// manifest alongside; identical config + seed gives byte-identical files.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "lossnet/analytics.hpp"
#include "lossnet/config.hpp"
#include "lossnet/csv.hpp"
#include "lossnet/policies.hpp"
#include "lossnet/pricing.hpp"
#include "lossnet/simulate.hpp"
#include "lossnet/version.hpp"

namespace {

using namespace lossnet;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    int replications = 8;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config path")->required();
    cmd->add_option("--out", opts.out_path, "output CSV path (default: stdout, no manifest)");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--replications", opts.replications, "simulation replications");
    cmd->add_option("--set", opts.overrides, "config override key=value (repeatable)");
}

struct OutputTarget {
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

OutputTarget open_output(const CommonOpts& opts) {
    OutputTarget t;
    if (!opts.out_path.empty()) {
        t.file.open(opts.out_path, std::ios::binary);
        if (!t.file) throw std::runtime_error("cannot write output file: " + opts.out_path);
    }
    return t;
}

nlohmann::json load_effective_config(const CommonOpts& opts) {
    nlohmann::json doc = load_config_file(opts.config_path);
    apply_overrides(doc, opts.overrides);
    return doc;
}

void print_warnings(const SystemConfig& cfg) {
    for (const std::string& w : cfg.validate()) std::cerr << "warning: " << w << '\n';
}

void finish(const CommonOpts& opts, const std::string& command,
            const nlohmann::json& effective, const nlohmann::json& extras = {}) {
    if (!opts.out_path.empty())
        write_manifest(opts.out_path, command, opts.config_path, effective, opts.seed,
                       opts.replications, opts.overrides, extras);
}

int cmd_sweep(const CommonOpts& opts) {
    const nlohmann::json doc = load_effective_config(opts);
    const SystemConfig cfg = parse_system_config(doc);
    print_warnings(cfg);
    const SweepParams params = parse_sweep_params(doc);
    const MergedDistribution shape = merge_classes(cfg.classes);
    const auto rows = asymptotic_sweep(params.regime, cfg.epsilon, shape, params.lambda_grid,
                                       params.samples, opts.seed);
    OutputTarget out = open_output(opts);
    CsvWriter csv(out.stream());
    csv.row({"lambda", "capacity", "d", "s", "estimate", "std_error", "n_samples", "seed"});
    for (const auto& r : rows)
        csv.row({CsvWriter::num(r.lambda), CsvWriter::num(r.capacity), CsvWriter::num(r.delay),
                 CsvWriter::num(r.duration), CsvWriter::num(r.estimate),
                 CsvWriter::num(r.std_error), CsvWriter::num(r.n_samples),
                 CsvWriter::num(r.seed)});
    finish(opts, "sweep", doc);
    return 0;
}

int cmd_blocking(const CommonOpts& opts) {
    const nlohmann::json doc = load_effective_config(opts);
    const SystemConfig cfg = parse_system_config(doc);
    print_warnings(cfg);
    const long long samples = parse_blocking_samples(doc);
    const MergedDistribution dist = merge_classes(cfg.classes);
    OutputTarget out = open_output(opts);
    CsvWriter csv(out.stream());
    csv.row({"capacity", "d", "s", "estimate", "std_error", "n_samples", "seed"});
    Rng seeder(opts.seed);
    std::uint64_t cell = 0;
    for (int d = 0; d <= dist.max_delay(); ++d)
        for (int s = 1; s <= dist.max_duration(); ++s) {
            if (dist.joint(d, s) <= 0.0) continue;
            const std::uint64_t cell_seed = seeder.fork(cell++).next_u64();
            const McEstimate est =
                conditional_virtual_blocking(dist, d, s, cfg.capacity, samples, cell_seed);
            csv.row({CsvWriter::num(cfg.capacity), CsvWriter::num(d), CsvWriter::num(s),
                     CsvWriter::num(est.estimate), CsvWriter::num(est.std_error),
                     CsvWriter::num(est.n_samples), CsvWriter::num(cell_seed)});
        }
    finish(opts, "blocking", doc);
    return 0;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const SystemConfig& cfg) {
    if (name == "icsp")
        return std::make_unique<IcspPolicy>(
            solve_knapsack_lp(cfg.classes, cfg.capacity, cfg.epsilon));
    if (name == "admit_all") return std::make_unique<AdmitAllPolicy>();
    if (name == "reject_all") return std::make_unique<RejectAllPolicy>();
    throw std::runtime_error("unknown policy '" + name + "'");
}

int cmd_bench(const CommonOpts& opts) {
    const nlohmann::json doc = load_effective_config(opts);
    OutputTarget out = open_output(opts);
    CsvWriter csv(out.stream());

    if (doc.contains("dp")) {
        const DpInstance inst = parse_dp_instance(doc);
        const double epsilon = doc.value("epsilon", 0.05);
        const auto rows = benchmark_discrete(inst, epsilon, opts.replications, opts.seed);
        csv.row({"policy", "revenue_rate", "revenue_se", "reference", "err", "ratio",
                 "accept_probs"});
        for (const auto& r : rows)
            csv.row({r.policy, CsvWriter::num(r.revenue_rate), CsvWriter::num(r.revenue_se),
                     CsvWriter::num(r.reference), CsvWriter::num(r.err), CsvWriter::num(r.ratio),
                     r.accept_probs});
        finish(opts, "bench", doc);
        return 0;
    }

    const SystemConfig base = parse_system_config(doc);
    print_warnings(base);
    const BenchParams params = parse_bench_params(doc);
    std::vector<int> capacities = params.capacities;
    if (capacities.empty()) capacities.push_back(base.capacity);

    csv.row({"capacity", "policy", "revenue_rate", "revenue_se", "reference", "err", "ratio",
             "accept_probs"});
    nlohmann::json tables = nlohmann::json::array();
    for (int capacity : capacities) {
        SystemConfig cfg = base;
        cfg.capacity = capacity;
        if (params.scale_rates && base.capacity > 0) {
            const double factor = static_cast<double>(capacity) / base.capacity;
            for (auto& cls : cfg.classes) cls.arrival_rate *= factor;
        }
        std::vector<std::unique_ptr<Policy>> owned;
        std::vector<const Policy*> policies;
        for (const std::string& name : params.policies) {
            owned.push_back(make_policy(name, cfg));
            policies.push_back(owned.back().get());
        }
        const auto rows = benchmark(cfg, policies, opts.replications, opts.seed);
        for (const auto& r : rows) {
            csv.row({CsvWriter::num(capacity), r.policy, CsvWriter::num(r.revenue_rate),
                     CsvWriter::num(r.revenue_se), CsvWriter::num(r.reference),
                     CsvWriter::num(r.err), CsvWriter::num(r.ratio), r.accept_probs});
            tables.push_back({{"capacity", capacity},
                              {"policy", r.policy},
                              {"revenue_rate", r.revenue_rate},
                              {"revenue_se", r.revenue_se},
                              {"reference", r.reference},
                              {"err", r.err},
                              {"ratio", r.ratio}});
        }
    }
    finish(opts, "bench", doc, nlohmann::json{{"table", tables}});
    return 0;
}

int cmd_pricing(const CommonOpts& opts) {
    const nlohmann::json doc = load_effective_config(opts);
    const PricingParams params = parse_pricing_params(doc);
    const int capacity = doc.at("capacity").get<int>();
    const double epsilon = doc.value("epsilon", 0.05);

    const PricingSolution sol =
        solve_nlp2(params.classes, capacity, epsilon, params.tol);
    OutputTarget out = open_output(opts);
    CsvWriter csv(out.stream());
    csv.row({"class_id", "price", "demand_rate", "load", "load_share", "theta", "objective"});
    for (std::size_t k = 0; k < params.classes.size(); ++k) {
        const auto& pc = params.classes[k];
        const double rate = pc.curve.rate(sol.prices[k]);
        const double load = rate * pc.mean_service();
        csv.row({CsvWriter::num(pc.class_id), CsvWriter::num(sol.prices[k]),
                 CsvWriter::num(rate), CsvWriter::num(load),
                 CsvWriter::num(sol.load > 0.0 ? load / sol.load : 0.0),
                 CsvWriter::num(sol.theta), CsvWriter::num(sol.objective)});
    }

    nlohmann::json extras;
    if (params.grid_resolution) {
        const PricingCrossCheck check = cross_validate_nlp1(params.classes, capacity, epsilon,
                                                            *params.grid_resolution);
        extras["cross_check"] = {{"grid_objective", check.grid_objective},
                                 {"nlp2_objective", check.nlp2_objective},
                                 {"gap", check.gap},
                                 {"grid_error_bound", check.grid_error_bound}};
        std::cerr << "cross-check: grid=" << check.grid_objective
                  << " nlp2=" << check.nlp2_objective << " gap=" << check.gap
                  << " bound=" << check.grid_error_bound << '\n';
    }
    finish(opts, "pricing", doc, extras);
    return 0;
}

int cmd_dp(const CommonOpts& opts) {
    const nlohmann::json doc = load_effective_config(opts);
    const DpInstance inst = parse_dp_instance(doc);
    const DpOracle oracle(inst);
    OutputTarget out = open_output(opts);
    CsvWriter csv(out.stream());
    csv.row({"record", "t", "window_start", "window_length", "value"});
    csv.row({"value", "1", "", "", CsvWriter::num(oracle.total_value())});

    // Threshold table at the full-capacity state: the critical reward of
    // every window shape the instance can generate, per decision period.
    std::vector<std::pair<int, int>> windows;
    for (const auto& c : inst.classes)
        for (const auto& w : c.windows) windows.emplace_back(w.offset, w.length);
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    for (int t = 1; t <= inst.periods; ++t) {
        std::vector<int> cap(inst.periods - t + 1, inst.capacity);
        for (const auto& [offset, length] : windows) {
            const double r = oracle.critical_reward(t, cap, offset, length);
            csv.row({"threshold", CsvWriter::num(t), CsvWriter::num(offset),
                     CsvWriter::num(length),
                     std::isinf(r) ? std::string("inf") : CsvWriter::num(r)});
        }
    }
    finish(opts, "dp", doc,
           nlohmann::json{{"states", oracle.state_count()}, {"value", oracle.total_value()}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"loss-network simulation and policy toolkit"};
    app.set_version_flag("--version", lossnet::kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    int (*handler)(const CommonOpts&) = nullptr;

    for (auto [name, desc, fn] :
         {std::tuple{"sweep", "virtual-blocking sweep across arrival rates", &cmd_sweep},
          std::tuple{"bench", "policy revenue benchmark", &cmd_bench},
          std::tuple{"blocking", "virtual-blocking estimates at one capacity", &cmd_blocking},
          std::tuple{"pricing", "static price optimization", &cmd_pricing},
          std::tuple{"dp", "periodic dynamic-programming oracle", &cmd_dp}}) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, opts);
        cmd->callback([&handler, fn] { handler = fn; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return handler ? handler(opts) : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
