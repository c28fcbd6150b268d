#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lossnet/analytics.hpp"
#include "lossnet/core.hpp"
#include "lossnet/policies.hpp"
#include "lossnet/pricing.hpp"

namespace lossnet {

// Reads and parses a JSON config; errors name the offending path.
nlohmann::json load_config_file(const std::string& path);

// Applies `key=value` assignments with dotted paths (e.g. "epsilon=0.1",
// "classes.0.arrival_rate=3"). The path must already exist in the document;
// unknown keys are rejected. Values parse as JSON scalars, falling back to
// strings.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& assignments);

SystemConfig parse_system_config(const nlohmann::json& doc);

struct SweepParams {
    Regime regime = Regime::critical;
    std::vector<double> lambda_grid;
    long long samples = 100000;
};
SweepParams parse_sweep_params(const nlohmann::json& doc);

long long parse_blocking_samples(const nlohmann::json& doc); // "blocking.samples"

struct BenchParams {
    std::vector<std::string> policies{"icsp", "admit_all"};
    std::vector<int> capacities; // empty: just the config capacity
    bool scale_rates = true;     // scale arrival rates with capacity
};
BenchParams parse_bench_params(const nlohmann::json& doc);

struct PricingParams {
    std::vector<PricedClass> classes;
    double tol = 1e-9;
    std::optional<int> grid_resolution; // cross-validate when present
};
PricingParams parse_pricing_params(const nlohmann::json& doc);

// Either an explicit periodic instance ("dp" with periods/capacity/classes)
// or a discretization of the surrounding continuous config ("dp" with
// period_length/periods).
DpInstance parse_dp_instance(const nlohmann::json& doc);

std::string fnv1a_hex(const std::string& bytes);

// Writes `<out_path>.manifest.json` describing the run.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_path, const nlohmann::json& effective_config,
                    std::uint64_t seed, int replications,
                    const std::vector<std::string>& overrides,
                    const nlohmann::json& extras = {});

} // namespace lossnet
