#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lossnet/core.hpp"
#include "lossnet/policies.hpp"
#include "lossnet/rng.hpp"

namespace lossnet {

struct CellStats {
    long long offered = 0;
    long long accepted = 0;
};

struct VirtualCell {
    long long offered = 0;
    long long blocked = 0; // peak twin occupancy over the interval >= capacity
};

// Post-warmup tallies of one simulation run. Cells with zero offered
// customers are absent rather than reported as zero-blocking.
struct SimReport {
    std::map<TypeKey, CellStats> cells;
    std::map<std::pair<int, int>, VirtualCell> virtual_cells; // coupled runs only
    double revenue_total = 0.0; // accumulated reward tally
    double revenue_rate = 0.0;  // revenue_total / effective horizon
    double horizon = 0.0;
    double warmup = 0.0;
    std::uint64_t seed = 0;
    long long arrivals = 0;
    long long accepted_total = 0;

    double effective_horizon() const { return horizon - warmup; }
    // Blocking estimate 1 - accepted/offered; nullopt for absent cells.
    std::optional<double> blocking(const TypeKey& key) const;
    std::optional<double> blocking_se(const TypeKey& key) const;
    std::optional<double> virtual_blocking(int delay, int duration) const;
    std::optional<double> virtual_blocking_se(int delay, int duration) const;

    void write_csv(std::ostream& out) const;
    std::string to_json_text() const;
};

// Per-event hooks for tests and instrumentation.
struct SimObserver {
    virtual ~SimObserver() = default;
    virtual void on_decision(const Request&, bool /*accepted*/, const BookingLedger&) {}
    virtual void on_coupled(const Request&, bool /*cap_accepted*/, bool /*virtually_blocked*/,
                            const BookingLedger& /*capacitated*/, const BookingLedger& /*twin*/) {}
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual Decision decide(const Request&, const BookingLedger&, int capacity, Rng&) const = 0;
    virtual std::string name() const = 0;
    // LP acceptance probabilities per class, for reporting; empty if n/a.
    virtual std::string accept_probs() const { return {}; }
};

// Accepts whenever a unit is free throughout the requested interval.
class AdmitAllPolicy final : public Policy {
public:
    Decision decide(const Request&, const BookingLedger&, int, Rng&) const override;
    std::string name() const override { return "admit_all"; }
};

class RejectAllPolicy final : public Policy {
public:
    Decision decide(const Request&, const BookingLedger&, int, Rng&) const override;
    std::string name() const override { return "reject_all"; }
};

class IcspPolicy final : public Policy {
public:
    explicit IcspPolicy(PolicySolution solution) : solution_(std::move(solution)) {}
    Decision decide(const Request&, const BookingLedger&, int capacity, Rng&) const override;
    std::string name() const override { return "icsp"; }
    std::string accept_probs() const override;
    const PolicySolution& solution() const { return solution_; }

private:
    PolicySolution solution_;
};

// Single run: merged Poisson arrivals, policy admission, ledger bookkeeping.
// Statistics start after the warmup; deterministic given the seed.
SimReport run(const SystemConfig& config, const Policy& policy, std::uint64_t seed,
              SimObserver* observer = nullptr);

struct CoupledReports {
    SimReport capacitated;
    SimReport infinite;
};

// Capacitated system and its infinite-capacity twin driven by the identical
// arrival stream. The twin admits everyone; per arrival it also records
// whether the requested interval already peaked at or above capacity, the
// virtual blocking event. Capacitated acceptances are a subset of the
// twin's by construction; the observer hook lets tests assert it per event.
CoupledReports run_coupled(const SystemConfig& config, std::uint64_t seed,
                           SimObserver* observer = nullptr);

struct BenchRow {
    std::string policy;
    double revenue_rate = 0.0;
    double revenue_se = 0.0;
    double reference = 0.0; // revenue bound or optimum the row is judged against
    double err = 0.0;       // |revenue - reference| / reference
    double ratio = 0.0;     // revenue / reference
    std::string accept_probs;
};

// Continuous-time policy comparison with common random numbers across
// policies. The reference is the admission LP objective divided by
// (1 - epsilon), an upper bound on any policy's long-run revenue rate.
std::vector<BenchRow> benchmark(const SystemConfig& config,
                                const std::vector<const Policy*>& policies,
                                int replications, std::uint64_t seed);

// Periodic-model comparison on a DP instance: the exact DP value is the
// reference; simulated DP-oracle, class-selection and admit-all policies are
// measured against it. Revenue is reported per period.
std::vector<BenchRow> benchmark_discrete(const DpInstance& instance, double epsilon,
                                         int replications, std::uint64_t seed);

} // namespace lossnet
