#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lossnet/core.hpp"
#include "lossnet/rng.hpp"

namespace lossnet {

enum class Decision { accept, reject };

// Solution of the admission knapsack LP: maximize sum of
// reward_k * alpha_dsk * rate_dsk * s subject to
// sum of alpha_dsk * rate_dsk * s <= (1 - epsilon) * capacity, alpha in [0,1].
// Solved greedily by descending reward; within a class every (d,s) type
// shares one alpha, acceptance is full above the cutoff class, fractional at
// most at the cutoff, zero below it.
struct PolicySolution {
    std::map<TypeKey, double> alpha;   // keyed (delay, duration, class_id)
    std::map<int, double> class_alpha; // class_id -> alpha
    std::vector<int> reward_order;     // class_ids by descending reward
    int cutoff_class = -1;             // last class with alpha > 0; -1 if none
    double fractional_alpha = 0.0;     // alpha at the cutoff class
    double lp_objective = 0.0;
    double budget = 0.0;               // (1 - epsilon) * capacity

    double alpha_for_class(int class_id) const;
};

PolicySolution solve_knapsack_lp(std::span<const ClassSpec> classes, int capacity,
                                 double epsilon);

// Class-selection admission rule: reject classes the LP zeroed out, flip the
// fractional coin at the cutoff class first, then accept if and only if the
// requested interval has a free unit throughout (peak reserved occupancy
// below capacity). The caller reserves the interval on accept.
Decision icsp_decide(const Request& request, const PolicySolution& solution,
                     const BookingLedger& ledger, int capacity, Rng& rng);

// --- Finite-horizon dynamic program over per-period capacities ---

struct WindowPmfEntry {
    int offset;   // start offset from the decision period, >= 0
    int length;   // number of consecutive periods, >= 1
    double prob;
};

struct DpClass {
    int class_id = 0;
    double arrival_prob = 0.0; // at most one arrival per period overall
    double reward_rate = 0.0;  // reward per occupied period
    std::vector<WindowPmfEntry> windows;
};

struct DpInstance {
    int periods = 1;  // T
    int capacity = 1; // per-period capacity c0
    std::vector<DpClass> classes;

    void validate() const; // arrival probs sum <= 1, window pmfs sum to 1
};

// Maps a continuous-time model to the periodic one: each period of length
// period_length sees at most one arrival, class k with probability
// rate_k * period_length / (1 + total_rate * period_length); delays and
// durations are rounded to whole periods.
DpInstance discretize(const SystemConfig& config, double period_length, int periods);

// Backward-induction value oracle. The state is (period, remaining capacity
// of each period from now to the horizon); only states reachable from the
// full-capacity start are memoized, guarded by a hard cap. The optimal
// action is a threshold rule: accept a request iff its total reward strictly
// exceeds the opportunity cost critical_reward(t, c, window).
class DpOracle {
public:
    explicit DpOracle(DpInstance instance, std::size_t state_guard = 10'000'000);

    const DpInstance& instance() const { return instance_; }

    // Expected optimal reward-to-go from period t with capacity vector cap
    // (cap[i] is the remaining capacity of period t + i, i < T - t + 1).
    double expected_value(int t, std::span<const int> cap) const;

    // Value of the whole horizon from the full-capacity start.
    double total_value() const;

    // Opportunity cost of granting [t+offset, t+offset+length) in state cap;
    // +infinity when the window does not fit the remaining capacities or
    // extends past the horizon.
    double critical_reward(int t, std::span<const int> cap, int offset, int length) const;

    // accept iff reward_rate * length > critical_reward (ties reject).
    Decision decide(int t, std::span<const int> cap, int offset, int length,
                    double reward_rate) const;

    std::size_t state_count() const { return memo_.size(); }

    // Visits every memoized state as (t, capacities, value).
    void for_each_state(
        const std::function<void(int, std::span<const int>, double)>& fn) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::string& k) const {
            std::size_t h = 1469598103934665603ULL;
            for (unsigned char c : k) h = (h ^ c) * 1099511628211ULL;
            return h;
        }
    };

    double value(int t, std::vector<int>& cap) const;
    static std::string key(int t, std::span<const int> cap);

    DpInstance instance_;
    std::size_t state_guard_;
    mutable std::unordered_map<std::string, double, KeyHash> memo_;
};

} // namespace lossnet
