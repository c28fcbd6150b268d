// Independent test-side oracles. Everything here recomputes expected values
// by a different route than the library under test: exhaustive enumeration,
// naive scans, expectimax trees and dense grids.
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lossnet/policies.hpp"
#include "lossnet/pricing.hpp"

namespace oracles {

// Max occupancy of a set of half-open intervals over [a, b) by stabbing
// every candidate point (the query start and each interval start inside).
inline long long naive_max_occupancy(const std::vector<std::pair<double, double>>& intervals,
                                     double a, double b) {
    std::vector<double> points{a};
    for (const auto& [lo, hi] : intervals)
        if (lo > a && lo < b) points.push_back(lo);
    long long best = 0;
    for (double x : points) {
        long long occ = 0;
        for (const auto& [lo, hi] : intervals)
            if (lo <= x && x < hi) ++occ;
        best = std::max(best, occ);
    }
    return best;
}

struct LpVar {
    double reward; // objective coefficient per unit of weight
    double weight;
};

// Optimal value of max sum(reward_i * weight_i * x_i) subject to
// sum(weight_i * x_i) <= budget, 0 <= x <= 1, by enumerating every candidate
// vertex: a subset at one, at most one fractional variable.
inline double brute_force_lp(const std::vector<LpVar>& vars, double budget) {
    const std::size_t n = vars.size();
    double best = 0.0;
    for (std::size_t mask = 0; mask < (1ULL << n); ++mask) {
        double w = 0.0, obj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ULL << i)) {
                w += vars[i].weight;
                obj += vars[i].reward * vars[i].weight;
            }
        if (w > budget + 1e-12) continue;
        best = std::max(best, obj);
        for (std::size_t f = 0; f < n; ++f) {
            if (mask & (1ULL << f)) continue;
            if (vars[f].weight <= 0.0) continue;
            const double x = std::min(1.0, (budget - w) / vars[f].weight);
            if (x <= 0.0) continue;
            best = std::max(best, obj + vars[f].reward * vars[f].weight * x);
        }
    }
    return best;
}

// Direct evaluation of the opposing-process peak for one up/down
// configuration in time order (+1 forward, -1 backward): the peak is
// checked at time zero and right after every forward point.
inline long long direct_opposing_value(const std::vector<int>& steps) {
    long long backward_total = 0;
    for (int s : steps)
        if (s < 0) ++backward_total;
    long long best = backward_total; // value at time zero
    long long forward_seen = 0, backward_seen = 0;
    for (int s : steps) {
        if (s > 0) {
            ++forward_seen;
            best = std::max(best, forward_seen + (backward_total - backward_seen));
        } else {
            ++backward_seen;
        }
    }
    return best;
}

// The same quantity via the walk identity: total down-steps plus the
// maximum prefix level.
inline long long walk_decomposition_value(const std::vector<int>& steps) {
    long long downs = 0, pos = 0, max_level = 0;
    for (int s : steps) {
        pos += s;
        if (s < 0) ++downs;
        max_level = std::max(max_level, pos);
    }
    return downs + max_level;
}

inline double poisson_pmf_direct(double mean, long long k) {
    return std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

inline double poisson_tail_direct(double mean, long long c) {
    if (c <= 0) return 1.0;
    if (mean <= 0.0) return 0.0;
    double below = 0.0;
    if (static_cast<double>(c) <= mean + 10.0 * std::sqrt(mean)) {
        for (long long k = 0; k < c; ++k) below += poisson_pmf_direct(mean, k);
        return 1.0 - below;
    }
    double tail = 0.0;
    for (long long k = c; k < c + 2000; ++k) {
        const double term = poisson_pmf_direct(mean, k);
        tail += term;
        if (term < tail * 1e-17 && k > c + 8) break;
    }
    return tail;
}

// Truncated brute force for P(peak >= C): enumerate every configuration of
// n <= n_max points. Truncation error is at most P(N > n_max).
inline double brute_opposing_tail(double backward_rate, double forward_rate, int threshold,
                                  int n_max) {
    const double total = backward_rate + forward_rate;
    const double p_up = forward_rate / total;
    double answer = 0.0;
    std::vector<int> steps;
    for (int n = 0; n <= n_max; ++n) {
        double blocked = 0.0;
        for (std::size_t mask = 0; mask < (1ULL << n); ++mask) {
            steps.assign(n, -1);
            int ups = 0;
            for (int i = 0; i < n; ++i)
                if (mask & (1ULL << i)) {
                    steps[i] = 1;
                    ++ups;
                }
            if (direct_opposing_value(steps) >= threshold)
                blocked += std::pow(p_up, ups) * std::pow(1.0 - p_up, n - ups);
        }
        answer += poisson_pmf_direct(total, n) * blocked;
    }
    return answer;
}

// Optimal expected reward of the periodic model by plain expectimax over
// the full scenario tree: no memoization, no threshold rule; both actions
// are explored at every arrival node.
inline double tree_value(const lossnet::DpInstance& inst, int t, std::vector<int>& cap) {
    if (t > inst.periods) return 0.0;
    const double reject_value = tree_value(inst, t + 1, cap);
    double ev = 0.0;
    double none = 1.0;
    for (const auto& c : inst.classes) {
        none -= c.arrival_prob;
        for (const auto& w : c.windows) {
            double best = reject_value;
            const int first = t + w.offset;
            const int last = first + w.length - 1;
            if (last <= inst.periods) {
                bool fits = true;
                for (int i = first; i <= last; ++i) fits = fits && cap[i - 1] >= 1;
                if (fits) {
                    for (int i = first; i <= last; ++i) --cap[i - 1];
                    best = std::max(best,
                                    c.reward_rate * w.length + tree_value(inst, t + 1, cap));
                    for (int i = first; i <= last; ++i) ++cap[i - 1];
                }
            }
            ev += c.arrival_prob * w.prob * best;
        }
    }
    ev += std::max(none, 0.0) * reject_value;
    return ev;
}

inline double tree_value(const lossnet::DpInstance& inst) {
    std::vector<int> cap(inst.periods, inst.capacity);
    return tree_value(inst, 1, cap);
}

// Dense price-grid oracle for one class: best r * rate(r) * mu subject to
// rate(r) * mu <= budget.
inline double pricing_grid_oracle(const lossnet::PricedClass& pc, double budget, int n_points) {
    const double mu = pc.mean_service();
    double best = 0.0;
    for (int i = 0; i <= n_points; ++i) {
        const double r = pc.curve.choke_price * i / n_points;
        const double load = pc.curve.rate(r) * mu;
        if (load <= budget) best = std::max(best, r * load);
    }
    return best;
}

} // namespace oracles
