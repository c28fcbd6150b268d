#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lossnet/distributions.hpp"

namespace lossnet {

// Two independent Poisson point processes on a unit slot running toward each
// other: a backward (departure) process observed right-to-left and a forward
// (pre-arrival) process observed left-to-right. The quantity of interest is
// the tail of X = max over the slot of (departures remaining + pre-arrivals
// so far), the peak occupancy contributed by the two streams.
struct OpposingProcessSpec {
    double backward_rate = 0.0;
    double forward_rate = 0.0;
    int threshold = 1; // occupancy level C

    void validate() const; // rates >= 0, threshold >= 1
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long long n_samples = 0;
};

// P(Poisson(mean) >= c). Log-space terms, accurate into deep tails.
double poisson_tail(double mean, long long c);

// Erlang-B blocking via the stable recursion B(0)=1,
// B(c) = rho*B(c-1) / (c + rho*B(c-1)).
double erlang_b(int capacity, double offered_load);

// Probability that an asymmetric +-1 random walk with up-probability p < 1/2
// ever reaches level b: (p/(1-p))^b. Throws std::domain_error for p >= 1/2.
double rw_hitting_prob(double up_prob, int level);

// Exact P(X >= C). Conditions on the total number of points (Poisson with
// the summed rate); given n points, the time-ordered labels form an i.i.d.
// +-1 walk (up = forward point) and X equals (#down steps) + (max walk
// level), evaluated by a dynamic program over (step, position, running max).
// Deterministic; absolute accuracy ~ tail_eps. Throws std::runtime_error,
// recommending opposing_max_mc, when the conditioning range is too large.
double opposing_max_exact(const OpposingProcessSpec& spec, double tail_eps = 1e-10);

// Unbiased Monte Carlo estimate of P(X >= C): samples both processes' points
// on the unit slot and takes the max of backward-remaining + forward-so-far
// at r = 0 and at each forward point (the max can only be attained there).
// Deterministic given the seed, independent of thread count.
McEstimate opposing_max_mc(const OpposingProcessSpec& spec, long long n_samples,
                           std::uint64_t seed);

// One independent Poisson pre-arrival process entering the occupancy of a
// unit slot: the process of duration-`duration` customers starting in the
// slot with index `slot`.
struct SlotTerm {
    int slot;
    int duration;
    double rate;
};

// The exact decomposition of the peak occupancy A_d over slot (d, d+1]:
// customers spanning the whole slot (in service throughout), departures
// within the slot, and pre-arrivals within the slot. Terms with zero rate
// are omitted.
struct SlotAssembly {
    int slot = 0;
    std::vector<SlotTerm> in_service;   // counted outside the running max
    std::vector<SlotTerm> departures;   // backward processes inside the max
    std::vector<SlotTerm> pre_arrivals; // forward processes inside the max
};

SlotAssembly assemble_slot(const MergedDistribution& dist, int d);

// MC estimate of P(A_d >= threshold) in the infinite-capacity system.
McEstimate sample_slot_occupancy(const MergedDistribution& dist, int d, int threshold,
                                 long long n_samples, std::uint64_t seed);

// MC estimate of the conditional virtual blocking probability
// P(max(A_d, ..., A_{d+s-1}) >= threshold) for a request of type (d, s).
// Slots share underlying processes and are therefore correlated; each
// process is drawn once per sample and reused wherever it appears.
// Throws std::domain_error if (d, s) has no probability mass.
McEstimate conditional_virtual_blocking(const MergedDistribution& dist, int d, int s,
                                        int threshold, long long n_samples,
                                        std::uint64_t seed);

enum class Regime { critical, padded };

struct SweepRow {
    double lambda;
    int capacity;
    int delay;
    int duration;
    double estimate;
    double std_error;
    long long n_samples;
    std::uint64_t seed;
};

// Virtual-blocking estimates across a grid of arrival rates with capacity
// tied to the traffic intensity: capacity = round(rho) in the critical
// regime, ceil((1+pad_epsilon)*rho) in the padded regime. One row per
// (lambda, supported (d,s) cell).
std::vector<SweepRow> asymptotic_sweep(Regime regime, double pad_epsilon,
                                       const MergedDistribution& shape,
                                       std::span<const double> lambda_grid,
                                       long long n_samples, std::uint64_t seed);

} // namespace lossnet
