#pragma once

#include <span>
#include <vector>

#include "lossnet/core.hpp"

namespace lossnet {

// The class-merged arrival stream: one Poisson process at the aggregate rate
// whose marks carry the rate-weighted joint (delay, duration) distribution.
// Immutable after construction; freely shared across threads.
class MergedDistribution {
public:
    MergedDistribution(double total_rate, std::vector<std::vector<double>> joint);

    double total_rate() const { return total_rate_; }
    int max_delay() const { return max_delay_; }        // u
    int max_duration() const { return max_duration_; }  // v
    double mean_service() const { return mean_service_; }
    double traffic_intensity() const { return total_rate_ * mean_service_; }

    // Joint pmf P(delay=d, duration=s); zero outside the support box.
    double joint(int d, int s) const;
    // Marginals.
    double delay_marginal(int d) const;      // gamma_d
    double duration_marginal(int s) const;   // kappa_s
    // Conditional delay pmf given duration s. Throws std::domain_error when
    // the duration has zero marginal mass (the conditional is undefined).
    double conditional_delay(int d, int s) const;

    // Rate of the pre-arrival process of duration-s customers whose service
    // starts fall in the slot (d-s, d-s+1], as seen by an arrival at time 0
    // in steady state. Equals kappa_s * lambda for d < s, decreases as the
    // delay mass is consumed, and is exactly 0 once d - s >= max_delay.
    double pre_arrival_rate(int d, int s) const;

    // Same total_rate-scaled copy of this shape.
    MergedDistribution scaled(double new_total_rate) const;

private:
    double total_rate_;
    int max_delay_;
    int max_duration_;
    double mean_service_;
    std::vector<std::vector<double>> joint_;        // [d][s], d in 0..u, s in 0..v (s=0 unused)
    std::vector<double> delay_marginal_;            // d in 0..u
    std::vector<double> duration_marginal_;         // s in 0..v
    std::vector<std::vector<double>> cond_prefix_;  // [s][d]: sum_{i<=d} conditional_delay(i, s)
};

// Merges per-class arrival processes into one marked Poisson stream.
// Throws std::invalid_argument if no class has positive arrival rate.
MergedDistribution merge_classes(std::span<const ClassSpec> classes);

// One band of the piecewise pre-arrival intensity profile seen by an arrival
// at time 0: the interval (lo, hi] (lo = -infinity for the history band),
// the per-duration rates, and their total.
struct ProfileBand {
    double lo;
    double hi;
    double total_rate;
    std::vector<double> per_duration_rate; // indexed by duration s, entry 0 unused
};

// Piecewise-constant booking profile: band j covers (j-1, j] for j >= 1 plus
// one band for all r <= 0. Rates are non-increasing in j for each duration.
std::vector<ProfileBand> piecewise_prearrival_profile(const MergedDistribution& dist);

} // namespace lossnet
