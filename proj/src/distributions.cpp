#include "lossnet/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace lossnet {

MergedDistribution::MergedDistribution(double total_rate, std::vector<std::vector<double>> joint)
    : total_rate_(total_rate), joint_(std::move(joint)) {
    if (!(total_rate_ > 0.0))
        throw std::invalid_argument("merged distribution requires positive total rate");
    if (joint_.empty() || joint_[0].size() < 2)
        throw std::invalid_argument("joint pmf must cover delays >= 0 and durations >= 1");
    max_delay_ = static_cast<int>(joint_.size()) - 1;
    max_duration_ = static_cast<int>(joint_[0].size()) - 1;

    delay_marginal_.assign(max_delay_ + 1, 0.0);
    duration_marginal_.assign(max_duration_ + 1, 0.0);
    double sum = 0.0;
    mean_service_ = 0.0;
    for (int d = 0; d <= max_delay_; ++d) {
        if (static_cast<int>(joint_[d].size()) != max_duration_ + 1)
            throw std::invalid_argument("ragged joint pmf");
        for (int s = 1; s <= max_duration_; ++s) {
            double p = joint_[d][s];
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("joint pmf entry outside [0,1]");
            delay_marginal_[d] += p;
            duration_marginal_[s] += p;
            mean_service_ += p * s;
            sum += p;
        }
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("joint pmf sums to " + std::to_string(sum) + ", expected 1");

    cond_prefix_.assign(max_duration_ + 1, {});
    for (int s = 1; s <= max_duration_; ++s) {
        if (duration_marginal_[s] <= 0.0) continue;
        cond_prefix_[s].resize(max_delay_ + 1);
        double acc = 0.0;
        for (int d = 0; d <= max_delay_; ++d) {
            acc += joint_[d][s] / duration_marginal_[s];
            cond_prefix_[s][d] = acc;
        }
    }
}

double MergedDistribution::joint(int d, int s) const {
    if (d < 0 || d > max_delay_ || s < 1 || s > max_duration_) return 0.0;
    return joint_[d][s];
}

double MergedDistribution::delay_marginal(int d) const {
    if (d < 0 || d > max_delay_) return 0.0;
    return delay_marginal_[d];
}

double MergedDistribution::duration_marginal(int s) const {
    if (s < 1 || s > max_duration_) return 0.0;
    return duration_marginal_[s];
}

double MergedDistribution::conditional_delay(int d, int s) const {
    if (s < 1 || s > max_duration_ || duration_marginal_[s] <= 0.0)
        throw std::domain_error("conditional delay pmf undefined for duration " + std::to_string(s) +
                                " (zero marginal mass)");
    if (d < 0 || d > max_delay_) return 0.0;
    return joint_[d][s] / duration_marginal_[s];
}

double MergedDistribution::pre_arrival_rate(int d, int s) const {
    if (s < 1 || s > max_duration_) return 0.0;
    if (d < 0) throw std::invalid_argument("pre_arrival_rate: negative slot index");
    if (duration_marginal_[s] <= 0.0) return 0.0;
    const double base = duration_marginal_[s] * total_rate_;
    if (d - s < 0) return base; // empty sum: no delay mass consumed yet
    if (d - s >= max_delay_) return 0.0;
    double remaining = 1.0 - cond_prefix_[s][d - s];
    return base * std::max(remaining, 0.0);
}

MergedDistribution MergedDistribution::scaled(double new_total_rate) const {
    return MergedDistribution(new_total_rate, joint_);
}

MergedDistribution merge_classes(std::span<const ClassSpec> classes) {
    if (classes.empty())
        throw std::invalid_argument("merge_classes: no classes");
    double lambda = 0.0;
    int u = 0, v = 1;
    for (const auto& c : classes) {
        c.validate();
        lambda += c.arrival_rate;
        if (c.arrival_rate > 0.0) {
            u = std::max(u, c.max_delay());
            v = std::max(v, c.max_duration());
        }
    }
    if (lambda <= 0.0)
        throw std::invalid_argument("merge_classes: all arrival rates are zero");

    std::vector<std::vector<double>> joint(u + 1, std::vector<double>(v + 1, 0.0));
    for (const auto& c : classes) {
        if (c.arrival_rate <= 0.0) continue;
        const double weight = c.arrival_rate / lambda;
        for (const auto& e : c.pmf) joint[e.delay][e.duration] += weight * e.prob;
    }
    return MergedDistribution(lambda, std::move(joint));
}

std::vector<ProfileBand> piecewise_prearrival_profile(const MergedDistribution& dist) {
    const int u = dist.max_delay();
    const int v = dist.max_duration();
    std::vector<ProfileBand> bands;
    bands.reserve(u + 2);
    // Pre-arrivals over the slot (j-1, j] have per-duration rate
    // pre_arrival_rate(j-1+s, s); the history band (r <= 0) carries the full
    // aggregate rate.
    for (int j = 0; j <= u + 1; ++j) {
        ProfileBand band;
        band.lo = (j == 0) ? -std::numeric_limits<double>::infinity() : static_cast<double>(j - 1);
        band.hi = static_cast<double>(j);
        band.per_duration_rate.assign(v + 1, 0.0);
        band.total_rate = 0.0;
        for (int s = 1; s <= v; ++s) {
            double rate = (j == 0) ? dist.duration_marginal(s) * dist.total_rate()
                                   : dist.pre_arrival_rate(j - 1 + s, s);
            band.per_duration_rate[s] = rate;
            band.total_rate += rate;
        }
        bands.push_back(std::move(band));
    }
    return bands;
}

} // namespace lossnet
