#include "lossnet/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lossnet {

int ClassSpec::max_delay() const {
    int u = 0;
    for (const auto& e : pmf) u = std::max(u, e.delay);
    return u;
}

int ClassSpec::max_duration() const {
    int v = 1;
    for (const auto& e : pmf) v = std::max(v, e.duration);
    return v;
}

double ClassSpec::mean_service() const {
    double mu = 0.0;
    for (const auto& e : pmf) mu += e.prob * e.duration;
    return mu;
}

double ClassSpec::prob(int delay, int duration) const {
    double p = 0.0;
    for (const auto& e : pmf)
        if (e.delay == delay && e.duration == duration) p += e.prob;
    return p;
}

void ClassSpec::validate() const {
    if (arrival_rate < 0.0)
        throw std::invalid_argument("class " + std::to_string(class_id) + ": negative arrival rate");
    if (reward_rate < 0.0)
        throw std::invalid_argument("class " + std::to_string(class_id) + ": negative reward rate");
    if (pmf.empty())
        throw std::invalid_argument("class " + std::to_string(class_id) + ": empty pmf");
    double sum = 0.0;
    for (const auto& e : pmf) {
        if (e.prob < 0.0 || e.prob > 1.0)
            throw std::invalid_argument("class " + std::to_string(class_id) + ": pmf entry outside [0,1]");
        if (e.delay < 0)
            throw std::invalid_argument("class " + std::to_string(class_id) + ": negative delay in pmf");
        if (e.duration < 1)
            throw std::invalid_argument("class " + std::to_string(class_id) + ": duration below 1 in pmf");
        sum += e.prob;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("class " + std::to_string(class_id) + ": pmf sums to " +
                                    std::to_string(sum) + ", expected 1");
}

void BookingLedger::reserve(double start, double end) {
    if (!(start < end))
        throw std::invalid_argument("reserve: empty or inverted interval");
    if (start < floor_)
        throw std::out_of_range("reserve: interval starts before horizon floor");
    deltas_[start] += 1;
    deltas_[end] -= 1;
    if (deltas_[start] == 0) deltas_.erase(start);
    if (auto it = deltas_.find(end); it != deltas_.end() && it->second == 0) deltas_.erase(it);
}

long long BookingLedger::occupancy_at(double t) const {
    if (t < floor_)
        throw std::out_of_range("occupancy_at: time precedes garbage-collected history");
    long long occ = base_;
    for (auto it = deltas_.begin(); it != deltas_.end() && it->first <= t; ++it)
        occ += it->second;
    return occ;
}

long long BookingLedger::max_occupancy(double start, double end) const {
    if (!(start < end))
        throw std::invalid_argument("max_occupancy: empty or inverted interval");
    if (start < floor_)
        throw std::out_of_range("max_occupancy: interval precedes garbage-collected history");
    // Occupancy at the left endpoint, then a running max over the interior
    // breakpoints of the half-open interval.
    long long occ = base_;
    auto it = deltas_.begin();
    for (; it != deltas_.end() && it->first <= start; ++it)
        occ += it->second;
    long long best = occ;
    for (; it != deltas_.end() && it->first < end; ++it) {
        occ += it->second;
        best = std::max(best, occ);
    }
    return best;
}

void BookingLedger::release_before(double t) {
    if (t <= floor_) return;
    auto it = deltas_.begin();
    while (it != deltas_.end() && it->first < t) {
        base_ += it->second;
        it = deltas_.erase(it);
    }
    floor_ = t;
}

double SystemConfig::total_arrival_rate() const {
    double lambda = 0.0;
    for (const auto& c : classes) lambda += c.arrival_rate;
    return lambda;
}

double SystemConfig::traffic_intensity() const {
    double rho = 0.0;
    for (const auto& c : classes) rho += c.offered_load();
    return rho;
}

int SystemConfig::max_delay() const {
    int u = 0;
    for (const auto& c : classes) u = std::max(u, c.max_delay());
    return u;
}

int SystemConfig::max_duration() const {
    int v = 1;
    for (const auto& c : classes) v = std::max(v, c.max_duration());
    return v;
}

double SystemConfig::effective_warmup() const {
    return std::max(warmup_fraction * horizon,
                    5.0 * static_cast<double>(max_delay() + max_duration()));
}

std::vector<std::string> SystemConfig::validate() const {
    if (capacity < 0)
        throw std::invalid_argument("capacity must be >= 0");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be positive");
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw std::invalid_argument("warmup_fraction must lie in [0,1)");
    if (classes.empty())
        throw std::invalid_argument("at least one class required");
    for (const auto& c : classes) c.validate();
    if (!std::isfinite(traffic_intensity()))
        throw std::invalid_argument("traffic intensity is not finite");
    if (effective_warmup() >= horizon)
        throw std::invalid_argument("horizon too short: warmup would consume it entirely");

    std::vector<std::string> warnings;
    if (capacity > 0) {
        double min_load = std::numeric_limits<double>::infinity();
        for (const auto& c : classes)
            if (c.arrival_rate > 0.0) min_load = std::min(min_load, c.offered_load());
        if (std::isfinite(min_load) && epsilon >= min_load / capacity)
            warnings.push_back("epsilon=" + std::to_string(epsilon) +
                               " is not below min_k(rate_k*mean_service_k)/capacity=" +
                               std::to_string(min_load / capacity) +
                               "; the admission LP may zero out an entire class");
    }
    return warnings;
}

} // namespace lossnet
