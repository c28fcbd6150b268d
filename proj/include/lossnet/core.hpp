#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lossnet {

// Identifies a request type: reservation delay d, service duration s, class k.
struct TypeKey {
    int delay = 0;
    int duration = 0;
    int class_id = 0;
    auto operator<=>(const TypeKey&) const = default;
};

struct PmfEntry {
    int delay;     // integer delay, >= 0
    int duration;  // integer duration, >= 1
    double prob;
};

// One customer class: Poisson arrivals at arrival_rate, reward collected at
// reward_rate per unit of service time, and a joint pmf over (delay, duration).
struct ClassSpec {
    int class_id = 0;
    double arrival_rate = 0.0;
    double reward_rate = 0.0;
    std::vector<PmfEntry> pmf;

    int max_delay() const;
    int max_duration() const;
    double mean_service() const;
    double prob(int delay, int duration) const;
    double offered_load() const { return arrival_rate * mean_service(); }

    // Throws std::invalid_argument if the pmf does not sum to 1 (1e-12),
    // has entries outside [0,1], or has out-of-range support.
    void validate() const;
};

// One arriving customer. The requested service interval is
// [arrival_time + delay, arrival_time + delay + duration), half-open:
// back-to-back reservations do not conflict.
struct Request {
    int class_id = 0;
    double arrival_time = 0.0;
    int delay = 0;
    int duration = 1;
    std::int64_t sequence_number = 0;

    double start() const { return arrival_time + delay; }
    double end() const { return arrival_time + delay + duration; }
    TypeKey type() const { return {delay, duration, class_id}; }
};

// Step function of reserved occupancy over continuous time, stored as an
// ordered breakpoint map of signed deltas. Supports max-over-interval queries
// and garbage collection of expired history: release_before() folds old
// breakpoints into a baseline so unbounded-horizon runs stay in bounded
// memory. All deltas at a timestamp apply before occupancy is evaluated there.
class BookingLedger {
public:
    // Occupancy +1 on [start, end); requires horizon_floor <= start < end.
    void reserve(double start, double end);

    // Max occupancy over [start, end). Pure query. Throws std::out_of_range
    // if start < horizon_floor (that history has been garbage-collected).
    long long max_occupancy(double start, double end) const;

    // Occupancy at a single time point (>= horizon_floor).
    long long occupancy_at(double t) const;

    // Drops breakpoints strictly before t, folding their net occupancy into
    // the baseline. Queries at times >= t are unaffected. Calls with
    // t <= horizon_floor are no-ops, so the operation is idempotent.
    void release_before(double t);

    double horizon_floor() const { return floor_; }
    std::size_t breakpoint_count() const { return deltas_.size(); }
    long long baseline() const { return base_; }

private:
    std::map<double, long long> deltas_;
    long long base_ = 0;
    double floor_ = -std::numeric_limits<double>::infinity();
};

// System-wide model parameters.
struct SystemConfig {
    int capacity = 1;
    double epsilon = 0.05;        // admission LP slack, in (0,1)
    double horizon = 1000.0;      // simulated time length
    double warmup_fraction = 0.2; // fraction of horizon discarded before counting
    std::vector<ClassSpec> classes;

    double total_arrival_rate() const;
    double traffic_intensity() const; // sum over classes of rate * mean service
    int max_delay() const;
    int max_duration() const;

    // Warmup is at least warmup_fraction * horizon and at least
    // 5 * (max_delay + max_duration): the process forgets its start after a
    // few reservation windows.
    double effective_warmup() const;

    // Throws on structural errors; returns human-readable warnings for
    // soft violations (epsilon not below min_k load_k / C).
    std::vector<std::string> validate() const;
};

} // namespace lossnet
