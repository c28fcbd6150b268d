#include "lossnet/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "lossnet/rng.hpp"

namespace lossnet {

namespace {

int mc_threads() {
    if (const char* env = std::getenv("LOSSNET_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs n_samples of a 0/1 trial split into fixed-size chunks, each chunk on
// its own forked RNG stream. The tally is a sum of integers, so the result
// is identical for any thread count. Each worker constructs its own trial
// from the factory (trials may hold mutable scratch buffers).
template <typename TrialFactory>
long long mc_tally(long long n_samples, std::uint64_t seed, const TrialFactory& make_trial) {
    constexpr long long kChunk = 16384;
    const long long n_chunks = (n_samples + kChunk - 1) / kChunk;
    const int n_threads = static_cast<int>(std::min<long long>(mc_threads(), n_chunks));
    std::atomic<long long> next{0};
    std::atomic<long long> hits{0};
    auto worker = [&] {
        Rng base(seed);
        auto trial = make_trial();
        for (;;) {
            const long long c = next.fetch_add(1);
            if (c >= n_chunks) break;
            Rng rng = base.fork(static_cast<std::uint64_t>(c));
            const long long lo = c * kChunk;
            const long long hi = std::min(n_samples, lo + kChunk);
            long long local = 0;
            for (long long i = lo; i < hi; ++i) local += trial(rng) ? 1 : 0;
            hits.fetch_add(local);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return hits.load();
}

McEstimate binomial_estimate(long long hits, long long n) {
    McEstimate e;
    e.n_samples = n;
    e.estimate = n > 0 ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    e.std_error = n > 0 ? std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n)) : 0.0;
    return e;
}

double log_poisson_pmf(double mean, long long k) {
    return -mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0);
}

} // namespace

void OpposingProcessSpec::validate() const {
    if (backward_rate < 0.0 || forward_rate < 0.0)
        throw std::invalid_argument("opposing process rates must be >= 0");
    if (threshold < 1)
        throw std::invalid_argument("opposing process threshold must be >= 1");
}

double poisson_tail(double mean, long long c) {
    if (c <= 0) return 1.0;
    if (mean <= 0.0) return 0.0;
    if (static_cast<double>(c) <= mean) {
        // Lower tail is the shorter sum.
        double below = 0.0;
        for (long long k = 0; k < c; ++k) below += std::exp(log_poisson_pmf(mean, k));
        return std::max(0.0, 1.0 - below);
    }
    double tail = 0.0;
    double term = std::exp(log_poisson_pmf(mean, c));
    long long k = c;
    while (term > 0.0 && (term > tail * 1e-18 || k < c + 8)) {
        tail += term;
        ++k;
        term *= mean / static_cast<double>(k);
    }
    return tail;
}

double erlang_b(int capacity, double offered_load) {
    if (capacity < 0) throw std::invalid_argument("erlang_b: negative capacity");
    if (offered_load < 0.0) throw std::invalid_argument("erlang_b: negative load");
    double b = 1.0;
    for (int c = 1; c <= capacity; ++c) b = offered_load * b / (c + offered_load * b);
    return b;
}

double rw_hitting_prob(double up_prob, int level) {
    if (!(up_prob >= 0.0 && up_prob < 0.5))
        throw std::domain_error("rw_hitting_prob requires 0 <= up_prob < 1/2 (strict downward drift)");
    if (level < 0) throw std::invalid_argument("rw_hitting_prob: negative level");
    if (level == 0) return 1.0;
    return std::pow(up_prob / (1.0 - up_prob), level);
}

double opposing_max_exact(const OpposingProcessSpec& spec, double tail_eps) {
    spec.validate();
    const double total = spec.backward_rate + spec.forward_rate;
    const int C = spec.threshold;
    if (total <= 0.0) return 0.0;

    // Number of points to condition on: smallest n with P(N > n) < tail_eps.
    std::vector<double> pois;
    pois.push_back(std::exp(log_poisson_pmf(total, 0)));
    double cum = pois[0];
    while (cum < 1.0 - tail_eps) {
        const long long k = static_cast<long long>(pois.size());
        if (k > 200000) throw std::runtime_error("opposing_max_exact: conditioning range too large");
        pois.push_back(pois.back() * total / static_cast<double>(k));
        cum += pois.back();
    }
    const int n_max = static_cast<int>(pois.size()) - 1;
    if (n_max > 2500)
        throw std::runtime_error("opposing_max_exact: total rate too large for the exact "
                                 "dynamic program; use opposing_max_mc instead");

    const double p = spec.forward_rate / total; // up-step probability
    const double q = 1.0 - p;

    // Running-max cap: levels above it are reached with probability
    // <= (p/q)^cap < 1e-36 unless the cap is the threshold itself, in which
    // case absorption is exact (max >= C already implies blocking).
    int m_cap;
    if (p <= 0.0) {
        m_cap = 0;
    } else if (p >= q) {
        m_cap = C;
    } else {
        double by_drift = std::ceil(-36.0 * std::log(10.0) / std::log(p / q));
        m_cap = static_cast<int>(std::min(static_cast<double>(C), by_drift));
    }
    m_cap = std::min(m_cap, n_max);

    // State (m, S): running max m, current position S in [-n, m].
    // Index layout: row m, column S + n_max.
    const int width = n_max + m_cap + 2;
    std::vector<double> cur(static_cast<std::size_t>(m_cap + 1) * width, 0.0);
    std::vector<double> nxt(cur.size());
    auto at = [&](std::vector<double>& a, int m, int s) -> double& {
        return a[static_cast<std::size_t>(m) * width + (s + n_max)];
    };
    at(cur, 0, 0) = 1.0;
    double absorbed = 0.0; // mass with running max above m_cap: always blocked

    double answer = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        // P(blocked | N = n): down-steps G = (n - S)/2, blocked iff m + G >= C.
        double blocked = absorbed;
        for (int m = 0; m <= std::min(n, m_cap); ++m) {
            const int s_hi = std::min(m, n - 2 * (C - m));
            for (int s = -n; s <= s_hi; ++s) blocked += at(cur, m, s);
        }
        answer += pois[n] * blocked;
        if (n == n_max) break;

        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int m = 0; m <= std::min(n, m_cap); ++m) {
            for (int s = -n; s <= m; ++s) {
                const double mass = at(cur, m, s);
                if (mass == 0.0) continue;
                at(nxt, m, s - 1) += mass * q;
                if (s < m) {
                    at(nxt, m, s + 1) += mass * p;
                } else if (m < m_cap) {
                    at(nxt, m + 1, s + 1) += mass * p;
                } else {
                    absorbed += mass * p;
                }
            }
        }
        cur.swap(nxt);
    }
    return std::min(answer, 1.0);
}

McEstimate opposing_max_mc(const OpposingProcessSpec& spec, long long n_samples,
                           std::uint64_t seed) {
    spec.validate();
    if (n_samples < 1) throw std::invalid_argument("opposing_max_mc: n_samples must be >= 1");
    const int C = spec.threshold;

    struct Event {
        double pos;
        int delta;
    };
    const long long hits = mc_tally(n_samples, seed, [&] {
        return [&spec, C, events = std::vector<Event>()](Rng& rng) mutable {
            const long long nb = rng.poisson(spec.backward_rate);
            const long long nf = rng.poisson(spec.forward_rate);
            if (nb >= C) return true; // value at r = 0 is the full backward count
            events.clear();
            for (long long i = 0; i < nb; ++i) events.push_back({rng.uniform(), -1});
            for (long long i = 0; i < nf; ++i) events.push_back({rng.uniform(), +1});
            std::sort(events.begin(), events.end(),
                      [](const Event& a, const Event& b) { return a.pos < b.pos; });
            long long value = nb;
            for (const Event& e : events) {
                value += e.delta;
                if (e.delta > 0 && value >= C) return true;
            }
            return false;
        };
    });
    return binomial_estimate(hits, n_samples);
}

SlotAssembly assemble_slot(const MergedDistribution& dist, int d) {
    if (d < 0) throw std::invalid_argument("assemble_slot: negative slot index");
    SlotAssembly a;
    a.slot = d;
    const int v = dist.max_duration();
    for (int s = 1; s <= v; ++s) {
        // Customers starting in earlier slots whose service covers all of
        // (d, d+1]: start slots indexed d+1 .. d+s-1.
        for (int i = d + 1; i <= d + s - 1; ++i)
            if (double r = dist.pre_arrival_rate(i, s); r > 0.0) a.in_service.push_back({i, s, r});
        if (double r = dist.pre_arrival_rate(d, s); r > 0.0) a.departures.push_back({d, s, r});
        if (double r = dist.pre_arrival_rate(d + s, s); r > 0.0) a.pre_arrivals.push_back({d + s, s, r});
    }
    return a;
}

namespace {

// Shared-process Monte Carlo over a window of consecutive slots. Each
// underlying pre-arrival process is drawn once per sample (count plus point
// offsets within its start slot) and reused in every slot that references
// it, preserving the correlation between neighbouring slots.
class WindowSampler {
public:
    WindowSampler(const MergedDistribution& dist, int first_slot, int n_slots) {
        slots_.reserve(n_slots);
        for (int j = first_slot; j < first_slot + n_slots; ++j)
            slots_.push_back(assemble_slot(dist, j));
        for (const auto& slot : slots_) {
            for (const auto& t : slot.in_service) intern(t, false);
            for (const auto& t : slot.departures) intern(t, true);
            for (const auto& t : slot.pre_arrivals) intern(t, true);
        }
    }

    // Max over the window's slots of the peak occupancy; one MC draw.
    long long sample_peak(Rng& rng) {
        counts_.resize(procs_.size());
        for (std::size_t i = 0; i < procs_.size(); ++i) {
            counts_[i] = rng.poisson(procs_[i].rate);
            if (procs_[i].need_positions) {
                auto& pos = positions_[i];
                pos.clear();
                for (long long n = 0; n < counts_[i]; ++n) pos.push_back(rng.uniform());
            }
        }
        long long peak = std::numeric_limits<long long>::min();
        for (const auto& slot : slots_) {
            long long base = 0;
            for (const auto& t : slot.in_service) base += counts_[index_.at(key(t))];
            events_.clear();
            long long backward_total = 0;
            for (const auto& t : slot.departures) {
                const auto& pos = positions_[index_.at(key(t))];
                backward_total += static_cast<long long>(pos.size());
                for (double x : pos) events_.push_back({x, -1});
            }
            for (const auto& t : slot.pre_arrivals)
                for (double x : positions_[index_.at(key(t))]) events_.push_back({x, +1});
            std::sort(events_.begin(), events_.end(),
                      [](const Event& a, const Event& b) { return a.pos < b.pos; });
            long long value = base + backward_total;
            long long best = value;
            for (const Event& e : events_) {
                value += e.delta;
                if (e.delta > 0) best = std::max(best, value);
            }
            peak = std::max(peak, best);
        }
        return peak;
    }

private:
    struct Event {
        double pos;
        int delta;
    };
    struct Process {
        double rate;
        bool need_positions;
    };

    static std::pair<int, int> key(const SlotTerm& t) { return {t.slot, t.duration}; }

    void intern(const SlotTerm& t, bool need_positions) {
        auto [it, inserted] = index_.try_emplace(key(t), procs_.size());
        if (inserted) {
            procs_.push_back({t.rate, need_positions});
            positions_.emplace_back();
        } else if (need_positions) {
            procs_[it->second].need_positions = true;
        }
    }

    std::vector<SlotAssembly> slots_;
    std::map<std::pair<int, int>, std::size_t> index_;
    std::vector<Process> procs_;
    std::vector<long long> counts_;
    std::vector<std::vector<double>> positions_;
    std::vector<Event> events_;
};

McEstimate window_blocking(const MergedDistribution& dist, int first_slot, int n_slots,
                           int threshold, long long n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (threshold <= 0) {
        McEstimate e;
        e.estimate = 1.0;
        e.std_error = 0.0;
        e.n_samples = n_samples;
        return e;
    }
    const long long hits = mc_tally(n_samples, seed, [&] {
        return [sampler = WindowSampler(dist, first_slot, n_slots), threshold](Rng& rng) mutable {
            return sampler.sample_peak(rng) >= threshold;
        };
    });
    return binomial_estimate(hits, n_samples);
}

} // namespace

McEstimate sample_slot_occupancy(const MergedDistribution& dist, int d, int threshold,
                                 long long n_samples, std::uint64_t seed) {
    if (d < 0 || d > dist.max_delay())
        throw std::domain_error("sample_slot_occupancy: slot outside delay support");
    return window_blocking(dist, d, 1, threshold, n_samples, seed);
}

McEstimate conditional_virtual_blocking(const MergedDistribution& dist, int d, int s,
                                        int threshold, long long n_samples,
                                        std::uint64_t seed) {
    if (dist.joint(d, s) <= 0.0)
        throw std::domain_error("conditional_virtual_blocking: type (" + std::to_string(d) + "," +
                                std::to_string(s) + ") has no probability mass");
    return window_blocking(dist, d, s, threshold, n_samples, seed);
}

std::vector<SweepRow> asymptotic_sweep(Regime regime, double pad_epsilon,
                                       const MergedDistribution& shape,
                                       std::span<const double> lambda_grid,
                                       long long n_samples, std::uint64_t seed) {
    if (lambda_grid.empty()) throw std::invalid_argument("asymptotic_sweep: empty lambda grid");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i - 1]))
            throw std::invalid_argument("asymptotic_sweep: lambda grid must be increasing");
    if (regime == Regime::padded && !(pad_epsilon > 0.0))
        throw std::invalid_argument("asymptotic_sweep: padded regime needs pad_epsilon > 0");

    std::vector<SweepRow> rows;
    Rng seeder(seed);
    std::uint64_t cell_index = 0;
    for (double lambda : lambda_grid) {
        const MergedDistribution dist = shape.scaled(lambda);
        const double rho = dist.traffic_intensity();
        // Nudge before ceil so that representation error in (1+eps)*rho does
        // not bump the capacity by one.
        const int capacity = regime == Regime::critical
                                 ? static_cast<int>(std::llround(rho))
                                 : static_cast<int>(std::ceil((1.0 + pad_epsilon) * rho - 1e-9));
        for (int d = 0; d <= dist.max_delay(); ++d) {
            for (int s = 1; s <= dist.max_duration(); ++s) {
                if (dist.joint(d, s) <= 0.0) continue;
                const std::uint64_t cell_seed = seeder.fork(cell_index++).next_u64();
                const McEstimate est =
                    conditional_virtual_blocking(dist, d, s, capacity, n_samples, cell_seed);
                rows.push_back({lambda, capacity, d, s, est.estimate, est.std_error,
                                est.n_samples, cell_seed});
            }
        }
    }
    return rows;
}

} // namespace lossnet
