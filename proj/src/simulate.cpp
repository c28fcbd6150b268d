#include "lossnet/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace lossnet {

namespace {

double binomial_se(long long hits, long long n) {
    if (n <= 0) return 0.0;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Draws the class index, then (delay, duration) from that class's pmf.
class ArrivalMarkSampler {
public:
    explicit ArrivalMarkSampler(const std::vector<ClassSpec>& classes) : classes_(classes) {
        double acc = 0.0;
        for (const auto& c : classes) {
            acc += c.arrival_rate;
            class_cum_.push_back(acc);
        }
        total_ = acc;
        if (!(total_ > 0.0)) throw std::invalid_argument("no positive arrival rate");
    }

    double total_rate() const { return total_; }

    const ClassSpec& draw_class(Rng& rng) const {
        const double x = rng.uniform() * total_;
        const auto it = std::lower_bound(class_cum_.begin(), class_cum_.end(), x);
        const std::size_t idx = std::min<std::size_t>(it - class_cum_.begin(), classes_.size() - 1);
        return classes_[idx];
    }

    static PmfEntry draw_type(const ClassSpec& cls, Rng& rng) {
        double x = rng.uniform();
        for (const auto& e : cls.pmf) {
            x -= e.prob;
            if (x < 0.0) return e;
        }
        return cls.pmf.back();
    }

private:
    const std::vector<ClassSpec>& classes_;
    std::vector<double> class_cum_;
    double total_ = 0.0;
};

std::string format_accept_probs(const PolicySolution& sol) {
    std::vector<std::pair<int, double>> entries(sol.class_alpha.begin(), sol.class_alpha.end());
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out << ", ";
        std::ostringstream v;
        v.precision(4);
        v << entries[i].second;
        out << v.str();
    }
    out << ")";
    return out.str();
}

int sim_threads() {
    if (const char* env = std::getenv("LOSSNET_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Deterministic parallel map over replication indices.
template <typename Fn>
void for_each_replication(int replications, const Fn& fn) {
    const int n_threads = std::min(sim_threads(), replications);
    if (n_threads <= 1) {
        for (int r = 0; r < replications; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replications) break;
            fn(r);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe m;
    const std::size_t n = xs.size();
    if (n == 0) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return m;
}

BenchRow make_row(const std::string& name, const MeanSe& rev, double reference,
                  const std::string& probs) {
    BenchRow row;
    row.policy = name;
    row.revenue_rate = rev.mean;
    row.revenue_se = rev.se;
    row.reference = reference;
    row.err = reference != 0.0 ? std::abs(rev.mean - reference) / reference : 0.0;
    row.ratio = reference != 0.0 ? rev.mean / reference : 0.0;
    row.accept_probs = probs;
    return row;
}

} // namespace

std::optional<double> SimReport::blocking(const TypeKey& key) const {
    auto it = cells.find(key);
    if (it == cells.end() || it->second.offered == 0) return std::nullopt;
    return 1.0 - static_cast<double>(it->second.accepted) / static_cast<double>(it->second.offered);
}

std::optional<double> SimReport::blocking_se(const TypeKey& key) const {
    auto it = cells.find(key);
    if (it == cells.end() || it->second.offered == 0) return std::nullopt;
    return binomial_se(it->second.offered - it->second.accepted, it->second.offered);
}

std::optional<double> SimReport::virtual_blocking(int delay, int duration) const {
    auto it = virtual_cells.find({delay, duration});
    if (it == virtual_cells.end() || it->second.offered == 0) return std::nullopt;
    return static_cast<double>(it->second.blocked) / static_cast<double>(it->second.offered);
}

std::optional<double> SimReport::virtual_blocking_se(int delay, int duration) const {
    auto it = virtual_cells.find({delay, duration});
    if (it == virtual_cells.end() || it->second.offered == 0) return std::nullopt;
    return binomial_se(it->second.blocked, it->second.offered);
}

void SimReport::write_csv(std::ostream& out) const {
    out << "delay,duration,class_id,offered,accepted,blocking,std_error\n";
    for (const auto& [key, cell] : cells) {
        const double q =
            1.0 - static_cast<double>(cell.accepted) / static_cast<double>(cell.offered);
        out << key.delay << ',' << key.duration << ',' << key.class_id << ',' << cell.offered
            << ',' << cell.accepted << ',' << q << ','
            << binomial_se(cell.offered - cell.accepted, cell.offered) << '\n';
    }
}

std::string SimReport::to_json_text() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["horizon"] = horizon;
    j["warmup"] = warmup;
    j["arrivals"] = arrivals;
    j["accepted_total"] = accepted_total;
    j["revenue_total"] = revenue_total;
    j["revenue_rate"] = revenue_rate;
    j["cells"] = nlohmann::json::array();
    for (const auto& [key, cell] : cells) {
        j["cells"].push_back({{"delay", key.delay},
                              {"duration", key.duration},
                              {"class_id", key.class_id},
                              {"offered", cell.offered},
                              {"accepted", cell.accepted}});
    }
    j["virtual_cells"] = nlohmann::json::array();
    for (const auto& [key, cell] : virtual_cells) {
        j["virtual_cells"].push_back({{"delay", key.first},
                                      {"duration", key.second},
                                      {"offered", cell.offered},
                                      {"blocked", cell.blocked}});
    }
    return j.dump(2);
}

Decision AdmitAllPolicy::decide(const Request& request, const BookingLedger& ledger, int capacity,
                                Rng&) const {
    return ledger.max_occupancy(request.start(), request.end()) < capacity ? Decision::accept
                                                                           : Decision::reject;
}

Decision RejectAllPolicy::decide(const Request&, const BookingLedger&, int, Rng&) const {
    return Decision::reject;
}

Decision IcspPolicy::decide(const Request& request, const BookingLedger& ledger, int capacity,
                            Rng& rng) const {
    return icsp_decide(request, solution_, ledger, capacity, rng);
}

std::string IcspPolicy::accept_probs() const { return format_accept_probs(solution_); }

SimReport run(const SystemConfig& config, const Policy& policy, std::uint64_t seed,
              SimObserver* observer) {
    config.validate();
    SimReport report;
    report.seed = seed;
    report.horizon = config.horizon;
    report.warmup = config.effective_warmup();

    const ArrivalMarkSampler marks(config.classes);
    Rng root(seed);
    Rng arrival_rng = root.fork(1);
    Rng policy_rng = root.fork(2); // separate stream: arrival paths are policy-invariant

    BookingLedger ledger;
    std::int64_t sequence = 0;
    double t = arrival_rng.exponential(marks.total_rate());
    while (t < config.horizon) {
        ledger.release_before(t); // history before the arrival is never queried again
        const ClassSpec& cls = marks.draw_class(arrival_rng);
        const PmfEntry type = ArrivalMarkSampler::draw_type(cls, arrival_rng);
        const Request request{cls.class_id, t, type.delay, type.duration, sequence++};

        const bool counted = t >= report.warmup;
        const bool accepted =
            policy.decide(request, ledger, config.capacity, policy_rng) == Decision::accept;
        if (accepted) ledger.reserve(request.start(), request.end());
        if (counted) {
            ++report.arrivals;
            auto& cell = report.cells[request.type()];
            ++cell.offered;
            if (accepted) {
                ++cell.accepted;
                ++report.accepted_total;
                report.revenue_total += cls.reward_rate * type.duration;
            }
        }
        if (observer) observer->on_decision(request, accepted, ledger);
        t += arrival_rng.exponential(marks.total_rate());
    }
    report.revenue_rate = report.revenue_total / report.effective_horizon();
    return report;
}

CoupledReports run_coupled(const SystemConfig& config, std::uint64_t seed,
                           SimObserver* observer) {
    config.validate();
    CoupledReports out;
    for (SimReport* r : {&out.capacitated, &out.infinite}) {
        r->seed = seed;
        r->horizon = config.horizon;
        r->warmup = config.effective_warmup();
    }

    const ArrivalMarkSampler marks(config.classes);
    Rng arrival_rng = Rng(seed).fork(1);

    BookingLedger capacitated;
    BookingLedger twin;
    std::int64_t sequence = 0;
    double t = arrival_rng.exponential(marks.total_rate());
    while (t < config.horizon) {
        capacitated.release_before(t);
        twin.release_before(t);
        const ClassSpec& cls = marks.draw_class(arrival_rng);
        const PmfEntry type = ArrivalMarkSampler::draw_type(cls, arrival_rng);
        const Request request{cls.class_id, t, type.delay, type.duration, sequence++};

        const bool virtually_blocked =
            twin.max_occupancy(request.start(), request.end()) >= config.capacity;
        const bool cap_accepted =
            capacitated.max_occupancy(request.start(), request.end()) < config.capacity;
        twin.reserve(request.start(), request.end());
        if (cap_accepted) capacitated.reserve(request.start(), request.end());

        if (t >= out.capacitated.warmup) {
            for (SimReport* r : {&out.capacitated, &out.infinite}) ++r->arrivals;
            auto& cap_cell = out.capacitated.cells[request.type()];
            ++cap_cell.offered;
            auto& twin_cell = out.infinite.cells[request.type()];
            ++twin_cell.offered;
            ++twin_cell.accepted;
            ++out.infinite.accepted_total;
            out.infinite.revenue_total += cls.reward_rate * type.duration;
            if (cap_accepted) {
                ++cap_cell.accepted;
                ++out.capacitated.accepted_total;
                out.capacitated.revenue_total += cls.reward_rate * type.duration;
            }
            auto& vcell = out.infinite.virtual_cells[{type.delay, type.duration}];
            ++vcell.offered;
            if (virtually_blocked) ++vcell.blocked;
        }
        if (observer)
            observer->on_coupled(request, cap_accepted, virtually_blocked, capacitated, twin);
        t += arrival_rng.exponential(marks.total_rate());
    }
    for (SimReport* r : {&out.capacitated, &out.infinite})
        r->revenue_rate = r->revenue_total / r->effective_horizon();
    return out;
}

std::vector<BenchRow> benchmark(const SystemConfig& config,
                                const std::vector<const Policy*>& policies, int replications,
                                std::uint64_t seed) {
    if (policies.empty()) throw std::invalid_argument("benchmark: no policies");
    if (replications < 1) throw std::invalid_argument("benchmark: replications must be >= 1");
    config.validate();

    const PolicySolution lp = solve_knapsack_lp(config.classes, config.capacity, config.epsilon);
    const double reference = lp.lp_objective / (1.0 - config.epsilon);

    Rng root(seed);
    std::vector<std::uint64_t> rep_seeds(replications);
    for (int r = 0; r < replications; ++r) rep_seeds[r] = root.fork(r).next_u64();

    std::vector<std::vector<double>> revenue(policies.size(),
                                             std::vector<double>(replications, 0.0));
    for_each_replication(replications, [&](int r) {
        for (std::size_t p = 0; p < policies.size(); ++p)
            revenue[p][r] = run(config, *policies[p], rep_seeds[r]).revenue_rate;
    });

    std::vector<BenchRow> rows;
    for (std::size_t p = 0; p < policies.size(); ++p)
        rows.push_back(make_row(policies[p]->name(), mean_se(revenue[p]), reference,
                               policies[p]->accept_probs()));
    return rows;
}

namespace {

// One trajectory of the periodic model under a per-period decision rule.
template <typename Decide>
double simulate_discrete(const DpInstance& inst, Rng& rng, const Decide& decide) {
    std::vector<int> cap(inst.periods, inst.capacity);
    double revenue = 0.0;
    for (int t = 1; t <= inst.periods; ++t) {
        double x = rng.uniform();
        const DpClass* arrived = nullptr;
        for (const auto& c : inst.classes) {
            x -= c.arrival_prob;
            if (x < 0.0) {
                arrived = &c;
                break;
            }
        }
        if (!arrived) continue;
        double y = rng.uniform();
        const WindowPmfEntry* window = &arrived->windows.back();
        for (const auto& w : arrived->windows) {
            y -= w.prob;
            if (y < 0.0) {
                window = &w;
                break;
            }
        }
        const int first = t + window->offset;
        const int last = first + window->length - 1;
        bool fits = last <= inst.periods;
        for (int i = first; fits && i <= last; ++i) fits = cap[i - 1] >= 1;
        if (!fits) continue;
        if (decide(t, cap, *arrived, *window)) {
            for (int i = first; i <= last; ++i) --cap[i - 1];
            revenue += arrived->reward_rate * window->length;
        }
    }
    return revenue;
}

} // namespace

std::vector<BenchRow> benchmark_discrete(const DpInstance& instance, double epsilon,
                                         int replications, std::uint64_t seed) {
    if (replications < 1) throw std::invalid_argument("benchmark: replications must be >= 1");
    instance.validate();
    const DpOracle oracle(instance);
    const double dp_value = oracle.total_value();
    const double reference = dp_value / instance.periods;

    // Class-selection solution over the per-period request rates.
    std::vector<ClassSpec> pseudo;
    for (const auto& c : instance.classes) {
        ClassSpec cs;
        cs.class_id = c.class_id;
        cs.arrival_rate = c.arrival_prob;
        cs.reward_rate = c.reward_rate;
        for (const auto& w : c.windows) cs.pmf.push_back({w.offset, w.length, w.prob});
        pseudo.push_back(std::move(cs));
    }
    const PolicySolution lp = solve_knapsack_lp(pseudo, instance.capacity, epsilon);

    Rng root(seed);
    std::vector<double> dp_rev(replications), icsp_rev(replications), admit_rev(replications);
    for_each_replication(replications, [&](int r) {
        const std::uint64_t rep_seed = root.fork(r).next_u64();
        // Common random numbers: every policy replays the same arrival path.
        Rng dp_rng = Rng(rep_seed).fork(1);
        dp_rev[r] = simulate_discrete(
                        instance, dp_rng,
                        [&](int t, const std::vector<int>& cap, const DpClass& c,
                            const WindowPmfEntry& w) {
                            const std::span<const int> suffix(cap.data() + (t - 1),
                                                              cap.size() - (t - 1));
                            return oracle.decide(t, suffix, w.offset, w.length, c.reward_rate) ==
                                   Decision::accept;
                        }) /
                    instance.periods;
        Rng icsp_rng = Rng(rep_seed).fork(1);
        Rng icsp_coin = Rng(rep_seed).fork(3);
        icsp_rev[r] = simulate_discrete(
                          instance, icsp_rng,
                          [&](int, const std::vector<int>&, const DpClass& c,
                              const WindowPmfEntry&) {
                              const double a = lp.alpha_for_class(c.class_id);
                              if (a <= 0.0) return false;
                              return a >= 1.0 || icsp_coin.bernoulli(a);
                          }) /
                      instance.periods;
        Rng admit_rng = Rng(rep_seed).fork(1);
        admit_rev[r] = simulate_discrete(instance, admit_rng,
                                         [](int, const std::vector<int>&, const DpClass&,
                                            const WindowPmfEntry&) { return true; }) /
                       instance.periods;
    });

    std::vector<BenchRow> rows;
    rows.push_back(make_row("dp", mean_se(dp_rev), reference, ""));
    rows.push_back(make_row("icsp", mean_se(icsp_rev), reference, format_accept_probs(lp)));
    rows.push_back(make_row("admit_all", mean_se(admit_rev), reference, ""));
    return rows;
}

} // namespace lossnet
