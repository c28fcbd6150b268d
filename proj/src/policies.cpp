#include "lossnet/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lossnet {

double PolicySolution::alpha_for_class(int class_id) const {
    auto it = class_alpha.find(class_id);
    return it == class_alpha.end() ? 0.0 : it->second;
}

PolicySolution solve_knapsack_lp(std::span<const ClassSpec> classes, int capacity,
                                 double epsilon) {
    if (classes.empty()) throw std::invalid_argument("solve_knapsack_lp: no classes");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("solve_knapsack_lp: epsilon must lie in (0,1)");
    for (const auto& c : classes) c.validate();

    PolicySolution sol;
    sol.budget = (1.0 - epsilon) * capacity;

    std::vector<const ClassSpec*> order;
    for (const auto& c : classes) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const ClassSpec* a, const ClassSpec* b) {
        if (a->reward_rate != b->reward_rate) return a->reward_rate > b->reward_rate;
        return a->class_id < b->class_id; // deterministic tie-break
    });

    double remaining = sol.budget;
    for (const ClassSpec* c : order) {
        sol.reward_order.push_back(c->class_id);
        const double load = c->offered_load();
        double a = 0.0;
        if (remaining > 0.0) {
            a = load <= remaining ? 1.0 : remaining / load;
            a = std::clamp(a, 0.0, 1.0);
            remaining -= a * load;
            if (a > 0.0) {
                sol.cutoff_class = c->class_id;
                sol.fractional_alpha = a;
            }
        }
        sol.class_alpha[c->class_id] = a;
        for (const auto& e : c->pmf) sol.alpha[{e.delay, e.duration, c->class_id}] = a;
        sol.lp_objective += c->reward_rate * a * load;
    }
    return sol;
}

Decision icsp_decide(const Request& request, const PolicySolution& solution,
                     const BookingLedger& ledger, int capacity, Rng& rng) {
    const double a = solution.alpha_for_class(request.class_id);
    if (a <= 0.0) return Decision::reject;
    if (a < 1.0 && !rng.bernoulli(a)) return Decision::reject;
    if (ledger.max_occupancy(request.start(), request.end()) >= capacity)
        return Decision::reject;
    return Decision::accept;
}

void DpInstance::validate() const {
    if (periods < 1) throw std::invalid_argument("dp: periods must be >= 1");
    if (capacity < 0) throw std::invalid_argument("dp: capacity must be >= 0");
    if (capacity > 255) throw std::invalid_argument("dp: capacity above 255 unsupported");
    double total_prob = 0.0;
    for (const auto& c : classes) {
        if (c.arrival_prob < 0.0 || c.arrival_prob > 1.0)
            throw std::invalid_argument("dp: class arrival probability outside [0,1]");
        if (c.reward_rate < 0.0) throw std::invalid_argument("dp: negative reward");
        total_prob += c.arrival_prob;
        if (c.windows.empty()) throw std::invalid_argument("dp: class without windows");
        double wsum = 0.0;
        for (const auto& w : c.windows) {
            if (w.offset < 0 || w.length < 1 || w.prob < 0.0)
                throw std::invalid_argument("dp: malformed window pmf entry");
            wsum += w.prob;
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw std::invalid_argument("dp: window pmf must sum to 1");
    }
    if (total_prob > 1.0 + 1e-12)
        throw std::invalid_argument("dp: per-period arrival probabilities exceed 1");
}

DpInstance discretize(const SystemConfig& config, double period_length, int periods) {
    if (!(period_length > 0.0)) throw std::invalid_argument("discretize: period_length must be > 0");
    DpInstance inst;
    inst.periods = periods;
    inst.capacity = config.capacity;
    const double lambda = config.total_arrival_rate();
    for (const auto& c : config.classes) {
        DpClass dc;
        dc.class_id = c.class_id;
        dc.arrival_prob = c.arrival_rate * period_length / (1.0 + lambda * period_length);
        dc.reward_rate = c.reward_rate * period_length;
        std::map<std::pair<int, int>, double> merged;
        for (const auto& e : c.pmf) {
            const int offset = static_cast<int>(std::lround(e.delay / period_length));
            const int length =
                std::max(1, static_cast<int>(std::lround(e.duration / period_length)));
            merged[{offset, length}] += e.prob;
        }
        for (const auto& [key, prob] : merged) dc.windows.push_back({key.first, key.second, prob});
        inst.classes.push_back(std::move(dc));
    }
    inst.validate();
    return inst;
}

DpOracle::DpOracle(DpInstance instance, std::size_t state_guard)
    : instance_(std::move(instance)), state_guard_(state_guard) {
    instance_.validate();
}

std::string DpOracle::key(int t, std::span<const int> cap) {
    std::string k;
    k.reserve(cap.size() + 2);
    k.push_back(static_cast<char>(t & 0xff));
    k.push_back(static_cast<char>((t >> 8) & 0xff));
    for (int c : cap) k.push_back(static_cast<char>(c));
    return k;
}

double DpOracle::value(int t, std::vector<int>& cap) const {
    if (t > instance_.periods) return 0.0;
    const std::span<const int> suffix(cap.data() + (t - 1),
                                      static_cast<std::size_t>(instance_.periods - t + 1));
    const std::string k = key(t, suffix);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    if (memo_.size() >= state_guard_)
        throw std::runtime_error("dp: reachable state count exceeded the guard of " +
                                 std::to_string(state_guard_) + " memoized states");

    const double continue_value = value(t + 1, cap);
    double ev = 0.0;
    double no_arrival = 1.0;
    for (const auto& c : instance_.classes) {
        no_arrival -= c.arrival_prob;
        for (const auto& w : c.windows) {
            const int first = t + w.offset;
            const int last = first + w.length - 1;
            double outcome = continue_value;
            if (last <= instance_.periods) {
                bool fits = true;
                for (int i = first; i <= last; ++i)
                    if (cap[i - 1] < 1) {
                        fits = false;
                        break;
                    }
                if (fits) {
                    for (int i = first; i <= last; ++i) --cap[i - 1];
                    const double accept_value = c.reward_rate * w.length + value(t + 1, cap);
                    for (int i = first; i <= last; ++i) ++cap[i - 1];
                    outcome = std::max(outcome, accept_value);
                }
            }
            ev += c.arrival_prob * w.prob * outcome;
        }
    }
    ev += std::max(no_arrival, 0.0) * continue_value;
    memo_.emplace(k, ev);
    return ev;
}

double DpOracle::expected_value(int t, std::span<const int> cap) const {
    if (t < 1 || t > instance_.periods + 1)
        throw std::invalid_argument("dp: period out of range");
    if (t == instance_.periods + 1) return 0.0;
    if (static_cast<int>(cap.size()) != instance_.periods - t + 1)
        throw std::invalid_argument("dp: capacity vector length mismatch");
    std::vector<int> full(instance_.periods, 0);
    std::copy(cap.begin(), cap.end(), full.begin() + (t - 1));
    return value(t, full);
}

double DpOracle::total_value() const {
    std::vector<int> cap(instance_.periods, instance_.capacity);
    return value(1, cap);
}

double DpOracle::critical_reward(int t, std::span<const int> cap, int offset,
                                 int length) const {
    const int first = t + offset;
    const int last = first + length - 1;
    if (t < 1 || t > instance_.periods || offset < 0 || length < 1)
        throw std::invalid_argument("dp: malformed window query");
    if (last > instance_.periods) return std::numeric_limits<double>::infinity();
    std::vector<int> full(instance_.periods, 0);
    std::copy(cap.begin(), cap.end(), full.begin() + (t - 1));
    for (int i = first; i <= last; ++i)
        if (full[i - 1] < 1) return std::numeric_limits<double>::infinity();
    const double keep = value(t + 1, full);
    for (int i = first; i <= last; ++i) --full[i - 1];
    const double grant = value(t + 1, full);
    return keep - grant;
}

Decision DpOracle::decide(int t, std::span<const int> cap, int offset, int length,
                          double reward_rate) const {
    const double r = critical_reward(t, cap, offset, length);
    return reward_rate * length > r ? Decision::accept : Decision::reject;
}

void DpOracle::for_each_state(
    const std::function<void(int, std::span<const int>, double)>& fn) const {
    std::vector<int> cap;
    for (const auto& [k, v] : memo_) {
        const int t = static_cast<unsigned char>(k[0]) |
                      (static_cast<unsigned char>(k[1]) << 8);
        cap.assign(k.size() - 2, 0);
        for (std::size_t i = 2; i < k.size(); ++i) cap[i - 2] = static_cast<unsigned char>(k[i]);
        fn(t, cap, v);
    }
}

} // namespace lossnet
