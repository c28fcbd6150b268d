#include "lossnet/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lossnet {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Maximizes f on [lo, hi] by golden-section; f must be unimodal there.
template <typename F>
double golden_max(const F& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Best price for one class given the shadow price theta: maximize
// (p - theta) * rate(p) on [theta, choke]. Closed form for the linear
// family, golden-section otherwise. A coarse scan guards against
// non-unimodal inputs slipping past construction-time validation.
double best_price(const DemandCurve& curve, double theta, double tol) {
    const double hi = curve.choke_price;
    if (theta >= hi) return hi;
    const double lo = std::max(0.0, theta);
    if (curve.family == DemandCurve::Family::linear) {
        return std::clamp(0.5 * (theta + hi), lo, hi);
    }
    auto objective = [&](double p) { return (p - theta) * curve.rate(p); };
    int direction_changes = 0;
    double prev_value = objective(lo);
    double prev_delta = 0.0;
    for (int i = 1; i <= 16; ++i) {
        const double p = lo + (hi - lo) * i / 16.0;
        const double val = objective(p);
        const double delta = val - prev_value;
        if (i > 1 && delta > 1e-12 && prev_delta < -1e-12) ++direction_changes;
        if (std::abs(delta) > 1e-15) prev_delta = delta;
        prev_value = val;
    }
    if (direction_changes > 0)
        throw std::runtime_error("pricing: inner maximization is not concave "
                                 "(bracketing failed); unsupported demand curve");
    return golden_max(objective, lo, hi, tol);
}

} // namespace

double DemandCurve::rate(double price) const {
    if (price >= choke_price) return 0.0;
    const double p = std::max(price, 0.0);
    switch (family) {
        case Family::linear:
            return base_rate * (1.0 - p / choke_price);
        case Family::exponential_cutoff: {
            const double scale = 1.0 - std::exp(-shape * choke_price);
            return base_rate * (std::exp(-shape * p) - std::exp(-shape * choke_price)) / scale;
        }
    }
    return 0.0;
}

double DemandCurve::revenue_slope_bound() const {
    switch (family) {
        case Family::linear:
            return base_rate;
        case Family::exponential_cutoff: {
            const double scale = 1.0 - std::exp(-shape * choke_price);
            return base_rate * (1.0 + shape * choke_price / scale);
        }
    }
    return 0.0;
}

void DemandCurve::validate() const {
    if (base_rate < 0.0) throw std::invalid_argument("demand curve: negative base rate");
    if (!(choke_price > 0.0)) throw std::invalid_argument("demand curve: choke price must be > 0");
    if (family == Family::exponential_cutoff) {
        if (!(shape > 0.0))
            throw std::invalid_argument("demand curve: exponential family needs shape > 0");
        // price * rate(price) is concave only up to shape * choke <= 2; past
        // that the dualized per-class problem stops being concave.
        if (shape * choke_price > 2.0 + 1e-12)
            throw std::invalid_argument(
                "demand curve: shape * choke_price must be <= 2 for a concave revenue term");
    }
}

double PricedClass::mean_service() const {
    double mu = 0.0;
    for (const auto& e : pmf) mu += e.prob * e.duration;
    return mu;
}

PricingSolution solve_nlp2(std::span<const PricedClass> classes, int capacity, double epsilon,
                           double tol) {
    if (classes.empty()) throw std::invalid_argument("solve_nlp2: no classes");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("solve_nlp2: epsilon must lie in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_nlp2: tol must be > 0");
    for (const auto& c : classes) c.curve.validate();

    const double budget = (1.0 - epsilon) * capacity;
    double price_cap = 0.0;
    for (const auto& c : classes) price_cap = std::max(price_cap, c.curve.choke_price);

    auto solve_at = [&](double theta, PricingSolution& out) {
        out.theta = theta;
        out.prices.clear();
        out.load = 0.0;
        out.objective = 0.0;
        for (const auto& c : classes) {
            const double p = best_price(c.curve, theta, tol);
            const double mu = c.mean_service();
            out.prices.push_back(p);
            out.load += c.curve.rate(p) * mu;
            out.objective += p * c.curve.rate(p) * mu;
        }
    };

    PricingSolution sol;
    solve_at(0.0, sol);
    if (sol.load <= budget + tol) return sol; // capacity slack: revenue maximizers stand

    // load is non-increasing in theta and reaches 0 at the largest choke
    // price; bisect for the smallest feasible multiplier.
    double lo = 0.0, hi = price_cap;
    for (int iter = 0; iter < 300; ++iter) {
        solve_at(0.5 * (lo + hi), sol);
        if (sol.load <= budget)
            hi = sol.theta;
        else
            lo = sol.theta;
        if (hi - lo < tol) {
            solve_at(hi, sol);
            if (std::abs(sol.load - budget) <= tol * std::max(1.0, static_cast<double>(capacity)))
                return sol;
        }
    }
    solve_at(hi, sol);
    const double residual = std::abs(sol.load - budget);
    if (residual > tol * std::max(1.0, static_cast<double>(capacity)) && budget > 0.0)
        throw std::runtime_error("solve_nlp2: bisection converged without meeting the load "
                                 "residual; demand appears discontinuous");
    return sol;
}

PricingCrossCheck cross_validate_nlp1(std::span<const PricedClass> classes, int capacity,
                                      double epsilon, int grid_resolution) {
    if (classes.size() > 3)
        throw std::invalid_argument("cross_validate_nlp1: limited to 3 classes");
    if (grid_resolution < 1) throw std::invalid_argument("cross_validate_nlp1: bad resolution");
    for (const auto& c : classes) c.curve.validate();

    const double budget = (1.0 - epsilon) * capacity;
    const std::size_t m = classes.size();
    std::vector<double> step(m), mu(m);
    for (std::size_t k = 0; k < m; ++k) {
        step[k] = classes[k].curve.choke_price / grid_resolution;
        mu[k] = classes[k].mean_service();
    }

    PricingCrossCheck out;
    std::vector<int> idx(m, 0);
    std::vector<double> price(m), load(m);
    std::vector<std::size_t> order(m);
    for (;;) {
        for (std::size_t k = 0; k < m; ++k) {
            price[k] = idx[k] * step[k];
            load[k] = classes[k].curve.rate(price[k]) * mu[k];
        }
        // Inner admission variables: greedy by descending price.
        for (std::size_t k = 0; k < m; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (price[a] != price[b]) return price[a] > price[b];
            return a < b;
        });
        double remaining = budget;
        double objective = 0.0;
        for (std::size_t k : order) {
            if (remaining <= 0.0 || load[k] <= 0.0) continue;
            const double a = std::min(1.0, remaining / load[k]);
            objective += price[k] * a * load[k];
            remaining -= a * load[k];
        }
        if (objective > out.grid_objective) {
            out.grid_objective = objective;
            out.grid_prices.assign(price.begin(), price.end());
        }
        // Next tuple.
        std::size_t k = 0;
        while (k < m && ++idx[k] > grid_resolution) idx[k++] = 0;
        if (k == m) break;
    }

    const PricingSolution nlp2 = solve_nlp2(classes, capacity, epsilon);
    out.nlp2_objective = nlp2.objective;
    out.gap = std::abs(out.grid_objective - out.nlp2_objective);
    out.grid_error_bound = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        out.grid_error_bound += mu[k] * classes[k].curve.revenue_slope_bound() * step[k];
    return out;
}

} // namespace lossnet
