#pragma once

#include <span>
#include <vector>

#include "lossnet/core.hpp"

namespace lossnet {

// Price-to-demand map for one class: nonnegative, non-increasing,
// differentiable below the choke price where demand vanishes.
struct DemandCurve {
    enum class Family { linear, exponential_cutoff };

    Family family = Family::linear;
    double base_rate = 0.0;   // rate at price 0
    double choke_price = 1.0; // rate is exactly 0 from here on
    double shape = 1.0;       // decay constant for the exponential family

    // Demand rate at the given price (0 at and beyond the choke price).
    double rate(double price) const;
    // Upper bound on |d/dp (p * rate(p))| over [0, choke_price]; used to
    // bound the error of price-grid searches.
    double revenue_slope_bound() const;
    // Throws unless the revenue term (price - theta) * rate(price) is
    // concave for every theta >= 0 (the tractable families).
    void validate() const;
};

struct PricedClass {
    int class_id = 0;
    DemandCurve curve;
    std::vector<PmfEntry> pmf; // joint (delay, duration) mix, prices do not affect it
    double mean_service() const;
};

struct PricingSolution {
    std::vector<double> prices;  // one per class, same order as the input
    double objective = 0.0;      // sum of price * rate(price) * mean service
    double theta = 0.0;          // capacity shadow price at the solution
    double load = 0.0;           // sum of rate(price) * mean service
};

// Static price optimization under the admission-LP capacity budget
// (1 - epsilon) * capacity: dualize the load constraint with multiplier
// theta, maximize the separable per-class terms (price - theta) * rate *
// mean service, and bisect for the smallest theta whose maximizers fit the
// budget. Terminates when the theta bracket is below tol and the load
// residual is below tol * capacity.
PricingSolution solve_nlp2(std::span<const PricedClass> classes, int capacity, double epsilon,
                           double tol = 1e-9);

struct PricingCrossCheck {
    double grid_objective = 0.0;  // joint price-grid optimum with inner knapsack
    double nlp2_objective = 0.0;
    double gap = 0.0;             // |grid - nlp2|
    double grid_error_bound = 0.0;
    std::vector<double> grid_prices;
};

// Joint-grid evaluation of the price-and-admission program: for every price
// vector on the grid the admission variables are filled greedily by
// descending price, exactly as in the fixed-rate knapsack. The two programs
// share their optima, so grid and bisection objectives must agree up to the
// grid error bound. Limited to 3 classes.
PricingCrossCheck cross_validate_nlp1(std::span<const PricedClass> classes, int capacity,
                                      double epsilon, int grid_resolution);

} // namespace lossnet
