#include "lossnet/rng.hpp"

namespace lossnet {

namespace {

// Knuth's product-of-uniforms method: count uniforms until the running
// product drops below e^{-mean}. Expected cost is O(mean).
long long poisson_small(Rng& rng, double mean) {
    const double threshold = std::exp(-mean);
    long long n = 0;
    double prod = rng.uniform();
    while (prod > threshold) {
        ++n;
        prod *= rng.uniform();
    }
    return n;
}

// Transformed rejection with squeeze (PTRS, Hormann 1993). Valid for
// mean >= 10; constants follow the paper.
long long poisson_ptrs(Rng& rng, double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = -mean + k * log_mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<long long>(kf);
    }
}

} // namespace

long long Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) return poisson_small(*this, mean);
    return poisson_ptrs(*this, mean);
}

} // namespace lossnet
