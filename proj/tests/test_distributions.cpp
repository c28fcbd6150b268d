#include <doctest.h>

#include <vector>

#include "lossnet/distributions.hpp"
#include "lossnet/rng.hpp"

using namespace lossnet;

namespace {

ClassSpec make_class(int id, double rate, std::vector<PmfEntry> pmf, double reward = 1.0) {
    ClassSpec c;
    c.class_id = id;
    c.arrival_rate = rate;
    c.reward_rate = reward;
    c.pmf = std::move(pmf);
    return c;
}

// A throwaway multi-class mix with delays up to 3 and durations up to 3.
std::vector<ClassSpec> random_classes(Rng& rng, int n_classes) {
    std::vector<ClassSpec> classes;
    for (int k = 0; k < n_classes; ++k) {
        std::vector<PmfEntry> pmf;
        double remaining = 1.0;
        const int entries = 1 + static_cast<int>(rng.uniform() * 4);
        for (int e = 0; e < entries; ++e) {
            const double p = (e == entries - 1) ? remaining : remaining * rng.uniform();
            pmf.push_back({static_cast<int>(rng.uniform() * 4),
                           1 + static_cast<int>(rng.uniform() * 3), p});
            remaining -= p;
        }
        classes.push_back(make_class(k, 0.5 + 3.0 * rng.uniform(), std::move(pmf)));
    }
    return classes;
}

} // namespace

TEST_CASE("merging a single class is the identity") {
    const auto cls = make_class(0, 2.5, {{0, 1, 0.25}, {1, 2, 0.5}, {2, 1, 0.25}});
    const MergedDistribution dist = merge_classes(std::vector<ClassSpec>{cls});
    CHECK(dist.total_rate() == doctest::Approx(2.5));
    CHECK(dist.joint(0, 1) == doctest::Approx(0.25));
    CHECK(dist.joint(1, 2) == doctest::Approx(0.5));
    CHECK(dist.joint(2, 1) == doctest::Approx(0.25));
    CHECK(dist.mean_service() == doctest::Approx(0.25 + 1.0 + 0.25));
    CHECK(dist.traffic_intensity() == doctest::Approx(2.5 * 1.5));
}

TEST_CASE("two equal-rate point masses merge to a half-half delay marginal") {
    std::vector<ClassSpec> classes{make_class(0, 1.0, {{0, 1, 1.0}}),
                                   make_class(1, 1.0, {{1, 1, 1.0}})};
    const MergedDistribution dist = merge_classes(classes);
    CHECK(dist.delay_marginal(0) == doctest::Approx(0.5));
    CHECK(dist.delay_marginal(1) == doctest::Approx(0.5));
}

TEST_CASE("three-class mix: marginals are rate-weighted averages") {
    // Rates split 10% / 45% / 45% across classes with distinct pmfs.
    const double lambda = 30.0;
    std::vector<ClassSpec> classes{
        make_class(0, 0.10 * lambda, {{0, 1, 0.6}, {2, 2, 0.4}}),
        make_class(1, 0.45 * lambda, {{1, 1, 1.0}}),
        make_class(2, 0.45 * lambda, {{0, 2, 0.5}, {1, 2, 0.5}}),
    };
    const MergedDistribution dist = merge_classes(classes);
    // Hand-computed weighted sums.
    CHECK(dist.joint(0, 1) == doctest::Approx(0.10 * 0.6));
    CHECK(dist.joint(2, 2) == doctest::Approx(0.10 * 0.4));
    CHECK(dist.joint(1, 1) == doctest::Approx(0.45));
    CHECK(dist.joint(0, 2) == doctest::Approx(0.45 * 0.5));
    CHECK(dist.delay_marginal(0) == doctest::Approx(0.10 * 0.6 + 0.45 * 0.5));
    CHECK(dist.delay_marginal(1) == doctest::Approx(0.45 + 0.45 * 0.5));
    CHECK(dist.duration_marginal(2) == doctest::Approx(0.10 * 0.4 + 0.45));
    CHECK(dist.total_rate() == doctest::Approx(lambda));
}

TEST_CASE("merge rejects an all-zero mix") {
    std::vector<ClassSpec> classes{make_class(0, 0.0, {{0, 1, 1.0}})};
    CHECK_THROWS_AS(merge_classes(classes), std::invalid_argument);
}

TEST_CASE("conditional pmf is undefined for durations without mass") {
    std::vector<ClassSpec> classes{make_class(0, 1.0, {{0, 1, 0.5}, {0, 3, 0.5}})};
    const MergedDistribution dist = merge_classes(classes);
    CHECK(dist.conditional_delay(0, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dist.conditional_delay(0, 2), std::domain_error);
    CHECK(dist.pre_arrival_rate(5, 2) == 0.0); // but the rate is plainly zero
}

TEST_CASE("pre-arrival rates: fresh slots, depletion, exhaustion") {
    // Two-point delay at 0/1, unit service.
    const double gamma = 0.3;
    std::vector<ClassSpec> classes{make_class(0, 2.0, {{0, 1, gamma}, {1, 1, 1.0 - gamma}})};
    const MergedDistribution dist = merge_classes(classes);

    CHECK(dist.pre_arrival_rate(0, 1) == doctest::Approx(2.0));              // d < s
    CHECK(dist.pre_arrival_rate(1, 1) == doctest::Approx((1.0 - gamma) * 2.0));
    CHECK(dist.pre_arrival_rate(2, 1) == doctest::Approx(0.0));              // mass exhausted
    CHECK(dist.pre_arrival_rate(10, 1) == 0.0);
}

TEST_CASE("profile: all-immediate delays leave nothing booked ahead") {
    std::vector<ClassSpec> classes{make_class(0, 3.0, {{0, 1, 1.0}})};
    const auto bands = piecewise_prearrival_profile(merge_classes(classes));
    REQUIRE(bands.size() >= 2);
    CHECK(bands[0].total_rate == doctest::Approx(3.0)); // history band
    for (std::size_t j = 1; j < bands.size(); ++j) CHECK(bands[j].total_rate == 0.0);
}

TEST_CASE("profile: two-point delay gives the three-piece staircase") {
    const double gamma = 0.25, lambda = 4.0;
    std::vector<ClassSpec> classes{
        make_class(0, lambda, {{0, 1, gamma}, {1, 1, 1.0 - gamma}})};
    const auto bands = piecewise_prearrival_profile(merge_classes(classes));
    REQUIRE(bands.size() == 3);
    CHECK(bands[0].total_rate == doctest::Approx(lambda));
    CHECK(bands[1].total_rate == doctest::Approx((1.0 - gamma) * lambda));
    CHECK(bands[2].total_rate == doctest::Approx(0.0));
}

TEST_CASE("profile: uniform delays decrease linearly") {
    const int u = 4;
    std::vector<PmfEntry> pmf;
    for (int d = 0; d <= u; ++d) pmf.push_back({d, 1, 1.0 / (u + 1)});
    std::vector<ClassSpec> classes{make_class(0, 5.0, pmf)};
    const auto bands = piecewise_prearrival_profile(merge_classes(classes));
    REQUIRE(bands.size() == static_cast<std::size_t>(u) + 2);
    for (int j = 1; j <= u + 1; ++j)
        CHECK(bands[j].total_rate ==
              doctest::Approx(5.0 * (1.0 - static_cast<double>(j) / (u + 1))));
}

TEST_CASE("pre-arrival rates are non-increasing in the slot index") {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const auto classes = random_classes(rng, 1 + static_cast<int>(rng.uniform() * 3));
        const MergedDistribution dist = merge_classes(classes);
        for (int s = 1; s <= dist.max_duration(); ++s)
            for (int d = 0; d <= dist.max_delay() + s + 2; ++d)
                CHECK(dist.pre_arrival_rate(d, s) >= dist.pre_arrival_rate(d + 1, s) - 1e-12);
    }
}

TEST_CASE("history-band rates aggregate to the merged arrival rate") {
    Rng rng(202);
    for (int trial = 0; trial < 30; ++trial) {
        const auto classes = random_classes(rng, 2);
        const MergedDistribution dist = merge_classes(classes);
        const auto bands = piecewise_prearrival_profile(dist);
        CHECK(bands[0].total_rate == doctest::Approx(dist.total_rate()).epsilon(1e-12));
        // Fresh slots (d < s) carry the full per-duration share.
        for (int s = 1; s <= dist.max_duration(); ++s)
            CHECK(dist.pre_arrival_rate(0, s) ==
                  doctest::Approx(dist.duration_marginal(s) * dist.total_rate()));
    }
}

TEST_CASE("merging commutes with the pre-arrival rate map") {
    // Rates computed per class and summed equal rates of the merged mix.
    Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const auto classes = random_classes(rng, 3);
        const MergedDistribution merged = merge_classes(classes);
        for (int s = 1; s <= merged.max_duration(); ++s) {
            for (int d = 0; d <= merged.max_delay() + s; ++d) {
                double sum = 0.0;
                for (const auto& c : classes) {
                    const MergedDistribution single = merge_classes(std::vector<ClassSpec>{c});
                    if (s <= single.max_duration()) sum += single.pre_arrival_rate(d, s);
                }
                CHECK(merged.pre_arrival_rate(d, s) == doctest::Approx(sum).epsilon(1e-9));
            }
        }
    }
}
