#include <doctest.h>

#include <vector>

#include "lossnet/core.hpp"
#include "lossnet/rng.hpp"
#include "oracles.hpp"

using namespace lossnet;

TEST_CASE("empty ledger reports zero everywhere") {
    BookingLedger ledger;
    CHECK(ledger.max_occupancy(0.0, 1.0) == 0);
    CHECK(ledger.max_occupancy(-5.0, 100.0) == 0);
}

TEST_CASE("half-open boundaries: adjacent intervals do not overlap") {
    BookingLedger ledger;
    ledger.reserve(1.0, 2.0);
    CHECK(ledger.max_occupancy(1.0, 2.0) == 1);
    CHECK(ledger.max_occupancy(2.0, 3.0) == 0);
    CHECK(ledger.max_occupancy(0.0, 1.0) == 0);

    ledger.reserve(0.0, 1.0); // back-to-back with the first
    CHECK(ledger.max_occupancy(0.0, 2.0) == 1);
}

TEST_CASE("stacked and overlapping reservations") {
    BookingLedger ledger;
    ledger.reserve(0.0, 1.0);
    ledger.reserve(0.0, 1.0);
    CHECK(ledger.max_occupancy(0.0, 1.0) == 2);

    BookingLedger other;
    other.reserve(0.0, 2.0);
    other.reserve(1.0, 3.0);
    CHECK(other.max_occupancy(1.0, 2.0) == 2);
}

TEST_CASE("peak inside the interval dominates the endpoints") {
    // Three reservations pile up strictly inside the query interval while
    // both endpoints only see one of them: the instantaneous load at the
    // service start understates the interval maximum.
    BookingLedger ledger;
    ledger.reserve(0.0, 10.0);
    ledger.reserve(4.0, 6.0);
    ledger.reserve(4.5, 5.5);
    CHECK(ledger.occupancy_at(2.0) == 1);
    CHECK(ledger.occupancy_at(9.0) == 1);
    CHECK(ledger.max_occupancy(2.0, 9.0) == 3);
}

TEST_CASE("queries and mutations reject bad intervals") {
    BookingLedger ledger;
    CHECK_THROWS_AS(ledger.max_occupancy(2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ledger.max_occupancy(3.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ledger.reserve(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("release_before folds history and errors on stale queries") {
    BookingLedger ledger;
    ledger.reserve(0.0, 1.0); // expires before the cut
    ledger.release_before(5.0);
    CHECK(ledger.max_occupancy(5.0, 6.0) == 0);
    CHECK_THROWS_AS(ledger.max_occupancy(4.0, 6.0), std::out_of_range);

    BookingLedger live;
    live.reserve(4.0, 8.0); // still running at the cut
    live.release_before(5.0);
    CHECK(live.max_occupancy(5.0, 6.0) == 1);
    CHECK(live.max_occupancy(7.9, 8.5) == 1);
    CHECK(live.max_occupancy(8.0, 9.0) == 0);
}

TEST_CASE("release_before is idempotent") {
    BookingLedger ledger;
    ledger.reserve(0.0, 2.0);
    ledger.reserve(3.0, 7.0);
    ledger.release_before(4.0);
    const auto count = ledger.breakpoint_count();
    const auto base = ledger.baseline();
    const auto peak = ledger.max_occupancy(4.0, 10.0);
    ledger.release_before(4.0);
    CHECK(ledger.breakpoint_count() == count);
    CHECK(ledger.baseline() == base);
    CHECK(ledger.max_occupancy(4.0, 10.0) == peak);
}

TEST_CASE("random workloads match the naive interval-stabbing oracle") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        BookingLedger ledger;
        std::vector<std::pair<double, double>> intervals;
        const int n = 1 + static_cast<int>(rng.uniform() * 40);
        for (int i = 0; i < n; ++i) {
            const double start = rng.uniform() * 20.0;
            const double len = 0.1 + rng.uniform() * 5.0;
            ledger.reserve(start, start + len);
            intervals.emplace_back(start, start + len);
        }
        for (int q = 0; q < 20; ++q) {
            const double a = rng.uniform() * 25.0 - 2.0;
            const double b = a + 0.1 + rng.uniform() * 10.0;
            CHECK(ledger.max_occupancy(a, b) == oracles::naive_max_occupancy(intervals, a, b));
        }
    }
}

TEST_CASE("garbage collection never changes later query results") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        BookingLedger collected;
        BookingLedger untouched;
        double t = 0.0;
        for (int i = 0; i < 200; ++i) {
            t += rng.exponential(2.0);
            const double start = t + rng.uniform() * 3.0;
            const double len = 0.2 + rng.uniform() * 4.0;
            collected.release_before(t);
            collected.reserve(start, start + len);
            untouched.reserve(start, start + len);
            const double qa = t + rng.uniform() * 6.0;
            const double qb = qa + 0.1 + rng.uniform() * 4.0;
            CHECK(collected.max_occupancy(qa, qb) == untouched.max_occupancy(qa, qb));
        }
        CHECK(collected.breakpoint_count() <= untouched.breakpoint_count());
    }
}

TEST_CASE("occupancy is nonnegative and returns to zero after expiry") {
    Rng rng(11);
    BookingLedger ledger;
    double last_end = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double start = rng.uniform() * 10.0;
        const double len = 0.1 + rng.uniform() * 2.0;
        ledger.reserve(start, start + len);
        last_end = std::max(last_end, start + len);
    }
    for (double x = -1.0; x < last_end + 2.0; x += 0.05) CHECK(ledger.occupancy_at(x) >= 0);
    CHECK(ledger.max_occupancy(last_end, last_end + 5.0) == 0);
}
