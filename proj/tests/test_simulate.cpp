#include <cmath>
#include <doctest.h>
#include <numeric>
#include <vector>

#include "cointurn/exact.hpp"
#include "cointurn/rng.hpp"
#include "cointurn/simulate.hpp"

using namespace cointurn;

namespace {

Schedule never_turn() { return Schedule::custom_table({}, Tail::constant(0.0)); }
Schedule always_turn() { return Schedule::custom_table({}, Tail::constant(1.0)); }

}  // namespace

TEST_CASE("degenerate walks") {
    const WalkPath up = sample_walk(never_turn(), 50, 7, +1);
    for (std::uint64_t k = 0; k <= 50; ++k)
        CHECK(up.sums[k] == static_cast<std::int64_t>(k));
    CHECK(zero_hits(up) == 0);

    const WalkPath flip = sample_walk(always_turn(), 50, 7, +1);
    for (std::uint64_t k = 0; k <= 50; ++k)
        CHECK(flip.sums[k] == ((k % 2) ? 1 : 0));
    CHECK(zero_hits(flip) == 25);
}

TEST_CASE("determinism and path validity") {
    const Schedule s = Schedule::critical_cooling(1.5);
    const WalkPath a = sample_walk(s, 500, 12345);
    const WalkPath b = sample_walk(s, 500, 12345);
    CHECK(a.sums == b.sums);
    CHECK(a.turns == b.turns);

    const std::vector<Schedule> pool = {
        Schedule::constant(0.4), Schedule::harmonic_heating(1.0),
        Schedule::power_cooling(1.0, 0.5), Schedule::reciprocal()};
    SplitMix64 g(5);
    for (int rep = 0; rep < 20; ++rep) {
        const Schedule& s2 = pool[g.next() % pool.size()];
        const WalkPath w = sample_walk(s2, 200, g.next());
        CHECK(w.sums[0] == 0);
        for (std::uint64_t k = 1; k <= w.n; ++k) {
            CHECK(std::abs(w.sums[k] - w.sums[k - 1]) == 1);
            CHECK(w.sums[k] - w.sums[k - 1] == w.signs[k - 1]);
            if (k >= 2) {
                const int expect =
                    w.turns[k - 2] ? -w.signs[k - 2] : w.signs[k - 2];
                CHECK(w.signs[k - 1] == expect);
            }
        }
    }
}

TEST_CASE("endpoint sampler matches per-trial streams") {
    const Schedule s = Schedule::constant(0.3);
    const auto ends = sample_endpoints(s, 100, 10, 777);
    for (std::uint64_t i = 0; i < 10; ++i) {
        const WalkPath w = sample_walk(s, 100, derive_seed(777, i));
        CHECK(ends[i].s == w.sums[100]);
        CHECK(ends[i].y == w.signs[99]);
    }
}

TEST_CASE("enumerated distribution basics") {
    const ExactDistribution d1 = enumerated_distribution(Schedule::constant(0.3), 1);
    CHECK(d1.prob(+1, +1) == 0.5);
    CHECK(d1.prob(-1, -1) == 0.5);
    CHECK(d1.prob(+1, -1) == 0.0);
    CHECK(d1.mass() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(enumerated_distribution(Schedule::constant(0.3), 23), TooLarge);

    // probabilities are nonnegative and sum to one
    const ExactDistribution d9 = enumerated_distribution(Schedule::reciprocal(), 9);
    for (std::int64_t sv = -9; sv <= 9; ++sv)
        for (int y : {-1, +1}) CHECK(d9.prob(sv, y) >= 0.0);
    CHECK(d9.mass() == doctest::Approx(1.0).epsilon(1e-12));

    // off-parity support carries no mass
    const ExactDistribution d6 = enumerated_distribution(Schedule::reciprocal(), 6);
    for (std::int64_t sv = -6; sv <= 6; ++sv)
        if ((sv + 6) % 2 == 1) CHECK(d6.prob_s(sv) == 0.0);
}

TEST_CASE("reciprocal schedule endpoint is uniform") {
    const ExactDistribution d = enumerated_distribution(Schedule::reciprocal(), 8);
    for (const auto& [sv, p] : d.s_marginal())
        CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("endpoint sign marginal matches the closed form") {
    const std::vector<Schedule> pool = {Schedule::constant(0.3),
                                        Schedule::reciprocal(),
                                        Schedule::custom_table({0.1, 0.8, 0.4})};
    for (const Schedule& s : pool) {
        for (std::uint64_t n = 1; n <= 16; ++n) {
            const ExactDistribution d = enumerated_distribution(s, n, +1);
            CHECK(d.prob_y_plus() ==
                  doctest::Approx(head_probability(s, n, +1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dp distribution equals enumeration") {
    const std::vector<Schedule> pool = {Schedule::constant(0.37),
                                        Schedule::power_cooling(1.2, 0.4),
                                        Schedule::custom_table({0.9, 0.2, 0.55, 0.7})};
    for (const Schedule& s : pool) {
        VarianceRecursion rec(s);
        for (std::uint64_t n = 1; n <= 16; ++n) {
            const ExactDistribution brute = enumerated_distribution(s, n);
            const ExactDistribution dp = dp_distribution(s, n);
            CHECK(brute.total_variation(dp) < 1e-12);
            while (rec.n() < n) rec.advance();
            CHECK(std::fabs(dp.variance() - rec.variance()) < 1e-10);
        }
        // pinned first sign as well
        const ExactDistribution bp = enumerated_distribution(s, 9, -1);
        const ExactDistribution dpp = dp_distribution(s, 9, -1);
        CHECK(bp.total_variation(dpp) < 1e-12);
    }
    CHECK_THROWS_AS(dp_distribution(Schedule::constant(0.3), 20001), TooLarge);
}

TEST_CASE("dp distribution at moderate n hits the asymptotic laws") {
    const ExactDistribution hom = dp_distribution(Schedule::constant(0.3), 2000);
    CHECK(hom.variance() / 2000.0 == doctest::Approx(7.0 / 3.0).epsilon(0.02));

    const ExactDistribution crit = dp_distribution(Schedule::critical_cooling(1.0), 2000);
    double cdf = 0.0, sup = 0.0;
    for (const auto& [sv, p] : crit.s_marginal()) {
        const double u = 0.5 * (1.0 + static_cast<double>(sv) / 2000.0);
        sup = std::max(sup, std::fabs(cdf - u));
        cdf += p;
        sup = std::max(sup, std::fabs(cdf - u));
    }
    CHECK(sup < 0.01);  // Beta(1,1) is uniform
}

TEST_CASE("rescaled paths") {
    const WalkPath ray = sample_walk(never_turn(), 100, 3, +1);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    const RescaledPath cool =
        rescaled_path(ray, never_turn(), RescaleMode::cooling, grid);
    for (const auto& [t, v] : cool.samples) CHECK(v == doctest::Approx(t).epsilon(1e-12));

    // grid points k/n need no interpolation
    const Schedule s = Schedule::constant(0.4);
    const WalkPath w = sample_walk(s, 100, 11);
    const RescaledPath path = rescaled_path(w, s, RescaleMode::cooling,
                                            {0.17, 0.5, 1.0});
    CHECK(path.samples[1].second ==
          doctest::Approx(static_cast<double>(w.sums[50]) / 100.0).epsilon(1e-12));
    CHECK(path.samples[2].second ==
          doctest::Approx(static_cast<double>(w.sums[100]) / 100.0).epsilon(1e-12));

    CHECK_THROWS_AS(rescaled_path(w, s, RescaleMode::cooling, {1.5}), HorizonExceeded);
}

TEST_CASE("diffusive rescaling matches the closed-form time change") {
    // constant p with p_1 = c: v_n = n (1-c)/c exactly, so
    // Z(x) = ceil(x c / (1-c)) and the rescaled walk is S_{ceil(u)}/sqrt(n)
    const double c = 0.3;
    const Schedule s = Schedule::constant(c, c);
    ExactCache cache(s, 1e-10);
    const std::uint64_t scale = 64;
    const WalkPath w = sample_walk(s, 400, 21);
    std::vector<double> grid = {0.1, 0.25, 0.5, 0.77, 1.0};
    const RescaledPath path =
        rescaled_path(w, s, RescaleMode::diffusive, grid, scale, &cache);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = static_cast<double>(scale) * grid[i] * c / (1.0 - c);
        const auto direct = static_cast<std::uint64_t>(std::ceil(u - 1e-9));
        const double want =
            static_cast<double>(w.sums[std::max<std::uint64_t>(direct, 1)]) /
            std::sqrt(static_cast<double>(scale));
        CHECK(path.samples[i].second == doctest::Approx(want).epsilon(1e-12));
    }

    const WalkPath tiny = sample_walk(s, 5, 21);
    CHECK_THROWS_AS(
        rescaled_path(tiny, s, RescaleMode::diffusive, {1.0}, scale, &cache),
        HorizonExceeded);
}

TEST_CASE("realized quadratic variation") {
    // all p = 1/2: every a_i = 1 and xi_i^2 = 1, so the sum is exactly n
    const Schedule half = Schedule::constant(0.5);
    ExactCache cache(half, 1e-10);
    const WalkPath w = sample_walk(half, 300, 9);
    CHECK(realized_variance(w, half, 300, cache) == doctest::Approx(300.0));

    double prev = 0.0;
    for (std::uint64_t n : {10, 50, 120, 300}) {
        const double cur = realized_variance(w, half, n, cache);
        CHECK(cur >= prev);
        prev = cur;
    }

    // ensemble mean of the realized sum tracks v_n for heating
    const Schedule heat = Schedule::harmonic_heating(1.0);
    ExactCache hcache(heat, 1e-4);
    const std::uint64_t n = 10000, trials = 10000;
    double acc = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const WalkPath path = sample_walk(heat, n, derive_seed(404, t));
        acc += realized_variance(path, heat, n, hcache);
    }
    const double ratio = (acc / trials) / hcache.v(n);
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
}

TEST_CASE("truncated second moment") {
    CHECK(truncated_second_moment(Schedule::constant(0.5), 5, 1.0, 50, 1) == 0.0);
    CHECK(truncated_second_moment(Schedule::constant(0.5), 10000, 0.01, 50, 1) == 0.0);
    CHECK(truncated_second_moment(Schedule::harmonic_heating(1.0), 10000, 0.01, 50, 2) ==
          0.0);
    CHECK(truncated_second_moment(Schedule::power_cooling(1.0, 0.5), 10000, 0.1, 50,
                                  3) == 0.0);
    // at the tighter cutoff the subcritical schedule genuinely fires
    CHECK(truncated_second_moment(Schedule::power_cooling(1.0, 0.5), 10000, 0.01, 50,
                                  3) > 0.5);
}

TEST_CASE("zero hits of the critical walk trend upward with n") {
    const Schedule s = Schedule::critical_cooling(1.0);
    const auto frac_with_3 = [&](std::uint64_t n, std::uint64_t salt) {
        std::uint64_t hits3 = 0;
        std::vector<double> probs(n + 1, 0.0);
        for (std::uint64_t k = 2; k <= n; ++k) probs[k] = s.prob(k);
        for (std::uint64_t trial = 0; trial < 1000; ++trial) {
            SplitMix64 g(derive_seed(salt, trial));
            int y = g.sign();
            std::int64_t sum = y;
            std::uint64_t zeros = 0;
            for (std::uint64_t k = 2; k <= n; ++k) {
                if (g.uniform01() < probs[k]) y = -y;
                sum += y;
                if (sum == 0) ++zeros;
            }
            if (zeros >= 3) ++hits3;
        }
        return static_cast<double>(hits3) / 1000.0;
    };
    const double low = frac_with_3(1000, 51);
    const double high = frac_with_3(100000, 52);
    CHECK(high > low);
}

TEST_CASE("ensemble moments match the exact values") {
    const Schedule s = Schedule::constant(0.3);
    const std::uint64_t n = 300, trials = 100000;
    const auto ends = sample_endpoints(s, n, trials, 31337);

    double mean = 0.0;
    for (const auto& e : ends) mean += static_cast<double>(e.s);
    mean /= static_cast<double>(trials);
    const double sigma = std::sqrt(walk_variance(s, n));
    CHECK(std::fabs(mean) <= 4.0 * sigma / std::sqrt(static_cast<double>(trials)));

    double m2 = 0.0, m4 = 0.0;
    for (const auto& e : ends) {
        const double d = static_cast<double>(e.s) - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(trials);
    m4 /= static_cast<double>(trials);
    // jackknife standard error of the sample variance
    const double se = std::sqrt((m4 - m2 * m2 * (trials - 3.0) / (trials - 1.0)) /
                                static_cast<double>(trials));
    CHECK(std::fabs(m2 - sigma * sigma) <= 5.0 * se);
}
