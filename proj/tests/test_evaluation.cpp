#include "doctest.h"

#include <cmath>

#include "trackgen/errors.hpp"
#include "trackgen/evaluation.hpp"
#include "trackgen/rng.hpp"

using namespace trackgen;

namespace {

std::vector<double> constant(double v, int n) { return std::vector<double>(n, v); }

std::vector<double> linear(double from, double to, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(from + (to - from) * static_cast<double>(i) / (n - 1));
    return out;
}

} // namespace

TEST_CASE("area_between core algebra") {
    const auto a = linear(0.0, 1.0, 5);
    CHECK(area_between(a, a) == 0.0);
    CHECK(area_between(constant(1.0, 4), constant(0.0, 4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(area_between(linear(0.0, 1.0, 2), constant(0.0, 2)) ==
          doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("symmetry and non-negativity") {
        Rng rng(2);
        for (int t = 0; t < 40; ++t) {
            std::vector<double> x, y;
            const int nx = 2 + rng.uniform_int(30);
            const int ny = 2 + rng.uniform_int(30);
            for (int i = 0; i < nx; ++i) x.push_back(rng.uniform());
            for (int i = 0; i < ny; ++i) y.push_back(rng.uniform());
            const double d1 = area_between(x, y);
            const double d2 = area_between(y, x);
            CHECK(d1 == d2);
            CHECK(d1 >= 0.0);
            CHECK(d1 <= 1.0);
        }
    }
    SUBCASE("doubling the sample rate preserves the area") {
        Rng rng(9);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x, y;
            for (int i = 0; i < 12; ++i) x.push_back(rng.uniform());
            for (int i = 0; i < 12; ++i) y.push_back(rng.uniform());
            // Same piecewise-linear shape at twice the resolution.
            std::vector<double> x2, y2;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                x2.push_back(x[i]);
                x2.push_back(0.5 * (x[i] + x[i + 1]));
                y2.push_back(y[i]);
                y2.push_back(0.5 * (y[i] + y[i + 1]));
            }
            x2.push_back(x.back());
            y2.push_back(y.back());
            CHECK(std::abs(area_between(x, y) - area_between(x2, y2)) < 1e-9);
        }
    }
    SUBCASE("different lengths of the same shape") {
        CHECK(area_between(linear(0, 1, 3), linear(0, 1, 7)) < 1e-12);
    }
    SUBCASE("empty traces are rejected") {
        CHECK_THROWS_AS(area_between({}, constant(1, 3)), EvaluationError);
    }
}

TEST_CASE("reward follows Eq-style sign convention") {
    const auto t = constant(1.0, 8);
    CHECK(reward(t, t, true) == 0.0);
    CHECK(reward(t, constant(0.0, 8), true) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(reward(t, t, false) == -1000.0);
    CHECK(kInfeasibleReward == -1000.0);
}

TEST_CASE("accuracy sign agreement") {
    CHECK(accuracy_pct(constant(0.9, 6), constant(0.9, 6)) == 100.0);
    CHECK(accuracy_pct(constant(0.4, 6), make_target(Scenario::Maximise, 6)) == 0.0);
    const std::vector<double> out = {0.9, 0.4, 0.6, 0.2};
    const std::vector<double> target = {1.0, 1.0, 0.0, 0.0};
    CHECK(accuracy_pct(out, target) == 50.0);

    SUBCASE("exact 0.5 counts as disagreement") {
        CHECK(accuracy_pct(constant(0.5, 4), make_target(Scenario::Maximise, 4)) == 0.0);
        CHECK(accuracy_pct(constant(0.5, 4), constant(0.5, 4)) == 0.0);
    }
    SUBCASE("target resampling to the output length") {
        // Three-sample target stretched over 6 outputs by nearest sample.
        const std::vector<double> tgt = {1.0, 0.0, 1.0};
        const std::vector<double> gen = {0.9, 0.9, 0.1, 0.1, 0.9, 0.9};
        // t_i = i/5 -> nearest target index: 0,0,1,1,2,2
        CHECK(accuracy_pct(gen, tgt) == 100.0);
    }
    SUBCASE("reward 0 implies accuracy 100 when no output is 0.5") {
        Rng rng(6);
        for (int t2 = 0; t2 < 20; ++t2) {
            std::vector<double> trace;
            for (int i = 0; i < 10; ++i) trace.push_back(rng.uniform());
            bool has_half = false;
            for (double v : trace) has_half |= v == 0.5;
            if (has_half) continue;
            CHECK(reward(trace, trace, true) == 0.0);
            CHECK(accuracy_pct(trace, trace) == 100.0);
        }
        // accuracy 100 does not imply reward 0
        const std::vector<double> a = {0.9, 0.8};
        const std::vector<double> b = {0.7, 0.6};
        CHECK(accuracy_pct(a, b) == 100.0);
        CHECK(reward(a, b, true) < 0.0);
    }
}

TEST_CASE("target trace shapes") {
    CHECK(make_target(Scenario::Maximise, 5) == constant(1.0, 5));
    CHECK(make_target(Scenario::Minimise, 5) == constant(0.0, 5));
    const std::vector<double> fluct = make_target(Scenario::Fluctuating, 9);
    CHECK(fluct == std::vector<double>{1, 1, 1, 0, 0, 0, 1, 1, 1});
}

TEST_CASE("confidence_interval_95") {
    CHECK(confidence_interval_95(constant(3.0, 10)).half_width == 0.0);
    const std::vector<double> two = {0.0, 1.0};
    const MeanCi ci = confidence_interval_95(two);
    CHECK(ci.mean == doctest::Approx(0.5));
    CHECK(ci.half_width == doctest::Approx(0.98).epsilon(1e-3));
    CHECK_THROWS_AS(confidence_interval_95(std::vector<double>{1.0}), EvaluationError);
}

TEST_CASE("expressive_range statistics") {
    std::map<Scenario, std::vector<TileCounts>> by_scenario;
    for (int i = 0; i < 10; ++i)
        by_scenario[Scenario::Maximise].push_back(TileCounts{4, 2, 3, 1, 5});
    by_scenario[Scenario::Minimise] = {
        TileCounts{16, 4, 0, 0, 0}, TileCounts{18, 6, 0, 0, 0}, TileCounts{22, 6, 0, 0, 0}};

    const auto rows = expressive_range(by_scenario);
    REQUIRE(rows.size() == 2);
    const auto& max_row = rows[0];
    CHECK(max_row.scenario == Scenario::Maximise);
    CHECK(max_row.simple_tiles.half_width == 0.0);
    CHECK(max_row.event_tiles.mean == doctest::Approx(4.0));
    const auto& min_row = rows[1];
    CHECK(min_row.simple_tiles.mean == doctest::Approx((20.0 + 24.0 + 28.0) / 3.0));
    CHECK(min_row.event_tiles.mean == 0.0);

    SUBCASE("one track per scenario is not enough") {
        std::map<Scenario, std::vector<TileCounts>> tiny;
        tiny[Scenario::Maximise] = {TileCounts{}};
        CHECK_THROWS_AS(expressive_range(tiny), EvaluationError);
    }
}
