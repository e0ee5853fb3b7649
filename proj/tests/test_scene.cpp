// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msisac/scene.hpp"
#include "oracles.hpp"

using namespace msisac;
using Catch::Approx;

TEST_CASE("place_stations: separation and bounds")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Scene s = place_stations(seed, 300.0, 150.0, 2);
        REQUIRE(s.tx.size() == 2);
        std::vector<Point2> all = s.tx;
        all.push_back(s.rx);
        for (std::size_t i = 0; i < all.size(); ++i) {
            CHECK(all[i].x >= 0.0);
            CHECK(all[i].x <= 300.0);
            CHECK(all[i].y >= 0.0);
            CHECK(all[i].y <= 300.0);
            for (std::size_t j = i + 1; j < all.size(); ++j)
                CHECK(distance(all[i], all[j]) >= 150.0);
        }
        CHECK_NOTHROW(s.validate());
    }
}

TEST_CASE("place_stations: deterministic per seed")
{
    const Scene a = place_stations(42, 300.0, 150.0, 3);
    const Scene b = place_stations(42, 300.0, 150.0, 3);
    const Scene c = place_stations(43, 300.0, 150.0, 3);
    CHECK(a.tx == b.tx);
    CHECK(a.rx == b.rx);
    CHECK_FALSE(a.tx == c.tx);
}

TEST_CASE("place_stations: degenerate and infeasible inputs")
{
    CHECK(place_stations(1, 300.0, 0.0, 8).tx.size() == 8);
    CHECK_THROWS_AS(place_stations(1, 100.0, 150.0, 2), InfeasibleGeometry);
    // Feasible in principle for 2 stations, impossible for 30 within the budget.
    CHECK_THROWS_AS(place_stations(1, 100.0, 90.0, 30, 5), InfeasibleGeometry);
    CHECK_THROWS_AS(place_stations(1, 100.0, 10.0, 0), DomainError);
}

TEST_CASE("bistatic_delay")
{
    const Point2 tx{0, 0};
    const Point2 rx{150, 0};
    CHECK(bistatic_delay(tx, rx, {40, 0}) == Approx(150.0 / speed_of_light).epsilon(1e-14));
    CHECK(bistatic_delay(tx, rx, {40, 0}) == Approx(0.50e-6).margin(0.01e-6));
    CHECK(bistatic_delay(tx, rx, {17, 93}) == bistatic_delay(rx, tx, {17, 93}));

    // Point on the perpendicular bisector with BSD = 319.3 m.
    const double y = std::sqrt(159.65 * 159.65 - 75.0 * 75.0);
    CHECK(bistatic_delay(tx, rx, {75, y}) == Approx(319.3 / speed_of_light).epsilon(1e-12));
    CHECK(bistatic_delay(tx, rx, {75, y}) == Approx(1.065e-6).margin(1e-9));
}

TEST_CASE("bistatic_doppler: closed-form cases")
{
    const double lambda = speed_of_light / 4.7e9;
    const Point2 tx{0, 0};
    const Point2 rx{150, 0};

    TargetState crossing{{75, 100}, 13.9, 0.0}; // moving parallel to the baseline, bisector is -y
    CHECK(bistatic_doppler(tx, rx, crossing, lambda) == Approx(0.0).margin(1e-9));

    // Monostatic-like geometry (beta = 0), closing head-on.
    TargetState closing{{100, 0}, 13.9, pi};
    const double nu = bistatic_doppler(tx, tx, closing, lambda);
    CHECK(nu == Approx(435.0).margin(1.0));
    CHECK(nu == Approx(2 * 13.9 / lambda).epsilon(1e-12));

    TargetState receding = closing;
    receding.heading = 0.0;
    CHECK(bistatic_doppler(tx, tx, receding, lambda) == Approx(-nu).epsilon(1e-12));
}

TEST_CASE("bistatic_doppler: matches finite-difference range rate")
{
    const double lambda = speed_of_light / 4.7e9;
    Rng rng(7);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Point2 tx{rng.uniform(0, 300), rng.uniform(0, 300)};
        const Point2 rx{rng.uniform(0, 300), rng.uniform(0, 300)};
        TargetState t{{rng.uniform(0, 300), rng.uniform(0, 300)}, rng.uniform(1, 13.9), rng.uniform(0, two_pi)};
        if (distance(t.position, tx) < 5.0 || distance(t.position, rx) < 5.0)
            continue;
        const Point2 v = t.velocity();
        const double rate = oracle::bsd_rate(tx.x, tx.y, rx.x, rx.y, t.position.x, t.position.y, v.x, v.y, 1e-3);
        const double expected = -rate / lambda; // closing => positive Doppler
        const double nu = bistatic_doppler(tx, rx, t, lambda);
        if (std::abs(expected) < 1.0)
            continue;
        CHECK(nu == Approx(expected).epsilon(1e-3));
        ++checked;
    }
    CHECK(checked > 300);
}

TEST_CASE("bistatic_doppler: coincident target is degenerate")
{
    TargetState t{{10, 10}, 5.0, 0.0};
    CHECK_THROWS_AS(bistatic_doppler({10, 10}, {100, 0}, t, 0.06), DegenerateGeometry);
    CHECK_THROWS_AS(bistatic_doppler({0, 0}, {10, 10}, t, 0.06), DegenerateGeometry);
}

TEST_CASE("max_bistatic_distance")
{
    CHECK(max_bistatic_distance(300, 150) == Approx(759.7).margin(0.05));
    CHECK(worst_case_delay_spread(300, 150) == Approx(2.03e-6).margin(0.01e-6));
    CHECK(max_bistatic_distance(0, 0) == 0.0);
    CHECK(max_bistatic_distance(200, 200) == Approx(200 * std::sqrt(2.0) + 200));
    CHECK_THROWS_AS(max_bistatic_distance(100, 150), DomainError);
}

TEST_CASE("build_paths: counts and gain models")
{
    Scene s = place_stations(3, 300, 150, 2);
    populate_scatterers(s, {5, 50, 13.9, 1.0, 1.0}, 3);
    const OfdmConfig cfg;
    const auto paths = build_paths(s, cfg, GainModel::unit, 11);
    REQUIRE(paths.size() == 2);
    for (std::size_t l = 0; l < 2; ++l) {
        REQUIRE(paths[l].size() == 55);
        for (const auto &p : paths[l]) {
            CHECK(std::abs(p.alpha) == Approx(1.0));
            CHECK(p.tx_index == l);
            if (p.clutter)
                CHECK(p.nu == 0.0);
        }
        CHECK(paths[l][4].scatterer_index == 4);
        CHECK_FALSE(paths[l][4].clutter);
        CHECK(paths[l][5].clutter);
    }

    const auto inv = build_paths(s, cfg, GainModel::inverse_product, 11);
    const Point2 p0 = s.targets[0].position;
    CHECK(std::abs(inv[0][0].alpha) == Approx(1.0 / (distance(s.tx[0], p0) * distance(p0, s.rx))));
    // Same seed, same phases.
    CHECK(std::arg(inv[0][0].alpha) == Approx(std::arg(paths[0][0].alpha)));

    Scene empty = place_stations(3, 300, 150, 2);
    const auto none = build_paths(empty, cfg, GainModel::unit, 1);
    REQUIRE(none.size() == 2);
    CHECK(none[0].empty());
}

TEST_CASE("build_paths: geometric bounds over random scenes")
{
    const OfdmConfig cfg;
    const double lambda = cfg.wavelength();
    const double bsd_max = max_bistatic_distance(300, 150);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Scene s = place_stations(seed, 300, 150, 3);
        populate_scatterers(s, {5, 20, 13.9, 1.0, 1.0}, seed);
        const auto paths = build_paths(s, cfg, GainModel::unit, seed);
        for (const auto &per_tx : paths)
            for (const auto &p : per_tx) {
                CHECK(p.bistatic_range() >= 150.0 - 1e-9);
                CHECK(p.bistatic_range() <= bsd_max + 1e-9);
                CHECK(std::abs(p.nu) <= 2 * 13.9 / lambda + 1e-9);
            }
        CHECK(multistatic_delay_spread(paths) <= (bsd_max - 150.0) / speed_of_light + 1e-15);
    }
}
