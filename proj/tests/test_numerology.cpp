// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "msisac/numerology.hpp"

using namespace msisac;
using Catch::Approx;

TEST_CASE("derive_quantities: reference numerology")
{
    const OfdmConfig cfg = paper_numerology();
    const auto dq = derive_quantities(cfg);

    // c / 30 kHz and c / (4 * 4.7 GHz * 35.667 us), evaluated offline.
    CHECK(dq.max_range == Approx(9993.081933333333).epsilon(1e-12));
    CHECK(dq.max_velocity == Approx(447.09553290912703).epsilon(1e-12));
    CHECK(dq.max_range / 12.0 == Approx(832.8).margin(0.1));       // "almost 833 m"
    CHECK(2.0 * dq.max_velocity / 12.0 == Approx(74.6).margin(0.1)); // "75 m/s"
    CHECK(dq.range_bin == Approx(dq.max_range / 3276.0));
    CHECK(dq.velocity_bin == Approx(2.0 * dq.max_velocity / 280.0));
    CHECK(dq.wavelength == Approx(speed_of_light / 4.7e9));
}

TEST_CASE("derive_quantities: reference symbol timing within 0.5%")
{
    const OfdmConfig cfg = paper_numerology();
    CHECK(cfg.elementary_symbol() == Approx(33.3e-6).epsilon(0.005));
    CHECK(cfg.cyclic_prefix() == Approx(2.33e-6).epsilon(0.005));
    CHECK(cfg.symbol_duration() == Approx(35.66e-6).epsilon(0.005));
}

TEST_CASE("derive_quantities: closed forms hold to machine precision")
{
    for (double df : {1e3, 15e3, 30e3, 60e3, 120e3, 480e3}) {
        for (double fc : {0.9e9, 4.7e9, 28e9}) {
            OfdmConfig cfg;
            cfg.subcarrier_spacing_hz = df;
            cfg.carrier_hz = fc;
            const auto dq = derive_quantities(cfg);
            CHECK(dq.max_range * df / speed_of_light == Approx(1.0).epsilon(1e-14));
            CHECK(4.0 * fc * cfg.symbol_duration() * dq.max_velocity / speed_of_light == Approx(1.0).epsilon(1e-14));
        }
    }
    OfdmConfig a;
    OfdmConfig b = a;
    b.subcarrier_spacing_hz *= 2;
    CHECK(derive_quantities(b).max_range == Approx(derive_quantities(a).max_range / 2));
}

TEST_CASE("OfdmConfig validation")
{
    OfdmConfig cfg;
    cfg.subcarrier_spacing_hz = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = OfdmConfig{};
    cfg.n_subcarriers_tot = cfg.n_subcarriers - 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = OfdmConfig{};
    cfg.n_symbols = 0;
    CHECK_THROWS_AS(derive_quantities(cfg), DomainError);
}

TEST_CASE("validate_numerology: admissible spacing interval")
{
    const OfdmConfig cfg = paper_numerology();
    const auto r = validate_numerology(cfg, 2.03e-6, 435.0);
    CHECK(r.isi_free);
    CHECK(r.ici_free);
    CHECK(r.feasible());
    CHECK(r.min_spacing_hz == Approx(4350.0));
    CHECK(r.max_spacing_hz == Approx(34.4e3).epsilon(0.005));
    CHECK_FALSE(r.interval_empty);
}

TEST_CASE("validate_numerology: trivial and failing cases")
{
    OfdmConfig cfg;
    CHECK(validate_numerology(cfg, 0.0, 0.0).feasible());

    cfg.subcarrier_spacing_hz = 40e3; // T_cp = 0.07 / 40 kHz = 1.75 us
    const auto r = validate_numerology(cfg, 2.03e-6, 435.0);
    CHECK_FALSE(r.isi_free);
    CHECK(r.ici_free);

    // Upper bound below lower bound: reported, not thrown.
    const auto e = validate_numerology(cfg, 20e-6, 1000.0);
    CHECK(e.interval_empty);
    CHECK_FALSE(e.feasible());

    CHECK_THROWS_AS(validate_numerology(cfg, -1.0, 0.0), DomainError);
}

TEST_CASE("validate_numerology: monotone in subcarrier spacing")
{
    const double tau = 2.03e-6;
    const double nu = 435.0;
    bool ici_seen = false;
    bool isi_lost = false;
    for (double df = 1e3; df <= 100e3; df += 500.0) {
        OfdmConfig cfg;
        cfg.subcarrier_spacing_hz = df;
        const auto r = validate_numerology(cfg, tau, nu);
        if (ici_seen)
            CHECK(r.ici_free); // never turns false again as df grows
        ici_seen = ici_seen || r.ici_free;
        if (isi_lost)
            CHECK_FALSE(r.isi_free); // once lost, larger df never restores it
        isi_lost = isi_lost || !r.isi_free;
    }
    CHECK(ici_seen);
    CHECK(isi_lost);
}

TEST_CASE("validate_numerology: configurable ICI factor")
{
    OfdmConfig cfg;
    cfg.subcarrier_spacing_hz = 3000.0;
    CHECK_FALSE(validate_numerology(cfg, 0.0, 435.0).ici_free);
    CHECK(validate_numerology(cfg, 0.0, 435.0, 5.0).ici_free);
}
