// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msisac/channel.hpp"
#include "oracles.hpp"

using namespace msisac;
using Catch::Approx;

namespace {

OfdmConfig small_grid(std::size_t n, std::size_t m, std::size_t n_tot = 0, std::size_t m_tot = 0)
{
    OfdmConfig cfg;
    cfg.n_subcarriers = n;
    cfg.n_symbols = m;
    cfg.n_subcarriers_tot = n_tot;
    cfg.n_symbols_tot = m_tot;
    return cfg;
}

ChannelPath path(cdouble alpha, double tau, double nu, std::size_t tx = 0)
{
    ChannelPath p;
    p.alpha = alpha;
    p.tau = tau;
    p.nu = nu;
    p.tx_index = tx;
    return p;
}

CMatrix scaled(const CMatrix &m, cdouble s)
{
    CMatrix out = m;
    for (auto &v : out)
        v *= s;
    return out;
}

} // namespace

TEST_CASE("steering vectors")
{
    const std::size_t n = 64;
    const double df = 30e3;
    for (const auto &v : steering_delay(0.0, n, df))
        CHECK(v == cdouble{1.0, 0.0});

    const auto dft_col = steering_delay(1.0 / (n * df), n, df);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(dft_col[i].real() == Approx(std::cos(-two_pi * i / n)).margin(1e-12));
        CHECK(dft_col[i].imag() == Approx(std::sin(-two_pi * i / n)).margin(1e-12));
    }
    const auto pos = steering_delay(0.37e-6, n, df);
    const auto neg = steering_delay(-0.37e-6, n, df);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(neg[i] - std::conj(pos[i])) < 1e-12);

    const std::size_t m = 16;
    const double t_sym = 35.0e-6;
    for (const auto &v : steering_doppler(0.0, m, t_sym))
        CHECK(v == cdouble{1.0, 0.0});
    const auto idft_col = steering_doppler(1.0 / (m * t_sym), m, t_sym);
    for (std::size_t k = 0; k < m; ++k) {
        CHECK(idft_col[k].real() == Approx(std::cos(two_pi * k / m)).margin(1e-12));
        CHECK(idft_col[k].imag() == Approx(std::sin(two_pi * k / m)).margin(1e-12));
    }
    for (const auto &v : steering_doppler(123.4, m, t_sym))
        CHECK(std::abs(v) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("channel_matrix: single trivial path")
{
    const auto cfg = small_grid(8, 4);
    const CMatrix h = channel_matrix({path(1.0, 0.0, 0.0)}, {}, cfg);
    for (const auto &v : h)
        CHECK(std::abs(v - cdouble{1.0, 0.0}) < 1e-15);
}

TEST_CASE("channel_matrix: matches the triple-loop oracle")
{
    const auto cfg = small_grid(48, 20);
    Rng rng(99);
    std::vector<ChannelPath> paths;
    std::vector<oracle::Path> ref;
    for (int k = 0; k < 7; ++k) {
        const cdouble a = std::polar(rng.uniform(0.1, 2.0), rng.uniform(0, two_pi));
        const double tau = rng.uniform(0, 3e-6);
        const double nu = rng.uniform(-400, 400);
        paths.push_back(path(a, tau, nu));
        ref.push_back({a, tau, nu});
    }
    const CMatrix h = channel_matrix(paths, {}, cfg);
    const auto o = oracle::channel(ref, 48, 20, cfg.subcarrier_spacing_hz, cfg.symbol_duration());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < 48; ++i)
        for (std::size_t j = 0; j < 20; ++j) {
            num += std::norm(h(i, j) - o[i][j]);
            den += std::norm(o[i][j]);
        }
    CHECK(std::sqrt(num / den) < 1e-12);

    // Linearity in alpha.
    auto doubled = paths;
    for (auto &p : doubled)
        p.alpha *= 2.0;
    CHECK(relative_frobenius(channel_matrix(doubled, {}, cfg), scaled(h, 2.0)) < 1e-13);
}

TEST_CASE("channel_matrix: synchronization offsets")
{
    const auto cfg = small_grid(32, 12);
    const std::vector<ChannelPath> paths{path({0.3, 0.4}, 1.1e-6, 120.0), path({-1.0, 0.2}, 0.4e-6, -60.0)};
    const CMatrix base = channel_matrix(paths, {}, cfg);

    SyncOffsets phase_only;
    phase_only.phase = 0.7;
    const CMatrix rotated = channel_matrix(paths, phase_only, cfg);
    CHECK(relative_frobenius(rotated, scaled(base, std::polar(1.0, -0.7))) < 1e-13);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(rotated.data()[i]) == Approx(std::abs(base.data()[i])).epsilon(1e-12));

    // A carrier offset is indistinguishable from a Doppler shift.
    SyncOffsets cfo;
    cfo.freq = 55.0;
    auto shifted = paths;
    for (auto &p : shifted)
        p.nu -= 55.0;
    CHECK(relative_frobenius(channel_matrix(paths, cfo, cfg), channel_matrix(shifted, {}, cfg)) < 1e-12);
}

TEST_CASE("make_pilots: support and power")
{
    const auto cfg = small_grid(16, 8);
    const Mask mask = comb_mask(Axis::frequency, 3, 1, 1, cfg);
    const PilotGrid g = make_pilots(mask, 4.0, 17, 1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask.data()[i])
            CHECK(std::abs(g.symbols.data()[i]) == Approx(2.0));
        else
            CHECK(g.symbols.data()[i] == cdouble{});
    }
    CHECK_THROWS_AS(make_pilots(mask, -1.0, 1), DomainError);
}

TEST_CASE("synthesize_rx: noiseless identities")
{
    const auto cfg = small_grid(32, 16);
    const std::vector<ChannelPath> paths{path({0.5, -0.2}, 0.9e-6, 210.0)};
    const CMatrix h = channel_matrix(paths, {}, cfg);
    PilotGrid ones;
    ones.symbols = CMatrix(32, 16, cdouble{1.0, 0.0});
    CHECK(synthesize_rx({h}, {ones}, 0.0, 1, cfg) == h);

    CHECK_THROWS_AS(synthesize_rx({h, h}, {ones}, 0.0, 1, cfg), DimensionMismatch);
    PilotGrid wrong;
    wrong.symbols = CMatrix(16, 16);
    CHECK_THROWS_AS(synthesize_rx({h}, {wrong}, 0.0, 1, cfg), DimensionMismatch);
}

TEST_CASE("synthesize_rx: disjoint masks isolate transmitters")
{
    const auto cfg = small_grid(40, 20);
    const MaskSet masks = random_2d_masks(2, 0.5, 3, cfg);
    const CMatrix h1 = channel_matrix({path(1.0, 0.7e-6, 100.0)}, {}, cfg);
    const CMatrix h2 = channel_matrix({path({0.0, 3.0}, 1.9e-6, -250.0, 1)}, {}, cfg);
    const PilotGrid x1 = make_pilots(masks.masks[0], 1.0, 8, 0);
    const PilotGrid x2 = make_pilots(masks.masks[1], 10.0, 8, 1);
    PilotGrid off2 = x2;
    off2.symbols = CMatrix(40, 20);

    const CMatrix both = synthesize_rx({h1, h2}, {x1, x2}, 0.0, 1, cfg);
    const CMatrix alone = synthesize_rx({h1, h2}, {x1, off2}, 0.0, 1, cfg);
    for (std::size_t i = 0; i < both.size(); ++i)
        if (masks.masks[0].data()[i])
            CHECK(both.data()[i] == alone.data()[i]);
}

TEST_CASE("synthesize_rx: linear in pilots")
{
    const auto cfg = small_grid(24, 10);
    const CMatrix h = channel_matrix({path({0.2, 0.9}, 0.3e-6, 40.0)}, {}, cfg);
    const PilotGrid x = make_pilots(full_mask(cfg), 1.0, 2);
    PilotGrid x3 = x;
    for (auto &v : x3.symbols)
        v *= cdouble(0.0, 3.0);
    CHECK(relative_frobenius(synthesize_rx({h}, {x3}, 0.0, 1, cfg),
                             scaled(synthesize_rx({h}, {x}, 0.0, 1, cfg), {0.0, 3.0})) < 1e-14);
}

TEST_CASE("synthesize_rx: noise variance N0 * N * df")
{
    const auto cfg = small_grid(512, 256);
    const double n0 = 2.5e-9;
    const double var = noise_variance(n0, cfg);
    CHECK(var == Approx(n0 * 512 * 30e3));
    PilotGrid zero;
    zero.symbols = CMatrix(512, 256);
    const CMatrix y = synthesize_rx({CMatrix(512, 256)}, {zero}, n0, 77, cfg);
    cdouble mean{};
    double power = 0.0;
    for (const auto &v : y) {
        mean += v;
        power += std::norm(v);
    }
    const double cells = 512.0 * 256.0;
    CHECK(std::abs(mean / cells) < 0.01 * std::sqrt(var));
    CHECK(power / cells == Approx(var).epsilon(0.05));

    CHECK(noise_variance(noise_psd_for_snr(20.0, cfg), cfg) == Approx(0.01));
}

TEST_CASE("fast_time_oracle: agrees with the frequency/slow-time model")
{
    const auto cfg = small_grid(40, 10, 64, 16);
    const double t_sym = cfg.symbol_duration();
    const double df = cfg.subcarrier_spacing_hz;

    SECTION("single on-grid path")
    {
        const PathSet paths{{path({0.8, -0.6}, 5.0 / (64 * df), 3.0 / (16 * t_sym))}};
        const std::vector<PilotGrid> pilots{make_pilots(full_mask(cfg), 1.0, 4)};
        const CMatrix ref = synthesize_rx({channel_matrix(paths[0], {}, cfg)}, pilots, 0.0, 0, cfg);
        CHECK(relative_frobenius(fast_time_oracle(paths, pilots, {}, cfg), ref) < 1e-9);
    }

    SECTION("zero paths")
    {
        const PathSet paths{{}};
        const std::vector<PilotGrid> pilots{make_pilots(full_mask(cfg), 1.0, 4)};
        for (const auto &v : fast_time_oracle(paths, pilots, {}, cfg))
            CHECK(v == cdouble{});
    }

    SECTION("two transmitters superpose, offsets included")
    {
        const MaskSet masks = random_2d_masks(2, 0.3, 6, cfg);
        const PathSet paths{{path(1.0, 7.0 / (64 * df), -2.0 / (16 * t_sym)), path({0, 0.5}, 0.2e-6, 80.0)},
                            {path({-0.4, 0.1}, 11.0 / (64 * df), 1.0 / (16 * t_sym), 1)}};
        const std::vector<PilotGrid> pilots{make_pilots(masks.masks[0], 1.0, 2, 0),
                                            make_pilots(masks.masks[1], 2.0, 2, 1)};
        const std::vector<SyncOffsets> offsets{{1.0 / (64 * df), 20.0, 0.3}, {}};
        const CMatrix ref = synthesize_rx(
            {channel_matrix(paths[0], offsets[0], cfg), channel_matrix(paths[1], offsets[1], cfg)}, pilots, 0.0, 0,
            cfg);
        const CMatrix both = fast_time_oracle(paths, pilots, offsets, cfg);
        CHECK(relative_frobenius(both, ref) < 1e-9);

        const CMatrix first = fast_time_oracle({paths[0], {}}, pilots, offsets, cfg);
        const CMatrix second = fast_time_oracle({{}, paths[1]}, pilots, offsets, cfg);
        CMatrix sum = first;
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum.data()[i] += second.data()[i];
        CHECK(relative_frobenius(both, sum) < 1e-12);
    }
}
