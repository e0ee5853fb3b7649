// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Frequency/slow-time signal synthesis.
//
//   Y = sum_l H_l .* X_l + Omega,
//   H_l = sum_k alpha_lk * rot_l * b(tau_lk + dt_l) c(nu_lk - f_off_l)^T,
//
// where b(tau)[n] = exp(-j 2 pi n df tau), c(nu)[m] = exp(+j 2 pi m T_sym nu)
// and rot_l = exp(-j (2 pi f_c dt_l + dphi_l)) is the carrier rotation caused
// by the synchronization offsets (the zero-offset carrier phase already sits
// in alpha). fast_time_oracle() rebuilds the same observation from per-sample
// fast-time synthesis followed by an N_tot-point FFT.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "msisac/alloc.hpp"
#include "msisac/common.hpp"
#include "msisac/fft.hpp"
#include "msisac/numerology.hpp"
#include "msisac/random.hpp"
#include "msisac/scene.hpp"

namespace msisac {

struct PilotGrid {
    CMatrix symbols; // X_l: sqrt(P_l) * unit-modulus on the mask support, 0 elsewhere
    std::size_t tx_index = 0;
    double power = 1.0;
};

/// QPSK pilots with uniformly drawn constellation points on the mask support.
inline PilotGrid make_pilots(const Mask &mask, double power, std::uint64_t seed, std::size_t tx_index = 0)
{
    if (!(power >= 0.0))
        throw DomainError("make_pilots: power must be non-negative");
    PilotGrid g;
    g.tx_index = tx_index;
    g.power = power;
    g.symbols = CMatrix(mask.rows(), mask.cols());
    Rng rng(derive_seed(seed, stream::pilots, tx_index));
    const double amp = std::sqrt(power);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const auto q = rng.uniform_int(4); // drawn for every cell so the stream is mask-independent
        if (mask.data()[i])
            g.symbols.data()[i] = std::polar(amp, pi / 4.0 + static_cast<double>(q) * pi / 2.0);
    }
    return g;
}

struct SyncOffsets {
    double time = 0.0;  // dt_l [s]
    double freq = 0.0;  // f_off_l [Hz]
    double phase = 0.0; // dphi_l [rad]
};

inline std::vector<cdouble> steering_delay(double tau, std::size_t n, double subcarrier_spacing)
{
    std::vector<cdouble> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::polar(1.0, -two_pi * static_cast<double>(i) * subcarrier_spacing * tau);
    return v;
}

inline std::vector<cdouble> steering_doppler(double nu, std::size_t m, double symbol_duration)
{
    std::vector<cdouble> v(m);
    for (std::size_t i = 0; i < m; ++i)
        v[i] = std::polar(1.0, two_pi * static_cast<double>(i) * symbol_duration * nu);
    return v;
}

inline cdouble carrier_rotation(const SyncOffsets &off, const OfdmConfig &cfg)
{
    return std::polar(1.0, -(two_pi * cfg.carrier_hz * off.time + off.phase));
}

/// Rank <= K channel matrix of one transmitter.
inline CMatrix channel_matrix(const std::vector<ChannelPath> &paths, const SyncOffsets &offsets, const OfdmConfig &cfg)
{
    cfg.validate();
    const std::size_t n = cfg.n_subcarriers;
    const std::size_t m = cfg.n_symbols;
    CMatrix h(n, m);
    const cdouble rot = carrier_rotation(offsets, cfg);
    for (const auto &p : paths) {
        const auto b = steering_delay(p.tau + offsets.time, n, cfg.subcarrier_spacing_hz);
        const auto c = steering_doppler(p.nu - offsets.freq, m, cfg.symbol_duration());
        const cdouble a = p.alpha * rot;
        for (std::size_t i = 0; i < n; ++i) {
            const cdouble ab = a * b[i];
            for (std::size_t k = 0; k < m; ++k)
                h(i, k) += ab * c[k];
        }
    }
    return h;
}

/// sigma^2 = N0 * N * delta_f per resource element.
inline double noise_variance(double noise_psd, const OfdmConfig &cfg)
{
    return noise_psd * static_cast<double>(cfg.n_subcarriers) * cfg.subcarrier_spacing_hz;
}

/// Noise PSD giving the requested per-element SNR against a unit-power signal.
inline double noise_psd_for_snr(double snr_db, const OfdmConfig &cfg)
{
    return 1.0 / (from_db(snr_db) * static_cast<double>(cfg.n_subcarriers) * cfg.subcarrier_spacing_hz);
}

/// Y = sum_l H_l .* X_l + Omega with Omega ~ CN(0, N0 N df) i.i.d.; N0 = 0 is noiseless.
inline CMatrix synthesize_rx(const std::vector<CMatrix> &channels, const std::vector<PilotGrid> &pilots,
                             double noise_psd, std::uint64_t seed, const OfdmConfig &cfg)
{
    cfg.validate();
    if (channels.size() != pilots.size())
        throw DimensionMismatch("synthesize_rx: number of channel matrices and pilot grids differ");
    if (!(noise_psd >= 0.0))
        throw DomainError("synthesize_rx: noise PSD must be non-negative");
    CMatrix y(cfg.n_subcarriers, cfg.n_symbols);
    for (std::size_t l = 0; l < channels.size(); ++l) {
        require_same_shape(channels[l], y, "synthesize_rx: H_l");
        require_same_shape(pilots[l].symbols, y, "synthesize_rx: X_l");
        for (std::size_t i = 0; i < y.size(); ++i)
            y.data()[i] += channels[l].data()[i] * pilots[l].symbols.data()[i];
    }
    if (noise_psd > 0.0) {
        const double var = noise_variance(noise_psd, cfg);
        Rng rng(derive_seed(seed, stream::noise));
        for (auto &v : y)
            v += rng.complex_normal(var);
    }
    return y;
}

/// Sample-level reference: synthesizes y[i, m] over the full N_tot x M_tot
/// frame, FFTs along fast time (scaled by 1/sqrt(N_tot)) and returns the
/// N x M sensing block. Data-bearing resources are left empty. Intended for
/// small grids; the cost is O(L K M_tot N_tot N).
inline CMatrix fast_time_oracle(const PathSet &paths, const std::vector<PilotGrid> &pilots,
                                const std::vector<SyncOffsets> &offsets, const OfdmConfig &cfg)
{
    cfg.validate();
    if (paths.size() != pilots.size())
        throw DimensionMismatch("fast_time_oracle: number of path lists and pilot grids differ");
    if (!offsets.empty() && offsets.size() != pilots.size())
        throw DimensionMismatch("fast_time_oracle: number of offsets and pilot grids differ");
    const std::size_t n_tot = cfg.full_subcarriers();
    const std::size_t m_tot = cfg.full_symbols();
    const std::size_t n = cfg.n_subcarriers;
    const std::size_t m = cfg.n_symbols;
    const double df = cfg.subcarrier_spacing_hz;
    const double t_sym = cfg.symbol_duration();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_tot));

    CMatrix fast(n_tot, m_tot); // rows: fast-time sample i, cols: symbol
    std::vector<cdouble> z(n);
    for (std::size_t l = 0; l < paths.size(); ++l) {
        require_same_shape(pilots[l].symbols, CMatrix(n, m), "fast_time_oracle: X_l");
        const SyncOffsets off = offsets.empty() ? SyncOffsets{} : offsets[l];
        const cdouble rot = carrier_rotation(off, cfg);
        for (const auto &p : paths[l]) {
            const double tau = p.tau + off.time;
            // Symbols past M carry only data, which is excluded from sensing.
            for (std::size_t sym = 0; sym < m; ++sym) {
                const cdouble slow = p.alpha * rot *
                                     std::polar(1.0, two_pi * static_cast<double>(sym) * t_sym * (p.nu - off.freq));
                for (std::size_t sc = 0; sc < n; ++sc)
                    z[sc] = pilots[l].symbols(sc, sym) *
                            std::polar(1.0, -two_pi * static_cast<double>(sc) * df * tau);
                for (std::size_t i = 0; i < n_tot; ++i) {
                    cdouble acc{};
                    for (std::size_t sc = 0; sc < n; ++sc) {
                        const auto phase = static_cast<double>((i * sc) % n_tot) / static_cast<double>(n_tot);
                        acc += z[sc] * std::polar(1.0, two_pi * phase);
                    }
                    fast(i, sym) += slow * scale * acc;
                }
            }
        }
    }

    fft::along_rows(fast, fft::Direction::forward);
    CMatrix y(n, m);
    for (std::size_t sc = 0; sc < n; ++sc)
        for (std::size_t sym = 0; sym < m; ++sym)
            y(sc, sym) = fast(sc, sym) * scale;
    return y;
}

} // namespace msisac
