// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// OFDM numerology, derived sensing quantities and ISI/ICI feasibility.

#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include "msisac/common.hpp"

namespace msisac {

enum class Window { none, hamming };

/// OFDM frame numerology. The sensing block occupies subcarriers [0, N) and
/// symbols [0, M) of the full N_tot x M_tot frame.
struct OfdmConfig {
    double carrier_hz = 4.7e9;
    double subcarrier_spacing_hz = 30e3;
    std::size_t n_subcarriers = 512;   // N
    std::size_t n_symbols = 128;       // M
    std::size_t n_subcarriers_tot = 0; // N_tot, 0 means N
    std::size_t n_symbols_tot = 0;     // M_tot, 0 means M
    double cp_fraction = 0.07;         // T_cp / T
    Window window = Window::hamming;

    [[nodiscard]] std::size_t full_subcarriers() const { return n_subcarriers_tot ? n_subcarriers_tot : n_subcarriers; }
    [[nodiscard]] std::size_t full_symbols() const { return n_symbols_tot ? n_symbols_tot : n_symbols; }

    [[nodiscard]] double elementary_symbol() const { return 1.0 / subcarrier_spacing_hz; }       // T
    [[nodiscard]] double cyclic_prefix() const { return cp_fraction / subcarrier_spacing_hz; }   // T_cp
    [[nodiscard]] double symbol_duration() const { return elementary_symbol() + cyclic_prefix(); } // T_sym
    [[nodiscard]] double wavelength() const { return speed_of_light / carrier_hz; }

    void validate() const
    {
        if (!(subcarrier_spacing_hz > 0.0))
            throw DomainError("OfdmConfig: subcarrier spacing must be positive");
        if (!(carrier_hz > 0.0))
            throw DomainError("OfdmConfig: carrier frequency must be positive");
        if (n_subcarriers < 1 || n_symbols < 1)
            throw DomainError("OfdmConfig: N and M must be at least 1");
        if (n_subcarriers > full_subcarriers() || n_symbols > full_symbols())
            throw DomainError("OfdmConfig: sensing block exceeds the full frame (N <= N_tot, M <= M_tot)");
        if (!(cp_fraction >= 0.0))
            throw DomainError("OfdmConfig: cp_fraction must be non-negative");
    }
};

/// Full-size reference numerology (f_c = 4.7 GHz, 30 kHz, 3276 x 280).
inline OfdmConfig paper_numerology()
{
    OfdmConfig cfg;
    cfg.n_subcarriers = 3276;
    cfg.n_symbols = 280;
    return cfg;
}

/// Reduced grid for fast experiments; same carrier and spacing.
inline OfdmConfig desk_numerology()
{
    OfdmConfig cfg;
    cfg.n_subcarriers = 512;
    cfg.n_symbols = 128;
    return cfg;
}

struct DerivedQuantities {
    double max_range = 0.0;     // d_max = c / delta_f [m]
    double max_velocity = 0.0;  // v_max = c / (4 f_c T_sym) [m/s]
    double range_bin = 0.0;     // d_max / N [m]
    double velocity_bin = 0.0;  // 2 v_max / M [m/s]
    double wavelength = 0.0;    // c / f_c [m]
};

inline DerivedQuantities derive_quantities(const OfdmConfig &cfg)
{
    cfg.validate();
    DerivedQuantities dq;
    dq.max_range = speed_of_light / cfg.subcarrier_spacing_hz;
    dq.max_velocity = speed_of_light / (4.0 * cfg.carrier_hz * cfg.symbol_duration());
    dq.range_bin = dq.max_range / static_cast<double>(cfg.n_subcarriers);
    dq.velocity_bin = 2.0 * dq.max_velocity / static_cast<double>(cfg.n_symbols);
    dq.wavelength = cfg.wavelength();
    return dq;
}

struct ConditionReport {
    bool isi_free = false;  // T_cp > delay spread
    bool ici_free = false;  // delta_f >= ici_factor * max |Doppler|
    double delay_spread = 0.0;
    double max_doppler = 0.0;
    double cyclic_prefix = 0.0;
    double min_spacing_hz = 0.0;                                     // ici_factor * nu_max
    double max_spacing_hz = std::numeric_limits<double>::infinity(); // cp_fraction / tau_ms
    bool interval_empty = false;

    [[nodiscard]] bool feasible() const { return isi_free && ici_free; }
};

/// Checks the CP against the multi-static delay spread and the subcarrier
/// spacing against the largest Doppler shift. An empty admissible interval is
/// reported, not thrown.
inline ConditionReport validate_numerology(const OfdmConfig &cfg, double delay_spread, double max_doppler,
                                           double ici_factor = 10.0)
{
    cfg.validate();
    if (!(delay_spread >= 0.0) || !(max_doppler >= 0.0) || !(ici_factor > 0.0))
        throw DomainError("validate_numerology: delay spread, Doppler and ICI factor must be non-negative");

    ConditionReport r;
    r.delay_spread = delay_spread;
    r.max_doppler = max_doppler;
    r.cyclic_prefix = cfg.cyclic_prefix();
    r.isi_free = r.cyclic_prefix > delay_spread || delay_spread == 0.0;
    r.ici_free = cfg.subcarrier_spacing_hz >= ici_factor * max_doppler;
    r.min_spacing_hz = ici_factor * max_doppler;
    if (delay_spread > 0.0)
        r.max_spacing_hz = cfg.cp_fraction / delay_spread;
    r.interval_empty = r.min_spacing_hz > r.max_spacing_hz;
    return r;
}

inline const char *to_string(Window w) { return w == Window::hamming ? "hamming" : "none"; }

} // namespace msisac
