// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Reciprocal filtering, range-velocity map extraction and ghost prediction.
//
// Map layout: row i is bistatic range i * c / (N df); column j is bistatic
// velocity (j - M/2) * 2 v_max / M, i.e. the slow-time FFT output is shifted
// so that zero velocity sits at column M/2. Scaling: IFFT over subcarriers
// divided by N, FFT over symbols divided by M, so a unit-gain on-grid target
// with a full mask and no window peaks at exactly 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <vector>

#include "msisac/common.hpp"
#include "msisac/fft.hpp"
#include "msisac/numerology.hpp"

namespace msisac {

/// Hat_H[n,m] = Y[n,m] / X[n,m] on the pilot support, 0 elsewhere.
inline CMatrix reciprocal_filter(const CMatrix &y, const CMatrix &x)
{
    require_same_shape(y, x, "reciprocal_filter");
    CMatrix h(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const cdouble xv = x.data()[i];
        if (xv != cdouble{})
            h.data()[i] = y.data()[i] / xv;
    }
    return h;
}

/// Symmetric taper of length n.
inline std::vector<double> window_coefficients(Window w, std::size_t n)
{
    std::vector<double> c(n, 1.0);
    if (w == Window::hamming && n > 1)
        for (std::size_t i = 0; i < n; ++i)
            c[i] = 0.54 - 0.46 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n - 1));
    return c;
}

struct Rvm {
    CMatrix values;                  // N x M
    std::vector<double> range_axis;  // [m]
    std::vector<double> velocity_axis; // [m/s]
    double range_step = 0.0;    // c / (N df)
    double velocity_step = 0.0; // 2 v_max / M
    bool window_applied = false;

    [[nodiscard]] std::size_t range_bins() const { return values.rows(); }
    [[nodiscard]] std::size_t velocity_bins() const { return values.cols(); }

    /// Fractional range bin of a bistatic range (not wrapped).
    [[nodiscard]] double range_bin_of(double range) const { return range / range_step; }
    /// Fractional column of a bistatic velocity (not wrapped).
    [[nodiscard]] double velocity_bin_of(double velocity) const
    {
        return velocity / velocity_step + static_cast<double>(velocity_bins() / 2);
    }

    [[nodiscard]] double power(std::size_t i, std::size_t j) const { return std::norm(values(i, j)); }
};

/// Nearest bin index, wrapped onto [0, n).
inline std::size_t wrap_bin(double fractional, std::size_t n)
{
    const auto k = static_cast<long long>(std::llround(fractional));
    const auto nn = static_cast<long long>(n);
    return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

/// Circular distance between two bin indices on an axis of length n.
inline std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n)
{
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
}

/// Taper, N-point IFFT over subcarriers, M-point FFT over symbols, velocity shift.
inline Rvm compute_rvm(const CMatrix &h_hat, Window window, const OfdmConfig &cfg)
{
    const DerivedQuantities dq = derive_quantities(cfg);
    const std::size_t n = cfg.n_subcarriers;
    const std::size_t m = cfg.n_symbols;
    require_same_shape(h_hat, CMatrix(n, m), "compute_rvm");

    CMatrix work = h_hat;
    if (window != Window::none) {
        const auto wf = window_coefficients(window, n);
        const auto wt = window_coefficients(window, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                work(i, k) *= wf[i] * wt[k];
    }
    fft::along_rows(work, fft::Direction::inverse);
    fft::along_cols(work, fft::Direction::forward);

    Rvm r;
    r.window_applied = window != Window::none;
    r.range_step = dq.range_bin;
    r.velocity_step = dq.velocity_bin;
    r.values = CMatrix(n, m);
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
    const std::size_t half = m / 2;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k)
            r.values(i, (k + half) % m) = work(i, k) * scale;

    r.range_axis.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        r.range_axis[i] = static_cast<double>(i) * dq.range_bin;
    r.velocity_axis.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        r.velocity_axis[j] = (static_cast<double>(j) - static_cast<double>(half)) * dq.velocity_bin;
    return r;
}

inline Rvm compute_rvm(const CMatrix &h_hat, const OfdmConfig &cfg) { return compute_rvm(h_hat, cfg.window, cfg); }

enum class GhostDomain { range, velocity };

struct Ghost {
    double range = 0.0;    // [m]
    double velocity = 0.0; // [m/s]
    int harmonic = 0;      // gamma
    double level = 0.0;    // comb harmonic amplitude relative to the true target
};

struct GhostPrediction {
    GhostDomain domain = GhostDomain::range;
    std::vector<Ghost> ghosts;
};

/// Harmonic gain |sum_{q<N_a} e^{-j 2 pi gamma q / N_p}| / N_a of a comb.
inline double comb_harmonic_level(int harmonic, std::size_t period, std::size_t n_active)
{
    cdouble acc{};
    for (std::size_t q = 0; q < n_active; ++q)
        acc += std::polar(1.0, -two_pi * harmonic * static_cast<double>(q) / static_cast<double>(period));
    return std::abs(acc) / static_cast<double>(n_active);
}

/// Ghost positions target +- gamma * (span / N_p), where the span is d_max for
/// range and 2 v_max for velocity. Range ghosts must fall in (0, d_max);
/// velocity ghosts in [-v_max, v_max), which, because the spacing divides the
/// span, is the same set as wrapping every harmonic onto the circular axis.
/// Harmonics whose comb coefficient vanishes (gamma * N_a = 0 mod N_p, e.g.
/// even gamma for N_a = N_p / 2) are not emitted.
inline GhostPrediction predict_ghosts(double target_range, double target_velocity, std::size_t period,
                                      GhostDomain domain, const DerivedQuantities &dq, std::size_t n_active = 1)
{
    if (period < 1)
        throw DomainError("predict_ghosts: N_p must be at least 1");
    if (n_active < 1 || n_active > period)
        throw DomainError("predict_ghosts: require 1 <= N_a <= N_p");
    GhostPrediction out;
    out.domain = domain;
    const int p = static_cast<int>(period);
    for (int g = -p; g <= p; ++g) {
        if (g == 0 || (static_cast<std::size_t>(std::abs(g)) * n_active) % period == 0)
            continue;
        Ghost gh;
        gh.harmonic = g;
        gh.range = target_range;
        gh.velocity = target_velocity;
        gh.level = comb_harmonic_level(g, period, n_active);
        if (domain == GhostDomain::range) {
            gh.range = target_range + g * dq.max_range / static_cast<double>(period);
            if (gh.range > 0.0 && gh.range < dq.max_range)
                out.ghosts.push_back(gh);
        } else {
            gh.velocity = target_velocity + g * 2.0 * dq.max_velocity / static_cast<double>(period);
            if (gh.velocity >= -dq.max_velocity && gh.velocity < dq.max_velocity)
                out.ghosts.push_back(gh);
        }
    }
    return out;
}

enum class ProfileAxis { range, velocity };

/// |RVM| along one axis: a range cut is column `at_bin` (length N), a velocity
/// cut is row `at_bin` (length M).
inline std::vector<double> profile_cut(const Rvm &rvm, ProfileAxis axis, std::size_t at_bin)
{
    std::vector<double> out;
    if (axis == ProfileAxis::range) {
        if (at_bin >= rvm.velocity_bins())
            throw DomainError("profile_cut: velocity bin out of range");
        out.reserve(rvm.range_bins());
        for (std::size_t i = 0; i < rvm.range_bins(); ++i)
            out.push_back(std::abs(rvm.values(i, at_bin)));
    } else {
        if (at_bin >= rvm.range_bins())
            throw DomainError("profile_cut: range bin out of range");
        out.reserve(rvm.velocity_bins());
        for (std::size_t j = 0; j < rvm.velocity_bins(); ++j)
            out.push_back(std::abs(rvm.values(at_bin, j)));
    }
    return out;
}

/// Magnitude profile in dB relative to its maximum.
inline std::vector<double> to_db_relative(const std::vector<double> &magnitude, double floor_db = -300.0)
{
    double peak = 0.0;
    for (double v : magnitude)
        peak = std::max(peak, v);
    std::vector<double> out;
    out.reserve(magnitude.size());
    for (double v : magnitude)
        out.push_back(peak > 0.0 ? to_db(v * v / (peak * peak), floor_db) : floor_db);
    return out;
}

/// Indices of circular local maxima whose magnitude is within `below_peak_db` of the maximum.
inline std::vector<std::size_t> local_maxima(const std::vector<double> &magnitude, double below_peak_db)
{
    std::vector<std::size_t> out;
    const std::size_t n = magnitude.size();
    if (n == 0)
        return out;
    double peak = 0.0;
    for (double v : magnitude)
        peak = std::max(peak, v);
    const double threshold = peak * std::pow(10.0, -below_peak_db / 20.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = magnitude[i];
        if (v <= 0.0 || v < threshold)
            continue;
        const double prev = magnitude[(i + n - 1) % n];
        const double next = magnitude[(i + 1) % n];
        if (v >= prev && v > next)
            out.push_back(i);
    }
    return out;
}

} // namespace msisac
