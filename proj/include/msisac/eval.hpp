// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// CFAR-style metrics on range-velocity maps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msisac/common.hpp"
#include "msisac/rvm.hpp"

namespace msisac {

struct Bin {
    std::size_t range = 0;
    std::size_t velocity = 0;
    bool operator==(const Bin &) const = default;
    auto operator<=>(const Bin &) const = default;
};

/// SINR requested on a map whose training cells carry no power.
struct UndefinedSinr : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CellSets {
    Bin cut;
    std::vector<Bin> mainlobe; // contains cut
    std::vector<Bin> guard;
    std::vector<Bin> training;
};

struct SinrReport {
    double p_sig = 0.0;
    double p_interference_noise = 0.0;
    double sinr = 0.0;
    double sinr_db = 0.0;
    CellSets cells;
    std::string map_id;
};

struct Peak {
    Bin bin;
    double magnitude = 0.0;
};

struct PeakHint {
    double range = 0.0;    // [m]
    double velocity = 0.0; // [m/s]
};

/// Argmax of |RVM|, either global or within a circular (2r+1)^2 window
/// around the hinted range/velocity. Ties resolve to the first in row-major order.
inline Peak find_peak(const Rvm &rvm, std::optional<PeakHint> hint = std::nullopt, std::size_t radius = 2)
{
    const std::size_t n = rvm.range_bins();
    const std::size_t m = rvm.velocity_bins();
    if (n == 0 || m == 0)
        throw DomainError("find_peak: empty map");
    Peak best;
    double best_power = -1.0;
    auto consider = [&](std::size_t i, std::size_t j) {
        const double p = rvm.power(i, j);
        if (p > best_power) {
            best_power = p;
            best.bin = {i, j};
        }
    };
    if (!hint) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                consider(i, j);
    } else {
        if (radius < 1)
            throw DomainError("find_peak: search radius must be at least 1");
        const std::size_t ci = wrap_bin(rvm.range_bin_of(hint->range), n);
        const std::size_t cj = wrap_bin(rvm.velocity_bin_of(hint->velocity), m);
        const auto r = static_cast<long long>(radius);
        for (long long di = -r; di <= r; ++di)
            for (long long dj = -r; dj <= r; ++dj)
                consider(wrap_bin(static_cast<double>(static_cast<long long>(ci) + di), n),
                         wrap_bin(static_cast<double>(static_cast<long long>(cj) + dj), m));
    }
    if (!(best_power > 0.0))
        throw DomainError("find_peak: map is identically zero in the search region");
    best.magnitude = std::sqrt(best_power);
    return best;
}

/// Concentric square sets around the CUT with circular index arithmetic:
/// mainlobe = Chebyshev distance <= r_m, guard = (r_m, r_g], training = (r_g, r_t].
inline CellSets build_cell_sets(Bin cut, std::size_t mainlobe_radius, std::size_t guard_radius,
                                std::size_t training_radius, std::size_t range_bins, std::size_t velocity_bins)
{
    if (!(mainlobe_radius < guard_radius && guard_radius < training_radius))
        throw DomainError("build_cell_sets: require mainlobe < guard < training radius");
    const std::size_t span = 2 * training_radius + 1;
    if (span > range_bins || span > velocity_bins)
        throw DomainError("build_cell_sets: training ring exceeds the map");
    if (cut.range >= range_bins || cut.velocity >= velocity_bins)
        throw DomainError("build_cell_sets: CUT outside the map");

    CellSets cs;
    cs.cut = cut;
    const auto r = static_cast<long long>(training_radius);
    for (long long di = -r; di <= r; ++di)
        for (long long dj = -r; dj <= r; ++dj) {
            const auto ring = static_cast<std::size_t>(std::max(std::llabs(di), std::llabs(dj)));
            const Bin b{wrap_bin(static_cast<double>(static_cast<long long>(cut.range) + di), range_bins),
                        wrap_bin(static_cast<double>(static_cast<long long>(cut.velocity) + dj), velocity_bins)};
            if (ring <= mainlobe_radius)
                cs.mainlobe.push_back(b);
            else if (ring <= guard_radius)
                cs.guard.push_back(b);
            else
                cs.training.push_back(b);
        }
    return cs;
}

inline CellSets build_cell_sets(Bin cut, const Rvm &rvm, std::size_t mainlobe_radius = 1, std::size_t guard_radius = 3,
                                std::size_t training_radius = 5)
{
    return build_cell_sets(cut, mainlobe_radius, guard_radius, training_radius, rvm.range_bins(),
                           rvm.velocity_bins());
}

/// P_sig = sum over the mainlobe of |RVM|^2, P_I+N = mean over training cells.
inline SinrReport sinr(const Rvm &rvm, const CellSets &cells, std::string map_id = {})
{
    if (cells.training.empty())
        throw UndefinedSinr("sinr: no training cells");
    SinrReport rep;
    for (const auto &b : cells.mainlobe)
        rep.p_sig += rvm.power(b.range, b.velocity);
    double acc = 0.0;
    for (const auto &b : cells.training)
        acc += rvm.power(b.range, b.velocity);
    rep.p_interference_noise = acc / static_cast<double>(cells.training.size());
    if (!(rep.p_interference_noise > 0.0))
        throw UndefinedSinr("sinr: training cells carry zero power");
    rep.sinr = rep.p_sig / rep.p_interference_noise;
    rep.sinr_db = 10.0 * std::log10(rep.sinr);
    rep.cells = cells;
    rep.map_id = std::move(map_id);
    return rep;
}

namespace detail {

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw DomainError("median of an empty set");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace detail

/// Median |RVM|^2 over all cells not listed in `exclusions`.
inline double noise_floor(const Rvm &rvm, const std::vector<Bin> &exclusions)
{
    const std::size_t n = rvm.range_bins();
    const std::size_t m = rvm.velocity_bins();
    std::vector<std::uint8_t> skip(n * m, 0);
    for (const auto &b : exclusions)
        if (b.range < n && b.velocity < m)
            skip[b.range * m + b.velocity] = 1;
    std::vector<double> powers;
    powers.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (!skip[i * m + j])
                powers.push_back(rvm.power(i, j));
    if (powers.empty())
        throw DomainError("noise_floor: every cell is excluded");
    return detail::median(std::move(powers));
}

struct RidgeMetric {
    double range_cut_median_db = 0.0;    // along range, at the target's velocity bin
    double velocity_cut_median_db = 0.0; // along velocity, at the target's range bin
};

inline constexpr double ridge_floor_db = -300.0;

/// Median sidelobe power of the two axis cuts through `target`, excluding the
/// +-1 bin mainlobe, in dB relative to the target cell power.
inline RidgeMetric ridge_metric(const Rvm &rvm, Bin target)
{
    const std::size_t n = rvm.range_bins();
    const std::size_t m = rvm.velocity_bins();
    if (target.range >= n || target.velocity >= m)
        throw DomainError("ridge_metric: target bin outside the map");
    const double peak = rvm.power(target.range, target.velocity);
    if (!(peak > 0.0))
        throw DomainError("ridge_metric: target cell has zero power");

    std::vector<double> range_side;
    for (std::size_t i = 0; i < n; ++i)
        if (circular_distance(i, target.range, n) > 1)
            range_side.push_back(rvm.power(i, target.velocity));
    std::vector<double> vel_side;
    for (std::size_t j = 0; j < m; ++j)
        if (circular_distance(j, target.velocity, m) > 1)
            vel_side.push_back(rvm.power(target.range, j));

    RidgeMetric r;
    r.range_cut_median_db = range_side.empty() ? ridge_floor_db : to_db(detail::median(range_side) / peak, ridge_floor_db);
    r.velocity_cut_median_db = vel_side.empty() ? ridge_floor_db : to_db(detail::median(vel_side) / peak, ridge_floor_db);
    return r;
}

} // namespace msisac
