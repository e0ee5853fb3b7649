// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Planar scenario geometry and per TX-RX pair bistatic path parameters.
//
// Sign convention: a scatterer closing on the TX/RX pair (bistatic range
// shrinking) produces a positive Doppler shift, nu = -(1/lambda) d(BSD)/dt,
// and positive bistatic velocity v = nu * lambda / 2.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "msisac/common.hpp"
#include "msisac/numerology.hpp"
#include "msisac/random.hpp"

namespace msisac {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    bool operator==(const Point2 &) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct TargetState {
    Point2 position;
    double speed = 0.0;   // [m/s]
    double heading = 0.0; // [rad], direction of motion
    cdouble reflectivity{1.0, 0.0};

    [[nodiscard]] Point2 velocity() const { return {speed * std::cos(heading), speed * std::sin(heading)}; }
};

struct ClutterPoint {
    Point2 position;
    cdouble reflectivity{1.0, 0.0};
};

struct Scene {
    double area_edge = 300.0;      // a [m]
    double min_separation = 150.0; // b [m]
    std::vector<Point2> tx;        // L transmitters
    Point2 rx;
    std::vector<TargetState> targets;
    std::vector<ClutterPoint> clutter;

    [[nodiscard]] std::size_t num_tx() const { return tx.size(); }
    [[nodiscard]] std::size_t num_scatterers() const { return targets.size() + clutter.size(); }

    void validate() const
    {
        if (tx.empty())
            throw DomainError("Scene: at least one transmitter required");
        if (!(min_separation >= 0.0) || min_separation > area_edge)
            throw DomainError("Scene: require 0 <= b <= a");
        auto inside = [&](Point2 p) {
            return p.x >= 0.0 && p.x <= area_edge && p.y >= 0.0 && p.y <= area_edge;
        };
        std::vector<Point2> stations = tx;
        stations.push_back(rx);
        for (std::size_t i = 0; i < stations.size(); ++i) {
            if (!inside(stations[i]))
                throw DomainError("Scene: station outside [0, a]^2");
            for (std::size_t j = i + 1; j < stations.size(); ++j)
                if (distance(stations[i], stations[j]) < min_separation * (1.0 - 1e-12))
                    throw DomainError("Scene: stations closer than the minimum separation");
        }
        for (const auto &t : targets) {
            if (!inside(t.position))
                throw DomainError("Scene: target outside [0, a]^2");
            if (!(t.speed >= 0.0))
                throw DomainError("Scene: negative target speed");
        }
        for (const auto &c : clutter)
            if (!inside(c.position))
                throw DomainError("Scene: clutter point outside [0, a]^2");
    }
};

struct ChannelPath {
    std::size_t tx_index = 0;
    std::size_t scatterer_index = 0; // targets first, then clutter
    bool clutter = false;
    cdouble alpha{1.0, 0.0}; // absorbs power, reflectivity, path loss and carrier phase
    double tau = 0.0;        // bistatic delay [s]
    double nu = 0.0;         // bistatic Doppler [Hz]

    [[nodiscard]] double bistatic_range() const { return tau * speed_of_light; }
    [[nodiscard]] double bistatic_velocity(double wavelength) const { return nu * wavelength / 2.0; }
};

using PathSet = std::vector<std::vector<ChannelPath>>; // indexed by TX

/// L transmitters then one receiver, uniform on [0,a]^2 subject to pairwise
/// distance >= b. Rejection sampling restarts the whole draw up to
/// `max_attempts` times.
inline Scene place_stations(std::uint64_t seed, double a, double b, std::size_t num_tx, std::size_t max_attempts = 1000)
{
    if (num_tx < 1)
        throw DomainError("place_stations: L must be at least 1");
    if (!(a >= 0.0) || !(b >= 0.0))
        throw DomainError("place_stations: lengths must be non-negative");
    if (b > a)
        throw InfeasibleGeometry("place_stations: minimum separation exceeds the area edge");

    Rng rng(derive_seed(seed, stream::stations));
    const std::size_t count = num_tx + 1;
    constexpr std::size_t tries_per_point = 200;
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Point2> pts;
        pts.reserve(count);
        bool failed = false;
        while (pts.size() < count && !failed) {
            bool placed = false;
            for (std::size_t t = 0; t < tries_per_point && !placed; ++t) {
                const Point2 p{rng.uniform(0.0, a), rng.uniform(0.0, a)};
                placed = std::all_of(pts.begin(), pts.end(), [&](Point2 q) { return distance(p, q) >= b; });
                if (placed)
                    pts.push_back(p);
            }
            failed = !placed;
        }
        if (!failed) {
            Scene s;
            s.area_edge = a;
            s.min_separation = b;
            s.rx = pts.back();
            pts.pop_back();
            s.tx = std::move(pts);
            return s;
        }
    }
    throw InfeasibleGeometry("place_stations: could not place stations within the attempt budget");
}

inline double bistatic_delay(Point2 tx, Point2 rx, Point2 p)
{
    return (distance(tx, p) + distance(p, rx)) / speed_of_light;
}

struct BistaticAngles {
    double beta = 0.0; // bistatic angle at the scatterer [rad]
    double phi = 0.0;  // motion direction relative to the inward bisector [rad]
};

inline BistaticAngles bistatic_angles(Point2 tx, Point2 rx, const TargetState &target)
{
    const Point2 to_tx = tx - target.position;
    const Point2 to_rx = rx - target.position;
    const double r_tx = norm(to_tx);
    const double r_rx = norm(to_rx);
    constexpr double eps = 1e-9;
    if (r_tx < eps || r_rx < eps)
        throw DegenerateGeometry("bistatic geometry: target coincides with a station");
    const Point2 u_tx = (1.0 / r_tx) * to_tx;
    const Point2 u_rx = (1.0 / r_rx) * to_rx;

    BistaticAngles ang;
    ang.beta = std::acos(std::clamp(dot(u_tx, u_rx), -1.0, 1.0));
    const Point2 bisector = u_tx + u_rx;
    const double bis_norm = norm(bisector);
    if (bis_norm > eps && target.speed > 0.0) {
        const double c = dot(target.velocity(), bisector) / (bis_norm * target.speed);
        ang.phi = std::acos(std::clamp(c, -1.0, 1.0));
    } else {
        ang.phi = pi / 2.0; // bisector undefined on the baseline; Doppler vanishes there anyway
    }
    return ang;
}

/// nu = (2 v / lambda) cos(phi) cos(beta / 2).
inline double bistatic_doppler(Point2 tx, Point2 rx, const TargetState &target, double wavelength)
{
    const BistaticAngles ang = bistatic_angles(tx, rx, target);
    return 2.0 * target.speed / wavelength * std::cos(ang.phi) * std::cos(ang.beta / 2.0);
}

/// Largest TX-scatterer-RX distance inside an a x a square with stations b apart.
inline double max_bistatic_distance(double a, double b)
{
    if (!(a >= 0.0) || !(b >= 0.0) || b > a)
        throw DomainError("max_bistatic_distance: require 0 <= b <= a");
    return a * std::sqrt(2.0) + std::sqrt(a * a + (a - b) * (a - b));
}

/// Worst-case multi-static delay spread (BSD_max - BSD_min) / c with BSD_min = b.
inline double worst_case_delay_spread(double a, double b)
{
    return (max_bistatic_distance(a, b) - b) / speed_of_light;
}

enum class GainModel { unit, inverse_product };

/// One path per (TX, scatterer). |alpha| from the gain model times the
/// scatterer reflectivity; arg(alpha) uniform per seed.
inline PathSet build_paths(const Scene &scene, const OfdmConfig &cfg, GainModel gain, std::uint64_t seed)
{
    scene.validate();
    cfg.validate();
    const double lambda = cfg.wavelength();
    PathSet out(scene.num_tx());
    for (std::size_t l = 0; l < scene.num_tx(); ++l) {
        Rng rng(derive_seed(seed, stream::path_phase, l));
        auto &paths = out[l];
        paths.reserve(scene.num_scatterers());
        const Point2 tx = scene.tx[l];
        auto magnitude = [&](Point2 p) {
            if (gain == GainModel::unit)
                return 1.0;
            const double r_tx = distance(tx, p);
            const double r_rx = distance(p, scene.rx);
            if (r_tx <= 0.0 || r_rx <= 0.0)
                throw DegenerateGeometry("build_paths: scatterer coincides with a station");
            return 1.0 / (r_tx * r_rx);
        };
        std::size_t k = 0;
        for (const auto &t : scene.targets) {
            ChannelPath p;
            p.tx_index = l;
            p.scatterer_index = k++;
            p.tau = bistatic_delay(tx, scene.rx, t.position);
            p.nu = bistatic_doppler(tx, scene.rx, t, lambda);
            p.alpha = magnitude(t.position) * t.reflectivity * std::polar(1.0, rng.uniform(0.0, two_pi));
            paths.push_back(p);
        }
        for (const auto &c : scene.clutter) {
            ChannelPath p;
            p.tx_index = l;
            p.scatterer_index = k++;
            p.clutter = true;
            p.tau = bistatic_delay(tx, scene.rx, c.position);
            p.alpha = magnitude(c.position) * c.reflectivity * std::polar(1.0, rng.uniform(0.0, two_pi));
            paths.push_back(p);
        }
    }
    return out;
}

/// max tau - min tau over all paths of all transmitters.
inline double multistatic_delay_spread(const PathSet &paths)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto &per_tx : paths)
        for (const auto &p : per_tx) {
            lo = std::min(lo, p.tau);
            hi = std::max(hi, p.tau);
        }
    return hi >= lo ? hi - lo : 0.0;
}

inline double max_abs_doppler(const PathSet &paths)
{
    double m = 0.0;
    for (const auto &per_tx : paths)
        for (const auto &p : per_tx)
            m = std::max(m, std::abs(p.nu));
    return m;
}

struct ScatterParams {
    std::size_t num_targets = 5;
    std::size_t num_clutter = 50;
    double max_speed = 13.9;        // [m/s]
    double clutter_amplitude = 1.0; // |reflectivity| of clutter relative to targets
    double keep_out = 1.0;          // minimum scatterer-station distance [m]
};

/// Fills a station skeleton with uniformly drawn targets and clutter.
inline void populate_scatterers(Scene &scene, const ScatterParams &params, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, stream::scatterers));
    const double a = scene.area_edge;
    auto draw_point = [&] {
        for (;;) {
            const Point2 p{rng.uniform(0.0, a), rng.uniform(0.0, a)};
            bool clear = distance(p, scene.rx) >= params.keep_out;
            for (const auto &t : scene.tx)
                clear = clear && distance(p, t) >= params.keep_out;
            if (clear)
                return p;
        }
    };
    scene.targets.clear();
    scene.clutter.clear();
    for (std::size_t k = 0; k < params.num_targets; ++k) {
        TargetState t;
        t.position = draw_point();
        t.speed = rng.uniform(0.0, params.max_speed);
        t.heading = rng.uniform(0.0, two_pi);
        scene.targets.push_back(t);
    }
    for (std::size_t k = 0; k < params.num_clutter; ++k)
        scene.clutter.push_back({draw_point(), cdouble{params.clutter_amplitude, 0.0}});
}

} // namespace msisac
