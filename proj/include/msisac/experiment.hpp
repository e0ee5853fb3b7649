// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Experiment configuration (JSON) and the command implementations behind the
// CLI. The configuration schema is described in README.md.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "msisac/alloc.hpp"
#include "msisac/eval.hpp"
#include "msisac/io.hpp"
#include "msisac/numerology.hpp"
#include "msisac/pipeline.hpp"
#include "msisac/scene.hpp"

namespace msisac {

using json = nlohmann::json;

/// Malformed or inconsistent configuration; the message names the line or field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SceneMode { random, explicit_positions, paths };

struct DirectPath {
    std::size_t tx = 0;
    double range = 0.0;    // bistatic range [m]
    double velocity = 0.0; // bistatic velocity [m/s]
    double amplitude = 1.0;
    double phase = 0.0; // [rad]
    bool clutter = false;
};

struct SceneSpec {
    SceneMode mode = SceneMode::random;
    double area_edge = 300.0;
    double min_separation = 150.0;
    std::size_t num_tx = 2;
    ScatterParams scatter;
    GainModel gain = GainModel::unit;
    Scene scene;                  // explicit positions
    std::vector<DirectPath> paths; // direct bistatic entries
};

struct AllocationSpec {
    Scheme scheme = Scheme::random_2d_partition; // partition vs Bernoulli is decided by rho
    Axis axis = Axis::frequency;
    std::size_t period = 12;
    std::size_t n_active = 1;
    std::optional<double> rho;
    std::optional<std::uint64_t> seed;
};

struct SweepSpec {
    std::vector<double> rho;
    std::vector<double> power_ratio_db; // -inf switches the interferers off
    std::vector<std::uint64_t> seeds;
    std::size_t threads = 0; // 0: hardware concurrency
    std::size_t mainlobe_radius = 1;
    std::size_t guard_radius = 3;
    std::size_t training_radius = 5;
};

struct GhostSpec {
    std::optional<double> range;
    std::optional<double> velocity;
    std::optional<std::size_t> period;
    std::optional<std::size_t> n_active;
    bool range_domain = true;
    bool velocity_domain = true;
};

struct OutputSpec {
    std::string dir;
    bool maps = true;
    bool profiles = true;
    bool masks = false;
    bool complex_maps = false;
};

struct ExperimentConfig {
    std::string preset = "desk";
    OfdmConfig ofdm = desk_numerology();
    std::uint64_t seed = 1;
    SceneSpec scene;
    AllocationSpec allocation;
    std::vector<double> powers_db;   // per TX relative to TX1; -inf is off
    std::optional<double> snr_db;    // nullopt: noiseless
    std::optional<SweepSpec> sweep;
    GhostSpec ghosts;
    OutputSpec outputs;
    json effective = json::object(); // configuration as hashed into sidecars

    [[nodiscard]] std::size_t num_tx() const;
};

struct Overrides {
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
};

namespace detail {

/// Read-only view of a JSON object that records which keys were consumed so
/// unknown (typically misspelled) keys can be reported.
class Node {
public:
    Node(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail("expected an object");
    }

    [[nodiscard]] bool has(const std::string &key) const
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    [[nodiscard]] const json &raw(const std::string &key) const
    {
        seen_.insert(key);
        return j_.at(key);
    }

    [[nodiscard]] std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string &msg) const
    {
        throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + msg);
    }

    [[noreturn]] void fail(const std::string &key, const std::string &msg) const
    {
        throw ConfigError("field '" + field(key) + "': " + msg);
    }

    double number(const std::string &key, double fallback) const
    {
        if (!has(key))
            return fallback;
        const json &v = raw(key);
        if (!v.is_number())
            fail(key, "expected a number");
        return v.get<double>();
    }

    std::uint64_t unsigned_int(const std::string &key, std::uint64_t fallback) const
    {
        if (!has(key))
            return fallback;
        return as_unsigned(raw(key), field(key));
    }

    bool boolean(const std::string &key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const json &v = raw(key);
        if (!v.is_boolean())
            fail(key, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string &key, const std::string &fallback) const
    {
        if (!has(key))
            return fallback;
        const json &v = raw(key);
        if (!v.is_string())
            fail(key, "expected a string");
        return v.get<std::string>();
    }

    Node child(const std::string &key) const
    {
        seen_.insert(key);
        return {j_.at(key), field(key)};
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("field '" + field(it.key()) + "': unknown key");
    }

    static std::uint64_t as_unsigned(const json &v, const std::string &where)
    {
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError("field '" + where + "': expected a non-negative integer");
    }

private:
    const json &j_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

inline Point2 parse_point(const json &v, const std::string &where)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("field '" + where + "': expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline cdouble parse_complex(const json &v, const std::string &where)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("field '" + where + "': expected a number or [re, im]");
}

/// A dB value, or "off" for a switched-off transmitter.
inline double parse_db(const json &v, const std::string &where)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "off")
        return -std::numeric_limits<double>::infinity();
    throw ConfigError("field '" + where + "': expected a number or \"off\"");
}

inline OfdmConfig preset_numerology(const std::string &name, const std::string &where)
{
    if (name == "desk")
        return desk_numerology();
    if (name == "paper")
        return paper_numerology();
    throw ConfigError("field '" + where + "': unknown preset \"" + name + "\" (expected desk or paper)");
}

inline void parse_ofdm(const Node &n, OfdmConfig &cfg)
{
    cfg.carrier_hz = n.number("carrier_hz", cfg.carrier_hz);
    cfg.subcarrier_spacing_hz = n.number("subcarrier_spacing_hz", cfg.subcarrier_spacing_hz);
    cfg.n_subcarriers = n.unsigned_int("n_subcarriers", cfg.n_subcarriers);
    cfg.n_symbols = n.unsigned_int("n_symbols", cfg.n_symbols);
    cfg.n_subcarriers_tot = n.unsigned_int("n_subcarriers_tot", cfg.n_subcarriers_tot);
    cfg.n_symbols_tot = n.unsigned_int("n_symbols_tot", cfg.n_symbols_tot);
    cfg.cp_fraction = n.number("cp_fraction", cfg.cp_fraction);
    const std::string w = n.string("window", to_string(cfg.window));
    if (w == "hamming")
        cfg.window = Window::hamming;
    else if (w == "none")
        cfg.window = Window::none;
    else
        n.fail("window", "expected \"hamming\" or \"none\"");
    n.finish();
    try {
        cfg.validate();
    } catch (const DomainError &e) {
        n.fail(e.what());
    }
}

inline void parse_scene(const Node &n, SceneSpec &s)
{
    const std::string mode = n.string("mode", "random");
    if (mode == "random")
        s.mode = SceneMode::random;
    else if (mode == "explicit")
        s.mode = SceneMode::explicit_positions;
    else if (mode == "paths")
        s.mode = SceneMode::paths;
    else
        n.fail("mode", "expected random, explicit or paths");

    s.area_edge = n.number("area_edge", s.area_edge);
    s.min_separation = n.number("min_separation", s.min_separation);
    s.num_tx = n.unsigned_int("num_tx", s.num_tx);
    s.scatter.num_targets = n.unsigned_int("num_targets", s.scatter.num_targets);
    s.scatter.num_clutter = n.unsigned_int("num_clutter", s.scatter.num_clutter);
    s.scatter.max_speed = n.number("max_speed", s.scatter.max_speed);
    s.scatter.clutter_amplitude = n.number("clutter_amplitude", s.scatter.clutter_amplitude);
    s.scatter.keep_out = n.number("keep_out", s.scatter.keep_out);
    const std::string gain = n.string("gain", "unit");
    if (gain == "unit")
        s.gain = GainModel::unit;
    else if (gain == "inverse_product")
        s.gain = GainModel::inverse_product;
    else
        n.fail("gain", "expected unit or inverse_product");
    if (s.num_tx < 1)
        n.fail("num_tx", "at least one transmitter is required");
    if (!(s.scatter.max_speed >= 0.0))
        n.fail("max_speed", "must be non-negative");

    if (s.mode == SceneMode::explicit_positions) {
        if (!n.has("stations"))
            n.fail("stations", "required when mode is explicit");
        const Node st = n.child("stations");
        if (!st.has("tx") || !st.raw("tx").is_array() || st.raw("tx").empty())
            st.fail("tx", "expected a non-empty list of [x, y]");
        const json &tx = st.raw("tx");
        for (std::size_t i = 0; i < tx.size(); ++i)
            s.scene.tx.push_back(parse_point(tx[i], st.field("tx") + "[" + std::to_string(i) + "]"));
        if (!st.has("rx"))
            st.fail("rx", "required");
        s.scene.rx = parse_point(st.raw("rx"), st.field("rx"));
        st.finish();
        s.num_tx = s.scene.tx.size();

        if (n.has("targets")) {
            const json &ts = n.raw("targets");
            if (!ts.is_array())
                n.fail("targets", "expected a list");
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const Node t(ts[i], n.field("targets") + "[" + std::to_string(i) + "]");
                TargetState target;
                if (!t.has("position"))
                    t.fail("position", "required");
                target.position = parse_point(t.raw("position"), t.field("position"));
                target.speed = t.number("speed", 0.0);
                target.heading = t.number("heading_deg", 0.0) * pi / 180.0;
                if (t.has("reflectivity"))
                    target.reflectivity = parse_complex(t.raw("reflectivity"), t.field("reflectivity"));
                t.finish();
                s.scene.targets.push_back(target);
            }
        }
        if (n.has("clutter")) {
            const json &cs = n.raw("clutter");
            if (!cs.is_array())
                n.fail("clutter", "expected a list");
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const Node c(cs[i], n.field("clutter") + "[" + std::to_string(i) + "]");
                ClutterPoint cp;
                if (!c.has("position"))
                    c.fail("position", "required");
                cp.position = parse_point(c.raw("position"), c.field("position"));
                if (c.has("reflectivity"))
                    cp.reflectivity = parse_complex(c.raw("reflectivity"), c.field("reflectivity"));
                c.finish();
                s.scene.clutter.push_back(cp);
            }
        }
        s.scene.area_edge = s.area_edge;
        s.scene.min_separation = s.min_separation;
        try {
            s.scene.validate();
        } catch (const DomainError &e) {
            n.fail(e.what());
        }
    } else if (s.mode == SceneMode::paths) {
        if (!n.has("paths") || !n.raw("paths").is_array())
            n.fail("paths", "expected a list when mode is paths");
        const json &ps = n.raw("paths");
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const Node p(ps[i], n.field("paths") + "[" + std::to_string(i) + "]");
            DirectPath d;
            d.tx = p.unsigned_int("tx", 0);
            if (!p.has("range"))
                p.fail("range", "required");
            d.range = p.number("range", 0.0);
            d.velocity = p.number("velocity", 0.0);
            d.amplitude = p.number("amplitude", 1.0);
            d.phase = p.number("phase_deg", 0.0) * pi / 180.0;
            d.clutter = p.boolean("clutter", false);
            p.finish();
            if (d.tx >= s.num_tx)
                p.fail("tx", "index must be below scene.num_tx");
            if (!(d.range >= 0.0))
                p.fail("range", "must be non-negative");
            s.paths.push_back(d);
        }
    }
    n.finish();
}

inline void parse_allocation(const Node &n, AllocationSpec &a)
{
    const std::string scheme = n.string("scheme", "random-2d");
    if (scheme == "full") {
        a.scheme = Scheme::full;
    } else if (scheme == "random-2d") {
        a.scheme = Scheme::random_2d_partition;
    } else {
        const auto dash = scheme.rfind('-');
        const std::string base = dash == std::string::npos ? scheme : scheme.substr(0, dash);
        const std::string ax = dash == std::string::npos ? "" : scheme.substr(dash + 1);
        if (ax != "freq" && ax != "time")
            n.fail("scheme", "unknown scheme \"" + scheme + "\"");
        a.axis = ax == "freq" ? Axis::frequency : Axis::time;
        if (base == "comb")
            a.scheme = a.axis == Axis::frequency ? Scheme::comb_freq : Scheme::comb_time;
        else if (base == "aperiodic")
            a.scheme = a.axis == Axis::frequency ? Scheme::aperiodic_freq : Scheme::aperiodic_time;
        else if (base == "contiguous")
            a.scheme = Scheme::contiguous;
        else
            n.fail("scheme", "unknown scheme \"" + scheme + "\"");
    }
    a.period = n.unsigned_int("period", a.period);
    a.n_active = n.unsigned_int("n_active", a.n_active);
    if (n.has("rho"))
        a.rho = n.number("rho", 0.0);
    if (n.has("seed"))
        a.seed = n.unsigned_int("seed", 0);
    if (a.period < 1 || a.n_active < 1 || a.n_active > a.period)
        n.fail("n_active", "require 1 <= n_active <= period");
    if (a.rho && (!(*a.rho >= 0.0) || !(*a.rho < 1.0)))
        n.fail("rho", "must lie in [0, 1)");
    n.finish();
}

inline std::vector<double> parse_number_list(const json &v, const std::string &where, bool allow_off)
{
    if (!v.is_array() || v.empty())
        throw ConfigError("field '" + where + "': expected a non-empty list");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (allow_off)
            out.push_back(parse_db(v[i], at));
        else if (v[i].is_number())
            out.push_back(v[i].get<double>());
        else
            throw ConfigError("field '" + at + "': expected a number");
    }
    return out;
}

inline SweepSpec parse_sweep(const Node &n)
{
    SweepSpec s;
    if (!n.has("rho"))
        n.fail("rho", "required");
    s.rho = parse_number_list(n.raw("rho"), n.field("rho"), false);
    for (double r : s.rho)
        if (!(r >= 0.0) || !(r < 1.0))
            n.fail("rho", "every value must lie in [0, 1)");
    if (!n.has("power_ratio_db"))
        n.fail("power_ratio_db", "required");
    s.power_ratio_db = parse_number_list(n.raw("power_ratio_db"), n.field("power_ratio_db"), true);
    if (n.has("seeds")) {
        const json &v = n.raw("seeds");
        if (!v.is_array() || v.empty())
            n.fail("seeds", "expected a non-empty list");
        for (std::size_t i = 0; i < v.size(); ++i)
            s.seeds.push_back(Node::as_unsigned(v[i], n.field("seeds") + "[" + std::to_string(i) + "]"));
        if (n.has("num_seeds"))
            n.fail("num_seeds", "give either seeds or num_seeds, not both");
    } else {
        const std::uint64_t count = n.unsigned_int("num_seeds", 20);
        if (count < 1)
            n.fail("num_seeds", "must be at least 1");
        for (std::uint64_t k = 0; k < count; ++k)
            s.seeds.push_back(k);
    }
    s.threads = n.unsigned_int("threads", 0);
    s.mainlobe_radius = n.unsigned_int("mainlobe_radius", s.mainlobe_radius);
    s.guard_radius = n.unsigned_int("guard_radius", s.guard_radius);
    s.training_radius = n.unsigned_int("training_radius", s.training_radius);
    if (!(s.mainlobe_radius < s.guard_radius && s.guard_radius < s.training_radius))
        n.fail("require mainlobe_radius < guard_radius < training_radius");
    n.finish();
    return s;
}

inline GhostSpec parse_ghosts(const Node &n)
{
    GhostSpec g;
    if (n.has("range"))
        g.range = n.number("range", 0.0);
    if (n.has("velocity"))
        g.velocity = n.number("velocity", 0.0);
    if (n.has("period"))
        g.period = n.unsigned_int("period", 1);
    if (n.has("n_active"))
        g.n_active = n.unsigned_int("n_active", 1);
    const std::string domain = n.string("domain", "both");
    if (domain == "range")
        g.velocity_domain = false;
    else if (domain == "velocity")
        g.range_domain = false;
    else if (domain != "both")
        n.fail("domain", "expected range, velocity or both");
    n.finish();
    return g;
}

inline OutputSpec parse_outputs(const Node &n)
{
    OutputSpec o;
    o.dir = n.string("dir", "");
    o.maps = n.boolean("maps", o.maps);
    o.profiles = n.boolean("profiles", o.profiles);
    o.masks = n.boolean("masks", o.masks);
    o.complex_maps = n.boolean("complex", o.complex_maps);
    n.finish();
    return o;
}

} // namespace detail

inline std::size_t ExperimentConfig::num_tx() const
{
    return scene.mode == SceneMode::explicit_positions ? scene.scene.tx.size() : scene.num_tx;
}

/// Builds an ExperimentConfig from JSON text. Comments are accepted.
/// The numerology starts from the preset (CLI override, else the "preset"
/// key, else desk) and the "ofdm" block then overrides individual fields.
inline ExperimentConfig parse_config(const std::string &text, const Overrides &ov = {})
{
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw ConfigError(e.what());
    }
    if (!root.is_object())
        throw ConfigError("field '<root>': expected an object");
    if (ov.preset)
        root["preset"] = *ov.preset;
    if (ov.seed)
        root["seed"] = *ov.seed;

    ExperimentConfig c;
    const detail::Node n(root, "");
    c.preset = n.string("preset", "desk");
    c.ofdm = detail::preset_numerology(c.preset, "preset");
    if (n.has("ofdm"))
        detail::parse_ofdm(n.child("ofdm"), c.ofdm);
    c.seed = n.unsigned_int("seed", c.seed);
    if (n.has("scene"))
        detail::parse_scene(n.child("scene"), c.scene);
    if (n.has("allocation"))
        detail::parse_allocation(n.child("allocation"), c.allocation);

    const std::size_t L = c.num_tx();
    c.powers_db.assign(L, 0.0);
    if (n.has("powers_db")) {
        const auto p = detail::parse_number_list(n.raw("powers_db"), "powers_db", true);
        if (p.size() != L)
            n.fail("powers_db", "expected one entry per transmitter (" + std::to_string(L) + ")");
        c.powers_db = p;
    }
    if (n.has("noise")) {
        const json &v = n.raw("noise");
        if (v.is_string() && v.get<std::string>() == "off") {
            c.snr_db.reset();
        } else {
            const detail::Node nn(v, "noise");
            if (!nn.has("snr_db"))
                nn.fail("snr_db", "required unless noise is \"off\"");
            c.snr_db = nn.number("snr_db", 0.0);
            nn.finish();
        }
    }
    if (n.has("sweep"))
        c.sweep = detail::parse_sweep(n.child("sweep"));
    if (n.has("ghosts"))
        c.ghosts = detail::parse_ghosts(n.child("ghosts"));
    if (n.has("outputs"))
        c.outputs = detail::parse_outputs(n.child("outputs"));
    n.finish();

    c.effective = root;
    c.effective.erase("outputs"); // output location does not change results
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path &path, const Overrides &ov = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), ov);
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Output directory: explicit flag, then config, then $MSISAC_OUT_DIR, then ./msisac_out.
inline std::filesystem::path resolve_out_dir(const std::optional<std::string> &flag, const ExperimentConfig &c)
{
    if (flag && !flag->empty())
        return *flag;
    if (!c.outputs.dir.empty())
        return c.outputs.dir;
    if (const char *env = std::getenv("MSISAC_OUT_DIR"); env && *env)
        return env;
    return "msisac_out";
}

// ---------------------------------------------------------------------------
// Scenario construction

struct Scenario {
    std::optional<Scene> scene; // absent in paths mode
    PathSet paths;
};

/// Geometry is fixed by `geometry_seed`; path phases follow `phase_seed`.
inline Scenario build_scenario(const ExperimentConfig &c, std::uint64_t geometry_seed, std::uint64_t phase_seed)
{
    Scenario s;
    const SceneSpec &sc = c.scene;
    switch (sc.mode) {
    case SceneMode::random: {
        Scene scene = place_stations(geometry_seed, sc.area_edge, sc.min_separation, sc.num_tx);
        populate_scatterers(scene, sc.scatter, geometry_seed);
        s.paths = build_paths(scene, c.ofdm, sc.gain, phase_seed);
        s.scene = std::move(scene);
        break;
    }
    case SceneMode::explicit_positions:
        s.paths = build_paths(sc.scene, c.ofdm, sc.gain, phase_seed);
        s.scene = sc.scene;
        break;
    case SceneMode::paths: {
        s.paths.assign(sc.num_tx, {});
        const double lambda = c.ofdm.wavelength();
        for (const auto &d : sc.paths) {
            ChannelPath p;
            p.tx_index = d.tx;
            p.scatterer_index = s.paths[d.tx].size();
            p.clutter = d.clutter;
            p.alpha = std::polar(d.amplitude, d.phase);
            p.tau = d.range / speed_of_light;
            p.nu = 2.0 * d.velocity / lambda;
            s.paths[d.tx].push_back(p);
        }
        break;
    }
    }
    return s;
}

/// Masks for the configured scheme.
inline MaskSet build_masks(const ExperimentConfig &c, std::uint64_t seed)
{
    const AllocationSpec &a = c.allocation;
    const std::size_t L = c.num_tx();
    switch (a.scheme) {
    case Scheme::full:
        return full_maskset(L, c.ofdm);
    case Scheme::contiguous:
        return contiguous_maskset(a.axis, L, c.ofdm);
    case Scheme::comb_freq:
    case Scheme::comb_time:
        return comb_maskset(a.axis, L, a.period, a.n_active, c.ofdm);
    case Scheme::aperiodic_freq:
    case Scheme::aperiodic_time: {
        if (!a.rho)
            return aperiodic_1d_partition(a.axis, L, seed, c.ofdm);
        std::vector<Mask> masks;
        for (std::size_t l = 0; l < L; ++l)
            masks.push_back(aperiodic_1d_mask(a.axis, 1.0 - *a.rho, derive_seed(seed, l), c.ofdm));
        return {std::move(masks), a.scheme};
    }
    case Scheme::random_2d_partition:
    case Scheme::random_2d_bernoulli:
        return random_2d_masks(L, a.rho.value_or(1.0 - 1.0 / static_cast<double>(L)), seed, c.ofdm);
    }
    throw DomainError("build_masks: unknown scheme");
}

inline std::vector<double> linear_powers(const std::vector<double> &db)
{
    std::vector<double> p;
    for (double v : db)
        p.push_back(std::isinf(v) && v < 0.0 ? 0.0 : from_db(v));
    return p;
}

inline double noise_psd(const ExperimentConfig &c) { return c.snr_db ? noise_psd_for_snr(*c.snr_db, c.ofdm) : 0.0; }

/// The strongest non-clutter path of a transmitter, if any.
inline std::optional<ChannelPath> strongest_target(const std::vector<ChannelPath> &paths)
{
    std::optional<ChannelPath> best;
    for (const auto &p : paths)
        if (!p.clutter && (!best || std::abs(p.alpha) > std::abs(best->alpha)))
            best = p;
    return best;
}

/// First non-clutter path ("Target 1" of the transmitter).
inline std::optional<ChannelPath> first_target(const std::vector<ChannelPath> &paths)
{
    for (const auto &p : paths)
        if (!p.clutter)
            return p;
    return std::nullopt;
}

inline std::string tx_name(std::size_t l) { return "tx" + std::to_string(l + 1); }

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit status and prints a short report.

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_infeasible = 2, exit_runtime = 3 };

struct ValidationSummary {
    double max_bistatic_distance = 0.0; // NaN in paths mode
    double delay_spread = 0.0;
    double max_doppler = 0.0;
    ConditionReport report;
};

/// Worst-case delay spread from the area geometry (or the listed paths) and
/// the largest Doppler any configured target can produce.
inline ValidationSummary validate_experiment(const ExperimentConfig &c)
{
    ValidationSummary v;
    const double lambda = c.ofdm.wavelength();
    const SceneSpec &s = c.scene;
    if (s.mode == SceneMode::paths) {
        const Scenario sc = build_scenario(c, c.seed, c.seed);
        v.max_bistatic_distance = std::numeric_limits<double>::quiet_NaN();
        v.delay_spread = multistatic_delay_spread(sc.paths);
        v.max_doppler = max_abs_doppler(sc.paths);
    } else {
        if (s.min_separation > s.area_edge)
            throw InfeasibleGeometry("minimum station separation exceeds the area edge");
        if (s.mode == SceneMode::random)
            (void)place_stations(c.seed, s.area_edge, s.min_separation, s.num_tx);
        v.max_bistatic_distance = max_bistatic_distance(s.area_edge, s.min_separation);
        v.delay_spread = worst_case_delay_spread(s.area_edge, s.min_separation);
        double vmax = 0.0;
        if (s.mode == SceneMode::random && s.scatter.num_targets > 0)
            vmax = s.scatter.max_speed;
        for (const auto &t : s.scene.targets)
            vmax = std::max(vmax, t.speed);
        v.max_doppler = 2.0 * vmax / lambda;
    }
    v.report = validate_numerology(c.ofdm, v.delay_spread, v.max_doppler);
    return v;
}

inline int cmd_validate(const ExperimentConfig &c, const std::filesystem::path &out_dir, std::ostream &os)
{
    const ValidationSummary v = validate_experiment(c);
    const ConditionReport &r = v.report;
    const auto dq = derive_quantities(c.ofdm);
    os << "subcarrier spacing   " << io::fmt(c.ofdm.subcarrier_spacing_hz) << " Hz\n"
       << "cyclic prefix        " << io::fmt(r.cyclic_prefix * 1e6) << " us\n"
       << "max bistatic dist.   " << io::fmt(v.max_bistatic_distance) << " m\n"
       << "delay spread         " << io::fmt(v.delay_spread * 1e6) << " us\n"
       << "max Doppler          " << io::fmt(v.max_doppler) << " Hz\n"
       << "admissible spacing   [" << io::fmt(r.min_spacing_hz / 1e3) << ", " << io::fmt(r.max_spacing_hz / 1e3)
       << "] kHz" << (r.interval_empty ? " (empty)" : "") << "\n"
       << "max range            " << io::fmt(dq.max_range) << " m\n"
       << "max velocity         " << io::fmt(dq.max_velocity) << " m/s\n"
       << "ISI-free             " << (r.isi_free ? "yes" : "no") << "\n"
       << "ICI-free             " << (r.ici_free ? "yes" : "no") << "\n"
       << (r.feasible() ? "PASS" : "FAIL") << "\n";

    io::Table t("validate", {"quantity", "value"});
    t.add({"subcarrier_spacing_hz", io::fmt(c.ofdm.subcarrier_spacing_hz)});
    t.add({"cyclic_prefix_s", io::fmt(r.cyclic_prefix)});
    t.add({"max_bistatic_distance_m", io::fmt(v.max_bistatic_distance)});
    t.add({"delay_spread_s", io::fmt(v.delay_spread)});
    t.add({"max_doppler_hz", io::fmt(v.max_doppler)});
    t.add({"min_spacing_hz", io::fmt(r.min_spacing_hz)});
    t.add({"max_spacing_hz", io::fmt(r.max_spacing_hz)});
    t.add({"interval_empty", r.interval_empty ? "1" : "0"});
    t.add({"isi_free", r.isi_free ? "1" : "0"});
    t.add({"ici_free", r.ici_free ? "1" : "0"});
    io::write_with_meta(out_dir / "validate.csv", t.str(), "validate", c.effective, {c.seed});
    return r.feasible() ? exit_ok : exit_infeasible;
}

inline json rvm_axes_meta(const Rvm &r)
{
    json m;
    m["rows"] = "range bin i, range = i * range_step_m";
    m["columns"] = "velocity bin j, velocity = (j - velocity_zero_column) * velocity_step_mps";
    m["range_step_m"] = r.range_step;
    m["velocity_step_mps"] = r.velocity_step;
    m["velocity_zero_column"] = r.velocity_bins() / 2;
    m["window"] = r.window_applied ? "hamming" : "none";
    return m;
}

inline int cmd_rvm(const ExperimentConfig &c, const std::filesystem::path &out_dir, std::ostream &os)
{
    const Scenario sc = build_scenario(c, c.seed, c.seed);
    const MaskSet masks = build_masks(c, c.allocation.seed.value_or(c.seed));
    const Frame frame = simulate_frame(sc.paths, masks, linear_powers(c.powers_db), noise_psd(c), c.seed, c.ofdm);
    const auto dq = derive_quantities(c.ofdm);
    const std::vector<std::uint64_t> seeds{c.seed};

    os << "scheme " << to_string(masks.scheme) << ", rho " << io::fmt(masks.rho) << ", grid " << c.ofdm.n_subcarriers
       << " x " << c.ofdm.n_symbols << "\n";
    for (std::size_t l = 0; l < masks.num_tx(); ++l) {
        const std::string name = tx_name(l);
        if (frame.pilots[l].power == 0.0) {
            os << name << ": switched off\n";
            continue;
        }
        const Rvm r = tx_rvm(frame, l, c.ofdm.window, c.ofdm);
        const auto target = strongest_target(sc.paths[l]);
        std::optional<PeakHint> hint;
        if (target)
            hint = PeakHint{target->bistatic_range(), target->bistatic_velocity(dq.wavelength)};
        Peak pk;
        try {
            pk = find_peak(r, hint);
        } catch (const DomainError &) {
            os << name << ": empty map\n";
            continue;
        }
        json meta = rvm_axes_meta(r);
        meta["normalization"] = "dB relative to the map maximum";
        meta["peak_bin"] = {pk.bin.range, pk.bin.velocity};
        if (c.outputs.maps)
            io::write_with_meta(out_dir / ("rvm_" + name + ".csv"), io::rvm_db_csv(r), "rvm-db", c.effective, seeds,
                                meta);
        if (c.outputs.complex_maps)
            io::write_with_meta(out_dir / ("rvm_" + name + "_complex.csv"), io::complex_matrix_csv(r.values),
                                "complex-matrix", c.effective, seeds, meta);
        if (c.outputs.profiles) {
            json pm;
            pm["cut_velocity_bin"] = pk.bin.velocity;
            pm["normalization"] = "dB relative to the profile maximum";
            io::write_with_meta(out_dir / ("range_profile_" + name + ".csv"),
                                io::profile_csv("range_m", r.range_axis,
                                                profile_cut(r, ProfileAxis::range, pk.bin.velocity)),
                                "profile", c.effective, seeds, pm);
            json vm;
            vm["cut_range_bin"] = pk.bin.range;
            vm["normalization"] = "dB relative to the profile maximum";
            io::write_with_meta(out_dir / ("velocity_profile_" + name + ".csv"),
                                io::profile_csv("velocity_mps", r.velocity_axis,
                                                profile_cut(r, ProfileAxis::velocity, pk.bin.range)),
                                "profile", c.effective, seeds, vm);
        }
        if (c.outputs.masks)
            io::write_with_meta(out_dir / ("mask_" + name + ".csv"), io::mask_csv(masks.masks[l]), "mask",
                                c.effective, seeds);

        const bool comb = masks.scheme == Scheme::comb_freq || masks.scheme == Scheme::comb_time;
        if (comb && target) {
            const auto domain = masks.scheme == Scheme::comb_freq ? GhostDomain::range : GhostDomain::velocity;
            const auto pred = predict_ghosts(target->bistatic_range(), target->bistatic_velocity(dq.wavelength),
                                             c.allocation.period, domain, dq, c.allocation.n_active);
            io::Table t("ghosts", {"domain", "harmonic", "range_m", "velocity_mps", "level"});
            for (const auto &g : pred.ghosts)
                t.add({domain == GhostDomain::range ? "range" : "velocity", std::to_string(g.harmonic),
                       io::fmt(g.range), io::fmt(g.velocity), io::fmt(g.level)});
            io::write_with_meta(out_dir / ("ghosts_" + name + ".csv"), t.str(), "ghosts", c.effective, seeds);
        }
        os << name << ": peak at range " << io::fmt(r.range_axis[pk.bin.range]) << " m, velocity "
           << io::fmt(r.velocity_axis[pk.bin.velocity]) << " m/s, |RVM| " << io::fmt(pk.magnitude) << "\n";
    }
    return exit_ok;
}

struct SweepRow {
    double rho = 0.0;
    double power_ratio_db = 0.0;
    std::uint64_t seed = 0;
    double sinr_db = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // ordered by rho, then power ratio, then seed
};

/// SINR of TX1's first target while the other transmitters run at
/// `power_ratio_db` relative to TX1. Masks, path phases and pilots depend on
/// (seed, rho) only, so different power ratios see paired realizations.
inline SweepResult run_sweep(const ExperimentConfig &c)
{
    if (!c.sweep)
        throw ConfigError("field 'sweep': required for sweep-sinr");
    const SweepSpec &sw = *c.sweep;
    const std::size_t L = c.num_tx();
    if (L < 2)
        throw ConfigError("field 'scene.num_tx': sweep-sinr needs at least two transmitters");
    const auto dq = derive_quantities(c.ofdm);
    const double n0 = noise_psd(c);

    const std::size_t nr = sw.rho.size(), np = sw.power_ratio_db.size(), ns = sw.seeds.size();
    SweepResult out;
    out.rows.resize(nr * np * ns);
    const std::size_t cells = nr * ns; // one (rho, seed) cell evaluates every power ratio
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= cells)
                return;
            const std::size_t ri = cell / ns, si = cell % ns;
            try {
                const std::uint64_t trial = derive_seed(sw.seeds[si], stream::trial);
                const Scenario sc = build_scenario(c, c.seed, trial);
                const auto t1 = first_target(sc.paths[0]);
                if (!t1)
                    throw ConfigError("field 'scene': sweep-sinr needs a target seen by TX1");
                const PeakHint hint{t1->bistatic_range(), t1->bistatic_velocity(dq.wavelength)};
                const MaskSet masks = random_2d_masks(L, sw.rho[ri], trial, c.ofdm);
                for (std::size_t pi_ = 0; pi_ < np; ++pi_) {
                    std::vector<double> pdb(L, c.powers_db[0] + sw.power_ratio_db[pi_]);
                    pdb[0] = c.powers_db[0];
                    const Frame f = simulate_frame(sc.paths, masks, linear_powers(pdb), n0, trial, c.ofdm);
                    const Rvm r = tx_rvm(f, 0, c.ofdm.window, c.ofdm);
                    const Peak pk = find_peak(r, hint, 2);
                    const auto cs = build_cell_sets(pk.bin, r, sw.mainlobe_radius, sw.guard_radius,
                                                    sw.training_radius);
                    out.rows[(ri * np + pi_) * ns + si] = {sw.rho[ri], sw.power_ratio_db[pi_], sw.seeds[si],
                                                          sinr(r, cs).sinr_db};
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(cells);
                return;
            }
        }
    };
    std::size_t threads = sw.threads ? sw.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, cells);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(work);
    work();
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

/// Mean SINR in dB per (rho, power ratio), summed in seed order.
inline std::vector<SweepRow> sweep_means(const SweepResult &res, std::size_t num_seeds)
{
    std::vector<SweepRow> means;
    for (std::size_t k = 0; k < res.rows.size(); k += num_seeds) {
        double acc = 0.0;
        for (std::size_t s = 0; s < num_seeds; ++s)
            acc += res.rows[k + s].sinr_db;
        SweepRow m = res.rows[k];
        m.seed = 0;
        m.sinr_db = acc / static_cast<double>(num_seeds);
        means.push_back(m);
    }
    return means;
}

inline int cmd_sweep_sinr(const ExperimentConfig &c, const std::filesystem::path &out_dir, std::ostream &os)
{
    const SweepResult res = run_sweep(c);
    const SweepSpec &sw = *c.sweep;
    io::Table t("sinr-sweep", {"rho", "power_ratio_dB", "seed", "sinr_dB"});
    for (const auto &r : res.rows)
        t.add({io::fmt(r.rho), io::fmt(r.power_ratio_db), std::to_string(r.seed), io::fmt(r.sinr_db)});
    io::write_with_meta(out_dir / "sinr_sweep.csv", t.str(), "sinr-sweep", c.effective, sw.seeds);

    const auto means = sweep_means(res, sw.seeds.size());
    io::Table s("sinr-summary", {"rho", "power_ratio_dB", "num_seeds", "mean_sinr_dB"});
    os << "rho      ratio[dB]  mean SINR[dB]\n";
    for (const auto &m : means) {
        s.add({io::fmt(m.rho), io::fmt(m.power_ratio_db), std::to_string(sw.seeds.size()), io::fmt(m.sinr_db)});
        char line[96];
        std::snprintf(line, sizeof line, "%-8.4g %-10.4g %.3f\n", m.rho, m.power_ratio_db, m.sinr_db);
        os << line;
    }
    json meta;
    meta["aggregation"] = "arithmetic mean of per-seed SINR in dB, summed in seed order";
    io::write_with_meta(out_dir / "sinr_summary.csv", s.str(), "sinr-summary", c.effective, sw.seeds, meta);
    return exit_ok;
}

inline int cmd_ghosts(const ExperimentConfig &c, const std::filesystem::path &out_dir, std::ostream &os)
{
    const auto dq = derive_quantities(c.ofdm);
    double range = 0.0, velocity = 0.0;
    if (c.ghosts.range && c.ghosts.velocity) {
        range = *c.ghosts.range;
        velocity = *c.ghosts.velocity;
    } else {
        const Scenario sc = build_scenario(c, c.seed, c.seed);
        const auto t = first_target(sc.paths.at(0));
        if (!t)
            throw ConfigError("field 'ghosts': give range and velocity, or configure a target for TX1");
        range = c.ghosts.range.value_or(t->bistatic_range());
        velocity = c.ghosts.velocity.value_or(t->bistatic_velocity(dq.wavelength));
    }
    const std::size_t period = c.ghosts.period.value_or(c.allocation.period);
    const std::size_t n_active = c.ghosts.n_active.value_or(c.allocation.n_active);
    if (period < 1 || n_active < 1 || n_active > period)
        throw ConfigError("field 'ghosts': require 1 <= n_active <= period");

    io::Table t("ghosts", {"domain", "harmonic", "range_m", "velocity_mps", "level"});
    os << "target " << io::fmt(range) << " m, " << io::fmt(velocity) << " m/s, period " << period << ", active "
       << n_active << "\n";
    for (GhostDomain d : {GhostDomain::range, GhostDomain::velocity}) {
        if ((d == GhostDomain::range && !c.ghosts.range_domain) ||
            (d == GhostDomain::velocity && !c.ghosts.velocity_domain))
            continue;
        const char *name = d == GhostDomain::range ? "range" : "velocity";
        for (const auto &g : predict_ghosts(range, velocity, period, d, dq, n_active).ghosts) {
            t.add({name, std::to_string(g.harmonic), io::fmt(g.range), io::fmt(g.velocity), io::fmt(g.level)});
            char line[128];
            std::snprintf(line, sizeof line, "%-8s %+4d %12.3f m %10.3f m/s  level %.3f\n", name, g.harmonic, g.range,
                          g.velocity, g.level);
            os << line;
        }
    }
    if (t.rows().empty())
        os << "no ghosts\n";
    io::write_with_meta(out_dir / "ghosts.csv", t.str(), "ghosts", c.effective, {c.seed});
    return exit_ok;
}

inline int cmd_masks(const ExperimentConfig &c, const std::filesystem::path &out_dir, std::ostream &os)
{
    const std::uint64_t seed = c.allocation.seed.value_or(c.seed);
    const MaskSet masks = build_masks(c, seed);
    const MaskStats st = mask_stats(masks);
    const std::vector<std::uint64_t> seeds{seed};
    io::Table t("mask-summary", {"tx", "active", "active_fraction", "max_overlap"});
    const double cells = static_cast<double>(c.ofdm.n_subcarriers * c.ofdm.n_symbols);
    os << "scheme " << to_string(masks.scheme) << ", rho " << io::fmt(masks.rho) << "\n";
    for (std::size_t l = 0; l < masks.num_tx(); ++l) {
        const std::string name = tx_name(l);
        std::size_t overlap = 0;
        for (std::size_t q = 0; q < masks.num_tx(); ++q)
            if (q != l)
                overlap = std::max(overlap, st.overlap[l][q]);
        t.add({name, std::to_string(st.active[l]), io::fmt(static_cast<double>(st.active[l]) / cells),
               std::to_string(overlap)});
        io::write_with_meta(out_dir / ("mask_" + name + ".csv"), io::mask_csv(masks.masks[l]), "mask", c.effective,
                            seeds);
        io::write_with_meta(out_dir / ("mask_runs_" + name + ".csv"), io::mask_runs_csv(masks.masks[l]), "mask-runs",
                            c.effective, seeds);
        os << name << ": " << st.active[l] << " active cells, max overlap " << overlap << "\n";
    }
    json meta;
    meta["scheme"] = std::string(to_string(masks.scheme));
    meta["rho"] = masks.rho;
    io::write_with_meta(out_dir / "mask_summary.csv", t.str(), "mask-summary", c.effective, seeds, meta);
    return exit_ok;
}

} // namespace msisac
