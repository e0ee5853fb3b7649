// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// CSV and metadata writers. Every file starts with a "# format=<name>/<ver>"
// line; numbers are printed with a fixed printf format so repeated runs are
// byte-identical.

#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "msisac/alloc.hpp"
#include "msisac/common.hpp"
#include "msisac/rvm.hpp"

namespace msisac {

inline constexpr std::string_view tool_version = "1.0.0";
inline constexpr int format_version = 1;

namespace io {

/// %.10g for tables, %.17g where a value must round-trip.
inline std::string fmt(double v, bool exact = false)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, exact ? "%.17g" : "%.10g", v);
    return buf;
}

/// "re+imj" with both parts round-trippable.
inline std::string fmt(cdouble v)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", v.real(), v.imag());
    return buf;
}

inline std::string header(std::string_view kind)
{
    return "# format=msisac." + std::string(kind) + "/" + std::to_string(format_version) + "\n";
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

inline std::string config_hash(const nlohmann::json &config) { return hex64(fnv1a(config.dump())); }

inline void write_file(const std::filesystem::path &path, const std::string &content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

/// Row = subcarrier, column = symbol.
inline std::string complex_matrix_csv(const CMatrix &m)
{
    std::ostringstream os;
    os << header("complex-matrix");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            os << (j ? "," : "") << fmt(m(i, j));
        os << '\n';
    }
    return os.str();
}

/// |RVM| in dB relative to the map maximum; row = range bin, column = velocity bin.
inline std::string rvm_db_csv(const Rvm &r, double floor_db = -300.0)
{
    double peak = 0.0;
    for (std::size_t i = 0; i < r.range_bins(); ++i)
        for (std::size_t j = 0; j < r.velocity_bins(); ++j)
            peak = std::max(peak, r.power(i, j));
    std::ostringstream os;
    os << header("rvm-db");
    for (std::size_t i = 0; i < r.range_bins(); ++i) {
        for (std::size_t j = 0; j < r.velocity_bins(); ++j)
            os << (j ? "," : "") << fmt(peak > 0.0 ? to_db(r.power(i, j) / peak, floor_db) : floor_db);
        os << '\n';
    }
    return os.str();
}

inline std::string mask_csv(const Mask &m)
{
    std::string s = header("mask");
    s.reserve(s.size() + m.size() * 2);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j)
                s += ',';
            s += m(i, j) ? '1' : '0';
        }
        s += '\n';
    }
    return s;
}

/// Run-length summary of one mask row by row: "row,start,length" per active run.
inline std::string mask_runs_csv(const Mask &m)
{
    std::ostringstream os;
    os << header("mask-runs") << "row,start,length\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::size_t j = 0;
        while (j < m.cols()) {
            if (!m(i, j)) {
                ++j;
                continue;
            }
            const std::size_t start = j;
            while (j < m.cols() && m(i, j))
                ++j;
            os << i << ',' << start << ',' << (j - start) << '\n';
        }
    }
    return os.str();
}

/// Axis value and magnitude in dB relative to the profile maximum.
inline std::string profile_csv(std::string_view axis_name, const std::vector<double> &axis,
                               const std::vector<double> &magnitude)
{
    std::ostringstream os;
    os << header("profile") << axis_name << ",magnitude_db\n";
    const auto db = to_db_relative(magnitude);
    for (std::size_t i = 0; i < axis.size(); ++i)
        os << fmt(axis[i]) << ',' << fmt(db[i]) << '\n';
    return os.str();
}

/// Generic table with a header row.
class Table {
public:
    explicit Table(std::string kind, std::vector<std::string> columns)
        : kind_(std::move(kind)), columns_(std::move(columns))
    {
    }

    void add(std::vector<std::string> row)
    {
        if (row.size() != columns_.size())
            throw std::logic_error("Table: row width differs from header");
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] std::string str() const
    {
        std::string s = header(kind_);
        for (std::size_t c = 0; c < columns_.size(); ++c)
            s += (c ? "," : "") + columns_[c];
        s += '\n';
        for (const auto &r : rows_) {
            for (std::size_t c = 0; c < r.size(); ++c)
                s += (c ? "," : "") + r[c];
            s += '\n';
        }
        return s;
    }

    [[nodiscard]] const std::vector<std::vector<std::string>> &rows() const { return rows_; }

private:
    std::string kind_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Sidecar written next to an artifact as <file>.meta.json.
inline void write_with_meta(const std::filesystem::path &path, const std::string &content, const std::string &kind,
                            const nlohmann::json &config, const std::vector<std::uint64_t> &seeds,
                            const nlohmann::json &extra = nlohmann::json::object())
{
    write_file(path, content);
    nlohmann::json meta;
    meta["format"] = "msisac." + kind;
    meta["format_version"] = format_version;
    meta["tool_version"] = tool_version;
    meta["config_hash"] = config_hash(config);
    meta["seeds"] = seeds;
    meta["artifact"] = path.filename().string();
    for (auto it = extra.begin(); it != extra.end(); ++it)
        meta[it.key()] = it.value();
    write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

} // namespace io
} // namespace msisac
