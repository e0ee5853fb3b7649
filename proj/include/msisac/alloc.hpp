// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Per-transmitter binary resource masks over the N x M sensing grid.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "msisac/common.hpp"
#include "msisac/numerology.hpp"
#include "msisac/random.hpp"

namespace msisac {

using Mask = Grid<std::uint8_t>;

enum class Axis { frequency, time };

enum class Scheme {
    full,
    contiguous,
    comb_freq,
    comb_time,
    aperiodic_freq,
    aperiodic_time,
    random_2d_partition,
    random_2d_bernoulli,
};

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::full: return "full";
    case Scheme::contiguous: return "contiguous";
    case Scheme::comb_freq: return "comb-freq";
    case Scheme::comb_time: return "comb-time";
    case Scheme::aperiodic_freq: return "aperiodic-freq";
    case Scheme::aperiodic_time: return "aperiodic-time";
    case Scheme::random_2d_partition: return "random-2d-partition";
    case Scheme::random_2d_bernoulli: return "random-2d-bernoulli";
    }
    return "unknown";
}

inline std::string_view to_string(Axis a) { return a == Axis::frequency ? "frequency" : "time"; }

inline double sparsity_factor(const std::vector<Mask> &masks)
{
    if (masks.empty())
        throw DomainError("sparsity_factor: empty mask set");
    double active = 0.0;
    for (const auto &m : masks)
        for (auto v : m)
            active += v;
    const double cells = static_cast<double>(masks.front().size()) * static_cast<double>(masks.size());
    return 1.0 - active / cells;
}

struct MaskSet {
    std::vector<Mask> masks;
    Scheme scheme = Scheme::full;
    double rho = 0.0;

    MaskSet() = default;
    MaskSet(std::vector<Mask> m, Scheme s) : masks(std::move(m)), scheme(s), rho(sparsity_factor(masks)) {}

    [[nodiscard]] std::size_t num_tx() const { return masks.size(); }
};

inline double sparsity_factor(const MaskSet &set) { return sparsity_factor(set.masks); }

namespace detail {

inline std::size_t axis_length(const OfdmConfig &cfg, Axis axis)
{
    return axis == Axis::frequency ? cfg.n_subcarriers : cfg.n_symbols;
}

/// Replicates a 1-D activation sequence across the other axis.
inline Mask expand(const std::vector<std::uint8_t> &seq, Axis axis, const OfdmConfig &cfg)
{
    Mask m(cfg.n_subcarriers, cfg.n_symbols, 0);
    for (std::size_t n = 0; n < cfg.n_subcarriers; ++n)
        for (std::size_t k = 0; k < cfg.n_symbols; ++k)
            m(n, k) = seq[axis == Axis::frequency ? n : k];
    return m;
}

} // namespace detail

inline Mask full_mask(const OfdmConfig &cfg) { return Mask(cfg.n_subcarriers, cfg.n_symbols, 1); }

/// Periodic activation: index j active iff (j - offset) mod period < n_active.
inline Mask comb_mask(Axis axis, std::size_t period, std::size_t n_active, std::size_t offset, const OfdmConfig &cfg)
{
    cfg.validate();
    const std::size_t len = detail::axis_length(cfg, axis);
    if (period < 1 || n_active < 1 || n_active > period)
        throw DomainError("comb_mask: require 1 <= N_a <= N_p");
    if (offset >= period)
        throw DomainError("comb_mask: require 0 <= offset < N_p");
    if (period > len)
        throw DomainError("comb_mask: period exceeds the axis length");
    std::vector<std::uint8_t> seq(len);
    for (std::size_t j = 0; j < len; ++j)
        seq[j] = ((j + period - offset) % period) < n_active ? 1 : 0;
    return detail::expand(seq, axis, cfg);
}

/// Block `index` of `parts` equal contiguous blocks along the axis.
inline Mask contiguous_mask(Axis axis, std::size_t parts, std::size_t index, const OfdmConfig &cfg)
{
    cfg.validate();
    const std::size_t len = detail::axis_length(cfg, axis);
    if (parts < 1 || index >= parts || parts > len)
        throw DomainError("contiguous_mask: require index < parts <= axis length");
    std::vector<std::uint8_t> seq(len, 0);
    for (std::size_t j = index * len / parts; j < (index + 1) * len / parts; ++j)
        seq[j] = 1;
    return detail::expand(seq, axis, cfg);
}

/// floor(fraction * len) indices drawn uniformly without replacement.
inline Mask aperiodic_1d_mask(Axis axis, double active_fraction, std::uint64_t seed, const OfdmConfig &cfg)
{
    cfg.validate();
    if (!(active_fraction > 0.0) || active_fraction > 1.0)
        throw DomainError("aperiodic_1d_mask: fraction must lie in (0, 1]");
    const std::size_t len = detail::axis_length(cfg, axis);
    const auto count = static_cast<std::size_t>(std::floor(active_fraction * static_cast<double>(len)));
    std::vector<std::size_t> idx(len);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, stream::masks));
    std::vector<std::uint8_t> seq(len, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.uniform_int(len - i);
        std::swap(idx[i], idx[j]);
        seq[idx[i]] = 1;
    }
    return detail::expand(seq, axis, cfg);
}

inline MaskSet full_maskset(std::size_t num_tx, const OfdmConfig &cfg)
{
    if (num_tx < 1)
        throw DomainError("full_maskset: L must be at least 1");
    return {std::vector<Mask>(num_tx, full_mask(cfg)), Scheme::full};
}

inline MaskSet contiguous_maskset(Axis axis, std::size_t num_tx, const OfdmConfig &cfg)
{
    std::vector<Mask> masks;
    for (std::size_t l = 0; l < num_tx; ++l)
        masks.push_back(contiguous_mask(axis, num_tx, l, cfg));
    return {std::move(masks), Scheme::contiguous};
}

/// Staggered combs: TX l starts at offset l * N_a, which for N_a = 1 is the
/// comb-N_p PRS layout and keeps the masks disjoint whenever L * N_a <= N_p.
inline MaskSet comb_maskset(Axis axis, std::size_t num_tx, std::size_t period, std::size_t n_active,
                            const OfdmConfig &cfg)
{
    if (num_tx < 1)
        throw DomainError("comb_maskset: L must be at least 1");
    std::vector<Mask> masks;
    for (std::size_t l = 0; l < num_tx; ++l)
        masks.push_back(comb_mask(axis, period, n_active, (l * n_active) % period, cfg));
    return {std::move(masks), axis == Axis::frequency ? Scheme::comb_freq : Scheme::comb_time};
}

/// Aperiodic 1-D division: the axis indices are shuffled and dealt round-robin,
/// so the L masks are disjoint with floor/ceil(len / L) active indices each.
inline MaskSet aperiodic_1d_partition(Axis axis, std::size_t num_tx, std::uint64_t seed, const OfdmConfig &cfg)
{
    cfg.validate();
    if (num_tx < 1)
        throw DomainError("aperiodic_1d_partition: L must be at least 1");
    const std::size_t len = detail::axis_length(cfg, axis);
    std::vector<std::size_t> idx(len);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, stream::masks));
    for (std::size_t i = 0; i + 1 < len; ++i)
        std::swap(idx[i], idx[i + rng.uniform_int(len - i)]);
    std::vector<Mask> masks;
    for (std::size_t l = 0; l < num_tx; ++l) {
        std::vector<std::uint8_t> seq(len, 0);
        for (std::size_t i = l; i < len; i += num_tx)
            seq[idx[i]] = 1;
        masks.push_back(detail::expand(seq, axis, cfg));
    }
    return {std::move(masks), axis == Axis::frequency ? Scheme::aperiodic_freq : Scheme::aperiodic_time};
}

/// Randomized 2-D assignment. rho == 1 - 1/L draws Z[n,m] ~ Unif{0..L-1} and
/// gives the cell to TX Z (exact partition). Any other rho in [0, 1) activates
/// each TX independently per cell with probability 1 - rho.
inline MaskSet random_2d_masks(std::size_t num_tx, double rho, std::uint64_t seed, const OfdmConfig &cfg)
{
    cfg.validate();
    if (num_tx < 1)
        throw DomainError("random_2d_masks: L must be at least 1");
    if (!(rho >= 0.0) || !(rho < 1.0))
        throw DomainError("random_2d_masks: rho must lie in [0, 1)");
    const std::size_t n = cfg.n_subcarriers;
    const std::size_t m = cfg.n_symbols;
    const double orthogonal_rho = 1.0 - 1.0 / static_cast<double>(num_tx);
    Rng rng(derive_seed(seed, stream::masks));
    std::vector<Mask> masks(num_tx, Mask(n, m, 0));

    if (std::abs(rho - orthogonal_rho) <= 1e-12) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                masks[rng.uniform_int(num_tx)](i, k) = 1;
        return {std::move(masks), Scheme::random_2d_partition};
    }
    const double p_active = 1.0 - rho;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < num_tx; ++l)
                masks[l](i, k) = rng.bernoulli(p_active) ? 1 : 0;
    return {std::move(masks), Scheme::random_2d_bernoulli};
}

struct MaskStats {
    std::vector<std::size_t> active;              // S_l
    std::vector<std::vector<std::size_t>> overlap; // overlap[l][l'] = sum A_l A_l'
};

inline MaskStats mask_stats(const MaskSet &set)
{
    const std::size_t L = set.num_tx();
    MaskStats st;
    st.active.assign(L, 0);
    st.overlap.assign(L, std::vector<std::size_t>(L, 0));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t q = l; q < L; ++q) {
            require_same_shape(set.masks[l], set.masks[q], "mask_stats");
            std::size_t c = 0;
            for (std::size_t i = 0; i < set.masks[l].size(); ++i)
                c += static_cast<std::size_t>(set.masks[l].data()[i] & set.masks[q].data()[i]);
            st.overlap[l][q] = st.overlap[q][l] = c;
        }
    for (std::size_t l = 0; l < L; ++l)
        st.active[l] = st.overlap[l][l];
    return st;
}

/// Activation sequence along an axis, read at index 0 of the other axis.
inline std::vector<std::uint8_t> activation_sequence(const Mask &mask, Axis axis)
{
    std::vector<std::uint8_t> seq;
    if (axis == Axis::frequency)
        for (std::size_t n = 0; n < mask.rows(); ++n)
            seq.push_back(mask(n, 0));
    else
        for (std::size_t k = 0; k < mask.cols(); ++k)
            seq.push_back(mask(0, k));
    return seq;
}

} // namespace msisac
