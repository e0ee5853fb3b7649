// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// One frame end to end: pilots -> channels -> received grid -> per-TX RVM.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msisac/alloc.hpp"
#include "msisac/channel.hpp"
#include "msisac/rvm.hpp"
#include "msisac/scene.hpp"

namespace msisac {

struct Frame {
    std::vector<PilotGrid> pilots;
    std::vector<CMatrix> channels;
    CMatrix rx;
};

/// `powers` are linear P_l; a zero power switches a transmitter off.
inline Frame simulate_frame(const PathSet &paths, const MaskSet &masks, const std::vector<double> &powers,
                            double noise_psd, std::uint64_t seed, const OfdmConfig &cfg,
                            const std::vector<SyncOffsets> &offsets = {})
{
    const std::size_t L = masks.num_tx();
    if (paths.size() != L || powers.size() != L)
        throw DimensionMismatch("simulate_frame: paths, masks and powers must agree on L");
    if (!offsets.empty() && offsets.size() != L)
        throw DimensionMismatch("simulate_frame: offsets must be empty or one per TX");
    Frame f;
    for (std::size_t l = 0; l < L; ++l) {
        f.pilots.push_back(make_pilots(masks.masks[l], powers[l], seed, l));
        f.channels.push_back(channel_matrix(paths[l], offsets.empty() ? SyncOffsets{} : offsets[l], cfg));
    }
    f.rx = synthesize_rx(f.channels, f.pilots, noise_psd, seed, cfg);
    return f;
}

/// RVM of transmitter l using its own pilots as the reciprocal filter.
inline Rvm tx_rvm(const Frame &frame, std::size_t l, Window window, const OfdmConfig &cfg)
{
    return compute_rvm(reciprocal_filter(frame.rx, frame.pilots.at(l).symbols), window, cfg);
}

} // namespace msisac
