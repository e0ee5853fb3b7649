// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Thin FFTW wrapper: strided batched 1-D transforms on complex<double> storage.

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>

#include "msisac/common.hpp"

namespace msisac::fft {

enum class Direction { forward, inverse };

namespace detail {

// FFTW's planner is not thread-safe; execution with new-array functions is.
inline std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}

using PlanKey = std::tuple<int, int, int, int, int>; // n, howmany, stride, dist, sign

class PlanCache {
  public:
    ~PlanCache()
    {
        for (auto &[key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int howmany, int stride, int dist, int sign)
    {
        std::lock_guard lock(planner_mutex());
        const PlanKey key{n, howmany, stride, dist, sign};
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        // In-place plan: new-array execution must match the plan's in-place-ness.
        const std::size_t span = static_cast<std::size_t>((howmany - 1) * dist + (n - 1) * stride + 1);
        auto *buf = fftw_alloc_complex(span);
        fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist, sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::map<PlanKey, fftw_plan> plans_;
};

inline PlanCache &plan_cache()
{
    static PlanCache cache;
    return cache;
}

inline fftw_complex *as_fftw(cdouble *p) { return reinterpret_cast<fftw_complex *>(p); }

} // namespace detail

/// Unnormalized in-place transforms of `howmany` sequences of length n.
/// forward: X[k] = sum x[i] e^{-j 2 pi i k / n}; inverse uses e^{+j ...}.
inline void transform(cdouble *data, int n, int howmany, int stride, int dist, Direction dir)
{
    if (n <= 0 || howmany <= 0)
        return;
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = detail::plan_cache().get(n, howmany, stride, dist, sign);
    fftw_execute_dft(plan, detail::as_fftw(data), detail::as_fftw(data));
}

/// Transform every column of a row-major grid (along the row index).
inline void along_rows(CMatrix &m, Direction dir)
{
    transform(m.data(), static_cast<int>(m.rows()), static_cast<int>(m.cols()), static_cast<int>(m.cols()), 1, dir);
}

/// Transform every row of a row-major grid (along the column index).
inline void along_cols(CMatrix &m, Direction dir)
{
    transform(m.data(), static_cast<int>(m.cols()), static_cast<int>(m.rows()), 1, static_cast<int>(m.cols()), dir);
}

} // namespace msisac::fft
