#pragma once

#include <cstddef>
#include <vector>

namespace psm {

// Deterministic pairwise (cascade) summation. The split points depend only on
// the index range, never on thread count or data, so results are bit-identical
// run to run and across OMP schedules. Base case small enough to keep the
// error bound O(log n * eps) without recursion overhead dominating.

inline constexpr std::size_t kPairwiseBase = 64;

template <class F>
double pairwise_map_sum(std::size_t lo, std::size_t hi, F&& term)
{
    const std::size_t n = hi - lo;
    if (n <= kPairwiseBase) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_map_sum(lo, mid, term) + pairwise_map_sum(mid, hi, term);
}

inline double pairwise_sum(const double* a, std::size_t n)
{
    return pairwise_map_sum(std::size_t{0}, n, [a](std::size_t i) { return a[i]; });
}

inline double pairwise_sum(const std::vector<double>& a)
{
    return pairwise_sum(a.data(), a.size());
}

} // namespace psm
