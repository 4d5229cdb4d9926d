#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>

namespace dephasim {

/// Paths per reduction block. Ensemble sums are defined as: ascending sum
/// inside each block, then ascending sum of the block partials. Any worker
/// layout that follows this tree produces bit-identical totals.
inline constexpr std::size_t kReductionBlock = 256;

template <typename T>
T blocked_sum(std::span<const T> terms) {
    T total{};
    for (std::size_t begin = 0; begin < terms.size(); begin += kReductionBlock) {
        const std::size_t end = std::min(terms.size(), begin + kReductionBlock);
        T partial{};
        for (std::size_t i = begin; i < end; ++i) partial += terms[i];
        total += partial;
    }
    return total;
}

}  // namespace dephasim
