#ifndef IPD_SAMPLING_HPP
#define IPD_SAMPLING_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

using Rng = std::mt19937_64;

/// Uniform draw of m distinct elements of `pool` (partial Fisher-Yates on a copy).
template <class T>
std::vector<T> sample_without_replacement(std::span<const T> pool, std::size_t m, Rng& rng) {
    if (m > pool.size()) {
        throw InputError("cannot sample " + std::to_string(m) + " items from " + std::to_string(pool.size()));
    }
    std::vector<T> work(pool.begin(), pool.end());
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, work.size() - 1);
        std::swap(work[i], work[pick(rng)]);
    }
    work.resize(m);
    return work;
}

inline std::vector<PointId> sample_ids(std::size_t n, std::size_t m, Rng& rng) {
    std::vector<PointId> all(n);
    std::iota(all.begin(), all.end(), PointId{0});
    return sample_without_replacement(std::span<const PointId>(all), m, rng);
}

/// Fractions in (0, 1] are taken relative to n and rounded half-up; values > 1 are absolute counts.
inline std::size_t resolve_count(double value, std::size_t n) {
    if (!(value > 0.0)) {
        throw InputError("sample size must be positive");
    }
    if (value <= 1.0) {
        return static_cast<std::size_t>(std::floor(value * static_cast<double>(n) + 0.5));
    }
    return static_cast<std::size_t>(std::floor(value + 0.5));
}

}  // namespace ipd

#endif  // IPD_SAMPLING_HPP
