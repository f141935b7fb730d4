#ifndef IPD_STABILITY_HPP
#define IPD_STABILITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"
#include "ipd/representatives.hpp"

namespace ipd {

inline constexpr std::size_t kTestSizeMaxN = 50'000;
inline constexpr std::size_t kTestSizeMaxK = 50;

/// Positive root of n t^2 - t - K = 0 with n and K capped for large inputs.
inline double test_fraction(std::size_t k, std::size_t n) {
    if (n < 2) {
        throw InputError("test size needs n >= 2");
    }
    const double ne = static_cast<double>(std::min(n, kTestSizeMaxN));
    const double ke = static_cast<double>(std::clamp<std::size_t>(k, 1, kTestSizeMaxK));
    return (1.0 + std::sqrt(1.0 + 4.0 * ne * ke)) / (2.0 * ne);
}

/// Held-out sample size: round(n_eff * t), clamped to [2, n].
inline std::size_t compute_test_size(std::size_t k, std::size_t n) {
    const double ne = static_cast<double>(std::min(n, kTestSizeMaxN));
    const auto alpha = static_cast<std::size_t>(std::floor(ne * test_fraction(k, n) + 0.5));
    return std::clamp<std::size_t>(alpha, 2, n);
}

namespace detail {

inline std::uint64_t pairs_of(std::uint64_t c) { return c * (c - 1) / 2; }

inline std::uint64_t same_block_pairs(std::span<const Label> labels) {
    std::unordered_map<Label, std::uint64_t> sizes;
    for (Label l : labels) {
        ++sizes[l];
    }
    std::uint64_t total = 0;
    for (const auto& [label, c] : sizes) {
        total += pairs_of(c);
    }
    return total;
}

}  // namespace detail

/**
 * Fraction of unordered pairs whose co-membership differs between the two
 * labelings. Computed from block sizes: pairs together in exactly one
 * labeling = S_a + S_b - 2 S_ab. Noise (-1) is treated as an ordinary block.
 */
inline double instability(std::span<const Label> omega, std::span<const Label> omega_prime) {
    if (omega.size() != omega_prime.size()) {
        throw InputError("labelings differ in length (" + std::to_string(omega.size()) + " vs " +
                         std::to_string(omega_prime.size()) + ")");
    }
    if (omega.size() < 2) {
        throw InputError("instability needs at least two labels");
    }
    std::unordered_map<std::uint64_t, std::uint64_t> joint;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(omega[i])) << 32) |
                         static_cast<std::uint32_t>(omega_prime[i]);
        ++joint[key];
    }
    std::uint64_t s_ab = 0;
    for (const auto& [key, c] : joint) {
        s_ab += detail::pairs_of(c);
    }
    const std::uint64_t s_a = detail::same_block_pairs(omega);
    const std::uint64_t s_b = detail::same_block_pairs(omega_prime);
    const std::uint64_t flips = s_a + s_b - 2 * s_ab;
    return static_cast<double>(flips) / static_cast<double>(detail::pairs_of(omega.size()));
}

struct StabilityReport {
    std::size_t iteration = 0;
    double delta = 1.0;
    std::size_t eta = 0;
    std::size_t clusters = 0;
    std::size_t noise = 0;
    std::size_t processed = 0;
    std::size_t test_size = 0;
    std::size_t representatives = 0;
    std::uint64_t queries = 0;
    double silhouette = 0.0;
    bool silhouette_valid = false;
    bool forced_eta = false;
    std::vector<Label> omega;
    std::vector<Label> omega_prime;
};

/**
 * Labels the held-out ids with the previous and current representatives and
 * measures the instability between the two labelings. Fewer than two test
 * points yields delta = 1 so the caller keeps iterating.
 */
inline StabilityReport stability_step(const Dataset& data, const RepresentativeSet& reps_prev,
                                      const RepresentativeSet& reps_curr, std::span<const PointId> s_test) {
    StabilityReport r;
    r.test_size = s_test.size();
    r.representatives = reps_curr.size();
    r.omega = label_by_nearest_representative(data, s_test, reps_prev);
    r.omega_prime = label_by_nearest_representative(data, s_test, reps_curr);
    r.delta = s_test.size() < 2 ? 1.0 : instability(r.omega, r.omega_prime);
    return r;
}

}  // namespace ipd

#endif  // IPD_STABILITY_HPP
