#ifndef IPD_PARAMS_HPP
#define IPD_PARAMS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"
#include "ipd/sampling.hpp"

namespace ipd {

struct ParamCandidate {
    double eps = 0.0;
    std::size_t min_pts = 0;
    int c_eps = 0;
    int c_m = 0;
};

struct EpsStats {
    double eps = 0.0;
    int c_eps = 0;
    double mu_m = 0.0;     // mean |N_eps| over the sampled points
    double sigma_m = 0.0;  // population std of the same counts
};

struct ParamGrid {
    double mu_eps = 0.0;
    double sigma_eps = 0.0;
    std::size_t pooled_distances = 0;  // always 2m
    std::vector<EpsStats> eps_stats;
    std::vector<ParamCandidate> candidates;
};

struct ParamOptions {
    std::size_t m = 0;  // 0 selects min(500, n)
    std::size_t large_threshold = 10'000'000;
    std::size_t large_subsample = 1'000'000;
};

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    sd = std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace detail

/**
 * Candidate (eps, MinPts) pairs from nearest-neighbor statistics.
 *
 * The 3rd and 4th nearest-neighbor distances (self excluded) of m sampled
 * points are pooled; eps = mu + c*sigma for c in {1,2,3}. For each eps the
 * neighbor counts of the same m points give MinPts = round(mu_M - c_M*sigma_M)
 * for c_M in {0,1,2,3}, floored at 2 and deduplicated per eps.
 */
inline ParamGrid estimate_params(const Dataset& data, const ParamOptions& opts, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (n < 5) {
        throw InputError("need at least 5 points to estimate parameters (got " + std::to_string(n) + ")");
    }
    Rng rng(seed);

    std::vector<PointId> pool;
    if (n > opts.large_threshold) {
        pool = sample_ids(n, std::min(opts.large_subsample, n), rng);
    } else {
        pool.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pool[i] = static_cast<PointId>(i);
        }
    }
    const std::size_t m = opts.m == 0 ? std::min<std::size_t>(500, pool.size()) : opts.m;
    if (m > pool.size() || m == 0) {
        throw InputError("m must be in [1, n]");
    }
    const std::vector<PointId> sampled = sample_without_replacement(std::span<const PointId>(pool), m, rng);

    ParamGrid grid;
    std::vector<double> pooled;
    pooled.reserve(2 * m);
    std::vector<double> dist;
    dist.reserve(pool.size());
    for (PointId p : sampled) {
        dist.clear();
        const auto pp = data.point(p);
        for (PointId q : pool) {
            if (q != p) {
                dist.push_back(std::sqrt(detail::squared_distance_unchecked(pp, data.point(q))));
            }
        }
        std::nth_element(dist.begin(), dist.begin() + 3, dist.end());
        std::nth_element(dist.begin(), dist.begin() + 2, dist.begin() + 3);
        pooled.push_back(dist[2]);
        pooled.push_back(dist[3]);
    }
    grid.pooled_distances = pooled.size();
    detail::mean_std(pooled, grid.mu_eps, grid.sigma_eps);

    for (int c_eps = 1; c_eps <= 3; ++c_eps) {
        EpsStats st;
        st.c_eps = c_eps;
        st.eps = grid.mu_eps + c_eps * grid.sigma_eps;
        std::vector<double> counts;
        counts.reserve(m);
        for (PointId p : sampled) {
            const auto pp = data.point(p);
            std::size_t c = 0;
            for (PointId q : pool) {
                c += within_eps(pp, data.point(q), st.eps) ? 1 : 0;
            }
            counts.push_back(static_cast<double>(c));
        }
        detail::mean_std(counts, st.mu_m, st.sigma_m);
        grid.eps_stats.push_back(st);

        std::vector<std::size_t> seen;
        for (int c_m = 0; c_m <= 3; ++c_m) {
            const double raw = std::floor(st.mu_m - c_m * st.sigma_m + 0.5);
            const auto min_pts = static_cast<std::size_t>(std::max(2.0, raw));
            if (std::find(seen.begin(), seen.end(), min_pts) != seen.end()) {
                continue;
            }
            seen.push_back(min_pts);
            grid.candidates.push_back({st.eps, min_pts, c_eps, c_m});
        }
    }
    return grid;
}

/// Every point's k-th nearest-neighbor distance (self excluded), sorted descending. O(n^2).
inline std::vector<double> k_dist_curve(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    if (k < 1 || k >= n) {
        throw InputError("k must satisfy 1 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    }
    std::vector<double> out;
    out.reserve(n);
    std::vector<double> dist(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                dist[w++] = std::sqrt(detail::squared_distance_unchecked(data.point(i), data.point(j)));
            }
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
        out.push_back(dist[k - 1]);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace ipd

#endif  // IPD_PARAMS_HPP
