#ifndef IPD_METRICS_HPP
#define IPD_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

namespace detail {

inline double entropy(const std::map<Label, double>& counts, double total) {
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        const double p = c / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace detail

/**
 * Normalized mutual information 2 I(U;V) / (H(U) + H(V)) over the positions
 * where `pred` is not noise. Returns 0 when every prediction is noise, and 1
 * when both remaining partitions are a single block.
 */
inline double nmi_excluding_noise(std::span<const Label> pred, std::span<const Label> truth) {
    if (pred.size() != truth.size()) {
        throw InputError("label sequences differ in length (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
    }
    std::map<Label, double> pu;
    std::map<Label, double> pv;
    std::map<std::pair<Label, Label>, double> joint;
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == kNoise) {
            continue;
        }
        pu[pred[i]] += 1.0;
        pv[truth[i]] += 1.0;
        joint[{pred[i], truth[i]}] += 1.0;
        total += 1.0;
    }
    if (total == 0.0) {
        return 0.0;
    }
    const double hu = detail::entropy(pu, total);
    const double hv = detail::entropy(pv, total);
    if (hu == 0.0 && hv == 0.0) {
        return 1.0;
    }
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        mi += (c / total) * std::log(c * total / (pu[key.first] * pv[key.second]));
    }
    return std::clamp(2.0 * mi / (hu + hv), 0.0, 1.0);
}

/// Clustered fraction 1 - noise/n.
inline double coverage(std::size_t noise, std::size_t n) {
    if (n == 0) {
        throw InputError("coverage of an empty dataset is undefined");
    }
    if (noise > n) {
        throw InputError("noise count exceeds dataset size");
    }
    return 1.0 - static_cast<double>(noise) / static_cast<double>(n);
}

/// Harmonic combination of NMI and coverage; 0 when both are 0.
inline double omega(double phi, std::size_t noise, std::size_t n) {
    const double nu = coverage(noise, n);
    return phi + nu == 0.0 ? 0.0 : 2.0 * phi * nu / (phi + nu);
}

struct EvalResult {
    double nmi = 0.0;
    std::size_t noise = 0;
    double nu = 0.0;
    double omega = 0.0;
    std::size_t clusters = 0;
};

inline EvalResult evaluate(std::span<const Label> pred, std::span<const Label> truth) {
    EvalResult r;
    r.nmi = nmi_excluding_noise(pred, truth);
    std::set<Label> distinct;
    for (Label l : pred) {
        if (l == kNoise) {
            ++r.noise;
        } else {
            distinct.insert(l);
        }
    }
    r.clusters = distinct.size();
    r.nu = coverage(r.noise, pred.size());
    r.omega = omega(r.nmi, r.noise, pred.size());
    return r;
}

struct SilhouetteResult {
    double value = 0.0;
    bool valid = false;  // false when fewer than two clusters remain after dropping noise
};

/**
 * Mean silhouette over the non-noise rows of `points` (Euclidean). A point in
 * a singleton cluster, or with a = b = 0, scores 0.
 */
inline SilhouetteResult silhouette(const Dataset& points, std::span<const Label> labels) {
    if (labels.size() != points.size()) {
        throw InputError("label count does not match point count");
    }
    std::vector<std::size_t> idx;
    std::map<Label, std::size_t> cluster_index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kNoise) {
            idx.push_back(i);
            cluster_index.emplace(labels[i], cluster_index.size());
        }
    }
    SilhouetteResult out;
    if (cluster_index.size() < 2) {
        return out;
    }
    const std::size_t k = cluster_index.size();
    std::vector<std::size_t> cid(idx.size());
    std::vector<std::size_t> cluster_size(k, 0);
    for (std::size_t u = 0; u < idx.size(); ++u) {
        cid[u] = cluster_index[labels[idx[u]]];
        ++cluster_size[cid[u]];
    }
    std::vector<double> sums(k);
    double total = 0.0;
    for (std::size_t u = 0; u < idx.size(); ++u) {
        std::fill(sums.begin(), sums.end(), 0.0);
        const auto pu = points.point(idx[u]);
        for (std::size_t v = 0; v < idx.size(); ++v) {
            if (u != v) {
                sums[cid[v]] += std::sqrt(detail::squared_distance_unchecked(pu, points.point(idx[v])));
            }
        }
        const std::size_t own = cid[u];
        if (cluster_size[own] < 2) {
            continue;
        }
        const double a = sums[own] / static_cast<double>(cluster_size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) {
                b = std::min(b, sums[c] / static_cast<double>(cluster_size[c]));
            }
        }
        const double denom = std::max(a, b);
        total += denom == 0.0 ? 0.0 : (b - a) / denom;
    }
    out.value = total / static_cast<double>(idx.size());
    out.valid = true;
    return out;
}

}  // namespace ipd

#endif  // IPD_METRICS_HPP
