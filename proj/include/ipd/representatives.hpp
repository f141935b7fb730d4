#ifndef IPD_REPRESENTATIVES_HPP
#define IPD_REPRESENTATIVES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"
#include "ipd/prototype.hpp"

namespace ipd {

struct Representative {
    PointId id = 0;
    std::vector<double> coords;
    Label label = kNoise;
    std::size_t rho = 0;  // cached neighborhood size
};

struct RepresentativeSet {
    std::vector<Representative> entries;
    double tau = 0.0;
    std::size_t dim = 0;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }

    std::size_t count_for(Label label) const {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [&](const Representative& r) { return r.label == label; }));
    }
};

/// Density-ratio sieve: keep q when rho_q / rho_max <= tau, or when rho_q is the cluster maximum.
inline bool passes_phi(std::size_t rho, std::size_t rho_max, double tau) {
    return rho == rho_max || static_cast<double>(rho) <= tau * static_cast<double>(rho_max);
}

/**
 * Cluster representatives: for every cluster, its low-density cores (ratio to
 * the densest core at most tau) plus every core at the density peak. Entries
 * are ordered by label, then point id. No clusters yields an empty set.
 */
inline RepresentativeSet select_representatives(const PrototypeGraph& graph, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw InputError("tau must be in (0, 1]");
    }
    std::map<Label, std::vector<PointId>> cores;
    for (PointId id : graph.members()) {
        const PointState s = graph.state(id);
        if (s.status == PointStatus::core) {
            if (s.label < 0) {
                throw InternalError("core point " + std::to_string(id) + " has no cluster");
            }
            cores[s.label].push_back(id);
        }
    }
    for (PointId id : graph.members()) {
        const PointState s = graph.state(id);
        if (s.label >= 0 && !cores.count(s.label)) {
            throw InternalError("cluster " + std::to_string(s.label) + " has no core point");
        }
    }

    RepresentativeSet out;
    out.tau = tau;
    out.dim = graph.data().dim();
    for (auto& [label, ids] : cores) {
        std::sort(ids.begin(), ids.end());
        std::size_t rho_max = 0;
        for (PointId id : ids) {
            rho_max = std::max(rho_max, graph.neighbor_count(id));
        }
        for (PointId id : ids) {
            const std::size_t rho = graph.neighbor_count(id);
            if (passes_phi(rho, rho_max, tau)) {
                const auto p = graph.data().point(id);
                out.entries.push_back({id, std::vector<double>(p.begin(), p.end()), label, rho});
            }
        }
    }
    return out;
}

struct NearestRepresentative {
    std::size_t index = 0;  // into RepresentativeSet::entries
    double distance = std::numeric_limits<double>::infinity();
};

/// Nearest entry to `point`; ties go to the smaller label, then the smaller point id.
inline NearestRepresentative nearest_representative(std::span<const double> point, const RepresentativeSet& reps) {
    if (reps.empty()) {
        throw InputError("representative set is empty");
    }
    if (point.size() != reps.dim) {
        throw InputError("dimension mismatch: point has " + std::to_string(point.size()) + ", representatives have " +
                         std::to_string(reps.dim));
    }
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < reps.entries.size(); ++i) {
        const Representative& r = reps.entries[i];
        const double sq = detail::squared_distance_unchecked(point, r.coords);
        if (sq < best_sq) {
            best = i;
            best_sq = sq;
        } else if (sq == best_sq) {
            const Representative& b = reps.entries[best];
            if (r.label < b.label || (r.label == b.label && r.id < b.id)) {
                best = i;
            }
        }
    }
    return {best, std::sqrt(best_sq)};
}

/// 1-NN labels for the rows of `points`. An empty set labels everything noise.
inline std::vector<Label> label_by_nearest_representative(const Dataset& points, const RepresentativeSet& reps) {
    std::vector<Label> out(points.size(), kNoise);
    if (reps.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = reps.entries[nearest_representative(points.point(i), reps).index].label;
    }
    return out;
}

/// 1-NN labels for a subset of `data`, aligned with `ids`.
inline std::vector<Label> label_by_nearest_representative(const Dataset& data, std::span<const PointId> ids,
                                                          const RepresentativeSet& reps) {
    std::vector<Label> out(ids.size(), kNoise);
    if (reps.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out[i] = reps.entries[nearest_representative(data.point(ids[i]), reps).index].label;
    }
    return out;
}

struct NoiseRefinement {
    bool applied = false;
    std::string warning;
    double mean = 0.0;
    double sd = 0.0;
    double upper = 0.0;  // noise closer than this to a representative is reassigned
    std::vector<std::pair<PointId, Label>> reassigned;
};

inline constexpr double kZ995 = 2.5758;

/**
 * Noise refinement. The distances from border points to their nearest
 * representative define the interval mean +- z*sd (sample sd, z for a
 * two-sided 1% level); each noise point whose nearest representative lies
 * closer than the upper bound joins that representative's cluster. The graph
 * itself is not modified; callers apply `reassigned` to their labels.
 */
inline NoiseRefinement refine_noise(const PrototypeGraph& graph, const RepresentativeSet& reps) {
    NoiseRefinement out;
    if (reps.empty()) {
        out.warning = "no representatives; noise refinement skipped";
        return out;
    }
    std::vector<double> s;
    for (PointId id : graph.members()) {
        if (graph.state(id).status == PointStatus::border) {
            s.push_back(nearest_representative(graph.data().point(id), reps).distance);
        }
    }
    if (s.size() < 2) {
        out.warning = "fewer than two border points; noise refinement skipped";
        return out;
    }
    for (double d : s) {
        out.mean += d;
    }
    out.mean /= static_cast<double>(s.size());
    double ss = 0.0;
    for (double d : s) {
        ss += (d - out.mean) * (d - out.mean);
    }
    out.sd = std::sqrt(ss / static_cast<double>(s.size() - 1));
    out.upper = out.mean + kZ995 * out.sd;
    out.applied = true;
    for (PointId id : graph.members()) {
        if (graph.state(id).status != PointStatus::noise) {
            continue;
        }
        const auto nearest = nearest_representative(graph.data().point(id), reps);
        if (nearest.distance < out.upper) {
            out.reassigned.emplace_back(id, reps.entries[nearest.index].label);
        }
    }
    return out;
}

}  // namespace ipd

#endif  // IPD_REPRESENTATIVES_HPP
