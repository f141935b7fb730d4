#ifndef IPD_DBSCAN_HPP
#define IPD_DBSCAN_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <ostream>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"
#include "ipd/neighbor_index.hpp"

namespace ipd {

enum class PointStatus : std::uint8_t { unknown, core, border, noise };

inline std::string_view to_string(PointStatus s) {
    switch (s) {
        case PointStatus::core: return "core";
        case PointStatus::border: return "border";
        case PointStatus::noise: return "noise";
        case PointStatus::unknown: break;
    }
    return "unknown";
}

struct PointState {
    PointStatus status = PointStatus::unknown;
    Label label = kNoise;

    friend bool operator==(const PointState&, const PointState&) = default;
};

/**
 * Per-point states of a clustered subset, aligned with `ids`, plus the
 * eps-neighborhood (global ids, self included) computed for each point.
 */
struct DbscanResult {
    std::vector<PointId> ids;
    std::vector<PointState> states;
    std::vector<std::vector<PointId>> neighborhoods;
    Label next_label = 0;

    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(states.size());
        for (const auto& s : states) {
            out.push_back(s.label);
        }
        return out;
    }

    std::size_t cluster_count() const {
        std::set<Label> distinct;
        for (const auto& s : states) {
            if (s.label >= 0) {
                distinct.insert(s.label);
            }
        }
        return distinct.size();
    }

    std::size_t noise_count() const {
        std::size_t n = 0;
        for (const auto& s : states) {
            n += s.label == kNoise ? 1 : 0;
        }
        return n;
    }

    std::size_t position(PointId id) const {
        if (position_.empty() && !ids.empty()) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                position_.emplace(ids[i], i);
            }
        }
        const auto it = position_.find(id);
        if (it == position_.end()) {
            throw InternalError("point " + std::to_string(id) + " has no cached neighborhood");
        }
        return it->second;
    }

    const std::vector<PointId>& neighborhood(PointId id) const { return neighborhoods[position(id)]; }
    const PointState& state(PointId id) const { return states[position(id)]; }

private:
    mutable std::unordered_map<PointId, std::size_t> position_;
};

/**
 * Cluster expansion over precomputed neighborhoods.
 *
 * `neighbors(i)` yields the local indices of the eps-neighborhood of local
 * point i (self included). Seeds are visited in ascending local index and
 * clusters grow breadth-first. A border point reachable from two clusters
 * keeps the label of the cluster that reached it first. Labels start at
 * `next_label`, which is advanced past the last cluster created.
 */
template <class NeighborsFn>
std::vector<PointState> expand_clusters(std::size_t n, NeighborsFn&& neighbors, std::size_t min_pts,
                                        Label& next_label) {
    std::vector<PointState> state(n);
    std::deque<std::size_t> seeds;
    auto claim = [&](std::size_t r, Label c) {
        if (state[r].status == PointStatus::noise) {
            state[r] = {PointStatus::border, c};
        } else if (state[r].status == PointStatus::unknown) {
            state[r] = {PointStatus::border, c};
            seeds.push_back(r);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i].status != PointStatus::unknown) {
            continue;
        }
        const auto& nbrs = neighbors(i);
        if (std::size(nbrs) < min_pts) {
            state[i] = {PointStatus::noise, kNoise};
            continue;
        }
        const Label c = next_label++;
        state[i] = {PointStatus::core, c};
        for (auto r : nbrs) {
            claim(static_cast<std::size_t>(r), c);
        }
        while (!seeds.empty()) {
            const std::size_t q = seeds.front();
            seeds.pop_front();
            const auto& qn = neighbors(q);
            if (std::size(qn) >= min_pts) {
                state[q].status = PointStatus::core;
                for (auto r : qn) {
                    claim(static_cast<std::size_t>(r), c);
                }
            }
        }
    }
    return state;
}

/// Plain DBSCAN over the subset `ids` of `data`. |N_eps(p)| counts p itself.
inline DbscanResult dbscan(const Dataset& data, std::span<const PointId> ids, double eps, std::size_t min_pts,
                           QueryCounter& counter = global_query_counter(), Label first_label = 0) {
    if (min_pts < 1) {
        throw InputError("min_pts must be >= 1");
    }
    DbscanResult out;
    out.next_label = first_label;
    NeighborIndex index(data, eps, counter);  // validates eps even for empty input
    if (ids.empty()) {
        return out;
    }
    index.insert(ids);
    out.ids.assign(ids.begin(), ids.end());

    std::unordered_map<PointId, std::uint32_t> local;
    local.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!local.emplace(ids[i], static_cast<std::uint32_t>(i)).second) {
            throw InputError("duplicate point id " + std::to_string(ids[i]));
        }
    }
    out.neighborhoods.reserve(ids.size());
    std::vector<std::vector<std::uint32_t>> local_nbrs(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.neighborhoods.push_back(index.range_query(ids[i]));
        auto& ln = local_nbrs[i];
        ln.reserve(out.neighborhoods.back().size());
        for (PointId q : out.neighborhoods.back()) {
            ln.push_back(local.at(q));
        }
    }
    out.states = expand_clusters(
        ids.size(), [&](std::size_t i) -> const std::vector<std::uint32_t>& { return local_nbrs[i]; }, min_pts,
        out.next_label);
    return out;
}

inline DbscanResult dbscan(const Dataset& data, double eps, std::size_t min_pts,
                           QueryCounter& counter = global_query_counter()) {
    std::vector<PointId> ids(data.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<PointId>(i);
    }
    return dbscan(data, ids, eps, min_pts, counter);
}

/**
 * Noise test on cached state: fewer than min_pts neighbors and no core point
 * in the neighborhood. `status_of(id)` returns the current status of a point.
 */
template <class StatusOf>
bool is_noise(std::span<const PointId> neighborhood, std::size_t min_pts, StatusOf&& status_of) {
    if (neighborhood.size() >= min_pts) {
        return false;
    }
    for (PointId q : neighborhood) {
        if (status_of(q) == PointStatus::core) {
            return false;
        }
    }
    return true;
}

inline bool is_noise(PointId p, const DbscanResult& result, std::size_t min_pts) {
    return is_noise(std::span<const PointId>(result.neighborhood(p)), min_pts,
                    [&](PointId q) { return result.state(q).status; });
}

/// CSV export: point_id,label,status.
inline void write_partition(std::ostream& out, const DbscanResult& result) {
    out << "point_id,label,status\n";
    for (std::size_t i = 0; i < result.ids.size(); ++i) {
        out << result.ids[i] << ',' << result.states[i].label << ',' << to_string(result.states[i].status) << '\n';
    }
}

}  // namespace ipd

#endif  // IPD_DBSCAN_HPP
