#ifndef IPD_PROTOTYPE_HPP
#define IPD_PROTOTYPE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/dbscan.hpp"
#include "ipd/error.hpp"
#include "ipd/neighbor_index.hpp"
#include "ipd/sampling.hpp"
#include "ipd/union_find.hpp"

namespace ipd {

struct StateChange {
    PointId id = 0;
    PointState before;
    PointState after;
};

using ChangeLog = std::vector<StateChange>;

/// Edge classification by endpoint core status: both, exactly one, neither.
enum class EdgeState { v_yes, v_weak, v_no };

struct EtaOptions {
    double fraction = 0.10;       // share of members sampled for the mean neighbor count
    std::size_t min_sample = 30;  // lower bound on that sample
};

/**
 * Core-threshold update rule: a mean neighbor count above MinPts steps eta by
 * one, otherwise eta jumps to the rounded mean. The result never decreases,
 * never exceeds MinPts and is at least 2 (unless MinPts itself is 1).
 */
inline std::size_t next_eta(double mean_neighbors, std::size_t eta, std::size_t min_pts) {
    if (eta >= min_pts) {
        return min_pts;
    }
    std::size_t proposal = mean_neighbors > static_cast<double>(min_pts)
                               ? eta + 1
                               : static_cast<std::size_t>(std::max(0.0, std::floor(mean_neighbors + 0.5)));
    proposal = std::clamp(proposal, eta + 1, min_pts);
    return std::max(proposal, std::min<std::size_t>(2, min_pts));
}

/**
 * The processed sample together with its cached eps-neighborhoods, point
 * states and cluster membership.
 *
 * Neighborhoods are restricted to processed points (plus the batch being
 * absorbed) and are the single source of truth for point states: a member is
 * core iff its cached neighborhood has at least eta points, border iff it is
 * not core but has a core neighbor, and noise otherwise. Cluster ids are
 * merged through a union-find whose root is the smallest id, and every stored
 * label of a clustered member is a root after each public operation.
 */
class PrototypeGraph {
public:
    PrototypeGraph(const Dataset& data, double eps, std::size_t min_pts,
                   QueryCounter& counter = global_query_counter())
        : data_(&data), eps_(eps), min_pts_(min_pts), index_(data, eps, counter),
          slot_(data.size(), kNoSlot) {
        if (min_pts < 1) {
            throw InputError("min_pts must be >= 1");
        }
    }

    const Dataset& data() const noexcept { return *data_; }
    double eps() const noexcept { return eps_; }
    std::size_t min_pts() const noexcept { return min_pts_; }
    std::size_t eta() const noexcept { return eta_; }
    Label next_cluster_id() const noexcept { return static_cast<Label>(uf_.size()); }

    /// Processed point ids in the order they were absorbed.
    const std::vector<PointId>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }

    bool is_member(PointId id) const { return id < slot_.size() && slot_[id] != kNoSlot && slots_[slot_[id]].processed; }

    const std::vector<PointId>& neighborhood(PointId id) const { return member_slot(id).nbrs; }
    std::size_t neighbor_count(PointId id) const { return member_slot(id).nbrs.size(); }

    PointState state(PointId id) const {
        const Slot& s = member_slot(id);
        return {s.status, s.label};
    }

    EdgeState edge_state(PointId u, PointId v) const {
        const bool cu = member_slot(u).status == PointStatus::core;
        const bool cv = member_slot(v).status == PointStatus::core;
        return cu && cv ? EdgeState::v_yes : (cu || cv ? EdgeState::v_weak : EdgeState::v_no);
    }

    std::vector<PointId> points_with(PointStatus status) const {
        std::vector<PointId> out;
        for (PointId id : members_) {
            if (slots_[slot_[id]].status == status) {
                out.push_back(id);
            }
        }
        return out;
    }

    std::size_t count_with(PointStatus status) const {
        std::size_t n = 0;
        for (PointId id : members_) {
            n += slots_[slot_[id]].status == status ? 1 : 0;
        }
        return n;
    }

    std::size_t noise_count() const { return count_with(PointStatus::noise); }

    std::size_t cluster_count() const {
        std::set<Label> roots;
        for (PointId id : members_) {
            const Label l = slots_[slot_[id]].label;
            if (l >= 0) {
                roots.insert(l);
            }
        }
        return roots.size();
    }

    /// Labels of members, in `members()` order.
    std::vector<Label> member_labels() const {
        std::vector<Label> out;
        out.reserve(members_.size());
        for (PointId id : members_) {
            out.push_back(slots_[slot_[id]].label);
        }
        return out;
    }

    /**
     * Absorbs the initial sample: every point is indexed, queried once, and
     * clustered by DBSCAN with threshold `eta` (seeds in ascending id order).
     */
    void seed(std::span<const PointId> sample, std::size_t eta, const EtaOptions* estimate = nullptr,
              Rng* rng = nullptr) {
        if (!members_.empty()) {
            throw InputError("prototype already seeded");
        }
        std::vector<PointId> ids(sample.begin(), sample.end());
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
            throw InputError("prototype sample contains duplicate ids");
        }
        for (PointId id : ids) {
            allocate(id);
        }
        for (PointId id : ids) {
            Slot& s = slots_[slot_[id]];
            s.nbrs = index_.range_query(id);
            s.processed = true;
            s.generation = generation_;
            members_.push_back(id);
        }
        eta_ = eta;
        if (estimate != nullptr && rng != nullptr) {
            eta_ = next_eta(mean_neighbor_count(*estimate, *rng), eta, min_pts_);
        }
        if (eta_ < 1) {
            throw InputError("eta must be >= 1");
        }

        std::vector<std::vector<std::uint32_t>> local(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (PointId q : slots_[i].nbrs) {
                local[i].push_back(slot_[q]);
            }
        }
        Label next = 0;
        const auto states = expand_clusters(
            ids.size(), [&](std::size_t i) -> const std::vector<std::uint32_t>& { return local[i]; }, eta_, next);
        uf_ = MinRootUnionFind(static_cast<std::size_t>(next));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            slots_[i].status = states[i].status;
            slots_[i].label = states[i].label;
        }
    }

    /// Mean cached neighborhood size over a random share of the members.
    double mean_neighbor_count(const EtaOptions& opts, Rng& rng) const {
        if (members_.empty()) {
            throw InputError("prototype is empty");
        }
        const auto wanted = static_cast<std::size_t>(std::ceil(opts.fraction * static_cast<double>(members_.size())));
        const std::size_t k = std::min(members_.size(), std::max(wanted, opts.min_sample));
        const auto picked = sample_without_replacement(std::span<const PointId>(members_), k, rng);
        double total = 0.0;
        for (PointId id : picked) {
            total += static_cast<double>(neighbor_count(id));
        }
        return total / static_cast<double>(k);
    }

    /// Proposed next eta (does not modify the graph).
    std::size_t estimate_eta(const EtaOptions& opts, Rng& rng) const {
        return next_eta(mean_neighbor_count(opts, rng), eta_, min_pts_);
    }

    /**
     * Raises the core threshold. Cores whose neighborhood is now too small are
     * demoted to border or noise, non-core neighbors that lose their last core
     * neighbor become noise, and clusters that lost their connecting cores are
     * split into their remaining core-connected components (the piece holding
     * the smallest point id keeps the old label, the rest get fresh ids).
     */
    ChangeLog reevaluate_core(std::size_t new_eta) {
        if (new_eta < eta_) {
            throw InputError("eta may not decrease (" + std::to_string(eta_) + " -> " + std::to_string(new_eta) + ")");
        }
        ChangeLog log;
        if (new_eta == eta_) {
            return log;
        }
        eta_ = new_eta;

        std::vector<PointState> before(slots_.size());
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            before[i] = {slots_[i].status, slots_[i].label};
        }

        std::vector<std::uint32_t> demoted;
        std::set<Label> affected;
        for (PointId id : members_) {
            Slot& s = slots_[slot_[id]];
            if (s.status == PointStatus::core && s.nbrs.size() < eta_) {
                demoted.push_back(slot_[id]);
                affected.insert(s.label);
                s.status = PointStatus::border;
            }
        }
        if (demoted.empty()) {
            return log;
        }

        // Demoted points and their neighbors are the only candidates for losing
        // all core neighbors; one pass reaches the fixpoint because demotion
        // depends on neighborhood size alone.
        std::vector<std::uint32_t> touched = demoted;
        for (std::uint32_t d : demoted) {
            for (PointId q : slots_[d].nbrs) {
                touched.push_back(slot_[q]);
            }
        }
        for (std::uint32_t t : touched) {
            Slot& s = slots_[t];
            if (s.processed && s.status == PointStatus::border && lacks_core_neighbor(s)) {
                s.status = PointStatus::noise;
                s.label = kNoise;
            }
        }
        split_clusters(affected);

        for (std::size_t i = 0; i < slots_.size(); ++i) {
            const PointState now{slots_[i].status, slots_[i].label};
            if (slots_[i].processed && now != before[i]) {
                log.push_back({slots_[i].id, before[i], now});
            }
        }
        return log;
    }

    /**
     * Re-verifies a processed noise or border point next to an expanding
     * cluster `current_label`: noise becomes core or border of that cluster,
     * border becomes core once its neighborhood reaches eta. Cores are left as
     * they are. Returns the change, if any.
     */
    std::optional<StateChange> reevaluate_noise_border(PointId x, Label current_label) {
        Slot& s = member_slot_mut(x);
        const PointState before{s.status, s.label};
        const bool dense = s.nbrs.size() >= eta_;
        if (s.status == PointStatus::noise) {
            s.label = current_label;
            s.status = dense ? PointStatus::core : (current_label >= 0 ? PointStatus::border : PointStatus::noise);
        } else if (s.status == PointStatus::border && dense) {
            s.status = PointStatus::core;
        }
        const PointState after{s.status, s.label};
        if (after == before) {
            return std::nullopt;
        }
        return StateChange{x, before, after};
    }

    /**
     * Absorbs a batch of new points. Each unprocessed point is queried against
     * members plus the batch and cached; members that gain it as a neighbor
     * have their cached neighborhood extended. New cores join the cluster of
     * adjacent cores, bridge and merge several clusters (smallest id wins), or
     * found a new cluster; the expansion walks through unprocessed batch points
     * in their neighborhoods. Points already processed are skipped.
     * Returns the next unused cluster id.
     */
    Label inc_dbscan(std::span<const PointId> batch) {
        ++generation_;
        std::vector<PointId> fresh;
        fresh.reserve(batch.size());
        for (PointId id : batch) {
            if (id >= slot_.size()) {
                throw InputError("point id " + std::to_string(id) + " out of range");
            }
            if (slot_[id] != kNoSlot) {
                continue;
            }
            allocate(id);
            fresh.push_back(id);
        }
        std::deque<std::uint32_t> pending_cores;
        for (PointId id : fresh) {
            if (slots_[slot_[id]].processed) {
                continue;
            }
            absorb(slot_[id], kNoise, pending_cores);
            drain(pending_cores);
        }
        normalize_labels();
        return next_cluster_id();
    }

private:
    static constexpr std::uint32_t kNoSlot = 0xFFFFFFFFu;

    struct Slot {
        PointId id = 0;
        std::vector<PointId> nbrs;
        PointStatus status = PointStatus::unknown;
        Label label = kNoise;
        std::uint32_t generation = 0;
        bool processed = false;
    };

    const Slot& member_slot(PointId id) const {
        if (!is_member(id)) {
            throw InternalError("point " + std::to_string(id) + " is not a processed prototype member");
        }
        return slots_[slot_[id]];
    }

    Slot& member_slot_mut(PointId id) { return const_cast<Slot&>(member_slot(id)); }

    void allocate(PointId id) {
        slot_[id] = static_cast<std::uint32_t>(slots_.size());
        Slot s;
        s.id = id;
        slots_.push_back(std::move(s));
        index_.insert(id);
    }

    bool lacks_core_neighbor(const Slot& s) const {
        for (PointId q : s.nbrs) {
            const Slot& o = slots_[slot_[q]];
            if (o.processed && o.status == PointStatus::core) {
                return false;
            }
        }
        return true;
    }

    // Queries slot x, caches its neighborhood, extends older members'
    // neighborhoods and classifies x. `expanding` is the label of the core
    // whose expansion reached x, or kNoise when x comes from the batch loop.
    void absorb(std::uint32_t x, Label expanding, std::deque<std::uint32_t>& pending_cores) {
        Slot& sx = slots_[x];
        sx.nbrs = index_.range_query(sx.id);
        sx.processed = true;
        sx.generation = generation_;
        members_.push_back(sx.id);

        for (PointId q : sx.nbrs) {
            const std::uint32_t sq = slot_[q];
            if (sq == x) {
                continue;
            }
            Slot& o = slots_[sq];
            if (o.processed && o.generation < generation_) {
                o.nbrs.push_back(sx.id);
                if (o.status != PointStatus::core && o.nbrs.size() >= eta_) {
                    reevaluate_noise_border(o.id, o.status == PointStatus::border ? o.label : kNoise);
                    pending_cores.push_back(sq);
                }
            }
        }

        Slot& s = slots_[x];
        if (s.nbrs.size() >= eta_) {
            s.status = PointStatus::core;
            s.label = expanding;
            pending_cores.push_back(x);
            return;
        }
        if (expanding >= 0) {
            s.status = PointStatus::border;
            s.label = expanding;
            return;
        }
        Label best = kNoise;
        for (PointId q : s.nbrs) {
            const Slot& o = slots_[slot_[q]];
            if (o.processed && o.status == PointStatus::core && o.label >= 0) {
                const Label r = uf_.find(o.label);
                best = best == kNoise ? r : std::min(best, r);
            }
        }
        s.status = best == kNoise ? PointStatus::noise : PointStatus::border;
        s.label = best;
    }

    // Labels queued cores: join adjacent labeled clusters (merging them under
    // the smallest id) or open a new cluster, then expand into the neighborhood.
    void drain(std::deque<std::uint32_t>& pending_cores) {
        while (!pending_cores.empty()) {
            const std::uint32_t c = pending_cores.front();
            pending_cores.pop_front();
            if (slots_[c].status != PointStatus::core) {
                continue;
            }
            std::vector<Label> merge;
            if (slots_[c].label >= 0) {
                merge.push_back(uf_.find(slots_[c].label));
            }
            for (PointId q : slots_[c].nbrs) {
                const Slot& o = slots_[slot_[q]];
                if (slot_[q] != c && o.processed && o.status == PointStatus::core && o.label >= 0) {
                    merge.push_back(uf_.find(o.label));
                }
            }
            Label k;
            if (merge.empty()) {
                k = uf_.make_set();
            } else {
                k = *std::min_element(merge.begin(), merge.end());
                for (Label l : merge) {
                    uf_.unite(k, l);
                }
            }
            slots_[c].label = k;

            // Copied because absorbing a neighbor can append to this list.
            const std::vector<PointId> nbrs = slots_[c].nbrs;
            for (PointId q : nbrs) {
                const std::uint32_t sq = slot_[q];
                if (sq == c) {
                    continue;
                }
                if (!slots_[sq].processed) {
                    absorb(sq, k, pending_cores);
                } else if (slots_[sq].status == PointStatus::noise) {
                    const auto change = reevaluate_noise_border(q, k);
                    if (change && change->after.status == PointStatus::core) {
                        pending_cores.push_back(sq);
                    }
                }
            }
        }
    }

    void normalize_labels() {
        for (PointId id : members_) {
            Slot& s = slots_[slot_[id]];
            if (s.label >= 0) {
                s.label = uf_.find(s.label);
            }
        }
    }

    void split_clusters(const std::set<Label>& affected_raw) {
        std::set<Label> affected;
        for (Label l : affected_raw) {
            if (l >= 0) {
                affected.insert(uf_.find(l));
            }
        }
        if (affected.empty()) {
            return;
        }
        normalize_labels();
        std::vector<PointId> sorted_members = members_;
        std::sort(sorted_members.begin(), sorted_members.end());

        std::unordered_map<std::uint32_t, Label> fresh_label;
        std::set<Label> kept;
        for (PointId id : sorted_members) {
            const std::uint32_t start = slot_[id];
            const Slot& s = slots_[start];
            if (s.status != PointStatus::core || !affected.count(s.label) || fresh_label.count(start)) {
                continue;
            }
            const Label old = s.label;
            const Label assigned = kept.insert(old).second ? old : uf_.make_set();
            std::deque<std::uint32_t> queue{start};
            fresh_label[start] = assigned;
            while (!queue.empty()) {
                const std::uint32_t u = queue.front();
                queue.pop_front();
                for (PointId q : slots_[u].nbrs) {
                    const std::uint32_t v = slot_[q];
                    if (slots_[v].processed && slots_[v].status == PointStatus::core && !fresh_label.count(v)) {
                        fresh_label[v] = assigned;
                        queue.push_back(v);
                    }
                }
            }
        }
        for (const auto& [slot, label] : fresh_label) {
            slots_[slot].label = label;
        }
        for (PointId id : members_) {
            Slot& s = slots_[slot_[id]];
            if (s.status != PointStatus::border || !affected.count(s.label)) {
                continue;
            }
            Label best = kNoise;
            bool keeps_old = false;
            for (PointId q : s.nbrs) {
                const Slot& o = slots_[slot_[q]];
                if (o.processed && o.status == PointStatus::core) {
                    keeps_old = keeps_old || o.label == s.label;
                    best = best == kNoise ? o.label : std::min(best, o.label);
                }
            }
            if (!keeps_old) {
                s.label = best;
                if (best == kNoise) {
                    s.status = PointStatus::noise;
                }
            }
        }
    }

    const Dataset* data_;
    double eps_;
    std::size_t min_pts_;
    std::size_t eta_ = 1;
    NeighborIndex index_;
    std::vector<std::uint32_t> slot_;
    std::vector<Slot> slots_;
    std::vector<PointId> members_;
    MinRootUnionFind uf_;
    std::uint32_t generation_ = 0;
};

struct PrototypeInit {
    PrototypeGraph graph;
    std::vector<PointId> remaining;
};

/**
 * Samples gamma distinct points, estimates the starting eta from their
 * neighbor counts (starting at eta = 1) and clusters them with DBSCAN at that
 * threshold. Returns the graph and the unsampled ids.
 */
inline PrototypeInit init_prototype(const Dataset& data, std::size_t gamma, double eps, std::size_t min_pts, Rng& rng,
                                    const EtaOptions& eta_opts = {},
                                    QueryCounter& counter = global_query_counter()) {
    if (gamma < 1 || gamma > data.size()) {
        throw InputError("gamma must be in [1, n] (gamma=" + std::to_string(gamma) + ", n=" +
                         std::to_string(data.size()) + ")");
    }
    std::vector<PointId> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = static_cast<PointId>(i);
    }
    // Partial shuffle: the first gamma entries become the sample.
    for (std::size_t i = 0; i < gamma; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    std::vector<PointId> sample(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(gamma));
    std::vector<PointId> remaining(all.begin() + static_cast<std::ptrdiff_t>(gamma), all.end());

    PrototypeInit out{PrototypeGraph(data, eps, min_pts, counter), std::move(remaining)};
    out.graph.seed(sample, 1, &eta_opts, &rng);
    return out;
}

inline PrototypeInit init_prototype(const Dataset& data, std::size_t gamma, double eps, std::size_t min_pts,
                                    std::uint64_t seed) {
    Rng rng(seed);
    return init_prototype(data, gamma, eps, min_pts, rng);
}

}  // namespace ipd

#endif  // IPD_PROTOTYPE_HPP
