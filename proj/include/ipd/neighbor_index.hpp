#ifndef IPD_NEIGHBOR_INDEX_HPP
#define IPD_NEIGHBOR_INDEX_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

/**
 * Eps-range index over a growing subset of a Dataset.
 *
 * Points are hashed into a uniform grid of cell side eps and a query scans the
 * 3^d stencil around the query cell. Above kMaxGridDim dimensions the stencil
 * explodes, so the index degrades to an exhaustive scan of the subset.
 *
 * Queries return ids in ascending order and include the query point itself
 * when it is indexed. Every query bumps the attached QueryCounter.
 */
class NeighborIndex {
public:
    static constexpr std::size_t kMaxGridDim = 8;

    NeighborIndex(const Dataset& data, double eps, QueryCounter& counter = global_query_counter())
        : data_(&data), eps_(eps), cell_side_(eps * (1.0 + 1e-9)), counter_(&counter),
          use_grid_(data.dim() <= kMaxGridDim) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw InputError("eps must be a positive finite number");
        }
    }

    NeighborIndex(const Dataset& data, double eps, std::span<const PointId> ids,
                  QueryCounter& counter = global_query_counter())
        : NeighborIndex(data, eps, counter) {
        insert(ids);
    }

    void insert(PointId id) {
        if (id >= data_->size()) {
            throw InputError("point id " + std::to_string(id) + " out of range");
        }
        ids_.push_back(id);
        if (use_grid_) {
            cells_[cell_of(data_->point(id))].push_back(id);
        }
    }

    void insert(std::span<const PointId> ids) {
        for (PointId id : ids) {
            insert(id);
        }
    }

    std::size_t size() const noexcept { return ids_.size(); }
    double eps() const noexcept { return eps_; }
    bool uses_grid() const noexcept { return use_grid_; }
    const Dataset& data() const noexcept { return *data_; }

    std::vector<PointId> range_query(PointId id) const { return range_query(data_->point(id)); }

    std::vector<PointId> range_query(std::span<const double> p) const {
        if (p.size() != data_->dim()) {
            throw InputError("query dimensionality " + std::to_string(p.size()) +
                             " does not match index dimensionality " + std::to_string(data_->dim()));
        }
        counter_->add();
        std::vector<PointId> out;
        if (!use_grid_) {
            for (PointId q : ids_) {
                if (within_eps(p, data_->point(q), eps_)) {
                    out.push_back(q);
                }
            }
        } else {
            const CellKey center = cell_of(p);
            const std::size_t d = data_->dim();
            CellKey probe = center;
            // Odometer over offsets {-1,0,1}^d.
            std::array<int, kMaxGridDim> offset{};
            offset.fill(-1);
            while (true) {
                for (std::size_t k = 0; k < d; ++k) {
                    probe[k] = center[k] + offset[k];
                }
                if (auto it = cells_.find(probe); it != cells_.end()) {
                    for (PointId q : it->second) {
                        if (within_eps(p, data_->point(q), eps_)) {
                            out.push_back(q);
                        }
                    }
                }
                std::size_t k = 0;
                while (k < d && offset[k] == 1) {
                    offset[k] = -1;
                    ++k;
                }
                if (k == d) {
                    break;
                }
                ++offset[k];
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    using CellKey = std::array<std::int64_t, kMaxGridDim>;

    struct CellHash {
        std::size_t operator()(const CellKey& key) const noexcept {
            std::size_t h = 0xcbf29ce484222325ULL;
            for (std::int64_t v : key) {
                h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            }
            return h;
        }
    };

    CellKey cell_of(std::span<const double> p) const {
        CellKey key{};
        for (std::size_t k = 0; k < p.size(); ++k) {
            key[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_side_));
        }
        return key;
    }

    const Dataset* data_;
    double eps_;
    // Slightly wider than eps so rounding in the division cannot push a true
    // neighbor outside the stencil.
    double cell_side_;
    QueryCounter* counter_;
    bool use_grid_;
    std::vector<PointId> ids_;
    std::unordered_map<CellKey, std::vector<PointId>, CellHash> cells_;
};

}  // namespace ipd

#endif  // IPD_NEIGHBOR_INDEX_HPP
