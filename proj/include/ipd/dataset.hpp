#ifndef IPD_DATASET_HPP
#define IPD_DATASET_HPP

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipd/error.hpp"

namespace ipd {

using PointId = std::uint32_t;
using Label = std::int32_t;

inline constexpr Label kNoise = -1;

/**
 * Immutable table of d-dimensional points stored row-major, with optional
 * integer ground-truth labels.
 */
class Dataset {
public:
    Dataset() = default;

    Dataset(std::size_t dim, std::vector<double> coords,
            std::optional<std::vector<Label>> labels = std::nullopt,
            std::string name = {})
        : dim_(dim), coords_(std::move(coords)), labels_(std::move(labels)), name_(std::move(name)) {
        if (dim_ == 0) {
            throw InputError("dataset dimensionality must be >= 1");
        }
        if (coords_.size() % dim_ != 0) {
            throw InputError("coordinate count is not a multiple of the dimensionality");
        }
        for (double v : coords_) {
            if (!std::isfinite(v)) {
                throw InputError("dataset contains a non-finite coordinate");
            }
        }
        if (labels_ && labels_->size() != size()) {
            throw InputError("label count (" + std::to_string(labels_->size()) +
                             ") differs from point count (" + std::to_string(size()) + ")");
        }
    }

    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return size() == 0; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, dim_};
    }

    const std::vector<double>& coords() const noexcept { return coords_; }
    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::vector<Label>& labels() const {
        if (!labels_) {
            throw InputError("dataset '" + name_ + "' carries no ground-truth labels");
        }
        return *labels_;
    }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::optional<std::vector<Label>> labels_;
    std::string name_;
};

namespace detail {

inline double squared_distance_unchecked(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

}  // namespace detail

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InputError("dimensionality mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    return detail::squared_distance_unchecked(a, b);
}

/// Euclidean distance.
inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

// The single membership predicate for an eps-ball; every index and oracle uses it
// so boundary points are classified identically everywhere.
inline bool within_eps(std::span<const double> a, std::span<const double> b, double eps) noexcept {
    return detail::squared_distance_unchecked(a, b) <= eps * eps;
}

/// Counts range queries. Shared by reference; safe to bump from several threads.
class QueryCounter {
public:
    void add(std::uint64_t n = 1) noexcept { count_.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t value() const noexcept { return count_.load(std::memory_order_relaxed); }
    void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> count_{0};
};

inline QueryCounter& global_query_counter() {
    static QueryCounter counter;
    return counter;
}

}  // namespace ipd

#endif  // IPD_DATASET_HPP
