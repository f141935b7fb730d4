#ifndef IPD_UNION_FIND_HPP
#define IPD_UNION_FIND_HPP

#include <cstddef>
#include <numeric>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

/**
 * Disjoint sets over dense cluster ids 0..size()-1 whose representative is
 * always the smallest id in the set, so merging clusters relabels them with
 * the smallest participating id.
 */
class MinRootUnionFind {
public:
    MinRootUnionFind() = default;
    explicit MinRootUnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), Label{0}); }

    std::size_t size() const noexcept { return parent_.size(); }

    /// Adds a singleton set and returns its id.
    Label make_set() {
        const auto id = static_cast<Label>(parent_.size());
        parent_.push_back(id);
        return id;
    }

    /// Grows the id range so that `id` is valid.
    void ensure(Label id) {
        while (static_cast<Label>(parent_.size()) <= id) {
            make_set();
        }
    }

    Label find(Label x) {
        check(x);
        Label root = x;
        while (parent_[root] != root) {
            root = parent_[root];
        }
        while (parent_[x] != root) {
            const Label next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    /// Returns the surviving root, min(find(a), find(b)).
    Label unite(Label a, Label b) {
        const Label ra = find(a);
        const Label rb = find(b);
        if (ra == rb) {
            return ra;
        }
        if (ra < rb) {
            parent_[rb] = ra;
            return ra;
        }
        parent_[ra] = rb;
        return rb;
    }

    bool same(Label a, Label b) { return find(a) == find(b); }

private:
    void check(Label x) const {
        if (x < 0 || static_cast<std::size_t>(x) >= parent_.size()) {
            throw InternalError("union-find id " + std::to_string(x) + " out of range");
        }
    }

    std::vector<Label> parent_;
};

}  // namespace ipd

#endif  // IPD_UNION_FIND_HPP
