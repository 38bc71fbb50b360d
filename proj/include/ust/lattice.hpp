#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "ust/errors.hpp"
#include "ust/graph.hpp"

namespace ust {

/// Point of Z^d in lattice units.
using LatticeCoord = std::vector<int>;

/// Chebyshev distance max_i |a_i - b_i|, the distance used throughout.
inline int chebyshev(const LatticeCoord& a, const LatticeCoord& b) {
    if (a.size() != b.size()) throw RangeError("coordinate dimension mismatch");
    int best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

inline int chebyshev_norm(const LatticeCoord& a) { return chebyshev(a, LatticeCoord(a.size(), 0)); }

inline LatticeCoord axis_point(int d, int r) {
    LatticeCoord x(static_cast<std::size_t>(d), 0);
    x[0] = r;
    return x;
}

struct GraphLimits {
    std::uint64_t max_vertices = 5'000'000;
};

/// Lexicographic numbering of {-n..n}^d, first coordinate most significant.
/// Shared by the materialized LatticeBox and the implicit box walkers so that both
/// agree on vertex ids.
class BoxShape {
public:
    BoxShape() = default;
    BoxShape(int d, int n) : d_(d), n_(n), side_(2 * static_cast<std::uint64_t>(n) + 1) {
        if (d < 1) throw RangeError("box dimension must be >= 1");
        if (n < 0) throw RangeError("box radius must be >= 0");
        strides_.assign(static_cast<std::size_t>(d), 1);
        count_ = 1;
        for (int i = d - 1; i >= 0; --i) {
            strides_[static_cast<std::size_t>(i)] = count_;
            if (count_ > (UINT64_MAX / side_)) throw ResourceLimitError("box too large to index");
            count_ *= side_;
        }
    }

    int dim() const noexcept { return d_; }
    int radius() const noexcept { return n_; }
    std::uint64_t side() const noexcept { return side_; }
    std::uint64_t vertex_count() const noexcept { return count_; }
    std::uint64_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    bool contains(const LatticeCoord& x) const {
        if (static_cast<int>(x.size()) != d_) return false;
        for (int c : x)
            if (c < -n_ || c > n_) return false;
        return true;
    }

    std::uint64_t index(const LatticeCoord& x) const {
        if (!contains(x)) throw RangeError("coordinate outside box");
        std::uint64_t id = 0;
        for (int i = 0; i < d_; ++i) id += static_cast<std::uint64_t>(x[static_cast<std::size_t>(i)] + n_) * stride(i);
        return id;
    }

    LatticeCoord coord(std::uint64_t id) const {
        LatticeCoord x(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) {
            x[static_cast<std::size_t>(i)] = static_cast<int>(id / stride(i)) - n_;
            id %= stride(i);
        }
        return x;
    }

private:
    int d_ = 1;
    int n_ = 0;
    std::uint64_t side_ = 1;
    std::uint64_t count_ = 1;
    std::vector<std::uint64_t> strides_{1};
};

/// Nearest-neighbour graph on the box {-n..n}^d.
class LatticeBox {
public:
    int dim() const noexcept { return shape_.dim(); }
    int radius() const noexcept { return shape_.radius(); }
    const BoxShape& shape() const noexcept { return shape_; }
    const MultiGraph& graph() const noexcept { return graph_; }

    std::optional<VertexId> find(const LatticeCoord& x) const {
        if (!shape_.contains(x)) return std::nullopt;
        return vid(shape_.index(x));
    }

    VertexId vertex(const LatticeCoord& x) const { return vid(shape_.index(x)); }

    LatticeCoord coord(VertexId v) const {
        if (!graph_.has_vertex(v)) throw RangeError("vertex outside box");
        return shape_.coord(to_index(v));
    }

    bool on_boundary(VertexId v) const { return chebyshev_norm(coord(v)) == radius(); }

    std::vector<VertexId> boundary() const {
        std::vector<VertexId> out;
        for (std::size_t i = 0; i < graph_.vertex_count(); ++i)
            if (on_boundary(vid(i))) out.push_back(vid(i));
        return out;
    }

    friend LatticeBox build_box(int d, int n, const GraphLimits& limits);

private:
    BoxShape shape_;
    MultiGraph graph_;
};

/// Edges are created vertex by vertex in id order, each joined to its +e_i neighbours.
inline LatticeBox build_box(int d, int n, const GraphLimits& limits = {}) {
    if (d < 1 || n < 0) throw RangeError("build_box requires d >= 1 and n >= 0");
    BoxShape shape(d, n);
    if (shape.vertex_count() > limits.max_vertices) {
        throw ResourceLimitError("box with " + std::to_string(shape.vertex_count()) +
                                 " vertices exceeds vertex budget " + std::to_string(limits.max_vertices));
    }
    std::vector<Endpoints> edges;
    edges.reserve(static_cast<std::size_t>(d) * shape.vertex_count());
    for (std::uint64_t id = 0; id < shape.vertex_count(); ++id) {
        const auto x = shape.coord(id);
        for (int i = 0; i < d; ++i) {
            if (x[static_cast<std::size_t>(i)] < n) edges.push_back({vid(id), vid(id + shape.stride(i))});
        }
    }
    LatticeBox box;
    box.shape_ = shape;
    box.graph_ = MultiGraph(shape.vertex_count(), edges);
    return box;
}

/// Rectangular grid with `shape[i]` vertices along axis i (lexicographic numbering).
inline MultiGraph build_grid(const std::vector<int>& shape) {
    if (shape.empty()) throw RangeError("grid needs at least one axis");
    std::uint64_t count = 1;
    std::vector<std::uint64_t> strides(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 0;) {
        if (shape[i] < 1) throw RangeError("grid side must be >= 1");
        strides[i] = count;
        count *= static_cast<std::uint64_t>(shape[i]);
    }
    std::vector<Endpoints> edges;
    for (std::uint64_t id = 0; id < count; ++id) {
        std::uint64_t rest = id;
        for (std::size_t i = 0; i < shape.size(); ++i) {
            const auto c = rest / strides[i];
            rest %= strides[i];
            if (c + 1 < static_cast<std::uint64_t>(shape[i])) edges.push_back({vid(id), vid(id + strides[i])});
        }
    }
    return MultiGraph(count, edges);
}

/// Wired boundary: every vertex of the box with Chebyshev norm > m is identified to one
/// vertex. Edges among the identified vertices vanish; edges from the sphere of radius m
/// outward become parallel edges to the wired vertex.
inline Minor wired_quotient(const LatticeBox& box, int m) {
    if (m < 0 || m >= box.radius()) throw RangeError("wired_quotient requires 0 <= m < n");
    std::vector<VertexId> outside;
    for (std::size_t i = 0; i < box.graph().vertex_count(); ++i) {
        if (chebyshev_norm(box.coord(vid(i))) > m) outside.push_back(vid(i));
    }
    return identify(box.graph(), outside);
}

}  // namespace ust
