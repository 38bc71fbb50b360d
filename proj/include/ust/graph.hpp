#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ust/errors.hpp"

namespace ust {

enum class VertexId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};

constexpr std::uint32_t to_index(VertexId v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t to_index(EdgeId e) noexcept { return static_cast<std::uint32_t>(e); }
constexpr VertexId vid(std::size_t i) noexcept { return static_cast<VertexId>(i); }
constexpr EdgeId eid(std::size_t i) noexcept { return static_cast<EdgeId>(i); }

struct Endpoints {
    VertexId u;
    VertexId v;

    friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

/// One edge-slot in a vertex's adjacency list. Parallel edges give repeated neighbors.
struct Incidence {
    VertexId neighbor;
    EdgeId edge;
};

/// Finite multigraph with dense vertex and edge ids. Immutable after construction.
///
/// Single-edge loops are dropped when the graph is assembled, so every stored edge has
/// distinct endpoints; parallel edges keep distinct ids. Adjacency is stored CSR-style
/// and connectivity is computed once.
class MultiGraph {
public:
    MultiGraph() = default;

    MultiGraph(std::size_t vertex_count, std::span<const Endpoints> edges) : vertex_count_(vertex_count) {
        edges_.reserve(edges.size());
        for (const auto& e : edges) {
            if (to_index(e.u) >= vertex_count || to_index(e.v) >= vertex_count) {
                throw RangeError("edge endpoint out of range");
            }
            if (e.u != e.v) edges_.push_back(e);
        }
        finalize();
    }

    MultiGraph(std::size_t vertex_count, std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> edges)
        : MultiGraph(vertex_count, to_endpoints(edges)) {}

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Endpoints>& edges() const noexcept { return edges_; }

    bool has_edge(EdgeId e) const noexcept { return to_index(e) < edges_.size(); }
    bool has_vertex(VertexId v) const noexcept { return to_index(v) < vertex_count_; }

    const Endpoints& endpoints(EdgeId e) const {
        if (!has_edge(e)) throw UnknownEdgeError("unknown edge id " + std::to_string(to_index(e)));
        return edges_[to_index(e)];
    }

    std::span<const Incidence> incident(VertexId v) const {
        const auto i = to_index(v);
        return {slots_.data() + offsets_[i], slots_.data() + offsets_[i + 1]};
    }

    std::size_t degree(VertexId v) const { return offsets_[to_index(v) + 1] - offsets_[to_index(v)]; }

    std::size_t multiplicity(VertexId a, VertexId b) const {
        std::size_t count = 0;
        for (const auto& s : incident(a)) count += (s.neighbor == b);
        return count;
    }

    /// First edge (lowest id) joining a and b, if any.
    std::optional<EdgeId> find_edge(VertexId a, VertexId b) const {
        std::optional<EdgeId> best;
        for (const auto& s : incident(a)) {
            if (s.neighbor == b && (!best || to_index(s.edge) < to_index(*best))) best = s.edge;
        }
        return best;
    }

    /// True iff the graph has exactly one component.
    bool is_connected() const noexcept { return connected_; }

private:
    static std::vector<Endpoints> to_endpoints(
        std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> list) {
        std::vector<Endpoints> out;
        for (auto [a, b] : list) out.push_back({vid(a), vid(b)});
        return out;
    }

    void finalize() {
        offsets_.assign(vertex_count_ + 1, 0);
        for (const auto& e : edges_) {
            ++offsets_[to_index(e.u) + 1];
            ++offsets_[to_index(e.v) + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        slots_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            slots_[fill[to_index(e.u)]++] = {e.v, eid(i)};
            slots_[fill[to_index(e.v)]++] = {e.u, eid(i)};
        }
        connected_ = compute_connected();
    }

    bool compute_connected() const {
        if (vertex_count_ == 0) return false;
        std::vector<char> seen(vertex_count_, 0);
        std::vector<std::uint32_t> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            for (const auto& s : incident(vid(x))) {
                const auto y = to_index(s.neighbor);
                if (!seen[y]) {
                    seen[y] = 1;
                    ++reached;
                    stack.push_back(y);
                }
            }
        }
        return reached == vertex_count_;
    }

    std::size_t vertex_count_ = 0;
    std::vector<Endpoints> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Incidence> slots_;
    bool connected_ = false;
};

inline bool is_connected(const MultiGraph& g) { return g.is_connected(); }

/// Identification of a parent graph's vertices and surviving edges inside a minor.
struct MinorMap {
    std::vector<std::optional<EdgeId>> edge_map;  // indexed by parent edge
    std::vector<VertexId> vertex_map;             // indexed by parent vertex

    static MinorMap identity(const MultiGraph& g) {
        MinorMap m;
        m.edge_map.resize(g.edge_count());
        for (std::size_t i = 0; i < g.edge_count(); ++i) m.edge_map[i] = eid(i);
        m.vertex_map.resize(g.vertex_count());
        for (std::size_t i = 0; i < g.vertex_count(); ++i) m.vertex_map[i] = vid(i);
        return m;
    }

    std::optional<EdgeId> operator()(EdgeId e) const { return edge_map.at(to_index(e)); }
    VertexId operator()(VertexId v) const { return vertex_map.at(to_index(v)); }

    friend bool operator==(const MinorMap&, const MinorMap&) = default;
};

/// Map of `first` followed by `second`.
inline MinorMap compose(const MinorMap& first, const MinorMap& second) {
    MinorMap out;
    out.edge_map.reserve(first.edge_map.size());
    for (const auto& e : first.edge_map) {
        out.edge_map.push_back(e ? second.edge_map.at(to_index(*e)) : std::nullopt);
    }
    out.vertex_map.reserve(first.vertex_map.size());
    for (const auto v : first.vertex_map) out.vertex_map.push_back(second.vertex_map.at(to_index(v)));
    return out;
}

struct Minor {
    MultiGraph graph;
    MinorMap map;
};

/// Identifies every vertex of `group` into one. The merged vertex takes the position of the
/// smallest member and surviving vertices are renumbered densely in their original order.
/// Edges that become loops are discarded; parallel edges are kept.
inline Minor identify(const MultiGraph& g, std::span<const VertexId> group) {
    std::vector<char> in_group(g.vertex_count(), 0);
    std::uint32_t rep = UINT32_MAX;
    for (const auto v : group) {
        if (!g.has_vertex(v)) throw RangeError("vertex out of range in identify");
        in_group[to_index(v)] = 1;
        rep = std::min(rep, to_index(v));
    }
    MinorMap map;
    map.vertex_map.resize(g.vertex_count());
    std::uint32_t next = 0;
    VertexId rep_child{};
    for (std::uint32_t x = 0; x < g.vertex_count(); ++x) {
        if (in_group[x] && x != rep) continue;
        map.vertex_map[x] = vid(next);
        if (x == rep) rep_child = vid(next);
        ++next;
    }
    for (std::uint32_t x = 0; x < g.vertex_count(); ++x) {
        if (in_group[x]) map.vertex_map[x] = rep_child;
    }
    std::vector<Endpoints> kept;
    map.edge_map.assign(g.edge_count(), std::nullopt);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        const Endpoints child{map.vertex_map[to_index(e.u)], map.vertex_map[to_index(e.v)]};
        if (child.u == child.v) continue;
        map.edge_map[i] = eid(kept.size());
        kept.push_back(child);
    }
    return {MultiGraph(next, kept), std::move(map)};
}

/// G/e: endpoints of e identified; e and every edge parallel to it vanish as loops.
inline Minor contract(const MultiGraph& g, EdgeId e) {
    const auto& ends = g.endpoints(e);
    const VertexId group[2] = {ends.u, ends.v};
    return identify(g, group);
}

/// G-e: vertex set unchanged, later edges shift down by one id.
inline Minor delete_edge(const MultiGraph& g, EdgeId e) {
    (void)g.endpoints(e);
    MinorMap map;
    map.vertex_map.resize(g.vertex_count());
    for (std::size_t i = 0; i < g.vertex_count(); ++i) map.vertex_map[i] = vid(i);
    std::vector<Endpoints> kept;
    map.edge_map.assign(g.edge_count(), std::nullopt);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        if (i == to_index(e)) continue;
        map.edge_map[i] = eid(kept.size());
        kept.push_back(g.edges()[i]);
    }
    return {MultiGraph(g.vertex_count(), kept), std::move(map)};
}

inline MultiGraph make_path(std::size_t n) {
    std::vector<Endpoints> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({vid(i), vid(i + 1)});
    return MultiGraph(n, e);
}

inline MultiGraph make_cycle(std::size_t n) {
    std::vector<Endpoints> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back({vid(i), vid((i + 1) % n)});
    return MultiGraph(n, e);
}

inline MultiGraph make_complete(std::size_t n) {
    std::vector<Endpoints> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.push_back({vid(i), vid(j)});
    return MultiGraph(n, e);
}

}  // namespace ust
