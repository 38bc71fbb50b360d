#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ust/errors.hpp"
#include "ust/graph.hpp"
#include "ust/kirchhoff.hpp"
#include "ust/lattice.hpp"
#include "ust/path.hpp"
#include "ust/rng.hpp"
#include "ust/walk.hpp"

namespace ust {

/// Edge subset of a graph. The graph is held by pointer and must outlive the subgraph.
/// When a root is supplied every edge is oriented away from it along tree paths.
class SpanningSubgraph {
public:
    SpanningSubgraph(const MultiGraph& g, std::vector<EdgeId> edges) : g_(&g), present_(g.edge_count(), 0) {
        for (const auto e : edges) {
            (void)g.endpoints(e);
            present_[to_index(e)] = 1;
        }
        for (std::size_t i = 0; i < present_.size(); ++i)
            if (present_[i]) edges_.push_back(eid(i));
        classify();
    }

    const MultiGraph& graph() const noexcept { return *g_; }
    const std::vector<EdgeId>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool contains(EdgeId e) const { return present_.at(to_index(e)) != 0; }
    bool is_forest() const noexcept { return acyclic_; }
    bool is_tree() const noexcept { return acyclic_ && components_ == 1; }
    std::size_t component_count() const noexcept { return components_; }

    /// Orients edges away from `root`; requires a tree.
    void orient(VertexId root) {
        if (!is_tree()) throw NotATreeError("orientation requires a spanning tree");
        if (!g_->has_vertex(root)) throw RangeError("root outside graph");
        root_ = root;
        parent_edge_.assign(g_->vertex_count(), std::nullopt);
        std::vector<VertexId> stack{root};
        std::vector<char> seen(g_->vertex_count(), 0);
        seen[to_index(root)] = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (const auto& s : g_->incident(v)) {
                if (!present_[to_index(s.edge)] || seen[to_index(s.neighbor)]) continue;
                seen[to_index(s.neighbor)] = 1;
                parent_edge_[to_index(s.neighbor)] = s.edge;
                stack.push_back(s.neighbor);
            }
        }
    }

    std::optional<VertexId> root() const noexcept { return root_; }

    /// Edge through which v is entered from the root side; nullopt at the root.
    std::optional<EdgeId> parent_edge(VertexId v) const {
        if (!root_) throw PreconditionError("subgraph is not oriented");
        return parent_edge_.at(to_index(v));
    }

    /// Oriented endpoints (from, to) of a tree edge.
    Endpoints oriented(EdgeId e) const {
        if (!root_) throw PreconditionError("subgraph is not oriented");
        if (!contains(e)) throw UnknownEdgeError("edge not in subgraph");
        const auto ends = g_->endpoints(e);
        if (parent_edge_[to_index(ends.v)] == e) return ends;
        return Endpoints{ends.v, ends.u};
    }

    friend bool operator==(const SpanningSubgraph& a, const SpanningSubgraph& b) {
        return a.g_ == b.g_ && a.edges_ == b.edges_ && a.root_ == b.root_;
    }

private:
    void classify() {
        detail::DisjointSets sets(g_->vertex_count());
        components_ = g_->vertex_count();
        for (const auto e : edges_) {
            const auto ends = g_->endpoints(e);
            if (sets.unite(static_cast<std::uint32_t>(to_index(ends.u)), static_cast<std::uint32_t>(to_index(ends.v))))
                --components_;
            else
                acyclic_ = false;
        }
    }

    const MultiGraph* g_;
    std::vector<char> present_;
    std::vector<EdgeId> edges_;
    bool acyclic_ = true;
    std::size_t components_ = 0;
    std::optional<VertexId> root_;
    std::vector<std::optional<EdgeId>> parent_edge_;
};

/// T(gamma): the first-entry edge of every vertex the walk reaches. Oriented away from the
/// walk's start. Spanning only when the walk covers the graph.
inline SpanningSubgraph tree_from_walk(const MultiGraph& g, const WalkTrace& walk) {
    if (walk.path.empty() || walk.edges.size() != walk.path.length())
        throw PreconditionError("tree_from_walk: malformed walk");
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<EdgeId> edges;
    seen[to_index(walk.path[0])] = 1;
    for (std::size_t i = 1; i < walk.path.size(); ++i) {
        const auto v = walk.path[i];
        if (seen[to_index(v)]) continue;
        seen[to_index(v)] = 1;
        edges.push_back(walk.edges[i - 1]);
    }
    SpanningSubgraph t(g, std::move(edges));
    if (t.is_tree()) t.orient(walk.path[0]);
    return t;
}

/// Aldous-Broder: walk from root until every vertex is visited, keep first-entry edges.
/// Consumes the stream exactly as srw_path(g, root, StopAtCover{}, rng) would, so
/// tree_from_walk of that walk gives the same tree.
inline SpanningSubgraph aldous_broder_tree(const MultiGraph& g, VertexId root, RngStream& rng,
                                           const WalkBudget& budget = {}) {
    if (!g.has_vertex(root)) throw RangeError("aldous_broder_tree: root outside graph");
    if (!g.is_connected()) throw PreconditionError("aldous_broder_tree requires a connected graph");
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<EdgeId> edges;
    edges.reserve(g.vertex_count() - 1);
    seen[to_index(root)] = 1;
    std::size_t remaining = g.vertex_count() - 1;
    VertexId cur = root;
    std::uint64_t steps = 0;
    while (remaining > 0) {
        if (steps++ >= budget.max_steps) detail::budget_exhausted(budget.max_steps);
        const auto slots = g.incident(cur);
        const auto& s = slots[rng.below(static_cast<std::uint32_t>(slots.size()))];
        cur = s.neighbor;
        if (!seen[to_index(cur)]) {
            seen[to_index(cur)] = 1;
            edges.push_back(s.edge);
            --remaining;
        }
    }
    SpanningSubgraph t(g, std::move(edges));
    t.orient(root);
    return t;
}

/// The unique path inside tree t from `from` to `to`.
inline PathSeq<VertexId> tree_path(const SpanningSubgraph& t, VertexId from, VertexId to) {
    if (!t.is_tree()) throw NotATreeError("tree_path requires a spanning tree");
    const auto& g = t.graph();
    if (!g.has_vertex(from) || !g.has_vertex(to)) throw RangeError("tree_path: vertex not in tree");
    constexpr auto kNone = static_cast<VertexId>(UINT32_MAX);
    std::vector<VertexId> pred(g.vertex_count(), kNone);
    std::vector<VertexId> queue{to};
    pred[to_index(to)] = to;
    for (std::size_t head = 0; head < queue.size() && pred[to_index(from)] == kNone; ++head) {
        const auto v = queue[head];
        for (const auto& s : g.incident(v)) {
            if (!t.contains(s.edge) || pred[to_index(s.neighbor)] != kNone) continue;
            pred[to_index(s.neighbor)] = v;
            queue.push_back(s.neighbor);
        }
    }
    std::vector<VertexId> out{from};
    for (auto v = from; v != to;) {
        v = pred[to_index(v)];
        out.push_back(v);
    }
    return PathSeq<VertexId>(std::move(out));
}

/// Draws the contraction/deletion process once: edges in enumeration order are kept with
/// their current fraction in the present minor. Bridges (fraction 1) are kept without a draw.
inline SpanningSubgraph mu3_sequential_sample(const MultiGraph& g, std::span<const EdgeId> enumeration, RngStream& rng,
                                              const ExactLimits& limits = {}) {
    if (!g.is_connected()) throw PreconditionError("mu3_sequential_sample requires a connected graph");
    MultiGraph cur = g;
    MinorMap where = MinorMap::identity(g);
    std::vector<EdgeId> kept;
    const mpz_class scale = mpz_class(1) << 53;
    for (const auto original : enumeration) {
        const auto here = where(original);
        if (!here) continue;
        const mpq_class p = edge_current_fraction(cur, *here, limits).value();
        bool keep = true;
        if (p < 1) {
            const mpz_class u(static_cast<unsigned long>(rng.bits53()));
            keep = u * p.get_den() < p.get_num() * scale;
        }
        Minor next = keep ? contract(cur, *here) : delete_edge(cur, *here);
        if (keep) kept.push_back(original);
        where = compose(where, next.map);
        cur = std::move(next.graph);
    }
    SpanningSubgraph t(g, std::move(kept));
    if (!t.is_tree()) throw PreconditionError("mu3_sequential_sample: enumeration does not cover the edges");
    return t;
}

/// Spanning tree of an implicit box as a parent array, grown by Aldous-Broder from a root.
/// Ids follow BoxShape. Stamps make repeated use allocation-free: a vertex counts as
/// visited only if its stamp equals the current round.
class BoxTreeGrower {
public:
    static constexpr std::uint32_t kNone = UINT32_MAX;

    explicit BoxTreeGrower(BoxShape shape) : walker_(std::move(shape)) {
        const auto count = walker_.shape().vertex_count();
        if (count >= kNone) throw ResourceLimitError("box too large for 32-bit vertex ids");
        stamp_.assign(count, 0);
        parent_.assign(count, kNone);
    }

    const BoxShape& shape() const noexcept { return walker_.shape(); }

    /// Runs the walk from root until `target` is first entered, or until the box is covered
    /// when target is nullopt. Returns the number of steps taken.
    std::uint64_t grow(const LatticeCoord& root, std::optional<std::uint64_t> target, RngStream& rng,
                       const WalkBudget& budget = {}) {
        if (++round_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            round_ = 1;
        }
        auto s = walker_.at(root);
        root_ = static_cast<std::uint32_t>(s.id);
        mark(s.id, kNone);
        std::uint64_t remaining = walker_.shape().vertex_count() - 1;
        std::uint64_t steps = 0;
        if (target && *target == s.id) return 0;
        while (remaining > 0) {
            if (steps++ >= budget.max_steps) detail::budget_exhausted(budget.max_steps);
            const auto from = static_cast<std::uint32_t>(s.id);
            walker_.step(s, rng);
            if (stamp_[s.id] == round_) continue;
            mark(s.id, from);
            --remaining;
            if (target && *target == s.id) break;
        }
        return steps;
    }

    bool visited(std::uint64_t id) const { return stamp_.at(id) == round_; }
    std::uint32_t root() const noexcept { return root_; }

    /// Parent of a visited vertex toward the root; kNone at the root.
    std::uint32_t parent(std::uint64_t id) const {
        if (!visited(id)) throw PreconditionError("vertex not reached by the walk");
        return parent_[id];
    }

    /// Vertices from `id` up to the root, both included.
    std::vector<std::uint32_t> path_to_root(std::uint64_t id) const {
        std::vector<std::uint32_t> out{static_cast<std::uint32_t>(id)};
        for (auto p = parent(id); p != kNone; p = parent_[p]) out.push_back(p);
        return out;
    }

private:
    void mark(std::uint64_t id, std::uint32_t from) {
        stamp_[id] = round_;
        parent_[id] = from;
    }

    BoxWalker walker_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> parent_;
    std::uint32_t round_ = 0;
    std::uint32_t root_ = 0;
};

}  // namespace ust
