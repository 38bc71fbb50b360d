#pragma once

// Exact spanning-tree and electrical computations on small multigraphs. Everything here is
// rational arithmetic; this layer is the oracle the samplers are checked against.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ust/graph.hpp"
#include "ust/lattice.hpp"
#include "ust/rational.hpp"

namespace ust {

struct ExactLimits {
    std::size_t max_vertices = 2000;        // linear systems / determinants
    std::uint64_t max_trees = 1'000'000;    // full tree laws
    std::size_t max_paths = 100'000;        // LERW support size
    std::size_t max_enumeration_edges = 25; // brute-force subset scan
};

/// Probability law on spanning trees, keyed by the sorted list of tree edges.
using TreeLaw = std::map<std::vector<EdgeId>, ExactProb>;

namespace detail {

inline void check_size(std::size_t n, const ExactLimits& limits, const char* what) {
    if (n > limits.max_vertices) {
        throw ResourceLimitError(std::string(what) + ": " + std::to_string(n) + " unknowns exceeds limit " +
                                 std::to_string(limits.max_vertices));
    }
}

struct DisjointSets {
    std::vector<std::uint32_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

/// Laplacian with parallel edges entering as integer weights, row/column `drop` removed.
inline DenseMatrix<mpz_class> reduced_laplacian(const MultiGraph& g, std::size_t drop) {
    const std::size_t n = g.vertex_count();
    auto pos = [drop](std::size_t i) { return i < drop ? i : i - 1; };
    DenseMatrix<mpz_class> lap(n - 1, n - 1);
    for (const auto& e : g.edges()) {
        const auto a = to_index(e.u), b = to_index(e.v);
        if (a != drop) lap(pos(a), pos(a)) += 1;
        if (b != drop) lap(pos(b), pos(b)) += 1;
        if (a != drop && b != drop) {
            lap(pos(a), pos(b)) -= 1;
            lap(pos(b), pos(a)) -= 1;
        }
    }
    return lap;
}

}  // namespace detail

/// Matrix-Tree theorem: determinant of the reduced Laplacian. Zero for disconnected graphs.
inline TreeCount spanning_tree_count(const MultiGraph& g, const ExactLimits& limits = {}) {
    detail::check_size(g.vertex_count(), limits, "spanning_tree_count");
    if (!g.is_connected()) return 0;
    if (g.vertex_count() == 1) return 1;
    return bareiss_determinant(detail::reduced_laplacian(g, g.vertex_count() - 1));
}

/// Contracts every edge of `edges` (which must form a forest). Returns nullopt if they contain
/// a cycle, parallel pairs included.
inline std::optional<Minor> contract_all(const MultiGraph& g, std::span<const EdgeId> edges) {
    detail::DisjointSets sets(g.vertex_count());
    std::vector<EdgeId> unique(edges.begin(), edges.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto e : unique) {
        const auto& ends = g.endpoints(e);
        if (!sets.unite(to_index(ends.u), to_index(ends.v))) return std::nullopt;
    }
    Minor current{g, MinorMap::identity(g)};
    for (const auto e : unique) {
        const auto here = current.map(e);
        if (!here) continue;  // already absorbed by an earlier identification
        auto next = contract(current.graph, *here);
        current.map = compose(current.map, next.map);
        current.graph = std::move(next.graph);
    }
    return current;
}

/// mu1(g)(C(A)): fraction of spanning trees containing every edge of A, computed as
/// count(g / A) / count(g). Zero when A contains a cycle.
inline ExactProb cylinder_probability(const MultiGraph& g, std::span<const EdgeId> a, const ExactLimits& limits = {}) {
    for (const auto e : a) (void)g.endpoints(e);
    if (!g.is_connected()) throw PreconditionError("cylinder_probability requires a connected graph");
    const auto minor = contract_all(g, a);
    if (!minor) return ExactProb(0, 1);
    const TreeCount total = spanning_tree_count(g, limits);
    const TreeCount with = spanning_tree_count(minor->graph, limits);
    return ExactProb(mpq_class(with, total));
}

/// Fraction of the battery current that flows through e itself when unit resistors sit on
/// every edge and the battery is across e's endpoints. Equal to the effective resistance
/// between the endpoints, obtained from an exact Laplacian solve grounded at one end.
inline ExactProb edge_current_fraction(const MultiGraph& g, EdgeId e, const ExactLimits& limits = {}) {
    const auto ends = g.endpoints(e);
    if (!g.is_connected()) throw PreconditionError("edge_current_fraction requires a connected graph");
    detail::check_size(g.vertex_count(), limits, "edge_current_fraction");
    const std::size_t ground = to_index(ends.v);
    const auto lap = detail::reduced_laplacian(g, ground);
    const std::size_t n = lap.rows();
    DenseMatrix<mpq_class> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = mpq_class(lap(i, j));
    DenseMatrix<mpq_class> rhs(n, 1);
    const std::size_t source = to_index(ends.u) < ground ? to_index(ends.u) : to_index(ends.u) - 1;
    rhs(source, 0) = 1;
    const auto x = solve_exact(std::move(a), std::move(rhs));
    if (!x) throw PreconditionError("singular Laplacian in edge_current_fraction");
    return ExactProb((*x)(source, 0));
}

/// Every spanning tree as a sorted edge list, by backtracking over edge subsets.
inline std::vector<std::vector<EdgeId>> brute_force_tree_enumeration(const MultiGraph& g,
                                                                     const ExactLimits& limits = {}) {
    if (g.edge_count() > limits.max_enumeration_edges) {
        throw ResourceLimitError("brute_force_tree_enumeration: " + std::to_string(g.edge_count()) +
                                 " edges exceeds limit " + std::to_string(limits.max_enumeration_edges));
    }
    std::vector<std::vector<EdgeId>> out;
    if (!g.is_connected()) return out;
    const std::size_t need = g.vertex_count() - 1;
    std::vector<EdgeId> chosen;
    auto rec = [&](auto&& self, std::size_t next, detail::DisjointSets sets) -> void {
        if (chosen.size() == need) {
            out.push_back(chosen);
            return;
        }
        if (g.edge_count() - next < need - chosen.size()) return;
        const auto& e = g.edges()[next];
        auto with = sets;
        if (with.unite(to_index(e.u), to_index(e.v))) {
            chosen.push_back(eid(next));
            self(self, next + 1, std::move(with));
            chosen.pop_back();
        }
        self(self, next + 1, std::move(sets));
    };
    rec(rec, 0, detail::DisjointSets(g.vertex_count()));
    return out;
}

/// Uniform law over the trees of brute_force_tree_enumeration.
inline TreeLaw uniform_tree_law(const MultiGraph& g, const ExactLimits& limits = {}) {
    const auto trees = brute_force_tree_enumeration(g, limits);
    TreeLaw law;
    for (const auto& t : trees) law.emplace(t, ExactProb(1, static_cast<long>(trees.size())));
    return law;
}

/// The contraction/deletion law: decide edges in enumeration order, keeping each with its
/// current fraction in the present minor, then contracting (kept) or deleting (dropped) it.
/// Edges that have already become loops are dropped without a decision.
inline TreeLaw mu3_exact_law(const MultiGraph& g, std::span<const EdgeId> enumeration, const ExactLimits& limits = {}) {
    if (!g.is_connected()) throw PreconditionError("mu3_exact_law requires a connected graph");
    {
        std::vector<EdgeId> sorted(enumeration.begin(), enumeration.end());
        std::sort(sorted.begin(), sorted.end());
        bool perm = sorted.size() == g.edge_count();
        for (std::size_t i = 0; perm && i < sorted.size(); ++i) perm = to_index(sorted[i]) == i;
        if (!perm) throw PreconditionError("enumeration must be a permutation of the edges");
    }
    if (spanning_tree_count(g, limits) > mpz_class(std::to_string(limits.max_trees))) {
        throw ResourceLimitError("mu3_exact_law: tree count exceeds limit");
    }
    TreeLaw law;
    std::vector<EdgeId> kept;
    auto rec = [&](auto&& self, const MultiGraph& cur, const MinorMap& where, std::size_t pos,
                   const mpq_class& weight) -> void {
        if (pos == enumeration.size()) {
            auto tree = kept;
            std::sort(tree.begin(), tree.end());
            auto [it, fresh] = law.emplace(tree, ExactProb(weight));
            if (!fresh) it->second = ExactProb(it->second.value() + weight);
            return;
        }
        const EdgeId original = enumeration[pos];
        const auto here = where(original);
        if (!here) {
            self(self, cur, where, pos + 1, weight);
            return;
        }
        const mpq_class p = edge_current_fraction(cur, *here, limits).value();
        if (p > 0) {
            auto c = contract(cur, *here);
            kept.push_back(original);
            self(self, c.graph, compose(where, c.map), pos + 1, weight * p);
            kept.pop_back();
        }
        if (p < 1) {
            auto d = delete_edge(cur, *here);
            self(self, d.graph, compose(where, d.map), pos + 1, weight * (1 - p));
        }
    };
    rec(rec, g, MinorMap::identity(g), 0, mpq_class(1));
    return law;
}

struct HarmonicSolution {
    std::vector<mpq_class> values;    // indexed by vertex
    std::vector<VertexId> unreached;  // components touching neither set; value 0 by convention

    const mpq_class& at(VertexId v) const { return values.at(to_index(v)); }
    bool flagged() const noexcept { return !unreached.empty(); }
};

/// P(SRW from v hits `targets` before `avoids`), as the exact solution of the discrete
/// Dirichlet problem. Parallel edges weight neighbours by multiplicity.
inline HarmonicSolution harmonic_hitting_probability(const MultiGraph& g, std::span<const VertexId> targets,
                                                     std::span<const VertexId> avoids,
                                                     const ExactLimits& limits = {}) {
    if (targets.empty() || avoids.empty()) throw PreconditionError("targets and avoids must be nonempty");
    const std::size_t n = g.vertex_count();
    std::vector<int> role(n, 0);  // 1 target, -1 avoid
    for (const auto t : targets) {
        if (!g.has_vertex(t)) throw RangeError("target vertex out of range");
        role[to_index(t)] = 1;
    }
    for (const auto a : avoids) {
        if (!g.has_vertex(a)) throw RangeError("avoid vertex out of range");
        if (role[to_index(a)] == 1) throw PreconditionError("targets and avoids must be disjoint");
        role[to_index(a)] = -1;
    }
    std::vector<char> reached(n, 0);
    std::vector<std::uint32_t> stack;
    for (std::size_t i = 0; i < n; ++i)
        if (role[i] != 0) {
            reached[i] = 1;
            stack.push_back(static_cast<std::uint32_t>(i));
        }
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (const auto& s : g.incident(vid(x))) {
            const auto y = to_index(s.neighbor);
            if (!reached[y]) {
                reached[y] = 1;
                stack.push_back(y);
            }
        }
    }
    HarmonicSolution sol;
    sol.values.assign(n, mpq_class(0));
    std::vector<std::size_t> slot(n, SIZE_MAX);
    std::vector<std::uint32_t> unknowns;
    for (std::size_t i = 0; i < n; ++i) {
        if (role[i] == 1) sol.values[i] = 1;
        if (role[i] != 0) continue;
        if (!reached[i]) {
            sol.unreached.push_back(vid(i));
            continue;
        }
        slot[i] = unknowns.size();
        unknowns.push_back(static_cast<std::uint32_t>(i));
    }
    detail::check_size(unknowns.size(), limits, "harmonic_hitting_probability");
    if (unknowns.empty()) return sol;
    const std::size_t m = unknowns.size();
    DenseMatrix<mpq_class> a(m, m), b(m, 1);
    for (std::size_t r = 0; r < m; ++r) {
        const auto v = vid(unknowns[r]);
        a(r, r) = static_cast<long>(g.degree(v));
        for (const auto& s : g.incident(v)) {
            const auto y = to_index(s.neighbor);
            if (role[y] == 1) b(r, 0) += 1;
            else if (role[y] == 0) a(r, slot[y]) -= 1;
        }
    }
    auto x = solve_exact(std::move(a), std::move(b));
    if (!x) throw PreconditionError("singular Dirichlet system");
    for (std::size_t r = 0; r < m; ++r) sol.values[unknowns[r]] = (*x)(r, 0);
    return sol;
}

struct LerwLaw {
    std::map<std::vector<VertexId>, ExactProb> support;

    mpq_class total() const {
        mpq_class s = 0;
        for (const auto& [path, p] : support) s += p.value();
        return s;
    }
};

/// Exact law of LE(SRW from v stopped at w). Built prefix by prefix: from a self-avoiding
/// prefix ending at u, the next vertex y is chosen with weight multiplicity(u,y) * P_y(hit w
/// before the prefix). Neighbours are extended in ascending vertex order.
inline LerwLaw exact_lerw_law(const MultiGraph& g, VertexId v, VertexId w, const ExactLimits& limits = {}) {
    if (!g.has_vertex(v) || !g.has_vertex(w)) throw RangeError("lerw endpoints out of range");
    if (v == w) throw PreconditionError("exact_lerw_law requires v != w");
    if (!g.is_connected()) throw PreconditionError("exact_lerw_law requires a connected graph");
    LerwLaw law;
    std::vector<VertexId> prefix{v};
    const VertexId target[1] = {w};
    auto rec = [&](auto&& self, const mpq_class& weight) -> void {
        const VertexId u = prefix.back();
        if (u == w) {
            if (law.support.size() >= limits.max_paths) throw ResourceLimitError("exact_lerw_law: path limit");
            law.support.emplace(prefix, ExactProb(weight));
            return;
        }
        const auto h = harmonic_hitting_probability(g, target, prefix, limits);
        std::map<std::uint32_t, mpq_class> step;  // ascending neighbour order
        for (const auto& s : g.incident(u)) {
            const auto y = to_index(s.neighbor);
            if (std::find(prefix.begin(), prefix.end(), s.neighbor) != prefix.end()) continue;
            step[y] += h.values[y];
        }
        mpq_class norm = 0;
        for (const auto& [y, q] : step) norm += q;
        if (norm == 0) return;
        for (const auto& [y, q] : step) {
            if (q == 0) continue;
            prefix.push_back(vid(y));
            self(self, weight * q / norm);
            prefix.pop_back();
        }
    };
    rec(rec, mpq_class(1));
    return law;
}

/// Expected visits to y of SRW from x on the box, killed on reaching the boundary sphere.
/// Zero when x or y lies on the boundary.
inline mpq_class green_function_exact(const LatticeBox& box, VertexId x, VertexId y, const ExactLimits& limits = {}) {
    const auto& g = box.graph();
    if (!g.has_vertex(x) || !g.has_vertex(y)) throw RangeError("green_function_exact: vertex out of range");
    if (box.on_boundary(x) || box.on_boundary(y)) return 0;
    std::vector<std::size_t> slot(g.vertex_count(), SIZE_MAX);
    std::vector<std::uint32_t> interior;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        if (box.on_boundary(vid(i))) continue;
        slot[i] = interior.size();
        interior.push_back(static_cast<std::uint32_t>(i));
    }
    detail::check_size(interior.size(), limits, "green_function_exact");
    const std::size_t m = interior.size();
    DenseMatrix<mpq_class> a(m, m), b(m, 1);
    for (std::size_t r = 0; r < m; ++r) {
        const auto v = vid(interior[r]);
        a(r, r) = static_cast<long>(g.degree(v));
        for (const auto& s : g.incident(v)) {
            const auto z = slot[to_index(s.neighbor)];
            if (z != SIZE_MAX) a(r, z) -= 1;
        }
    }
    b(slot[to_index(y)], 0) = static_cast<long>(g.degree(y));
    auto sol = solve_exact(std::move(a), std::move(b));
    if (!sol) throw PreconditionError("singular system in green_function_exact");
    return (*sol)(slot[to_index(x)], 0);
}

}  // namespace ust
