#pragma once

// Path fibers of loop-erasure. gamma_fiber(alpha, m): length-m walks whose chronological
// loop-erasure is alpha. phi_fiber: the same for backward erasure (erase the reversed walk,
// reverse back).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "ust/errors.hpp"
#include "ust/graph.hpp"
#include "ust/path.hpp"

namespace ust {

struct FiberLimits {
    std::size_t max_length = 12;
    std::size_t max_paths = 2'000'000;
};

namespace detail {

inline void check_walkable(const MultiGraph& g, const PathSeq<VertexId>& alpha) {
    if (alpha.empty()) throw PreconditionError("fiber: empty path");
    for (const auto v : alpha.vertices())
        if (!g.has_vertex(v)) throw RangeError("fiber: vertex outside graph");
    for (std::size_t i = 0; i + 1 < alpha.size(); ++i)
        if (g.multiplicity(alpha[i], alpha[i + 1]) == 0) throw PreconditionError("fiber: path steps are not edges");
    if (!is_self_avoiding(alpha)) throw PreconditionError("fiber: path is not self-avoiding");
}

inline std::vector<std::uint32_t> bfs_distance_to(const MultiGraph& g, VertexId target) {
    std::vector<std::uint32_t> dist(g.vertex_count(), UINT32_MAX);
    std::vector<VertexId> queue{target};
    dist[to_index(target)] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        for (const auto& s : g.incident(queue[h])) {
            if (dist[to_index(s.neighbor)] != UINT32_MAX) continue;
            dist[to_index(s.neighbor)] = dist[to_index(queue[h])] + 1;
            queue.push_back(s.neighbor);
        }
    }
    return dist;
}

}  // namespace detail

/// Every walk of exactly m steps (as a vertex sequence) with loop_erase(walk) == alpha.
/// Walks are produced in lexicographic order of vertex ids. Depth-first extension keeps the
/// running loop-erasure and prunes branches that cannot reach alpha's endpoint in time.
inline std::vector<PathSeq<VertexId>> gamma_fiber(const MultiGraph& g, const PathSeq<VertexId>& alpha, std::size_t m,
                                                  const FiberLimits& limits = {}) {
    detail::check_walkable(g, alpha);
    if (m > limits.max_length) throw ResourceLimitError("fiber: length exceeds limit");
    std::vector<PathSeq<VertexId>> out;
    if (m < alpha.length()) return out;
    const auto dist = detail::bfs_distance_to(g, alpha.back());
    std::vector<VertexId> walk{alpha.front()};
    std::vector<VertexId> erased{alpha.front()};
    auto rec = [&](auto&& self) -> void {
        const std::size_t left = m - walk.size() + 1;
        if (left == 0) {
            if (erased == alpha.vertices()) {
                if (out.size() >= limits.max_paths) throw ResourceLimitError("fiber: too many paths");
                out.emplace_back(walk);
            }
            return;
        }
        std::vector<VertexId> next;
        for (const auto& s : g.incident(walk.back())) next.push_back(s.neighbor);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (const auto x : next) {
            if (dist[to_index(x)] > left - 1) continue;
            const auto saved = erased;
            const auto hit = std::find(erased.begin(), erased.end(), x);
            if (hit != erased.end())
                erased.erase(hit + 1, erased.end());
            else
                erased.push_back(x);
            walk.push_back(x);
            self(self);
            walk.pop_back();
            erased = saved;
        }
    };
    rec(rec);
    return out;
}

/// Walks whose backward loop-erasure is alpha: reverse(gamma_fiber(reverse(alpha), m)).
inline std::vector<PathSeq<VertexId>> phi_fiber(const MultiGraph& g, const PathSeq<VertexId>& alpha, std::size_t m,
                                                const FiberLimits& limits = {}) {
    auto out = gamma_fiber(g, reverse(alpha), m, limits);
    for (auto& p : out) p = reverse(p);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vertices() < b.vertices(); });
    return out;
}

struct FiberReport {
    std::size_t gamma_size = 0;
    std::size_t phi_size = 0;
    bool multisets_equal = false;
    bool weights_equal = false;
    mpq_class gamma_weight;  // summed over walks not revisiting the designated vertex after time 0
    mpq_class phi_weight;

    bool ok() const noexcept { return multisets_equal && weights_equal; }
};

/// Compares the two fibers through what a site-multiset-preserving bijection must keep: the
/// multiset of visited-site multisets, and the walk-probability mass of the walks that avoid
/// `designated` after time 0 (alpha's start when omitted).
inline FiberReport fiber_report(const MultiGraph& g, const PathSeq<VertexId>& alpha, std::size_t m,
                                std::optional<VertexId> designated = std::nullopt, const FiberLimits& limits = {}) {
    const auto gamma = gamma_fiber(g, alpha, m, limits);
    const auto phi = phi_fiber(g, alpha, m, limits);
    const VertexId z = designated.value_or(alpha.front());
    auto sites = [](const std::vector<PathSeq<VertexId>>& fiber) {
        std::vector<std::vector<VertexId>> all;
        all.reserve(fiber.size());
        for (const auto& p : fiber) {
            auto s = p.vertices();
            std::sort(s.begin(), s.end());
            all.push_back(std::move(s));
        }
        std::sort(all.begin(), all.end());
        return all;
    };
    auto avoiding_weight = [&](const std::vector<PathSeq<VertexId>>& fiber) {
        mpq_class total = 0;
        for (const auto& p : fiber) {
            if (std::find(p.vertices().begin() + 1, p.vertices().end(), z) != p.vertices().end()) continue;
            total += path_weight(g, p);
        }
        return total;
    };
    FiberReport r;
    r.gamma_size = gamma.size();
    r.phi_size = phi.size();
    r.multisets_equal = sites(gamma) == sites(phi);
    r.gamma_weight = avoiding_weight(gamma);
    r.phi_weight = avoiding_weight(phi);
    r.weights_equal = r.gamma_weight == r.phi_weight;
    return r;
}

inline bool verify_fiber_multisets(const MultiGraph& g, const PathSeq<VertexId>& alpha, std::size_t m,
                                   std::optional<VertexId> designated = std::nullopt, const FiberLimits& limits = {}) {
    return fiber_report(g, alpha, m, designated, limits).ok();
}

}  // namespace ust
