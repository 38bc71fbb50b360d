#pragma once

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "ust/errors.hpp"
#include "ust/graph.hpp"

namespace ust {

/// Finite walk trajectory: a nonempty vertex sequence. length() counts steps.
template <class V>
class PathSeq {
public:
    using vertex_type = V;

    PathSeq() = default;
    explicit PathSeq(std::vector<V> vertices) : v_(std::move(vertices)) {}
    PathSeq(std::initializer_list<V> vertices) : v_(vertices) {}

    const std::vector<V>& vertices() const noexcept { return v_; }
    std::vector<V>& vertices() noexcept { return v_; }
    std::size_t size() const noexcept { return v_.size(); }
    bool empty() const noexcept { return v_.empty(); }
    std::size_t length() const noexcept { return v_.empty() ? 0 : v_.size() - 1; }
    const V& operator[](std::size_t i) const { return v_[i]; }
    const V& front() const { return v_.front(); }
    const V& back() const { return v_.back(); }

    friend bool operator==(const PathSeq&, const PathSeq&) = default;

private:
    std::vector<V> v_;
};

template <class V>
PathSeq<V> reverse(const PathSeq<V>& p) {
    std::vector<V> out(p.vertices().rbegin(), p.vertices().rend());
    return PathSeq<V>(std::move(out));
}

/// p followed by q; q must start where p ends.
template <class V>
PathSeq<V> concat(const PathSeq<V>& p, const PathSeq<V>& q) {
    if (p.empty() || q.empty() || !(p.back() == q.front())) {
        throw EndpointMismatchError("concat: last vertex of p differs from first vertex of q");
    }
    std::vector<V> out = p.vertices();
    out.insert(out.end(), q.vertices().begin() + 1, q.vertices().end());
    return PathSeq<V>(std::move(out));
}

/// First n steps (n + 1 vertices).
template <class V>
PathSeq<V> prefix(const PathSeq<V>& p, std::size_t n) {
    if (p.empty() || n > p.length()) throw RangeError("prefix: step count out of range");
    return PathSeq<V>(std::vector<V>(p.vertices().begin(), p.vertices().begin() + static_cast<std::ptrdiff_t>(n) + 1));
}

/// The path from step n onwards, starting at p[n].
template <class V>
PathSeq<V> suffix(const PathSeq<V>& p, std::size_t n) {
    if (p.empty() || n > p.length()) throw RangeError("suffix: step count out of range");
    return PathSeq<V>(std::vector<V>(p.vertices().begin() + static_cast<std::ptrdiff_t>(n), p.vertices().end()));
}

template <class V>
bool is_self_avoiding(const PathSeq<V>& p) {
    absl::flat_hash_set<V> seen;
    for (const auto& x : p.vertices())
        if (!seen.insert(x).second) return false;
    return true;
}

/// Chronological loop-erasure, computed through last visits: after keeping a vertex, the
/// next kept vertex is the one visited right after its final occurrence.
template <class V>
PathSeq<V> loop_erase(const PathSeq<V>& p) {
    if (p.empty()) return p;
    absl::flat_hash_map<V, std::size_t> last;
    last.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) last[p[i]] = i;
    std::vector<V> out;
    std::size_t i = last.at(p[0]);
    out.push_back(p[0]);
    while (i + 1 < p.size()) {
        const V& next = p[i + 1];
        out.push_back(next);
        i = last.at(next);
    }
    return PathSeq<V>(std::move(out));
}

struct IntersectionCount {
    std::size_t count = 0;    // time indices j of q with q(j) on p, excluding `exclude`
    bool intersects = false;  // some p(i) == q(j) with (i, j) != (0, 0)
};

template <class V>
IntersectionCount intersection_count(const PathSeq<V>& p, const PathSeq<V>& q, std::optional<V> exclude = std::nullopt) {
    IntersectionCount out;
    if (p.empty() || q.empty()) return out;
    absl::flat_hash_set<V> sites(p.vertices().begin(), p.vertices().end());
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (!sites.contains(q[j])) continue;
        if (!exclude || !(q[j] == *exclude)) ++out.count;
        if (j > 0) out.intersects = true;
    }
    if (!out.intersects) {
        for (std::size_t i = 1; i < p.size(); ++i)
            if (p[i] == q[0]) out.intersects = true;
    }
    return out;
}

/// Probability that SRW on g follows p: product over steps of multiplicity / degree.
/// On simple graphs this is the product of inverse degrees of p(0..l-1).
inline mpq_class path_weight(const MultiGraph& g, const PathSeq<VertexId>& p) {
    mpq_class w = 1;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const auto mult = g.multiplicity(p[i], p[i + 1]);
        if (mult == 0) throw PreconditionError("path_weight: consecutive vertices are not adjacent");
        mpq_class step(static_cast<long>(mult), static_cast<long>(g.degree(p[i])));
        step.canonicalize();
        w *= step;
    }
    return w;
}

}  // namespace ust
