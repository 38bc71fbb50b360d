#pragma once

// Simple random walks on three kinds of context: an explicit MultiGraph, an implicit lattice
// box (coordinate arithmetic, ids shared with build_box), and Z^d itself (coordinates packed
// into a 64-bit key). Plus loop-erased walks on each.

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ust/errors.hpp"
#include "ust/graph.hpp"
#include "ust/lattice.hpp"
#include "ust/path.hpp"
#include "ust/rng.hpp"

namespace ust {

inline constexpr int kMaxDim = 8;

struct WalkBudget {
    std::uint64_t max_steps = 1'000'000'000;
};

struct StopAtCover {};
template <class V>
struct StopAtHit {
    std::vector<V> targets;
};
struct StopAfter {
    std::uint64_t steps = 0;
};

using GraphStop = std::variant<StopAtCover, StopAtHit<VertexId>, StopAfter>;

/// Walk on a MultiGraph: vertex sequence plus the edge used at each step.
struct WalkTrace {
    PathSeq<VertexId> path;
    std::vector<EdgeId> edges;
};

namespace detail {

[[noreturn]] inline void budget_exhausted(std::uint64_t budget) {
    throw StepBudgetExceeded("random walk exceeded step budget of " + std::to_string(budget));
}

/// Drives `advance` until `stop` fires; `done(vertex, steps)` decides termination.
template <class V, class Advance, class Done>
PathSeq<V> run_walk(V start, Advance&& advance, Done&& done, const WalkBudget& budget) {
    std::vector<V> out{start};
    V cur = start;
    std::uint64_t steps = 0;
    while (!done(cur, steps)) {
        if (steps >= budget.max_steps) budget_exhausted(budget.max_steps);
        cur = advance(cur);
        out.push_back(cur);
        ++steps;
    }
    return PathSeq<V>(std::move(out));
}

}  // namespace detail

/// SRW on g: each step picks an incident edge-slot uniformly, so parallel edges weigh by
/// multiplicity.
inline WalkTrace srw_path(const MultiGraph& g, VertexId start, const GraphStop& stop, RngStream& rng,
                          const WalkBudget& budget = {}) {
    if (!g.has_vertex(start)) throw RangeError("srw_path: start vertex out of range");
    WalkTrace trace;
    std::vector<char> flag(g.vertex_count(), 0);
    std::size_t seen = 0;
    if (const auto* hit = std::get_if<StopAtHit<VertexId>>(&stop)) {
        for (const auto t : hit->targets) {
            if (!g.has_vertex(t)) throw RangeError("srw_path: target out of range");
            flag[to_index(t)] = 1;
        }
    }
    auto advance = [&](VertexId v) {
        const auto slots = g.incident(v);
        if (slots.empty()) throw PreconditionError("srw_path: walk stuck at an isolated vertex");
        const auto& s = slots[rng.below(static_cast<std::uint32_t>(slots.size()))];
        trace.edges.push_back(s.edge);
        return s.neighbor;
    };
    auto done = [&](VertexId v, std::uint64_t steps) -> bool {
        return std::visit(
            [&](const auto& rule) -> bool {
                using R = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<R, StopAfter>) {
                    return steps >= rule.steps;
                } else if constexpr (std::is_same_v<R, StopAtHit<VertexId>>) {
                    return flag[to_index(v)] != 0;
                } else {
                    if (!flag[to_index(v)]) {
                        flag[to_index(v)] = 1;
                        ++seen;
                    }
                    return seen == g.vertex_count();
                }
            },
            stop);
    };
    if (std::holds_alternative<StopAtCover>(stop) && !g.is_connected()) {
        throw PreconditionError("srw_path: cover time is infinite on a disconnected graph");
    }
    trace.path = detail::run_walk(start, advance, done, budget);
    return trace;
}

/// SRW on the box {-n..n}^d without materializing it. Vertex ids follow BoxShape, so they
/// coincide with build_box(d, n). Moves that would leave the box are never proposed: a
/// uniformly drawn direction pointing outside is redrawn, which is uniform over the
/// in-box neighbours.
class BoxWalker {
public:
    struct State {
        std::uint64_t id = 0;
        std::array<int, kMaxDim> x{};
    };

    explicit BoxWalker(BoxShape shape) : shape_(std::move(shape)) {
        if (shape_.dim() > kMaxDim) throw RangeError("BoxWalker supports d <= 8");
        if (shape_.radius() == 0 && shape_.vertex_count() == 1) single_ = true;
        for (int i = 0; i < shape_.dim(); ++i) stride_[static_cast<std::size_t>(i)] = shape_.stride(i);
    }

    const BoxShape& shape() const noexcept { return shape_; }

    State at(const LatticeCoord& c) const {
        State s;
        s.id = shape_.index(c);
        for (int i = 0; i < shape_.dim(); ++i) s.x[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
        return s;
    }

    void step(State& s, RngStream& rng) const {
        if (single_) throw PreconditionError("BoxWalker: single-vertex box has no moves");
        const int n = shape_.radius();
        const auto dirs = static_cast<std::uint32_t>(2 * shape_.dim());
        for (;;) {
            const std::uint32_t k = rng.below(dirs);
            const std::size_t axis = k >> 1;
            if (k & 1u) {
                if (s.x[axis] == n) continue;
                ++s.x[axis];
                s.id += stride_[axis];
            } else {
                if (s.x[axis] == -n) continue;
                --s.x[axis];
                s.id -= stride_[axis];
            }
            return;
        }
    }

    int norm(const State& s) const {
        int m = 0;
        for (int i = 0; i < shape_.dim(); ++i) m = std::max(m, std::abs(s.x[static_cast<std::size_t>(i)]));
        return m;
    }

private:
    BoxShape shape_;
    std::array<std::uint64_t, kMaxDim> stride_{};
    bool single_ = false;
};

inline PathSeq<VertexId> srw_path(const BoxShape& box, const LatticeCoord& start, const GraphStop& stop,
                                  RngStream& rng, const WalkBudget& budget = {}) {
    if (box.vertex_count() > UINT32_MAX) throw ResourceLimitError("box too large for 32-bit vertex ids");
    BoxWalker walker(box);
    auto state = walker.at(start);
    std::vector<char> flag;
    std::uint64_t seen = 0;
    const bool cover = std::holds_alternative<StopAtCover>(stop);
    const auto* hit = std::get_if<StopAtHit<VertexId>>(&stop);
    if (cover || hit) flag.assign(box.vertex_count(), 0);
    if (hit)
        for (const auto t : hit->targets) flag.at(to_index(t)) = 1;
    auto advance = [&](VertexId) {
        walker.step(state, rng);
        return vid(state.id);
    };
    auto done = [&](VertexId v, std::uint64_t steps) -> bool {
        if (const auto* after = std::get_if<StopAfter>(&stop)) return steps >= after->steps;
        if (hit) return flag[to_index(v)] != 0;
        if (!flag[to_index(v)]) {
            flag[to_index(v)] = 1;
            ++seen;
        }
        return seen == box.vertex_count();
    };
    return detail::run_walk(vid(state.id), advance, done, budget);
}

enum class SiteKey : std::uint64_t {};

/// Z^d with coordinates packed into 64 bits (64/d bits each, biased). Walks that leave the
/// encodable region raise RangeError; the window is +-2^(64/d - 1), e.g. +-2047 for d = 5.
class IntegerLattice {
public:
    struct State {
        SiteKey key{};
        std::array<int, kMaxDim> x{};
    };

    explicit IntegerLattice(int d) : d_(d) {
        if (d < 1 || d > kMaxDim) throw RangeError("IntegerLattice supports 1 <= d <= 8");
        bits_ = 64 / d;
        if (bits_ > 31) bits_ = 31;
        limit_ = (1 << (bits_ - 1)) - 1;
    }

    int dim() const noexcept { return d_; }
    int coordinate_limit() const noexcept { return limit_; }

    SiteKey encode(const LatticeCoord& c) const {
        if (static_cast<int>(c.size()) != d_) throw RangeError("coordinate dimension mismatch");
        std::uint64_t key = 0;
        for (int i = 0; i < d_; ++i) {
            const int v = c[static_cast<std::size_t>(i)];
            if (v < -limit_ || v > limit_) throw RangeError("coordinate outside the encodable window");
            key |= static_cast<std::uint64_t>(v + limit_ + 1) << (bits_ * i);
        }
        return static_cast<SiteKey>(key);
    }

    LatticeCoord decode(SiteKey k) const {
        LatticeCoord c(static_cast<std::size_t>(d_));
        const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
        const auto key = static_cast<std::uint64_t>(k);
        for (int i = 0; i < d_; ++i)
            c[static_cast<std::size_t>(i)] = static_cast<int>((key >> (bits_ * i)) & mask) - limit_ - 1;
        return c;
    }

    State at(const LatticeCoord& c) const {
        State s;
        s.key = encode(c);
        for (int i = 0; i < d_; ++i) s.x[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
        return s;
    }

    void step(State& s, RngStream& rng) const {
        const std::uint32_t k = rng.below(static_cast<std::uint32_t>(2 * d_));
        const std::size_t axis = k >> 1;
        const std::uint64_t unit = std::uint64_t{1} << (bits_ * static_cast<int>(axis));
        int& c = s.x[axis];
        if (k & 1u) {
            if (c == limit_) throw RangeError("walk left the encodable window");
            ++c;
            s.key = static_cast<SiteKey>(static_cast<std::uint64_t>(s.key) + unit);
        } else {
            if (c == -limit_) throw RangeError("walk left the encodable window");
            --c;
            s.key = static_cast<SiteKey>(static_cast<std::uint64_t>(s.key) - unit);
        }
    }

private:
    int d_;
    int bits_ = 8;
    int limit_ = 127;
};

using LatticeStop = std::variant<StopAtHit<SiteKey>, StopAfter>;

inline PathSeq<SiteKey> srw_path(const IntegerLattice& zd, const LatticeCoord& start, const LatticeStop& stop,
                                 RngStream& rng, const WalkBudget& budget = {}) {
    auto state = zd.at(start);
    absl::flat_hash_set<SiteKey> targets;
    if (const auto* hit = std::get_if<StopAtHit<SiteKey>>(&stop)) targets.insert(hit->targets.begin(), hit->targets.end());
    auto advance = [&](SiteKey) {
        zd.step(state, rng);
        return state.key;
    };
    auto done = [&](SiteKey v, std::uint64_t steps) -> bool {
        if (const auto* after = std::get_if<StopAfter>(&stop)) return steps >= after->steps;
        return targets.contains(v);
    };
    return detail::run_walk(state.key, advance, done, budget);
}

/// LE(SRW from start stopped on hitting targets) on a finite graph.
inline PathSeq<VertexId> lerw_sample(const MultiGraph& g, VertexId start, const std::vector<VertexId>& targets,
                                     RngStream& rng, const WalkBudget& budget = {}) {
    return loop_erase(srw_path(g, start, StopAtHit<VertexId>{targets}, rng, budget).path);
}

/// Truncated LERW on Z^d. `path` is LE of the first `horizon` walk steps. The first
/// `stable_steps` steps of it are certified: they equal the corresponding prefix of
/// LE(walk up to n') for every n' between the checkpoint and the horizon, because the walk
/// never returned to those sites after the checkpoint.
struct LerwPrefix {
    PathSeq<SiteKey> path;
    std::size_t stable_steps = 0;
    std::uint64_t checkpoint = 0;
    std::uint64_t horizon = 0;

    bool certified(std::size_t steps) const noexcept { return stable_steps >= steps; }
    PathSeq<SiteKey> stable_prefix() const { return prefix(path, stable_steps); }
};

/// Loop-erasure of a stored trajectory up to index `end` (inclusive) given last-visit times.
template <class V, class Map>
std::vector<V> erase_with_last_visits(const std::vector<V>& walk, std::size_t end, const Map& last) {
    std::vector<V> out{walk[0]};
    std::size_t i = last.at(walk[0]);
    while (i < end) {
        const V& next = walk[i + 1];
        out.push_back(next);
        i = last.at(next);
    }
    return out;
}

inline LerwPrefix lerw_sample(const IntegerLattice& zd, const LatticeCoord& start, std::uint64_t horizon, RngStream& rng,
                              std::uint64_t checkpoint = UINT64_MAX) {
    if (zd.dim() <= 2) {
        throw PreconditionError("LERW on Z^d needs d >= 3; the walk is recurrent for d <= 2");
    }
    if (checkpoint == UINT64_MAX) checkpoint = horizon / 2;
    if (checkpoint > horizon) throw RangeError("lerw_sample: checkpoint beyond horizon");
    const auto walk = srw_path(zd, start, StopAfter{horizon}, rng).vertices();
    absl::flat_hash_map<SiteKey, std::size_t> last;
    last.reserve(walk.size());
    for (std::size_t t = 0; t <= checkpoint; ++t) last[walk[t]] = t;
    const auto early = erase_with_last_visits(walk, checkpoint, last);
    for (std::size_t t = checkpoint + 1; t < walk.size(); ++t) last[walk[t]] = t;
    std::size_t kept = 0;
    while (kept < early.size() && last.at(early[kept]) <= checkpoint) ++kept;
    LerwPrefix out;
    out.path = PathSeq<SiteKey>(erase_with_last_visits(walk, walk.size() - 1, last));
    out.stable_steps = kept == 0 ? 0 : kept - 1;
    out.checkpoint = checkpoint;
    out.horizon = horizon;
    return out;
}

}  // namespace ust
