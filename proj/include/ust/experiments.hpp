#pragma once

// Batch estimators on Z^d and on lattice boxes. Each replica draws from its own stream
// (seed, replica_stream(i, role)) and replicas are reduced in index order, so results do not
// depend on the worker count.

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ust/errors.hpp"
#include "ust/kirchhoff.hpp"
#include "ust/lattice.hpp"
#include "ust/parallel.hpp"
#include "ust/rng.hpp"
#include "ust/stats.hpp"
#include "ust/tree.hpp"
#include "ust/walk.hpp"

namespace ust {

struct ExperimentBudget {
    std::uint64_t max_vertices = 5'000'000;     // materialized or stamped box vertices
    std::uint64_t max_steps = 1'000'000'000;    // per walk
    std::uint64_t max_replicates = 100'000'000;
};

struct RunConfig {
    ExperimentBudget budget;
    std::size_t workers = 0;  // 0: worker_count()

    std::size_t resolved_workers() const { return workers == 0 ? worker_count() : workers; }
};

/// Stream roles inside a replica.
enum class Role : unsigned { lerw = 0, srw = 1, connection = 2, cover = 3, pairs = 4, separator = 5, green = 6 };

inline RngStream replica_rng(std::uint64_t seed, std::uint64_t replica, Role role) {
    return RngStream(seed, replica_stream(replica, static_cast<unsigned>(role)));
}

namespace detail {

inline void check_replicates(std::uint64_t reps, const ExperimentBudget& b) {
    if (reps == 0) throw PreconditionError("replicate count must be positive");
    if (reps > b.max_replicates)
        throw ResourceLimitError("replicates " + std::to_string(reps) + " exceed budget " +
                                 std::to_string(b.max_replicates));
}

inline void check_box(int d, int n, const ExperimentBudget& b) {
    if (d < 1 || d > kMaxDim || n < 0) throw RangeError("box requires 1 <= d <= 8 and n >= 0");
    const BoxShape shape(d, n);
    if (shape.vertex_count() > b.max_vertices)
        throw ResourceLimitError("box B_" + std::to_string(n) + " in d = " + std::to_string(d) + " has " +
                                 std::to_string(shape.vertex_count()) + " vertices, above the vertex budget " +
                                 std::to_string(b.max_vertices));
}

/// One replica of the two-walk intersection experiment on Z^d. alpha is the loop-erasure of a
/// walk of `horizon` steps from the origin, beta an independent walk of `beta_steps` steps
/// from r e_1. For every beta time j landing on alpha at index a, the pair is seen at
/// cutoff M as soon as max(j, a) <= M.
class IntersectionWorker {
public:
    explicit IntersectionWorker(int d) : zd_(d) {}

    struct Sample {
        std::uint64_t first = UINT64_MAX;  // least M at which the walks meet
        std::uint64_t count = 0;           // beta times on alpha with both indices <= count_cutoff
    };

    /// Returns nullopt when a walk leaves the coordinate window.
    std::optional<Sample> run(int r, std::uint64_t horizon, std::uint64_t beta_steps, std::uint64_t count_cutoff,
                              bool need_count, RngStream& lerw_rng, RngStream& srw_rng) {
        const int d = zd_.dim();
        LatticeCoord origin(static_cast<std::size_t>(d), 0);
        try {
            walk_.clear();
            last_.clear();
            auto s = zd_.at(origin);
            walk_.push_back(s.key);
            for (std::uint64_t t = 0; t < horizon; ++t) {
                zd_.step(s, lerw_rng);
                walk_.push_back(s.key);
            }
            for (std::size_t t = 0; t < walk_.size(); ++t) last_[walk_[t]] = t;
            index_.clear();
            const std::uint64_t keep = std::max(beta_steps, count_cutoff);
            std::size_t i = last_.at(walk_[0]);
            index_[walk_[0]] = 0;
            std::uint64_t a = 0;
            while (i + 1 < walk_.size() && a < keep) {
                const SiteKey next = walk_[i + 1];
                index_[next] = ++a;
                i = last_.at(next);
            }
            const SiteKey excluded = zd_.encode(origin);
            const bool exclude = r == 0;
            auto b = zd_.at(axis_point(d, r));
            Sample out;
            for (std::uint64_t j = 0;; ++j) {
                if (!need_count && j >= out.first) break;
                if (!(exclude && b.key == excluded)) {
                    const auto it = index_.find(b.key);
                    if (it != index_.end()) {
                        out.first = std::min(out.first, std::max(j, it->second));
                        if (need_count && j <= count_cutoff && it->second <= count_cutoff) ++out.count;
                    }
                }
                if (j == beta_steps) break;
                zd_.step(b, srw_rng);
            }
            return out;
        } catch (const RangeError&) {
            return std::nullopt;
        }
    }

private:
    IntegerLattice zd_;
    std::vector<SiteKey> walk_;
    absl::flat_hash_map<SiteKey, std::size_t> last_;
    absl::flat_hash_map<SiteKey, std::uint64_t> index_;
};

inline void check_intersection(int d, int r, std::uint64_t horizon, const ExperimentBudget& b) {
    if (d < 3) throw PreconditionError("d must be >= 3 for infinite-context LERW");
    if (d > kMaxDim) throw RangeError("d must be <= 8");
    if (r < 0) throw RangeError("separation must be nonnegative");
    if (horizon > b.max_steps) throw ResourceLimitError("walk horizon exceeds the step budget");
}

}  // namespace detail

struct IntersectionOptions {
    std::uint64_t horizon = 0;  // steps of the walk that is loop-erased; 0 means the cutoff M
};

/// P(LE of a walk from 0, cut to M steps, meets an independent walk from r e_1 within M
/// steps). With v = w (r = 0) hits at the shared origin are not counted. For a fixed
/// horizon the estimates are pathwise nondecreasing in M.
inline std::vector<EstimateResult> intersection_sweep(int d, int r, std::span<const std::uint64_t> cutoffs,
                                                      std::uint64_t reps, std::uint64_t seed,
                                                      IntersectionOptions opts = {}, const RunConfig& cfg = {}) {
    if (cutoffs.empty()) throw PreconditionError("intersection_sweep needs at least one cutoff");
    const std::uint64_t top = *std::max_element(cutoffs.begin(), cutoffs.end());
    const std::uint64_t horizon = opts.horizon == 0 ? top : opts.horizon;
    detail::check_intersection(d, r, std::max(horizon, top), cfg.budget);
    detail::check_replicates(reps, cfg.budget);
    auto firsts = parallel_replicas<std::optional<std::uint64_t>>(
        reps, cfg.resolved_workers(), [d] { return detail::IntersectionWorker(d); },
        [&](detail::IntersectionWorker& w, std::size_t i) -> std::optional<std::uint64_t> {
            auto a = replica_rng(seed, i, Role::lerw);
            auto b = replica_rng(seed, i, Role::srw);
            const auto s = w.run(r, horizon, top, 0, false, a, b);
            if (!s) return std::nullopt;
            return s->first;
        });
    std::vector<EstimateResult> out;
    for (const auto m : cutoffs) {
        std::vector<std::optional<double>> v;
        v.reserve(firsts.size());
        for (const auto& f : firsts) v.push_back(f ? std::optional<double>(*f <= m ? 1.0 : 0.0) : std::nullopt);
        out.push_back(summarize(v, seed, replica_stream_description(2)));
    }
    return out;
}

inline EstimateResult intersection_probability(int d, int r, std::uint64_t cutoff, std::uint64_t reps,
                                               std::uint64_t seed, IntersectionOptions opts = {},
                                               const RunConfig& cfg = {}) {
    const std::uint64_t m[] = {cutoff};
    return intersection_sweep(d, r, m, reps, seed, opts, cfg).front();
}

struct MomentsResult {
    EstimateResult ex;
    EstimateResult ex2;
    EstimateResult positive;  // P(X > 0)
    double pz_margin = 0;      // P(X>0) - (EX)^2 / EX^2
    double pz_error = 0;       // delta-method standard error of the margin

    /// Paley-Zygmund lower bound holds within k standard errors.
    bool pz_holds(double k = 3) const { return pz_margin >= -k * pz_error; }
};

/// Moments of X, the number of times j <= M with beta(j) on alpha (first M steps of LE).
inline MomentsResult intersection_moments(int d, int r, std::uint64_t cutoff, std::uint64_t reps, std::uint64_t seed,
                                          IntersectionOptions opts = {}, const RunConfig& cfg = {}) {
    if (d < 5) throw PreconditionError("intersection_moments requires d >= 5");
    const std::uint64_t horizon = opts.horizon == 0 ? cutoff : opts.horizon;
    detail::check_intersection(d, r, std::max(horizon, cutoff), cfg.budget);
    detail::check_replicates(reps, cfg.budget);
    auto counts = parallel_replicas<std::optional<double>>(
        reps, cfg.resolved_workers(), [d] { return detail::IntersectionWorker(d); },
        [&](detail::IntersectionWorker& w, std::size_t i) -> std::optional<double> {
            auto a = replica_rng(seed, i, Role::lerw);
            auto b = replica_rng(seed, i, Role::srw);
            const auto s = w.run(r, horizon, cutoff, cutoff, true, a, b);
            if (!s) return std::nullopt;
            return static_cast<double>(s->count);
        });
    std::vector<std::optional<double>> sq, pos;
    for (const auto& c : counts) {
        sq.push_back(c ? std::optional<double>(*c * *c) : std::nullopt);
        pos.push_back(c ? std::optional<double>(*c > 0 ? 1.0 : 0.0) : std::nullopt);
    }
    const auto streams = replica_stream_description(2);
    MomentsResult out{summarize(counts, seed, streams), summarize(sq, seed, streams), summarize(pos, seed, streams)};
    const double a = out.ex.mean, b = out.ex2.mean, p = out.positive.mean;
    if (b <= 0) {
        out.pz_margin = p;
        return out;
    }
    out.pz_margin = p - a * a / b;
    const std::array<double, 3> grad{1.0, -2 * a / b, a * a / (b * b)};
    const std::array<double, 3> mean{p, a, b};
    std::array<std::array<double, 3>, 3> cov{};
    double n = 0;
    for (const auto& c : counts) {
        if (!c) continue;
        n += 1;
        const std::array<double, 3> z{*c > 0 ? 1.0 : 0.0, *c, *c * *c};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += (z[i] - mean[i]) * (z[j] - mean[j]);
    }
    if (n > 1) {
        double var = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) var += grad[i] * grad[j] * cov[i][j] / (n - 1);
        out.pz_error = std::sqrt(std::max(var, 0.0) / n);
    }
    return out;
}

/// Canonical pair placement in a box: v = -floor(r/2) e_1, w = v + r e_1.
inline std::pair<LatticeCoord, LatticeCoord> connection_placement(int d, int r) {
    LatticeCoord v(static_cast<std::size_t>(d), 0);
    v[0] = -(r / 2);
    LatticeCoord w = v;
    w[0] += r;
    return {v, w};
}

/// Tree distance between v and w in a uniform spanning tree of B_n, one value per replica
/// (nullopt when the walk budget ran out). The Aldous-Broder walk from v only has to run
/// until it first enters w: the tree path from w to v is then fixed.
inline std::vector<std::optional<std::uint64_t>> tree_distance_samples(int d, int n, const LatticeCoord& v,
                                                                       const LatticeCoord& w, std::uint64_t reps,
                                                                       std::uint64_t seed, Role role,
                                                                       const RunConfig& cfg = {}) {
    detail::check_box(d, n, cfg.budget);
    detail::check_replicates(reps, cfg.budget);
    const BoxShape shape(d, n);
    if (!shape.contains(v) || !shape.contains(w)) throw RangeError("placement outside the box");
    const auto target = shape.index(w);
    const WalkBudget walk_budget{cfg.budget.max_steps};
    return parallel_replicas<std::optional<std::uint64_t>>(
        reps, cfg.resolved_workers(), [&] { return BoxTreeGrower(shape); },
        [&](BoxTreeGrower& g, std::size_t i) -> std::optional<std::uint64_t> {
            auto rng = replica_rng(seed, i, role);
            try {
                g.grow(v, target, rng, walk_budget);
            } catch (const StepBudgetExceeded&) {
                return std::nullopt;
            }
            return g.path_to_root(target).size() - 1;
        });
}

/// P(tree distance between v and w is at most M) for each cutoff, from the same trees.
inline std::vector<EstimateResult> connection_sweep(int d, int n, int r, std::span<const std::uint64_t> cutoffs,
                                                    std::uint64_t reps, std::uint64_t seed, const RunConfig& cfg = {}) {
    if (r < 0) throw RangeError("separation must be nonnegative");
    if (4 * r > n) throw PreconditionError("connection_probability requires r <= n/4");
    const auto [v, w] = connection_placement(d, r);
    const auto dist = tree_distance_samples(d, n, v, w, reps, seed, Role::connection, cfg);
    std::vector<EstimateResult> out;
    for (const auto m : cutoffs) {
        std::vector<std::optional<double>> x;
        x.reserve(dist.size());
        for (const auto& t : dist) x.push_back(t ? std::optional<double>(*t <= m ? 1.0 : 0.0) : std::nullopt);
        out.push_back(summarize(x, seed, replica_stream_description(1)));
    }
    return out;
}

inline EstimateResult connection_probability(int d, int n, int r, std::uint64_t cutoff, std::uint64_t reps,
                                             std::uint64_t seed, const RunConfig& cfg = {}) {
    const std::uint64_t m[] = {cutoff};
    return connection_sweep(d, n, r, m, reps, seed, cfg).front();
}

struct ComponentDensity {
    EstimateResult pair_sum;  // estimate of E sum over ordered pairs (x, y) of 1{treedist <= M}
    double ratio = 0;         // pair_sum / N^2 with N = (2n+1)^d
    double ratio_error = 0;
    std::uint64_t vertices = 0;
    bool exact = false;       // M >= N - 1: every pair is within M, no sampling
};

/// Fraction of vertex pairs of B_n joined by a tree path of length at most M, scaled to the
/// pair sum. Each replica grows a full tree and checks `pairs` uniformly drawn ordered pairs.
inline ComponentDensity component_density_check(int d, int n, std::uint64_t cutoff, std::uint64_t reps,
                                                std::uint64_t seed, std::uint64_t pairs = 4096,
                                                const RunConfig& cfg = {}) {
    detail::check_box(d, n, cfg.budget);
    detail::check_replicates(reps, cfg.budget);
    const BoxShape shape(d, n);
    const std::uint64_t count = shape.vertex_count();
    ComponentDensity out;
    out.vertices = count;
    const double n2 = static_cast<double>(count) * static_cast<double>(count);
    if (cutoff + 1 >= count) {
        out.exact = true;
        out.ratio = 1;
        out.pair_sum.mean = n2;
        out.pair_sum.seed = seed;
        out.pair_sum.streams = "none: every pair of a spanning tree lies within N - 1 steps";
        return out;
    }
    if (pairs == 0) throw PreconditionError("pairs must be positive");
    const LatticeCoord origin(static_cast<std::size_t>(d), 0);
    const WalkBudget walk_budget{cfg.budget.max_steps};
    struct State {
        BoxTreeGrower grower;
        std::vector<std::uint32_t> depth;
    };
    auto fractions = parallel_replicas<std::optional<double>>(
        reps, cfg.resolved_workers(), [&] { return State{BoxTreeGrower(shape), {}}; },
        [&](State& st, std::size_t i) -> std::optional<double> {
            auto rng = replica_rng(seed, i, Role::cover);
            try {
                st.grower.grow(origin, std::nullopt, rng, walk_budget);
            } catch (const StepBudgetExceeded&) {
                return std::nullopt;
            }
            constexpr std::uint32_t kUnknown = UINT32_MAX;
            st.depth.assign(count, kUnknown);
            std::vector<std::uint32_t> chain;
            for (std::uint64_t x = 0; x < count; ++x) {
                chain.clear();
                std::uint32_t y = static_cast<std::uint32_t>(x);
                while (y != BoxTreeGrower::kNone && st.depth[y] == kUnknown) {
                    chain.push_back(y);
                    y = st.grower.parent(y);
                }
                std::uint32_t base = y == BoxTreeGrower::kNone ? 0 : st.depth[y] + 1;
                for (auto it = chain.rbegin(); it != chain.rend(); ++it) st.depth[*it] = base++;
            }
            auto pick = replica_rng(seed, i, Role::pairs);
            std::uint64_t within = 0;
            for (std::uint64_t k = 0; k < pairs; ++k) {
                std::uint32_t a = pick.below(static_cast<std::uint32_t>(count));
                std::uint32_t b = pick.below(static_cast<std::uint32_t>(count));
                std::uint64_t steps = 0;
                while (a != b && steps <= cutoff) {
                    if (st.depth[a] >= st.depth[b]) {
                        a = st.grower.parent(a);
                    } else {
                        b = st.grower.parent(b);
                    }
                    ++steps;
                }
                if (steps <= cutoff) ++within;
            }
            return static_cast<double>(within) / static_cast<double>(pairs);
        });
    const auto frac = summarize(fractions, seed, replica_stream_description(2));
    out.ratio = frac.mean;
    out.ratio_error = frac.std_error;
    out.pair_sum = frac;
    out.pair_sum.mean = frac.mean * n2;
    out.pair_sum.std_error = frac.std_error * n2;
    return out;
}

struct SeparatorPlacement {
    LatticeCoord v, x, w;
};

/// v = -L e_1, x = 0, w = L e_1.
inline SeparatorPlacement collinear_placement(int d, int spacing) {
    SeparatorPlacement p{LatticeCoord(static_cast<std::size_t>(d), 0), LatticeCoord(static_cast<std::size_t>(d), 0),
                         LatticeCoord(static_cast<std::size_t>(d), 0)};
    p.v[0] = -spacing;
    p.w[0] = spacing;
    return p;
}

/// 8L, reduced until the box fits the vertex budget.
inline int separator_box_radius(int d, int spacing, std::uint64_t max_vertices) {
    int n = 8 * spacing;
    while (n > 0 && BoxShape(d, n).vertex_count() > max_vertices) --n;
    return n;
}

/// P(x lies on the tree path from v to w) in a uniform spanning tree of B_n.
inline EstimateResult separator_probability(int d, int n, const SeparatorPlacement& p, std::uint64_t reps,
                                            std::uint64_t seed, const RunConfig& cfg = {}) {
    detail::check_box(d, n, cfg.budget);
    for (const auto* c : {&p.v, &p.x, &p.w}) {
        if (static_cast<int>(c->size()) != d) throw RangeError("placement dimension mismatch");
        if (2 * chebyshev_norm(*c) > n) throw PreconditionError("placement must lie within B_{n/2}");
    }
    detail::check_replicates(reps, cfg.budget);
    const BoxShape shape(d, n);
    const auto target = shape.index(p.w);
    const auto sep = static_cast<std::uint32_t>(shape.index(p.x));
    const WalkBudget walk_budget{cfg.budget.max_steps};
    auto hits = parallel_replicas<std::optional<double>>(
        reps, cfg.resolved_workers(), [&] { return BoxTreeGrower(shape); },
        [&](BoxTreeGrower& g, std::size_t i) -> std::optional<double> {
            auto rng = replica_rng(seed, i, Role::separator);
            try {
                g.grow(p.v, target, rng, walk_budget);
            } catch (const StepBudgetExceeded&) {
                return std::nullopt;
            }
            const auto path = g.path_to_root(target);
            return std::find(path.begin(), path.end(), sep) != path.end() ? 1.0 : 0.0;
        });
    return summarize(hits, seed, replica_stream_description(1));
}

struct GreenPoint {
    int r = 0;
    EstimateResult estimate;
    std::optional<mpq_class> exact;
};

struct GreenScaling {
    std::vector<GreenPoint> points;
    SlopeFit fit;
    bool monotone = false;  // values strictly decrease along increasing r
};

struct GreenOptions {
    std::size_t exact_max_unknowns = 343;  // interior size up to which the exact solve is used
};

/// G_n(0, r e_1): expected visits to r e_1 of a walk from 0 killed on the boundary of B_n.
/// Monte Carlo replicas average the visits over the 2d axis images +-r e_i.
inline GreenScaling green_function_scaling(int d, std::span<const int> radii, int n, std::uint64_t reps,
                                           std::uint64_t seed, GreenOptions opts = {}, const RunConfig& cfg = {}) {
    if (d < 3) throw PreconditionError("green_function_scaling requires d >= 3");
    if (d > kMaxDim) throw RangeError("d must be <= 8");
    if (radii.empty()) throw PreconditionError("no separations given");
    for (const int r : radii) {
        if (r < 1) throw RangeError("separations must be positive");
        if (4 * r > n) throw PreconditionError("green_function_scaling requires r_max <= n/4");
    }
    const BoxShape interior(d, n - 1);
    const bool exact = interior.vertex_count() <= opts.exact_max_unknowns;
    GreenScaling out;
    if (exact) {
        const auto box = build_box(d, n);
        const auto origin = box.vertex(LatticeCoord(static_cast<std::size_t>(d), 0));
        ExactLimits limits;
        limits.max_vertices = std::max<std::size_t>(limits.max_vertices, interior.vertex_count());
        for (const int r : radii) {
            GreenPoint p;
            p.r = r;
            p.exact = green_function_exact(box, origin, box.vertex(axis_point(d, r)), limits);
            p.estimate.mean = p.exact->get_d();
            p.estimate.seed = seed;
            p.estimate.streams = "none: exact solve";
            out.points.push_back(std::move(p));
        }
    } else {
        detail::check_replicates(reps, cfg.budget);
        for (const int r : radii) {
            auto visits = parallel_replicas<std::optional<double>>(
                reps, cfg.resolved_workers(), [] { return 0; },
                [&](int&, std::size_t i) -> std::optional<double> {
                    auto rng = replica_rng(seed, i, Role::green);
                    std::array<int, kMaxDim> x{};
                    int nonzero = 0;
                    std::uint64_t hits = 0;
                    const auto dirs = static_cast<std::uint32_t>(2 * d);
                    for (std::uint64_t step = 0;; ++step) {
                        if (step >= cfg.budget.max_steps) return std::nullopt;
                        const std::uint32_t k = rng.below(dirs);
                        const std::size_t axis = k >> 1;
                        const int before = x[axis];
                        x[axis] += (k & 1u) ? 1 : -1;
                        nonzero += (x[axis] != 0) - (before != 0);
                        if (x[axis] == n || x[axis] == -n) break;
                        if (nonzero == 1) {
                            std::size_t a = 0;
                            while (x[a] == 0) ++a;
                            if (x[a] == r || x[a] == -r) ++hits;
                        }
                    }
                    return static_cast<double>(hits) / static_cast<double>(2 * d);
                });
            out.points.push_back({r, summarize(visits, seed, replica_stream_description(1)), std::nullopt});
            out.points.back().estimate.seed = seed;
        }
    }
    std::vector<PowerPoint> pts;
    for (const auto& p : out.points) pts.push_back({static_cast<double>(p.r), p.estimate.mean, p.estimate.std_error});
    out.monotone = true;
    for (std::size_t i = 1; i < out.points.size(); ++i) {
        if (out.points[i].r > out.points[i - 1].r && !(out.points[i].estimate.mean < out.points[i - 1].estimate.mean))
            out.monotone = false;
    }
    if (pts.size() >= 3) out.fit = fit_power_law(pts);
    return out;
}

using CoordEdge = std::pair<LatticeCoord, LatticeCoord>;

struct GapRow {
    int n = 0;
    ExactProb free;
    std::optional<ExactProb> wired;
    std::optional<int> m;  // inner radius of the wired quotient

    std::optional<mpq_class> gap() const {
        if (!wired) return std::nullopt;
        return mpq_class(free.value() - wired->value());
    }
};

/// The edge from the origin to e_1.
inline std::vector<CoordEdge> central_edge(int d) {
    return {{LatticeCoord(static_cast<std::size_t>(d), 0), axis_point(d, 1)}};
}

/// Exact P(A in tree) with free boundary (B_n) and wired boundary (everything outside radius
/// m identified). When m is omitted each n uses m = n - 1. A row carries a wired value only
/// when A lies within radius m.
inline std::vector<GapRow> free_wired_gap(int d, std::span<const CoordEdge> a, std::optional<int> m,
                                          std::span<const int> radii, const ExactLimits& limits = {}) {
    if (a.empty()) throw PreconditionError("edge set A is empty");
    // An edge survives the wiring while one endpoint stays inside radius m.
    int reach = 0;
    int extent = 0;
    for (const auto& [x, y] : a) {
        if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
            throw RangeError("edge coordinates have the wrong dimension");
        int l1 = 0;
        for (int i = 0; i < d; ++i) l1 += std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
        if (l1 != 1) throw PreconditionError("A must consist of nearest-neighbour edges");
        reach = std::max(reach, std::min(chebyshev_norm(x), chebyshev_norm(y)));
        extent = std::max({extent, chebyshev_norm(x), chebyshev_norm(y)});
    }
    if (m) {
        if (*m < reach) throw RangeError("A does not lie within radius m");
        for (const int n : radii)
            if (*m >= n) throw RangeError("m must be smaller than every box radius");
    }
    std::vector<GapRow> rows;
    for (const int n : radii) {
        if (n < extent) throw RangeError("A does not fit in B_" + std::to_string(n));
        const auto box = build_box(d, n);
        std::vector<EdgeId> ids;
        for (const auto& [x, y] : a) ids.push_back(*box.graph().find_edge(box.vertex(x), box.vertex(y)));
        GapRow row;
        row.n = n;
        row.free = cylinder_probability(box.graph(), ids, limits);
        const int inner = m.value_or(n - 1);
        if (inner >= reach && inner < n) {
            const auto q = wired_quotient(box, inner);
            std::vector<EdgeId> mapped;
            for (const auto e : ids) mapped.push_back(*q.map(e));
            row.wired = cylinder_probability(q.graph, mapped, limits);
            row.m = inner;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ust
