#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "ust/lattice.hpp"
#include "ust/walk.hpp"

using namespace ust;

TEST(Walk, StopAfterAndHit) {
    RngStream rng(1, 0);
    const auto c = make_cycle(6);
    const auto w = srw_path(c, vid(0), StopAfter{25}, rng);
    EXPECT_EQ(w.path.length(), 25u);
    EXPECT_EQ(w.edges.size(), 25u);
    for (std::size_t i = 0; i < w.edges.size(); ++i) {
        const auto e = c.endpoints(w.edges[i]);
        EXPECT_TRUE((e.u == w.path[i] && e.v == w.path[i + 1]) || (e.v == w.path[i] && e.u == w.path[i + 1]));
    }
    const auto h = srw_path(c, vid(0), StopAtHit<VertexId>{{vid(3)}}, rng);
    EXPECT_EQ(h.path.back(), vid(3));
    EXPECT_EQ(std::count(h.path.vertices().begin(), h.path.vertices().end(), vid(3)), 1);
    const auto z = srw_path(c, vid(3), StopAtHit<VertexId>{{vid(3)}}, rng);
    EXPECT_EQ(z.path.length(), 0u);
}

TEST(Walk, StopAtCover) {
    RngStream rng(2, 0);
    const auto g = build_grid({3, 3});
    for (int i = 0; i < 50; ++i) {
        const auto w = srw_path(g, vid(4), StopAtCover{}, rng);
        std::set<VertexId> seen(w.path.vertices().begin(), w.path.vertices().end());
        EXPECT_EQ(seen.size(), 9u);
        std::set<VertexId> before(w.path.vertices().begin(), w.path.vertices().end() - 1);
        EXPECT_EQ(before.size(), 8u);
    }
    EXPECT_THROW(srw_path(MultiGraph(2, {}), vid(0), StopAtCover{}, rng), PreconditionError);
}

TEST(Walk, StepBudget) {
    RngStream rng(3, 0);
    EXPECT_THROW(srw_path(make_path(50), vid(0), StopAtHit<VertexId>{{vid(49)}}, rng, WalkBudget{10}),
                 StepBudgetExceeded);
}

TEST(Walk, OneDimensionalFairCoin) {
    const BoxShape line(1, 1);
    std::uint64_t right = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(99, replica_stream(static_cast<std::uint64_t>(i), 1));
        const auto p = srw_path(line, {0}, StopAfter{1}, rng);
        ASSERT_EQ(p.size(), 2u);
        const auto x = line.coord(to_index(p[1]))[0];
        ASSERT_TRUE(x == 1 || x == -1);
        right += x == 1;
    }
    const double sigma = std::sqrt(n * 0.25);
    EXPECT_NEAR(static_cast<double>(right), n / 2.0, 3 * sigma);
}

TEST(Walk, ZeroCutoff) {
    RngStream rng(4, 0);
    const IntegerLattice z3(3);
    EXPECT_EQ(srw_path(z3, {0, 0, 0}, StopAfter{0}, rng).size(), 1u);
    EXPECT_EQ(srw_path(BoxShape(3, 2), {0, 0, 0}, StopAfter{0}, rng).size(), 1u);
}

TEST(Walk, BoxWalkerIdsMatchMaterializedBox) {
    const auto box = build_box(3, 2);
    RngStream rng(5, 0);
    const auto p = srw_path(box.shape(), {1, -2, 0}, StopAfter{2000}, rng);
    EXPECT_EQ(p[0], box.vertex({1, -2, 0}));
    for (std::size_t i = 0; i + 1 < p.size(); ++i) ASSERT_EQ(box.graph().multiplicity(p[i], p[i + 1]), 1u);
}

// Rejection of outward directions leaves a uniform choice among in-box neighbours.
TEST(Walk, BoxWalkerUniformAtBoundary) {
    const auto box = build_box(2, 2);
    for (const LatticeCoord start : {LatticeCoord{2, 2}, LatticeCoord{2, 0}, LatticeCoord{0, 0}}) {
        const auto v = box.vertex(start);
        std::map<VertexId, std::uint64_t> counts;
        RngStream rng(6, static_cast<std::uint64_t>(to_index(v)));
        BoxWalker walker(box.shape());
        for (int i = 0; i < 60000; ++i) {
            auto s = walker.at(start);
            walker.step(s, rng);
            ++counts[vid(s.id)];
        }
        EXPECT_EQ(counts.size(), box.graph().degree(v));
        std::vector<std::uint64_t> c;
        for (const auto& [x, k] : counts) {
            EXPECT_EQ(box.graph().multiplicity(v, x), 1u);
            c.push_back(k);
        }
        EXPECT_GT(oracle::chi_square_uniform_pvalue(c), 1e-4);
    }
}

TEST(Walk, LatticeEncoding) {
    for (int d = 1; d <= kMaxDim; ++d) {
        const IntegerLattice zd(d);
        LatticeCoord c(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = (i % 2 ? -1 : 1) * (zd.coordinate_limit() - i);
        EXPECT_EQ(zd.decode(zd.encode(c)), c);
        c[0] = zd.coordinate_limit() + 1;
        EXPECT_THROW(zd.encode(c), RangeError);
    }
    EXPECT_EQ(IntegerLattice(5).coordinate_limit(), 2047);
    EXPECT_THROW(IntegerLattice(9), RangeError);
}

TEST(Walk, LatticeWalkLeavesWindow) {
    const IntegerLattice z8(8);
    const int lim = z8.coordinate_limit();
    RngStream rng(8, 0);
    LatticeCoord start(8, 0);
    start[0] = lim;
    bool thrown = false;
    for (int i = 0; i < 200 && !thrown; ++i) {
        try {
            srw_path(z8, start, StopAfter{2}, rng);
        } catch (const RangeError&) {
            thrown = true;
        }
    }
    EXPECT_TRUE(thrown);
}

TEST(Walk, LatticeStepsAreUnit) {
    const IntegerLattice z5(5);
    RngStream rng(9, 0);
    const auto p = srw_path(z5, LatticeCoord(5, 0), StopAfter{1000}, rng);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const auto a = z5.decode(p[i]), b = z5.decode(p[i + 1]);
        int l1 = 0;
        for (int k = 0; k < 5; ++k) l1 += std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
        ASSERT_EQ(l1, 1);
    }
}

TEST(Walk, FiniteLerw) {
    RngStream rng(10, 0);
    const auto p = make_path(3);
    for (int i = 0; i < 20; ++i)
        EXPECT_EQ(lerw_sample(p, vid(0), {vid(2)}, rng), (PathSeq<VertexId>{vid(0), vid(1), vid(2)}));
    std::uint64_t via1 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto a = lerw_sample(make_cycle(4), vid(0), {vid(2)}, rng);
        ASSERT_EQ(a.size(), 3u);
        via1 += a[1] == vid(1);
    }
    EXPECT_NEAR(static_cast<double>(via1), n / 2.0, 3 * std::sqrt(n * 0.25));
}

TEST(Walk, InfiniteLerwRequiresTransience) {
    RngStream rng(11, 0);
    EXPECT_THROW(lerw_sample(IntegerLattice(2), {0, 0}, 100, rng), PreconditionError);
    EXPECT_THROW(lerw_sample(IntegerLattice(1), {0}, 100, rng), PreconditionError);
}

// The certified prefix must agree with the loop-erasure of every walk prefix between the
// checkpoint and the horizon; the walk is replayed from the same stream.
TEST(Walk, StablePrefixCertificate) {
    const IntegerLattice z3(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::uint64_t horizon = 400, checkpoint = 200;
        RngStream a(seed, 0), b(seed, 0);
        const auto le = lerw_sample(z3, {0, 0, 0}, horizon, a, checkpoint);
        const auto walk = srw_path(z3, {0, 0, 0}, StopAfter{horizon}, b).vertices();
        EXPECT_EQ(le.path.vertices(), oracle::naive_loop_erase(walk));
        EXPECT_LE(le.stable_steps, le.path.length());
        const auto stable = le.stable_prefix().vertices();
        for (std::uint64_t n = checkpoint; n <= horizon; n += 20) {
            const auto cut = oracle::naive_loop_erase(std::vector<SiteKey>(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(n) + 1));
            ASSERT_GE(cut.size(), le.stable_steps + 1);
            EXPECT_TRUE(std::equal(stable.begin(), stable.end(), cut.begin()));
        }
    }
}
