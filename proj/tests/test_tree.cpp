#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "ust/kirchhoff.hpp"
#include "ust/lattice.hpp"
#include "ust/tree.hpp"

using namespace ust;

namespace {

std::vector<std::uint64_t> tree_histogram(const MultiGraph& g, const std::function<std::vector<EdgeId>()>& draw,
                                          int samples) {
    const auto trees = oracle::subset_scan_trees(g);
    std::map<std::vector<EdgeId>, std::uint64_t> counts;
    for (const auto& t : trees) counts[t] = 0;
    for (int i = 0; i < samples; ++i) {
        auto t = draw();
        std::sort(t.begin(), t.end());
        auto it = counts.find(t);
        EXPECT_NE(it, counts.end());
        if (it != counts.end()) ++it->second;
    }
    std::vector<std::uint64_t> out;
    for (const auto& [t, c] : counts) out.push_back(c);
    return out;
}

}  // namespace

TEST(Tree, ForcedWalk) {
    const auto g = make_path(3);
    WalkTrace w{PathSeq<VertexId>{vid(0), vid(1), vid(2)}, {eid(0), eid(1)}};
    const auto t = tree_from_walk(g, w);
    EXPECT_TRUE(t.is_tree());
    EXPECT_EQ(t.edges(), (std::vector<EdgeId>{eid(0), eid(1)}));
    WalkTrace back{PathSeq<VertexId>{vid(0), vid(1), vid(0), vid(1), vid(2)}, {eid(0), eid(0), eid(0), eid(1)}};
    EXPECT_EQ(tree_from_walk(g, back), t);
    WalkTrace partial{PathSeq<VertexId>{vid(0), vid(1)}, {eid(0)}};
    const auto f = tree_from_walk(g, partial);
    EXPECT_TRUE(f.is_forest());
    EXPECT_FALSE(f.is_tree());
    EXPECT_EQ(f.component_count(), 2u);
}

TEST(Tree, FirstEntryEdgesOnMultigraph) {
    const Endpoints e[] = {{vid(0), vid(1)}, {vid(0), vid(1)}, {vid(1), vid(2)}};
    const MultiGraph g(3, e);
    WalkTrace w{PathSeq<VertexId>{vid(0), vid(1), vid(0), vid(1), vid(2)}, {eid(1), eid(0), eid(0), eid(2)}};
    EXPECT_EQ(tree_from_walk(g, w).edges(), (std::vector<EdgeId>{eid(1), eid(2)}));
}

TEST(Tree, SubgraphClassification) {
    const auto c = make_cycle(4);
    EXPECT_FALSE(SpanningSubgraph(c, {eid(0), eid(1), eid(2), eid(3)}).is_forest());
    SpanningSubgraph t(c, {eid(0), eid(1), eid(2)});
    EXPECT_TRUE(t.is_tree());
    t.orient(vid(0));
    EXPECT_EQ(t.root(), vid(0));
    EXPECT_FALSE(t.parent_edge(vid(0)).has_value());
    EXPECT_EQ(t.parent_edge(vid(3)), eid(2));
    EXPECT_EQ(t.oriented(eid(0)).u, vid(0));
}

TEST(Tree, AldousBroderEqualsTreeOfCoverWalk) {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 200; ++i) {
        const auto g = oracle::random_connected(gen, 7, 6);
        RngStream a(static_cast<std::uint64_t>(i), 3), b(static_cast<std::uint64_t>(i), 3);
        const auto t = aldous_broder_tree(g, vid(0), a);
        const auto w = srw_path(g, vid(0), StopAtCover{}, b);
        EXPECT_EQ(t, tree_from_walk(g, w));
        EXPECT_TRUE(t.is_tree());
        EXPECT_EQ(a.next_u32(), b.next_u32());
    }
}

TEST(Tree, AldousBroderUniformOnCycle) {
    const auto g = make_cycle(4);
    RngStream rng(17, 0);
    const auto h = tree_histogram(g, [&] { return aldous_broder_tree(g, vid(0), rng).edges(); }, 40000);
    EXPECT_EQ(h.size(), 4u);
    EXPECT_GT(oracle::chi_square_uniform_pvalue(h), 1e-4);
}

TEST(Tree, AldousBroderUniformOnGrid) {
    const auto g = build_grid({2, 3});
    RngStream rng(18, 0);
    const auto h = tree_histogram(g, [&] { return aldous_broder_tree(g, vid(2), rng).edges(); }, 60000);
    EXPECT_EQ(h.size(), 15u);
    EXPECT_GT(oracle::chi_square_uniform_pvalue(h), 1e-4);
}

TEST(Tree, AldousBroderUniformOnMultigraph) {
    const Endpoints e[] = {{vid(0), vid(1)}, {vid(1), vid(2)}, {vid(2), vid(3)}, {vid(3), vid(0)}, {vid(0), vid(1)}};
    const MultiGraph g(4, e);
    RngStream rng(19, 0);
    const auto h = tree_histogram(g, [&] { return aldous_broder_tree(g, vid(3), rng).edges(); }, 35000);
    EXPECT_EQ(h.size(), 7u);
    EXPECT_GT(oracle::chi_square_uniform_pvalue(h), 1e-4);
}

TEST(Tree, TreePath) {
    const auto c = make_cycle(5);
    const SpanningSubgraph t(c, {eid(0), eid(1), eid(2), eid(3)});
    EXPECT_EQ(tree_path(t, vid(0), vid(4)), (PathSeq<VertexId>{vid(0), vid(1), vid(2), vid(3), vid(4)}));
    EXPECT_EQ(tree_path(t, vid(2), vid(2)), PathSeq<VertexId>{vid(2)});
    EXPECT_THROW(tree_path(SpanningSubgraph(c, {eid(0)}), vid(0), vid(1)), NotATreeError);
    EXPECT_THROW(tree_path(t, vid(0), vid(9)), RangeError);
}

// In T(gamma) the path from w to the walk's start is the loop-erasure of the reversed walk
// up to its first visit to w.
TEST(Tree, TreePathIsLoopErasedReversal) {
    std::vector<MultiGraph> corpus{make_cycle(6), make_complete(5), build_grid({3, 3})};
    std::mt19937_64 gen(77);
    for (int i = 0; i < 3; ++i) corpus.push_back(oracle::random_connected(gen, 8, 6));
    int checked = 0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const auto& g = corpus[k];
        for (int i = 0; i < 300; ++i) {
            RngStream rng(k, static_cast<std::uint64_t>(i));
            const auto v = vid(0);
            const auto w = vid(1 + static_cast<std::size_t>(i) % (g.vertex_count() - 1));
            const auto walk = srw_path(g, v, StopAtCover{}, rng);
            const auto t = tree_from_walk(g, walk);
            const auto& p = walk.path.vertices();
            const auto hit = std::find(p.begin(), p.end(), w);
            const PathSeq<VertexId> upto(std::vector<VertexId>(p.begin(), hit + 1));
            ASSERT_EQ(tree_path(t, w, v), loop_erase(reverse(upto)));
            ++checked;
        }
    }
    EXPECT_EQ(checked, 1800);
}

TEST(Tree, Mu3SequentialSample) {
    RngStream rng(20, 0);
    const auto p = make_path(4);
    const EdgeId order[] = {eid(2), eid(0), eid(1)};
    for (int i = 0; i < 10; ++i) EXPECT_EQ(mu3_sequential_sample(p, order, rng).edges(), (std::vector<EdgeId>{eid(0), eid(1), eid(2)}));
    const auto g = build_grid({2, 3});
    std::vector<EdgeId> all;
    for (std::size_t e = 0; e < g.edge_count(); ++e) all.push_back(eid(g.edge_count() - 1 - e));
    const auto h = tree_histogram(g, [&] { return mu3_sequential_sample(g, all, rng).edges(); }, 15000);
    EXPECT_GT(oracle::chi_square_uniform_pvalue(h), 1e-4);
}

// The implicit-box grower against the materialized 3x3 box with its 192 spanning trees.
TEST(Tree, BoxTreeGrowerUniform) {
    const auto box = build_box(2, 1);
    const auto& g = box.graph();
    ASSERT_EQ(spanning_tree_count(g), 192);
    BoxTreeGrower grower(box.shape());
    RngStream rng(21, 0);
    const auto h = tree_histogram(
        g,
        [&] {
            grower.grow({0, 0}, std::nullopt, rng);
            std::vector<EdgeId> edges;
            for (std::size_t v = 0; v < g.vertex_count(); ++v) {
                const auto p = grower.parent(v);
                if (p == BoxTreeGrower::kNone) continue;
                edges.push_back(*g.find_edge(vid(v), vid(p)));
            }
            return edges;
        },
        192 * 300);
    EXPECT_EQ(h.size(), 192u);
    EXPECT_GT(oracle::chi_square_uniform_pvalue(h), 1e-4);
}

TEST(Tree, BoxTreeGrowerStopsAtTarget) {
    const BoxShape shape(3, 3);
    BoxTreeGrower grower(shape);
    const auto target = shape.index({2, 0, 0});
    for (std::uint64_t s = 0; s < 50; ++s) {
        RngStream rng(22, s);
        grower.grow({-1, 0, 0}, target, rng);
        const auto path = grower.path_to_root(target);
        EXPECT_EQ(path.back(), shape.index({-1, 0, 0}));
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto a = shape.coord(path[i]), b = shape.coord(path[i + 1]);
            int l1 = 0;
            for (int k = 0; k < 3; ++k) l1 += std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
            ASSERT_EQ(l1, 1);
        }
        std::set<std::uint32_t> distinct(path.begin(), path.end());
        EXPECT_EQ(distinct.size(), path.size());
    }
    RngStream rng(23, 0);
    EXPECT_EQ(grower.grow({0, 0, 0}, shape.index({0, 0, 0}), rng), 0u);
    EXPECT_THROW(grower.grow({0, 0, 0}, target, rng, WalkBudget{1}), StepBudgetExceeded);
}
