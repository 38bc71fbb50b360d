#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "ust/graph.hpp"

using namespace ust;

namespace {

std::size_t parallel_pairs(const MultiGraph& g) {
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < g.vertex_count(); ++a)
        for (std::size_t b = a + 1; b < g.vertex_count(); ++b) {
            const auto k = g.multiplicity(vid(a), vid(b));
            pairs += k * (k - 1) / 2;
        }
    return pairs;
}

MultiGraph doubled_edge() {
    const Endpoints e[] = {{vid(0), vid(1)}, {vid(0), vid(1)}};
    return MultiGraph(2, e);
}

}  // namespace

TEST(Graph, BasicAccessors) {
    const auto c = make_cycle(4);
    EXPECT_EQ(c.vertex_count(), 4u);
    EXPECT_EQ(c.edge_count(), 4u);
    for (std::size_t v = 0; v < 4; ++v) EXPECT_EQ(c.degree(vid(v)), 2u);
    EXPECT_EQ(c.multiplicity(vid(0), vid(1)), 1u);
    EXPECT_EQ(c.multiplicity(vid(0), vid(2)), 0u);
    EXPECT_TRUE(c.find_edge(vid(3), vid(0)).has_value());
    EXPECT_FALSE(c.find_edge(vid(0), vid(2)).has_value());
    EXPECT_EQ(make_complete(4).edge_count(), 6u);
    EXPECT_EQ(make_path(3).edge_count(), 2u);
}

TEST(Graph, LoopsAreDropped) {
    const Endpoints e[] = {{vid(0), vid(0)}, {vid(0), vid(1)}};
    const MultiGraph g(2, e);
    EXPECT_EQ(g.edge_count(), 1u);
}

TEST(Graph, Connectivity) {
    EXPECT_TRUE(MultiGraph(1, {}).is_connected());
    EXPECT_FALSE(MultiGraph(2, {}).is_connected());
    EXPECT_TRUE(delete_edge(make_cycle(4), eid(0)).graph.is_connected());
    EXPECT_FALSE(delete_edge(make_path(3), eid(0)).graph.is_connected());
}

TEST(Graph, ContractCycle) {
    const auto m = contract(make_cycle(4), eid(0));
    EXPECT_EQ(m.graph.vertex_count(), 3u);
    EXPECT_EQ(m.graph.edge_count(), 3u);
    EXPECT_EQ(parallel_pairs(m.graph), 0u);
    EXPECT_FALSE(m.map(eid(0)).has_value());
}

TEST(Graph, ContractDoubledEdgeDiscardsParallelLoop) {
    const auto m = contract(doubled_edge(), eid(0));
    EXPECT_EQ(m.graph.vertex_count(), 1u);
    EXPECT_EQ(m.graph.edge_count(), 0u);
    EXPECT_FALSE(m.map(eid(1)).has_value());
}

TEST(Graph, ContractK4GivesTwoParallelPairs) {
    const auto k4 = make_complete(4);
    for (std::size_t e = 0; e < k4.edge_count(); ++e) {
        const auto m = contract(k4, eid(e));
        EXPECT_EQ(m.graph.vertex_count(), 3u);
        EXPECT_EQ(m.graph.edge_count(), 5u);
        EXPECT_EQ(parallel_pairs(m.graph), 2u);
    }
}

TEST(Graph, DeleteCycleEdgeGivesPath) {
    const auto m = delete_edge(make_cycle(4), eid(3));
    EXPECT_EQ(m.graph.edge_count(), 3u);
    std::vector<std::size_t> deg;
    for (std::size_t v = 0; v < 4; ++v) deg.push_back(m.graph.degree(vid(v)));
    std::sort(deg.begin(), deg.end());
    EXPECT_EQ(deg, (std::vector<std::size_t>{1, 1, 2, 2}));
    EXPECT_TRUE(m.graph.is_connected());
}

TEST(Graph, MinorMapTracksEndpoints) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = oracle::random_connected(gen, 6, 6);
        const auto e = eid(gen() % g.edge_count());
        for (const auto& m : {contract(g, e), delete_edge(g, e)}) {
            EXPECT_EQ(m.map.edge_map.size(), g.edge_count());
            EXPECT_EQ(m.map.vertex_map.size(), g.vertex_count());
            for (std::size_t i = 0; i < g.edge_count(); ++i) {
                const auto child = m.map(eid(i));
                if (!child) continue;
                const auto pe = g.endpoints(eid(i));
                const auto ce = m.graph.endpoints(*child);
                const auto a = m.map(pe.u), b = m.map(pe.v);
                EXPECT_TRUE((ce.u == a && ce.v == b) || (ce.u == b && ce.v == a));
            }
        }
    }
}

// Contracting e then deleting f gives the same multigraph as deleting f then contracting e.
TEST(Graph, MinorOperationsCommute) {
    std::mt19937_64 gen(5);
    auto edge_multiset = [](const MultiGraph& g) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (const auto& e : g.edges())
            out.emplace_back(std::min(to_index(e.u), to_index(e.v)), std::max(to_index(e.u), to_index(e.v)));
        std::sort(out.begin(), out.end());
        return out;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = oracle::random_connected(gen, 6, 5);
        if (g.edge_count() < 2) continue;
        const auto e = eid(gen() % g.edge_count());
        auto f = eid(gen() % g.edge_count());
        if (f == e) continue;
        const auto c = contract(g, e);
        const auto fc = c.map(f);
        const auto d = delete_edge(g, f);
        const auto ed = d.map(e);
        ASSERT_TRUE(ed.has_value());
        const auto right = contract(d.graph, *ed);
        if (!fc) {
            // f became a loop with e; deleting it changes nothing after contraction.
            EXPECT_EQ(edge_multiset(c.graph), edge_multiset(right.graph));
            continue;
        }
        const auto left = delete_edge(c.graph, *fc);
        EXPECT_EQ(left.graph.vertex_count(), right.graph.vertex_count());
        EXPECT_EQ(edge_multiset(left.graph), edge_multiset(right.graph));
        EXPECT_EQ(compose(compose(c.map, left.map), MinorMap::identity(left.graph)).vertex_map,
                  compose(d.map, right.map).vertex_map);
    }
}

TEST(Graph, InvalidEdgeIsRejected) {
    EXPECT_THROW(contract(make_path(3), eid(7)), UnknownEdgeError);
    EXPECT_THROW(delete_edge(make_path(3), eid(2)), UnknownEdgeError);
}
