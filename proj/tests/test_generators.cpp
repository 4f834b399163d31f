#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "sybilbelief/generators.hpp"

using namespace sybil;

TEST_CASE("erdos-renyi generator") {
    SECTION("p = 1 forces the single edge") {
        const Graph g = gen_er({GraphModel::ErdosRenyi, 2, 1.0, 99});
        REQUIRE(g.edge_count() == 1);
        REQUIRE(g.has_edge(0, 1));
    }
    SECTION("edge count lands within 3 sigma of the binomial") {
        // n=1000, avg degree 10: mean = C(n,2) * p = 5000,
        // sigma = sqrt(C(n,2) p (1-p)) = 70.35 (p = 10/999)
        const double p = 10.0 / 999.0;
        const double pairs = 1000.0 * 999.0 / 2.0;
        const double mean = pairs * p;
        const double sigma = std::sqrt(pairs * p * (1.0 - p));
        REQUIRE(mean == Catch::Approx(5000.0));
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const Graph g = gen_er({GraphModel::ErdosRenyi, 1000, 10.0, seed});
            REQUIRE(std::abs(double(g.edge_count()) - mean) <= 3.0 * sigma);
        }
    }
    SECTION("deterministic given the seed") {
        const Graph a = gen_er({GraphModel::ErdosRenyi, 300, 6.0, 42});
        const Graph b = gen_er({GraphModel::ErdosRenyi, 300, 6.0, 42});
        REQUIRE(a.edges() == b.edges());
        const Graph c = gen_er({GraphModel::ErdosRenyi, 300, 6.0, 43});
        REQUIRE(a.edges() != c.edges());
    }
    SECTION("p > 1 rejected") {
        REQUIRE_THROWS_AS(gen_er({GraphModel::ErdosRenyi, 5, 10.0, 1}), std::invalid_argument);
    }
}

TEST_CASE("preferential attachment generator") {
    SECTION("c = 1 yields a tree over a 2-node seed clique") {
        const Graph g = gen_pa({GraphModel::PreferentialAttachment, 5, 2.0, 7});
        REQUIRE(g.edge_count() == 4);
    }
    SECTION("closed-form edge count") {
        for (const auto& [n, avg] : std::vector<std::pair<NodeId, double>>{
                 {1000, 10.0}, {50, 4.0}, {200, 6.0}, {10, 2.0}}) {
            const Graph g = gen_pa({GraphModel::PreferentialAttachment, n, avg, 11});
            const std::size_t c = std::size_t(std::lround(avg / 2.0));
            const std::size_t expect = c * (c + 1) / 2 + (n - c - 1) * c;
            REQUIRE(g.edge_count() == expect);
        }
        const Graph g = gen_pa({GraphModel::PreferentialAttachment, 1000, 10.0, 11});
        REQUIRE(g.edge_count() == 4985);
        double degree_sum = 0;
        for (NodeId v = 0; v < 1000; ++v) degree_sum += g.degree(v);
        REQUIRE(degree_sum / 1000.0 == Catch::Approx(9.97));
    }
    SECTION("deterministic given the seed") {
        const Graph a = gen_pa({GraphModel::PreferentialAttachment, 200, 6.0, 5});
        const Graph b = gen_pa({GraphModel::PreferentialAttachment, 200, 6.0, 5});
        REQUIRE(a.edges() == b.edges());
    }
    SECTION("heavier degree tail than ER at matched size") {
        double pa_max = 0.0, er_max = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Graph pa = gen_pa({GraphModel::PreferentialAttachment, 1000, 10.0, seed});
            const Graph er = gen_er({GraphModel::ErdosRenyi, 1000, 10.0, seed});
            std::uint32_t pm = 0, em = 0;
            for (NodeId v = 0; v < 1000; ++v) {
                pm = std::max(pm, pa.degree(v));
                em = std::max(em, er.degree(v));
            }
            pa_max += pm;
            er_max += em;
        }
        REQUIRE(pa_max / 20.0 >= 1.5 * (er_max / 20.0));
    }
    SECTION("node_count <= c rejected") {
        REQUIRE_THROWS_AS(gen_pa({GraphModel::PreferentialAttachment, 5, 10.0, 1}),
                          std::invalid_argument);
    }
}

namespace {

std::vector<Edge> cross_edges(const ScenarioGraph& scen) {
    std::vector<Edge> out;
    for (const auto& e : scen.graph.edges())
        if (scen.region[e.first] != scen.region[e.second]) out.push_back(e);
    return out;
}

}  // namespace

TEST_CASE("compose_regions") {
    const Graph k2(2, std::vector<Edge>{{0, 1}});
    SECTION("zero attack edges leaves the regions disconnected") {
        const ScenarioGraph scen = compose_regions(k2, k2, 0, 1);
        REQUIRE(scen.attack_edges.empty());
        REQUIRE(scen.graph.node_count() == 4);
        REQUIRE(scen.graph.edge_count() == 2);
        REQUIRE(cross_edges(scen).empty());
    }
    SECTION("single cross pair is forced") {
        const Graph one(1, std::vector<Edge>{});
        const ScenarioGraph scen = compose_regions(one, one, 1, 9);
        REQUIRE(scen.attack_edges == std::vector<Edge>{{0, 1}});
    }
    SECTION("exactly the requested distinct cross edges") {
        const Graph benign = gen_pa({GraphModel::PreferentialAttachment, 1000, 10.0, 1});
        const Graph sybil = gen_pa({GraphModel::PreferentialAttachment, 1000, 10.0, 2});
        const ScenarioGraph scen = compose_regions(benign, sybil, 500, 3);
        REQUIRE(scen.attack_edges.size() == 500);
        REQUIRE(std::set<Edge>(scen.attack_edges.begin(), scen.attack_edges.end()).size() == 500);
        REQUIRE(cross_edges(scen) == scen.attack_edges);
        REQUIRE(scen.count_region(Tag::Benign) == 1000);
        REQUIRE(scen.count_region(Tag::Sybil) == 1000);
        for (const auto& [u, v] : scen.attack_edges) {
            REQUIRE(scen.region[u] == Tag::Benign);
            REQUIRE(scen.region[v] == Tag::Sybil);
        }
    }
    SECTION("dense regime falls back to enumeration") {
        const Graph a(20, std::vector<Edge>{});
        const Graph b(20, std::vector<Edge>{});
        const ScenarioGraph scen = compose_regions(a, b, 400, 4); // every cross pair
        REQUIRE(scen.attack_edges.size() == 400);
        REQUIRE(cross_edges(scen).size() == 400);
    }
    SECTION("infeasible count rejected") {
        REQUIRE_THROWS_AS(compose_regions(k2, k2, 5, 1), std::invalid_argument);
    }
    SECTION("deterministic given the seed") {
        const Graph g = gen_pa({GraphModel::PreferentialAttachment, 100, 4.0, 8});
        const ScenarioGraph a = compose_regions(g, g, 30, 77);
        const ScenarioGraph b = compose_regions(g, g, 30, 77);
        REQUIRE(a.attack_edges == b.attack_edges);
    }
}

TEST_CASE("duplicate_region_scenario") {
    SECTION("two disjoint copies with no attack edges") {
        const Graph base(2, std::vector<Edge>{{0, 1}});
        const ScenarioGraph scen = duplicate_region_scenario(base, 0, 1);
        REQUIRE(scen.graph.node_count() == 4);
        REQUIRE(scen.graph.edge_count() == 2);
        REQUIRE(scen.graph.has_edge(2, 3));
    }
    SECTION("bookkeeping identity") {
        const Graph base = gen_pa({GraphModel::PreferentialAttachment, 120, 6.0, 3});
        for (std::uint64_t attack : {0ull, 17ull, 100ull}) {
            const ScenarioGraph scen = duplicate_region_scenario(base, attack, 5);
            REQUIRE(scen.graph.node_count() == 2 * base.node_count());
            REQUIRE(scen.graph.edge_count() == 2 * base.edge_count() + attack);
        }
    }
}

TEST_CASE("community benign region") {
    const GeneratorSpec community{GraphModel::PreferentialAttachment, 100, 6.0, 0};
    SECTION("k = 1 is a single PA graph") {
        const Graph g = community_graph(1, community, 10, 2);
        REQUIRE(g.node_count() == 100);
        REQUIRE(g.edge_count() ==
                gen_pa({GraphModel::PreferentialAttachment, 100, 6.0,
                        derive_seed(2, "community", 0)})
                    .edge_count());
    }
    SECTION("each join adds exactly inter_edges cross edges") {
        const Graph g = community_graph(3, community, 10, 2);
        REQUIRE(g.node_count() == 300);
        std::size_t inter = 0;
        for (const auto& [u, v] : g.edges())
            if (u / 100 != v / 100) ++inter;
        REQUIRE(inter == 20);
    }
    SECTION("connected for k = 1, 2, 4, 8") {
        for (std::uint32_t k : {1u, 2u, 4u, 8u}) {
            const Graph g = community_graph(k, community, 10, 4);
            const auto lcc = largest_connected_component(g);
            REQUIRE(lcc.graph.node_count() == g.node_count());
        }
    }
}
