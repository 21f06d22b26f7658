#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chebyprop/error.hpp"
#include "chebyprop/eval.hpp"
#include "chebyprop/solvers.hpp"
#include "oracles.hpp"

using namespace chebyprop;

TEST_CASE("ground_truth_steps follows the recipe") {
    CHECK(ground_truth_steps(Kernel::ppr(0.2)) == 231);
    CHECK(ground_truth_steps(Kernel::hkpr(5.0)) == 461);
}

TEST_CASE("ground truth matches the exact solve on a 3-node path") {
    const Graph g = oracles::path3_graph();
    const auto truth = ground_truth(g, Kernel::ppr(0.2), 1);
    const NodeVector exact = oracles::dense_ppr_source(g, 0.2, 1);
    CHECK(oracles::linf_diff(truth.values, exact) <= 1e-12);
}

TEST_CASE("ground truth is stable under 50% more steps") {
    const Graph g = oracles::make_graph(40, 60, 3);
    const Kernel kernel = Kernel::ppr(0.2);
    const auto truth = ground_truth(g, kernel, 2);
    const auto more = power_method(g, kernel, 2, truth.truncation * 3 / 2);
    CHECK(oracles::l1_diff(truth.values, more.values) < 1e-15);
}

TEST_CASE("measure") {
    const Graph g = oracles::path3_graph();

    SUBCASE("identical vectors give zeros") {
        const NodeVector v = {0.1, 0.5, 0.4};
        const auto rep = measure(v, v, g);
        CHECK(rep.l1 == 0.0);
        CHECK(rep.l2 == 0.0);
        CHECK(rep.deg_norm_inf == 0.0);
    }
    SUBCASE("hand computation on a swap") {
        std::istringstream in(std::string("0 1\n"));
        const Graph pair = load_edge_list(in);
        const auto rep = measure({1.0, 0.0}, {0.0, 1.0}, pair);
        CHECK(rep.l1 == doctest::Approx(2.0));
        CHECK(rep.l2 == doctest::Approx(std::sqrt(2.0)));
        CHECK(rep.deg_norm_inf == doctest::Approx(1.0));
        CHECK(rep.argmax_node == 0);
    }
    SUBCASE("random vectors match a naive re-implementation") {
        const Graph h = oracles::make_graph(100, 150, 9);
        const NodeVector a = oracles::random_vector(h.node_count(), 1);
        const NodeVector b = oracles::random_vector(h.node_count(), 2);
        const auto rep = measure(a, b, h);
        double l1 = 0.0, sq = 0.0, dn = 0.0;
        for (NodeId u = 0; u < h.node_count(); ++u) {
            l1 += std::abs(a[u] - b[u]);
            sq += (a[u] - b[u]) * (a[u] - b[u]);
            dn = std::max(dn, std::abs(a[u] - b[u]) / h.degree(u));
        }
        CHECK(std::abs(rep.l1 - l1) <= 1e-14 * std::max(1.0, l1));
        CHECK(std::abs(rep.l2 - std::sqrt(sq)) <= 1e-14);
        CHECK(rep.deg_norm_inf == dn);
    }
    SUBCASE("metric axioms: symmetry in the sign, linear scaling") {
        const Graph h = oracles::make_graph(30, 40, 4);
        const NodeVector a = oracles::random_vector(h.node_count(), 5);
        const NodeVector b = oracles::random_vector(h.node_count(), 6);
        const auto ab = measure(a, b, h);
        const auto ba = measure(b, a, h);
        CHECK(ab.l1 == ba.l1);
        CHECK(ab.l2 == ba.l2);
        CHECK(ab.deg_norm_inf == ba.deg_norm_inf);
        CHECK(ab.deg_norm_inf <= ab.l1);

        NodeVector mid(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = a[i] + 0.5 * (b[i] - a[i]);
        const auto half = measure(a, mid, h);
        CHECK(half.l1 == doctest::Approx(0.5 * ab.l1).epsilon(1e-12));
        CHECK(half.l2 == doctest::Approx(0.5 * ab.l2).epsilon(1e-12));
    }
}

TEST_CASE("select_sources") {
    const Graph g = oracles::make_graph(50, 70, 8);

    SUBCASE("uniform with count = n is a permutation") {
        auto ids = select_sources(g, SourceStrategy::Uniform, g.node_count(), 77);
        std::sort(ids.begin(), ids.end());
        for (NodeId u = 0; u < g.node_count(); ++u) CHECK(ids[u] == u);
    }
    SUBCASE("same seed twice is identical, different seeds differ") {
        const auto a = select_sources(g, SourceStrategy::Uniform, 10, 5);
        const auto b = select_sources(g, SourceStrategy::Uniform, 10, 5);
        const auto c = select_sources(g, SourceStrategy::Uniform, 10, 6);
        CHECK(a == b);
        CHECK(a != c);
    }
    SUBCASE("top degree on the star picks the hub") {
        const Graph star = oracles::star_graph();
        const auto ids = select_sources(star, SourceStrategy::TopDegree, 1, 0);
        REQUIRE(ids.size() == 1);
        CHECK(ids[0] == 0);
    }
    SUBCASE("top degree ties break toward smaller ids") {
        const Graph star = oracles::star_graph();
        const auto ids = select_sources(star, SourceStrategy::TopDegree, 3, 0);
        CHECK(ids == std::vector<NodeId>{0, 1, 2});
    }
    SUBCASE("count > n rejected") {
        CHECK_THROWS_AS(select_sources(g, SourceStrategy::Uniform, 51, 0), ParameterError);
    }
}

TEST_CASE("truth cache") {
    const Graph g = oracles::make_graph(20, 25, 12);
    const Kernel kernel = Kernel::ppr(0.2);
    const auto dir = std::filesystem::temp_directory_path() / "chebyprop-test-cache";
    std::filesystem::remove_all(dir);

    SUBCASE("round trip and no-op rerun") {
        bool cached = true;
        const auto first = load_or_compute_truth(g, kernel, 3, dir.string(), &cached);
        CHECK(!cached);
        const auto second = load_or_compute_truth(g, kernel, 3, dir.string(), &cached);
        CHECK(cached);
        CHECK(oracles::linf_diff(first.values, second.values) == 0.0);
        CHECK(second.kernel_descriptor == kernel.descriptor());
        CHECK(second.source == 3);
    }
    SUBCASE("corrupt magic triggers regeneration") {
        load_or_compute_truth(g, kernel, 4, dir.string());
        const auto path = dir / truth_cache_filename(g, kernel, 4);
        {
            std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
            f.seekp(0);
            f.write("XXXX", 4);
        }
        bool cached = true;
        const auto redo = load_or_compute_truth(g, kernel, 4, dir.string(), &cached);
        CHECK(!cached);
        const auto direct = ground_truth(g, kernel, 4);
        CHECK(oracles::linf_diff(redo.values, direct.values) == 0.0);
        // The file is healthy again afterwards.
        std::ifstream in(path, std::ios::binary);
        CHECK_NOTHROW(read_truth_cache(in));
    }
    SUBCASE("distinct kernels and sources key distinct files") {
        CHECK(truth_cache_filename(g, kernel, 1) != truth_cache_filename(g, kernel, 2));
        CHECK(truth_cache_filename(g, kernel, 1) !=
              truth_cache_filename(g, Kernel::ppr(0.1), 1));
        const Graph other = oracles::make_graph(20, 25, 13);
        CHECK(truth_cache_filename(g, kernel, 1) != truth_cache_filename(other, kernel, 1));
    }
    std::filesystem::remove_all(dir);
}
