#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphnls/spectra.hpp"

using namespace graphnls;

TEST_CASE("single P1 element matrices") {
    MetricGraph g = catalog("segment", {{"length", 1.0}});
    DiscreteOperators ops = assemble(g, 1.0, FarBc::Neumann);
    REQUIRE(ops.dim() == 2);
    Eigen::MatrixXd K(ops.stiffness), M(ops.mass);
    CHECK(K(0, 0) == doctest::Approx(1.0));
    CHECK(K(0, 1) == doctest::Approx(-1.0));
    CHECK(K(1, 1) == doctest::Approx(1.0));
    CHECK(M(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(M(0, 1) == doctest::Approx(1.0 / 6.0));
    CHECK(M(1, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("assembly is additive at the star vertex") {
    MetricGraph star3 = parse_graph(
        "vertex o\nvertex a\nvertex b\nvertex c\nedge o a 1\nedge o b 1\nedge o c 1\n");
    DiscreteOperators ops = assemble(star3, 0.5, FarBc::Neumann);
    const int center = ops.node_to_free[ops.mesh->vertex_node(0)];
    Eigen::MatrixXd K(ops.stiffness);
    // Three incident intervals of h = 1/2 each contribute 1/h to the diagonal.
    CHECK(K(center, center) == doctest::Approx(3.0 * 2.0));
}

TEST_CASE("dirichlet removes one node per half-line tip and per endpoint") {
    MetricGraph g = catalog("star_halflines", {{"arms", 3}});
    g.truncation_length = 5.0;
    g.finalize();
    DiscreteOperators neu = assemble(g, 0.5, FarBc::Neumann);
    DiscreteOperators dir = assemble(g, 0.5, FarBc::Dirichlet);
    CHECK(neu.dim() - dir.dim() == 3);

    MetricGraph seg = catalog("segment", {{"length", 1.0}});
    CHECK(assemble(seg, 0.25, FarBc::Neumann).dim() -
              assemble(seg, 0.25, FarBc::Dirichlet).dim() ==
          2);
}

TEST_CASE("assemble refuses spacing beyond the shortest edge") {
    MetricGraph g = parse_graph("vertex a\nvertex b\nvertex c\nedge a b 0.2\nedge b c 5\n");
    CHECK_THROWS_AS(assemble(g, 0.5, FarBc::Neumann), std::invalid_argument);
}

TEST_CASE("neumann segment [0,pi] eigenvalues 0, 1, 4") {
    MetricGraph g = catalog("segment", {{"length", M_PI}});
    DiscreteOperators ops = assemble(g, 2e-3, FarBc::Neumann);
    SpectralResult sr = bottom_spectrum(ops, 3);
    REQUIRE(sr.converged);
    CHECK(std::abs(sr.eigenvalues[0]) < 1e-8);
    CHECK(std::abs(sr.eigenvalues[1] - 1.0) < 1e-4);
    CHECK(std::abs(sr.eigenvalues[2] - 4.0) / 4.0 < 1e-4);
    for (double r : sr.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("compact graphs have a one-dimensional constant kernel") {
    for (const std::string& name : {"tadpole", "periodic_ladder", "bethe_tree"}) {
        MetricGraph g = catalog(name);
        if (g.has_halfline()) {
            g.truncation_length = 4.0;
            g.finalize();
        }
        DiscreteOperators ops = assemble(g, 0.1, FarBc::Neumann);
        SpectralResult sr = bottom_spectrum(ops, 2);
        REQUIRE(sr.converged);
        CHECK(std::abs(sr.eigenvalues[0]) < 1e-9);
        CHECK(sr.eigenvalues[1] > 1e-3);  // kernel is exactly one-dimensional
        const auto& v = sr.eigenvectors[0].values();
        CHECK((v.array() - v.mean()).abs().maxCoeff() < 1e-6 * std::abs(v.mean()));
    }
}

TEST_CASE("dirichlet segment ground state pi^2") {
    MetricGraph g = catalog("segment", {{"length", 1.0}});
    DiscreteOperators ops = assemble(g, 1e-3, FarBc::Dirichlet);
    SpectralResult sr = bottom_spectrum(ops, 1);
    CHECK(std::abs(sr.eigenvalues[0] - M_PI * M_PI) / (M_PI * M_PI) < 1e-3);
}

TEST_CASE("rayleigh quotient basics") {
    MetricGraph g = catalog("tadpole");
    g.truncation_length = 4.0;
    g.finalize();
    DiscreteOperators ops = assemble(g, 0.05, FarBc::Neumann);
    GraphFunction c(ops.mesh, Eigen::VectorXd::Ones(ops.mesh->num_nodes()));
    CHECK(std::abs(rayleigh(ops, c)) < 1e-12);

    DiscreteOperators dir = assemble(catalog("segment", {{"length", 1.0}}), 1e-3, FarBc::Dirichlet);
    SpectralResult sr = bottom_spectrum(dir, 1);
    CHECK(rayleigh(dir, sr.eigenvectors[0]) == doctest::Approx(sr.eigenvalues[0]).epsilon(1e-10));

    GraphFunction zero(ops.mesh);
    CHECK_THROWS_AS(rayleigh(ops, zero), std::invalid_argument);
}

TEST_CASE("tent quotient decreases like 1/L^2 on a truncated half-line") {
    double prev = 1e30;
    for (double L : {10.0, 20.0, 40.0}) {
        MetricGraph g = catalog("star_halflines", {{"arms", 2}});
        g.truncation_length = L;
        g.finalize();
        DiscreteOperators ops = assemble(g, 0.02, FarBc::Dirichlet);
        const Mesh& mesh = *ops.mesh;
        Eigen::VectorXd d = mesh.distance_from_point(0, 0.0);
        Eigen::VectorXd v(mesh.num_nodes());
        for (int i = 0; i < v.size(); ++i) v[i] = std::max(0.0, 1.0 - d[i] / L);
        const double q = rayleigh(ops, GraphFunction(ops.mesh, std::move(v)));
        CHECK(q <= 3.1 / (L * L));  // the (2L)-wide tent quotient is ~3/L^2
        CHECK(q < prev);
        prev = q;
    }
}

TEST_CASE("eigenvalue refinement error is O(h^2)") {
    MetricGraph g = catalog("segment", {{"length", 1.0}});
    const double exact = M_PI * M_PI;
    const double e1 =
        std::abs(bottom_spectrum(assemble(g, 4e-3, FarBc::Dirichlet), 1).eigenvalues[0] - exact);
    const double e2 =
        std::abs(bottom_spectrum(assemble(g, 2e-3, FarBc::Dirichlet), 1).eigenvalues[0] - exact);
    CHECK(e2 < 0.3 * e1);  // quadratic: expect ~0.25
}

TEST_CASE("dirichlet domain monotonicity in the truncation") {
    MetricGraph g = catalog("star_halflines", {{"arms", 3}});
    double prev = 1e30;
    for (double L : {5.0, 10.0, 20.0}) {
        MetricGraph gt = g;
        gt.truncation_length = L;
        gt.finalize();
        const double l0 = bottom_spectrum(assemble(gt, 0.02, FarBc::Dirichlet), 1).eigenvalues[0];
        CHECK(l0 < prev);
        prev = l0;
    }
}

TEST_CASE("assumption1 probe: star decays, short bethe family reports a gap") {
    MetricGraph star = catalog("star_halflines", {{"arms", 3}});
    ProbeResult pr = assumption1_probe(star, {10.0, 20.0, 40.0, 80.0}, 0.05);
    CHECK(pr.verdict == SpectralVerdict::ConsistentWithZero);
    CHECK(pr.fitted_exponent == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(pr.rows.back().lambda0 < 1e-2);

    std::vector<std::pair<double, MetricGraph>> fam;
    for (int d : {4, 5, 6})
        fam.push_back({static_cast<double>(d),
                       catalog("bethe_tree", {{"degree", 3}, {"depth", static_cast<double>(d)}})});
    ProbeResult pb = assumption1_probe_family(fam, 0.05);
    CHECK(pb.verdict == SpectralVerdict::GapAtLeast);
    CHECK(pb.gap_estimate > 0.05);

    CHECK_THROWS_AS(assumption1_probe(star, {10.0, 5.0}, 0.05), std::invalid_argument);
}

TEST_CASE("growing periodic chain drives lambda0 to zero") {
    std::vector<std::pair<double, MetricGraph>> fam;
    for (int n : {8, 16, 32})
        fam.push_back({static_cast<double>(n),
                       catalog("periodic_chain", {{"cells", static_cast<double>(n)}})});
    ProbeResult pr = assumption1_probe_family(fam, 0.05);
    CHECK(pr.fitted_exponent == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(pr.rows.back().lambda0 < 1e-2);
    CHECK(pr.rows.front().lambda0 > pr.rows.back().lambda0);
}
