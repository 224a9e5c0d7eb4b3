#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tdaq/error.hpp"
#include "tdaq/rng.hpp"
#include "tdaq/spectral.hpp"

using namespace tdaq;

namespace {

Eigen::VectorXd spectrum(const Laplacian& lap) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(lap.matrix), Eigen::EigenvaluesOnly};
    return es.eigenvalues();
}

const SimplicialComplex hollow_triangle = SimplicialComplex::from_maximal(3, {Simplex{0, 1}, Simplex{0, 2}, Simplex{1, 2}});
const SimplicialComplex filled_triangle = SimplicialComplex::from_maximal(3, {Simplex{0, 1, 2}});
const SimplicialComplex tetra_boundary =
    SimplicialComplex::from_maximal(4, {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 2, 3}, Simplex{1, 2, 3}});

SimplicialComplex random_complex(std::size_t n, double t, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << rng.uniform(), rng.uniform();
    const auto d = pairwise_distances(PointCloud(p));
    return build_vr(d, ScaleGrid({t / 2, t}), 3).at(1);
}

}  // namespace

TEST_CASE("hollow triangle laplacian spectrum") {
    // Delta_1 = d1^T d1 has eigenvalues 0, 3, 3; Delta_0 is the graph laplacian 0, 3, 3
    const Eigen::VectorXd s1 = spectrum(laplacian(hollow_triangle, 1));
    CHECK(s1(0) == doctest::Approx(0.0));
    CHECK(s1(1) == doctest::Approx(3.0));
    CHECK(s1(2) == doctest::Approx(3.0));
    const Eigen::VectorXd s0 = spectrum(laplacian(hollow_triangle, 0));
    CHECK(s0(0) == doctest::Approx(0.0));
    CHECK(s0(2) == doctest::Approx(3.0));
}

TEST_CASE("filled triangle laplacian is 3I on edges") {
    const Eigen::MatrixXd l1(laplacian(filled_triangle, 1).matrix);
    CHECK(l1.isApprox(3.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("betti numbers of standard complexes") {
    CHECK(harmonic_basis(laplacian(hollow_triangle, 0)).betti() == 1);
    CHECK(harmonic_basis(laplacian(hollow_triangle, 1)).betti() == 1);
    CHECK(harmonic_basis(laplacian(filled_triangle, 1)).betti() == 0);
    CHECK(harmonic_basis(laplacian(filled_triangle, 2)).betti() == 0);
    CHECK(harmonic_basis(laplacian(tetra_boundary, 1)).betti() == 0);
    CHECK(harmonic_basis(laplacian(tetra_boundary, 2)).betti() == 1);
    // two disjoint edges
    CHECK(harmonic_basis(laplacian(SimplicialComplex::from_maximal(4, {Simplex{0, 1}, Simplex{2, 3}}), 0)).betti() == 2);
}

TEST_CASE("hollow triangle harmonic cycle") {
    const auto h = harmonic_basis(laplacian(hollow_triangle, 1));
    REQUIRE(h.betti() == 1);
    // the cycle [01] - [02] + [12], normalized, first coordinate positive
    const double r = 1.0 / std::sqrt(3.0);
    CHECK(h.vectors(0, 0) == doctest::Approx(r));
    CHECK(h.vectors(1, 0) == doctest::Approx(-r));
    CHECK(h.vectors(2, 0) == doctest::Approx(r));
}

TEST_CASE("harmonic basis is orthonormal and in the kernel") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto c = random_complex(12, 0.45, seed);
        for (int k = 0; k <= 2; ++k) {
            const auto lap = laplacian(c, k);
            const auto h = harmonic_basis(lap);
            if (h.betti() == 0) continue;
            const Eigen::MatrixXd gram = h.vectors.transpose() * h.vectors;
            CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((lap.matrix * h.vectors).cwiseAbs().maxCoeff() < 1e-9);
            // rank-nullity against the boundary ranks
            const Eigen::MatrixXd dk = Eigen::MatrixXi(boundary(c, k).matrix).cast<double>();
            const Eigen::MatrixXd dk1 = Eigen::MatrixXi(boundary(c, k + 1).matrix).cast<double>();
            const auto rank = [](const Eigen::MatrixXd& m) {
                if (m.size() == 0) return Eigen::Index{0};
                Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
                return lu.rank();
            };
            CHECK(static_cast<Eigen::Index>(h.betti()) ==
                  static_cast<Eigen::Index>(c.count(k)) - rank(dk) - rank(dk1));
        }
    }
}

TEST_CASE("canonical basis does not depend on the eigenvector rotation") {
    // two disjoint hollow triangles: beta_1 = 2, a degenerate kernel
    const auto c = SimplicialComplex::from_maximal(
        6, {Simplex{0, 1}, Simplex{0, 2}, Simplex{1, 2}, Simplex{3, 4}, Simplex{3, 5}, Simplex{4, 5}});
    const auto lap = laplacian(c, 1);
    const auto h = harmonic_basis(lap);
    REQUIRE(h.betti() == 2);
    // a relabelled laplacian with the same kernel up to scaling (2 * Delta)
    Laplacian scaled = lap;
    scaled.matrix *= 2.0;
    const auto g = harmonic_basis(scaled);
    CHECK((h.vectors - g.vectors).cwiseAbs().maxCoeff() < 1e-12);
    // same kernel, different nonzero spectrum
    Laplacian squared = lap;
    squared.matrix = Eigen::SparseMatrix<double>(lap.matrix + lap.matrix * lap.matrix);
    const auto q = harmonic_basis(squared);
    CHECK((h.vectors - q.vectors).cwiseAbs().maxCoeff() < 1e-10);
    // the first vector is the cycle through the first edge
    const double r = 1.0 / std::sqrt(3.0);
    CHECK(h.vectors(0, 0) == doctest::Approx(r));
    CHECK(h.vectors.col(0).tail(3).norm() == doctest::Approx(0.0));
}

TEST_CASE("dirac operator squares to the laplacians") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto c = random_complex(10, 0.5, seed);
        const auto b = dirac(c);
        const Eigen::MatrixXd B(b.matrix);
        CHECK((B - B.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXd sq = B * B;
        for (int k = 0; k <= c.max_dim(); ++k) {
            const Eigen::MatrixXd expected(laplacian(c, k).matrix);
            const Eigen::MatrixXd block = b.block(sq, k);
            REQUIRE(block.rows() == expected.rows());
            if (expected.size() > 0) CHECK((block - expected).cwiseAbs().maxCoeff() <= 1e-12);
        }
        // off-diagonal blocks vanish because the boundary of a boundary is zero
        Eigen::MatrixXd off = sq;
        for (int k = 0; k <= c.max_dim(); ++k) {
            const auto o = static_cast<Eigen::Index>(b.offsets[static_cast<std::size_t>(k)]);
            const auto m = static_cast<Eigen::Index>(c.count(k));
            off.block(o, o, m, m).setZero();
        }
        CHECK(off.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("pooled state") {
    const auto c = SimplicialComplex::from_maximal(
        6, {Simplex{0, 1}, Simplex{0, 2}, Simplex{1, 2}, Simplex{3, 4}, Simplex{3, 5}, Simplex{4, 5}});
    const auto h = harmonic_basis(laplacian(c, 1));
    const auto psi = pooled_state(h, 6);
    CHECK(psi.betti() == 2);
    CHECK(psi.vertex_count == 6);
    CHECK(std::abs(dot(psi.entries, psi.entries) - 1.0) < 1e-12);
    // psi = (v1 + v2)/sqrt(2), so <psi|v_i> = 1/sqrt(2)
    for (const auto& v : psi.basis) CHECK(dot(psi.entries, v) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const auto z = pooled_state(harmonic_basis(laplacian(SimplicialComplex::from_maximal(3, {Simplex{0, 1, 2}}), 1)), 3);
    CHECK(z.is_zero());
    CHECK(z.entries.empty());
    CHECK(z == zero_state(3, 1));
}

TEST_CASE("sparse dot product merges by simplex") {
    const SubsetVector a{{Simplex{0, 1}, 1.0}, {Simplex{0, 2}, 2.0}, {Simplex{1, 2}, 3.0}};
    const SubsetVector b{{Simplex{0, 2}, 5.0}, {Simplex{1, 3}, 7.0}};
    CHECK(dot(a, b) == 10.0);
    CHECK(dot(b, a) == 10.0);
    CHECK(dot(a, {}) == 0.0);
}
