#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "tdaq/error.hpp"
#include "tdaq/kernel.hpp"

using namespace tdaq;

namespace {

std::vector<HarmonicFeatureSet> corpus(const OverlapMode& mode = {}) {
    std::vector<HarmonicFeatureSet> out;
    const auto grid = uniform_grid(2.0, 6);
    std::uint64_t seed = 1;
    for (Shape s : {Shape::circle, Shape::sphere, Shape::blob, Shape::two_circles})
        for (int i = 0; i < 3; ++i) out.push_back(extract_features(generate(s, 12, 0.05, seed++), grid, 1, mode));
    return out;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("component kernels by hand") {
    const auto fs = corpus();
    const auto& a = fs[0];
    const auto& b = fs[4];
    // k_harmonic of a set with itself counts every (k, t) once
    CHECK(k_harmonic(a, a) == double((a.max_dim + 1) * a.scale_count()));

    double dot = 0, na = 0, nb = 0;
    for (Eigen::Index j = 0; j < a.betti.rows(); ++j)
        for (Eigen::Index k = 0; k < a.betti.cols(); ++k) {
            dot += a.betti(j, k) * b.betti(j, k);
            na += a.betti(j, k) * a.betti(j, k);
            nb += b.betti(j, k) * b.betti(j, k);
        }
    CHECK(k_betti(a, b) == dot);
    CHECK(k_betti(a, b, true) == doctest::Approx(dot / std::sqrt(na * nb)));

    const double sq = (a.persistence - b.persistence).squaredNorm();
    CHECK(k_persist(a, b, 0.7) == doctest::Approx(std::exp(-0.7 * sq)));
    CHECK(k_persist(a, a, 0.7) == 1.0);

    KernelConfig c;
    c.lambda_harmonic = 0.25;
    c.lambda_betti = 0.5;
    c.lambda_persist = 2.0;
    c.gamma_band = 0.7;
    CHECK(k_topo(a, b, c) == doctest::Approx(0.25 * k_harmonic(a, b) + 0.5 * dot + 2.0 * std::exp(-0.7 * sq)));
}

TEST_CASE("gram matrix is symmetric and positive semidefinite in projector mode") {
    KernelConfig c;
    c.overlap = OverlapMode::exact_mode(OverlapBasis::projector);
    const auto g = gram(corpus(c.overlap), c);
    CHECK((g.values - g.values.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(g.min_eigenvalue >= -kPsdTolerance);
    CHECK(g.shift_applied == 0.0);
}

TEST_CASE("components recombine to the gram matrix") {
    const auto fs = corpus();
    const auto comps = kernel_components(fs, {}, false);
    KernelConfig c;
    c.lambda_harmonic = 0.5;
    c.lambda_betti = 0.0;
    c.lambda_persist = 1.0;
    c.gamma_band = 10.0;
    const auto g = gram(fs, c);
    CHECK((comps.combine(0.5, 0.0, 1.0, 10.0) - g.values).cwiseAbs().maxCoeff() <= 1e-9 + g.shift_applied);
}

TEST_CASE("kernel row matches gram columns") {
    const auto fs = corpus();
    const KernelConfig c;
    const auto g = gram(fs, c);
    const Eigen::VectorXd row = kernel_row(fs, fs[5], c);
    for (Eigen::Index i = 0; i < row.size(); ++i)
        if (i != 5) CHECK(row(i) == doctest::Approx(g.values(i, 5)));
}

TEST_CASE("psd repair") {
    Eigen::Matrix2d m;
    m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1, 3
    const auto r = repair_psd(m, KernelConfig{});
    CHECK(r.min_eigenvalue == doctest::Approx(-1.0));
    CHECK(r.shift_applied == doctest::Approx(1.0 + 1e-10));
    CHECK(min_eigenvalue(r.values) >= 0.0);
    CHECK(r.values(0, 1) == 2.0);

    Eigen::Matrix2d ok;
    ok << 2.0, 1.0, 1.0, 2.0;
    const auto s = repair_psd(ok, KernelConfig{});
    CHECK(s.shift_applied == 0.0);
    CHECK(s.values == ok);
}

TEST_CASE("shot-mode gram is deterministic and symmetric") {
    KernelConfig c;
    c.overlap = OverlapMode::shot_mode(2000, 11);
    const auto fs = corpus(c.overlap);
    const auto a = gram(fs, c);
    const auto b = gram(fs, c);
    CHECK(a.values == b.values);
    CHECK(a.values == a.values.transpose());
    CHECK(pair_seed(c, 1, 2) == pair_seed(c, 2, 1));
    CHECK(pair_seed(c, 1, 2) != pair_seed(c, 1, 3));
}

TEST_CASE("kernel configuration validation") {
    KernelConfig c;
    c.lambda_harmonic = c.lambda_betti = c.lambda_persist = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    KernelConfig d;
    d.lambda_betti = -1.0;
    CHECK_THROWS_AS(d.validate(), Error);
    KernelConfig e;
    e.gamma_band = 0.0;
    CHECK_THROWS_AS(e.validate(), Error);
    KernelConfig f;
    f.lambda_persist = 0.0;
    CHECK(f.nonzero_weights() == 2);
}

TEST_CASE("gram refuses incomparable sets") {
    auto fs = corpus();
    fs.push_back(extract_features(generate(Shape::circle, 13, 0.0, 1), uniform_grid(2.0, 6), 1));
    CHECK_THROWS_WITH_AS(gram(fs, KernelConfig{}), doctest::Contains("incomparable"), Error);
}

TEST_CASE("betti kernel separates torus-like from sphere-like rows") {
    auto torus = corpus()[0];
    auto sphere = torus;
    torus.betti.setZero();
    sphere.betti.setZero();
    torus.betti.row(2) << 1, 2, 1;
    sphere.betti.row(2) << 1, 0, 1;
    torus.max_dim = sphere.max_dim = 2;
    CHECK(k_betti(torus, sphere) == 2.0);
    CHECK(k_betti(torus, torus) == 6.0);
    CHECK(k_betti(torus, sphere) < k_betti(torus, torus));
    CHECK(k_betti(torus, sphere, true) < k_betti(torus, torus, true));
}
