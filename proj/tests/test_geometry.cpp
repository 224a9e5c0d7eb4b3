#include <doctest.h>

#include <cmath>
#include <set>

#include "tdaq/error.hpp"
#include "tdaq/geometry.hpp"
#include "tdaq/rng.hpp"

using namespace tdaq;

namespace {

Eigen::MatrixXd random_points(std::size_t n, int dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(n), dim);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (int c = 0; c < dim; ++c) p(i, c) = rng.normal();
    return p;
}

}  // namespace

TEST_CASE("distances of a right triangle") {
    Eigen::MatrixXd p(3, 2);
    p << 0, 0, 3, 0, 0, 4;
    const auto d = pairwise_distances(PointCloud(p));
    CHECK(d(0, 1) == 3.0);
    CHECK(d(0, 2) == 4.0);
    CHECK(d(1, 2) == 5.0);
    CHECK(d(2, 1) == 5.0);
    CHECK(d.diagonal().isZero(0.0));
    CHECK(max_distance(d) == 5.0);
}

TEST_CASE("distance matrix is a metric") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = pairwise_distances(PointCloud(random_points(15, 3, seed)));
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.rows(); ++j) {
                CHECK(d(i, j) == d(j, i));
                CHECK(d(i, j) >= 0.0);
                for (Eigen::Index k = 0; k < d.rows(); ++k) CHECK(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
            }
    }
}

TEST_CASE("empty cloud is rejected") {
    CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd(0, 2)), Error);
    CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd(3, 0)), Error);
}

TEST_CASE("uniform grid ends exactly at the maximum distance") {
    Eigen::MatrixXd p(3, 1);
    p << 0.0, 0.1, 0.7;
    const auto d = pairwise_distances(PointCloud(p));
    const auto grid = make_scale_grid(d, 7, GridPolicy::uniform);
    REQUIRE(grid.size() == 7);
    CHECK(grid.back() == max_distance(d));
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(grid[j] == doctest::Approx(0.7 * double(j + 1) / 7.0));
}

TEST_CASE("quantile grid separates tied quantiles downward") {
    // regular tetrahedron: all six distances are bitwise equal
    Eigen::MatrixXd p(4, 3);
    p << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    const auto d = pairwise_distances(PointCloud(p));
    const auto grid = make_scale_grid(d, 3, GridPolicy::quantile);
    const double dmax = max_distance(d);
    CHECK(d.minCoeff() == 0.0);
    CHECK((d.array() == dmax || d.array() == 0.0).all());
    const double delta = 1e-9 * dmax;
    REQUIRE(grid.size() == 3);
    CHECK(grid[2] == dmax);
    CHECK(grid[1] == doctest::Approx(dmax - delta).epsilon(1e-15));
    CHECK(grid[0] == doctest::Approx(dmax - 2 * delta).epsilon(1e-15));
}

TEST_CASE("quantile grid uses nearest-rank quantiles") {
    Eigen::MatrixXd p(4, 1);
    p << 0, 1, 3, 7;  // distances 1 2 3 4 6 7
    const auto grid = make_scale_grid(pairwise_distances(PointCloud(p)), 3, GridPolicy::quantile);
    CHECK(grid.values() == std::vector<double>{2, 4, 7});
}

TEST_CASE("degenerate cloud has no grid") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_WITH_AS(make_scale_grid(pairwise_distances(PointCloud(p)), 4, GridPolicy::uniform),
                         doctest::Contains("degenerate cloud"), Error);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(ScaleGrid({1.0}), Error);
    CHECK_THROWS_AS(ScaleGrid({1.0, 1.0}), Error);
    CHECK_THROWS_AS(ScaleGrid({2.0, 1.0}), Error);
    CHECK_THROWS_AS(uniform_grid(1.0, 1), Error);
    CHECK(uniform_grid(2.0, 4).values() == std::vector<double>{0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("generators are deterministic and seed dependent") {
    for (Shape s : {Shape::circle, Shape::two_circles, Shape::sphere, Shape::torus, Shape::blob}) {
        const auto a = generate(s, 24, 0.05, 7);
        const auto b = generate(s, 24, 0.05, 7);
        const auto c = generate(s, 24, 0.05, 8);
        CHECK(a.points() == b.points());
        CHECK(a.points() != c.points());
        CHECK(a.size() == 24);
        REQUIRE(a.metadata().generator);
        CHECK(a.metadata().generator->shape == s);
        CHECK(a.metadata().generator->seed == 7);
        CHECK(parse_shape(to_string(s)) == s);
    }
}

TEST_CASE("noise-free generators lie on their manifolds") {
    const auto circle = generate(Shape::circle, 30, 0.0, 1);
    CHECK(circle.dimension() == 2);
    for (Eigen::Index i = 0; i < 30; ++i) CHECK(circle.points().row(i).norm() == doctest::Approx(1.0));

    const auto sphere = generate(Shape::sphere, 30, 0.0, 1);
    CHECK(sphere.dimension() == 3);
    for (Eigen::Index i = 0; i < 30; ++i) CHECK(sphere.points().row(i).norm() == doctest::Approx(1.0));

    const auto torus = generate(Shape::torus, 36, 0.0, 1);
    CHECK(torus.dimension() == 4);
    for (Eigen::Index i = 0; i < 36; ++i) {
        CHECK(torus.points().row(i).head(2).norm() == doctest::Approx(1.0));
        CHECK(torus.points().row(i).tail(2).norm() == doctest::Approx(1.0));
    }

    const auto two = generate(Shape::two_circles, 30, 0.0, 1);
    int left = 0;
    for (Eigen::Index i = 0; i < 30; ++i) {
        const Eigen::RowVector2d x = two.points().row(i);
        const Eigen::RowVector2d centre(x(0) < 0 ? -1.5 : 1.5, 0.0);
        CHECK((x - centre).norm() == doctest::Approx(1.0));
        left += x(0) < 0;
    }
    CHECK(left == 15);
}

TEST_CASE("generator argument checks") {
    CHECK_THROWS_AS(generate(Shape::circle, 2, 0.0, 1), Error);
    CHECK_THROWS_AS(generate(Shape::circle, 10, -0.1, 1), Error);
    CHECK_THROWS_WITH_AS(parse_shape("klein"), doctest::Contains("unknown shape"), Error);
    for (Shape s : {Shape::circle, Shape::two_circles, Shape::sphere, Shape::torus, Shape::blob})
        CHECK_NOTHROW(generate(s, minimum_points(s), 0.0, 3));
}

TEST_CASE("rng streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    Rng c(1);
    double sum = 0, sq = 0;
    const int N = 20000;
    for (int i = 0; i < N; ++i) {
        const double x = c.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / N) < 0.05);
    CHECK(std::abs(sq / N - 1.0) < 0.05);
    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 100; ++k) seeds.insert(derive_seed(5, k));
    CHECK(seeds.size() == 100);
    CHECK(derive_seed(5, 1, 2) != derive_seed(5, 2, 1));
}
