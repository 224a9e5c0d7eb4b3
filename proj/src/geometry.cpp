#include "tdaq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "tdaq/error.hpp"
#include "tdaq/rng.hpp"

namespace tdaq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void place_circle(Eigen::MatrixXd& points, std::size_t first, std::size_t count,
                  double center_x, Rng& rng) {
    const double phase = kTwoPi * rng.uniform();
    for (std::size_t i = 0; i < count; ++i) {
        // stratified: one point per arc, jittered within half an arc
        const double angle =
            phase + kTwoPi * (static_cast<double>(i) + 0.5 * rng.uniform()) / count;
        points(first + i, 0) = center_x + std::cos(angle);
        points(first + i, 1) = std::sin(angle);
    }
}

Eigen::Matrix3d random_rotation(Rng& rng) {
    // uniform unit quaternion (Shoemake)
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    Eigen::Quaterniond q(a * std::sin(kTwoPi * u2), a * std::cos(kTwoPi * u2),
                         b * std::sin(kTwoPi * u3), b * std::cos(kTwoPi * u3));
    return q.normalized().toRotationMatrix();
}

}  // namespace

std::string to_string(Shape shape) {
    switch (shape) {
        case Shape::circle: return "circle";
        case Shape::two_circles: return "two_circles";
        case Shape::sphere: return "sphere";
        case Shape::torus: return "torus";
        case Shape::blob: return "blob";
    }
    return "unknown";
}

Shape parse_shape(const std::string& name) {
    for (Shape s : {Shape::circle, Shape::two_circles, Shape::sphere, Shape::torus, Shape::blob}) {
        if (to_string(s) == name) return s;
    }
    fail(ErrorKind::invalid_argument, "unknown shape: " + name);
}

PointCloud::PointCloud(Eigen::MatrixXd points, CloudMetadata metadata)
    : points_(std::move(points)), metadata_(std::move(metadata)) {
    if (points_.rows() < 1) fail(ErrorKind::invalid_argument, "point cloud must have n >= 1");
    if (points_.cols() < 1) fail(ErrorKind::invalid_argument, "points must have dimension >= 1");
    if (!points_.allFinite()) fail(ErrorKind::invalid_argument, "point coordinates must be finite");
}

ScaleGrid::ScaleGrid(std::vector<double> scales) : scales_(std::move(scales)) {
    if (scales_.size() < 2) fail(ErrorKind::invalid_argument, "scale grid needs T >= 2");
    for (std::size_t j = 0; j < scales_.size(); ++j) {
        if (!std::isfinite(scales_[j]) || scales_[j] < 0.0)
            fail(ErrorKind::invalid_argument, "scales must be finite and non-negative");
        if (j > 0 && !(scales_[j] > scales_[j - 1]))
            fail(ErrorKind::invalid_argument, "scales must be strictly increasing");
    }
}

GridPolicy parse_grid_policy(const std::string& name) {
    if (name == "uniform") return GridPolicy::uniform;
    if (name == "quantile") return GridPolicy::quantile;
    fail(ErrorKind::invalid_argument, "unknown grid policy: " + name);
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
    const auto& p = cloud.points();
    const Eigen::Index n = p.rows();
    DistanceMatrix d = DistanceMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double value = (p.row(i) - p.row(j)).norm();
            d(i, j) = value;
            d(j, i) = value;
        }
    }
    return d;
}

double max_distance(const DistanceMatrix& distances) {
    return distances.size() == 0 ? 0.0 : distances.maxCoeff();
}

ScaleGrid uniform_grid(double upper, std::size_t count) {
    if (count < 2) fail(ErrorKind::invalid_argument, "scale grid needs T >= 2");
    if (!(upper > 0.0)) fail(ErrorKind::invalid_argument, "degenerate cloud");
    std::vector<double> scales(count);
    for (std::size_t j = 1; j <= count; ++j)
        scales[j - 1] = upper * static_cast<double>(j) / static_cast<double>(count);
    scales.back() = upper;
    return ScaleGrid(std::move(scales));
}

ScaleGrid make_scale_grid(const DistanceMatrix& distances, std::size_t count, GridPolicy policy) {
    if (count < 2) fail(ErrorKind::invalid_argument, "scale grid needs T >= 2");
    const double d_max = max_distance(distances);
    if (!(d_max > 0.0)) fail(ErrorKind::invalid_argument, "degenerate cloud");
    if (policy == GridPolicy::uniform) return uniform_grid(d_max, count);

    std::vector<double> off_diagonal;
    for (Eigen::Index i = 0; i < distances.rows(); ++i)
        for (Eigen::Index j = i + 1; j < distances.cols(); ++j) off_diagonal.push_back(distances(i, j));
    std::sort(off_diagonal.begin(), off_diagonal.end());
    const std::size_t m = off_diagonal.size();
    std::vector<double> scales(count);
    for (std::size_t j = 1; j <= count; ++j) {
        // nearest rank: ceil(m * j / T)
        const std::size_t rank = (m * j + count - 1) / count;
        scales[j - 1] = off_diagonal[std::max<std::size_t>(rank, 1) - 1];
    }
    const double step = 1e-9 * d_max;
    for (std::size_t j = count - 1; j-- > 0;) {
        if (scales[j] >= scales[j + 1]) scales[j] = scales[j + 1] - step;
    }
    if (scales.front() < 0.0) fail(ErrorKind::invalid_argument, "degenerate cloud");
    return ScaleGrid(std::move(scales));
}

std::size_t minimum_points(Shape shape) {
    switch (shape) {
        case Shape::circle: return 3;
        case Shape::two_circles: return 6;
        case Shape::sphere: return 4;
        case Shape::torus: return 8;
        case Shape::blob: return 1;
    }
    return 1;
}

PointCloud generate(Shape shape, std::size_t n, double noise, std::uint64_t seed) {
    if (n < minimum_points(shape))
        fail(ErrorKind::invalid_argument, to_string(shape) + " needs at least " +
                                              std::to_string(minimum_points(shape)) + " points");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        fail(ErrorKind::invalid_argument, "noise must be a non-negative real");

    Rng rng(seed);
    Eigen::MatrixXd points;
    switch (shape) {
        case Shape::circle:
            points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
            place_circle(points, 0, n, 0.0, rng);
            break;
        case Shape::two_circles: {
            points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
            const std::size_t first = (n + 1) / 2;
            place_circle(points, 0, first, -1.5, rng);
            place_circle(points, first, n - first, 1.5, rng);
            break;
        }
        case Shape::sphere: {
            points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 3);
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            const Eigen::Matrix3d rotation = random_rotation(rng);
            for (std::size_t i = 0; i < n; ++i) {
                const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / n;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double theta = golden * static_cast<double>(i);
                const Eigen::Vector3d p(r * std::cos(theta), r * std::sin(theta), z);
                points.row(static_cast<Eigen::Index>(i)) = (rotation * p).transpose();
            }
            break;
        }
        case Shape::torus: {
            // a x b lattice on S^1 x S^1 in R^4; leftover points at random angles
            points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 4);
            const std::size_t a = std::max<std::size_t>(
                2, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
            const std::size_t b = n / a;
            const double phase_u = kTwoPi * rng.uniform();
            const double phase_v = kTwoPi * rng.uniform();
            std::size_t row = 0;
            for (std::size_t i = 0; i < b; ++i) {
                for (std::size_t j = 0; j < a; ++j, ++row) {
                    const double u = phase_u + kTwoPi * static_cast<double>(i) / b;
                    const double v = phase_v + kTwoPi * static_cast<double>(j) / a;
                    points.row(static_cast<Eigen::Index>(row)) << std::cos(u), std::sin(u),
                        std::cos(v), std::sin(v);
                }
            }
            for (; row < n; ++row) {
                const double u = kTwoPi * rng.uniform();
                const double v = kTwoPi * rng.uniform();
                points.row(static_cast<Eigen::Index>(row)) << std::cos(u), std::sin(u),
                    std::cos(v), std::sin(v);
            }
            break;
        }
        case Shape::blob:
            points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 3);
            for (Eigen::Index i = 0; i < points.rows(); ++i)
                for (Eigen::Index c = 0; c < 3; ++c) points(i, c) = 0.5 * rng.normal();
            break;
    }
    if (noise > 0.0) {
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            for (Eigen::Index c = 0; c < points.cols(); ++c) points(i, c) += noise * rng.normal();
    }

    CloudMetadata meta;
    meta.name = to_string(shape) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
    meta.generator = GeneratorRecord{shape, n, noise, seed, std::string(kGeneratorId)};
    return PointCloud(std::move(points), std::move(meta));
}

}  // namespace tdaq
