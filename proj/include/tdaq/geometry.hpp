#ifndef TDAQ_GEOMETRY_HPP
#define TDAQ_GEOMETRY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tdaq {

enum class Shape { circle, two_circles, sphere, torus, blob };

std::string to_string(Shape shape);
/// Throws invalid_argument "unknown shape: <name>".
Shape parse_shape(const std::string& name);

/// How a synthetic cloud was produced.
struct GeneratorRecord {
    Shape shape = Shape::circle;
    std::size_t n = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string generator_version;
};

struct CloudMetadata {
    std::string name;
    std::optional<GeneratorRecord> generator;
};

/// Finite point set in R^d; rows are points. Immutable after construction.
class PointCloud {
public:
    /// Throws if the matrix has no rows or no columns.
    explicit PointCloud(Eigen::MatrixXd points, CloudMetadata metadata = {});

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dimension() const { return static_cast<std::size_t>(points_.cols()); }
    const Eigen::MatrixXd& points() const { return points_; }
    const CloudMetadata& metadata() const { return metadata_; }

private:
    Eigen::MatrixXd points_;
    CloudMetadata metadata_;
};

/// Strictly increasing sequence of filtration scales, at least two of them.
class ScaleGrid {
public:
    explicit ScaleGrid(std::vector<double> scales);

    std::size_t size() const { return scales_.size(); }
    double operator[](std::size_t j) const { return scales_[j]; }
    const std::vector<double>& values() const { return scales_; }
    double back() const { return scales_.back(); }

    bool operator==(const ScaleGrid&) const = default;

private:
    std::vector<double> scales_;
};

enum class GridPolicy { uniform, quantile };

GridPolicy parse_grid_policy(const std::string& name);

using DistanceMatrix = Eigen::MatrixXd;

DistanceMatrix pairwise_distances(const PointCloud& cloud);

/// Largest off-diagonal entry.
double max_distance(const DistanceMatrix& distances);

/// uniform: d_max * j / T for j = 1..T (last entry exactly d_max).
/// quantile: nearest-rank quantiles j/T of the off-diagonal distances; ties are
/// pushed apart downward in steps of 1e-9 * d_max.
ScaleGrid make_scale_grid(const DistanceMatrix& distances, std::size_t count, GridPolicy policy);

/// Uniform grid over (0, upper]; used to put a whole corpus on one grid.
ScaleGrid uniform_grid(double upper, std::size_t count);

/// Seeded synthetic clouds with known topology.
///   circle       unit circle in R^2, stratified angles
///   two_circles  two unit circles centred 3 apart in R^2
///   sphere       Fibonacci lattice on the unit sphere in R^3, random rotation
///   torus        flat (Clifford) torus S^1 x S^1 in R^4, near-square lattice
///   blob         isotropic Gaussian in R^3 with standard deviation 0.5
/// Every coordinate is then perturbed by N(0, noise^2).
PointCloud generate(Shape shape, std::size_t n, double noise, std::uint64_t seed);

/// Minimum admissible n for each shape.
std::size_t minimum_points(Shape shape);

}  // namespace tdaq

#endif
