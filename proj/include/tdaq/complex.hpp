#ifndef TDAQ_COMPLEX_HPP
#define TDAQ_COMPLEX_HPP

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/SparseCore>

#include "tdaq/geometry.hpp"

namespace tdaq {

using Vertex = std::uint32_t;

/// Oriented simplex; vertices are strictly ascending.
class Simplex {
public:
    Simplex() = default;
    /// Throws invalid_argument unless the vertices are strictly ascending.
    explicit Simplex(std::vector<Vertex> vertices);
    Simplex(std::initializer_list<Vertex> vertices);

    int dim() const { return static_cast<int>(vertices_.size()) - 1; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    Vertex operator[](std::size_t i) const { return vertices_[i]; }

    /// Face obtained by dropping the i-th vertex.
    Simplex face(std::size_t i) const;

    auto operator<=>(const Simplex&) const = default;
    bool operator==(const Simplex&) const = default;

private:
    std::vector<Vertex> vertices_;
};

/// Finite simplicial complex on vertices 0..n-1 with simplices of dimension at
/// most max_dim(). Every dimension is kept in lexicographic order.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    /// Validates sorting, uniqueness and downward closure.
    SimplicialComplex(std::size_t vertex_count, std::vector<std::vector<Simplex>> by_dim);

    /// Closes a list of maximal simplices under taking faces.
    static SimplicialComplex from_maximal(std::size_t vertex_count,
                                          const std::vector<Simplex>& maximal);

    std::size_t vertex_count() const { return vertex_count_; }
    int max_dim() const { return static_cast<int>(by_dim_.size()) - 1; }
    /// Empty for k outside [0, max_dim()].
    const std::vector<Simplex>& simplices(int k) const;
    std::size_t count(int k) const { return simplices(k).size(); }
    /// Position of s in simplices(s.dim()), or -1.
    std::ptrdiff_t index_of(const Simplex& s) const;
    long euler_characteristic() const;

    bool operator==(const SimplicialComplex&) const = default;

private:
    std::size_t vertex_count_ = 0;
    std::vector<std::vector<Simplex>> by_dim_;
};

/// Signed boundary matrix d_k : C_k -> C_{k-1}. Column c is simplices(k)[c],
/// row r is simplices(k-1)[r]. Entries are exact integers.
struct BoundaryOperator {
    int k = 0;
    Eigen::SparseMatrix<int> matrix;
};

/// d_k of the complex. For k = 0 (or k above max_dim) the operator is empty:
/// rows = count(k-1), cols = count(k), no entries.
BoundaryOperator boundary(const SimplicialComplex& complex, int k);

/// Vietoris-Rips filtration sampled on a scale grid.
class FiltrationComplex {
public:
    FiltrationComplex(ScaleGrid grid, std::size_t vertex_count,
                      std::vector<std::vector<Simplex>> simplices,
                      std::vector<std::vector<double>> diameters);

    const ScaleGrid& grid() const { return grid_; }
    std::size_t vertex_count() const { return vertex_count_; }
    int max_dim() const { return static_cast<int>(simplices_.size()) - 1; }

    /// All simplices present at the top scale, lexicographic per dimension.
    const std::vector<Simplex>& simplices(int k) const { return simplices_.at(k); }
    /// Max pairwise distance among a simplex's vertices (exact filtration value).
    double diameter(int k, std::size_t i) const { return diameters_.at(k).at(i); }
    /// Index of the smallest grid scale containing the simplex.
    std::size_t birth_index(int k, std::size_t i) const { return births_.at(k).at(i); }
    double birth_scale(int k, std::size_t i) const { return grid_[birth_index(k, i)]; }

    /// Complex at grid scale j (0-based).
    SimplicialComplex at(std::size_t j) const;
    /// Number of k-simplices present at scale j.
    std::size_t count(int k, std::size_t j) const;

private:
    ScaleGrid grid_;
    std::size_t vertex_count_;
    std::vector<std::vector<Simplex>> simplices_;
    std::vector<std::vector<double>> diameters_;
    std::vector<std::vector<std::size_t>> births_;
};

/// Cliques of the neighborhood graph {d(u,v) <= threshold} up to dimension
/// max_dim, with their diameters. Lexicographic order in every dimension.
void enumerate_rips(const DistanceMatrix& distances, double threshold, int max_dim,
                    std::vector<std::vector<Simplex>>& simplices,
                    std::vector<std::vector<double>>& diameters);

/// Throws "dimension exceeds vertex count" when max_dim + 1 > n.
FiltrationComplex build_vr(const DistanceMatrix& distances, const ScaleGrid& grid, int max_dim);

}  // namespace tdaq

#endif
