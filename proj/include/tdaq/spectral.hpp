#ifndef TDAQ_SPECTRAL_HPP
#define TDAQ_SPECTRAL_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tdaq/complex.hpp"

namespace tdaq {

/// Eigenvalues below abs + rel * lambda_max count as zero.
struct ZeroTolerance {
    double abs = 1e-12;
    double rel = 1e-9;

    bool operator==(const ZeroTolerance&) const = default;
};

/// Combinatorial Laplacian of one dimension of one complex.
struct Laplacian {
    int k = 0;
    std::size_t scale_index = 0;
    std::vector<Simplex> basis;  // k-simplices, lexicographic
    Eigen::SparseMatrix<double> matrix;
};

/// d_k^T d_k + d_{k+1} d_{k+1}^T; terms that do not exist are dropped.
Laplacian laplacian(const SimplicialComplex& complex, int k, std::size_t scale_index = 0);

/// Symmetric block operator over the graded basis C_0 + C_1 + ... + C_D with
/// d_k in block (k-1, k) and its transpose in block (k, k-1).
struct DiracOperator {
    std::vector<std::size_t> offsets;  // offsets[k] = first row of C_k; size D+2
    Eigen::SparseMatrix<double> matrix;

    /// The k-th diagonal block of a square graded matrix.
    Eigen::MatrixXd block(const Eigen::MatrixXd& graded, int k) const;
};

DiracOperator dirac(const SimplicialComplex& complex);

/// Orthonormal basis (columns) of ker(Delta_k).
///
/// The basis is canonical: eigenvectors are only used to form the kernel
/// projector P, and the basis is then built by pivoted Gram-Schmidt on the
/// columns of P in simplex order, with the first nonzero coordinate of every
/// vector made positive. Any orthonormal basis of the same kernel produces the
/// same output, so the result does not depend on how the eigensolver rotates
/// degenerate eigenvectors.
struct HarmonicBasis {
    int k = 0;
    std::vector<Simplex> coordinates;
    Eigen::MatrixXd vectors;  // coordinates.size() x betti()
    double threshold = 0.0;   // eigenvalue cut actually applied
    double lambda_max = 0.0;

    std::size_t betti() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Throws numerical error (with diagnostics) if the eigensolver fails.
HarmonicBasis harmonic_basis(const Laplacian& lap, const ZeroTolerance& tol = {});

/// Real amplitude on one simplex; the simplex is the coordinate in the space
/// indexed by vertex subsets of the n labeled vertices.
struct StateEntry {
    Simplex simplex;
    double amplitude = 0.0;

    bool operator==(const StateEntry&) const = default;
};

/// Sparse vector over vertex subsets, sorted by simplex.
using SubsetVector = std::vector<StateEntry>;

double dot(const SubsetVector& a, const SubsetVector& b);

/// Normalized uniform superposition of a harmonic basis. An empty harmonic
/// space is represented by the zero-state sentinel (no entries, betti 0).
struct PooledState {
    std::size_t vertex_count = 0;
    int k = 0;
    SubsetVector entries;
    /// The harmonic basis vectors themselves, needed for projector overlaps.
    std::vector<SubsetVector> basis;

    std::size_t betti() const { return basis.size(); }
    bool is_zero() const { return basis.empty(); }

    bool operator==(const PooledState&) const = default;
};

PooledState pooled_state(const HarmonicBasis& basis, std::size_t vertex_count);

PooledState zero_state(std::size_t vertex_count, int k);

}  // namespace tdaq

#endif
