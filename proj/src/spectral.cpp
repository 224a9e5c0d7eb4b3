#include "tdaq/spectral.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tdaq/error.hpp"

namespace tdaq {

namespace {

constexpr double kDropAmplitude = 1e-13;

Eigen::SparseMatrix<double> to_real(const Eigen::SparseMatrix<int>& m) { return m.cast<double>(); }

SubsetVector sparse_column(const Eigen::VectorXd& v, const std::vector<Simplex>& coordinates) {
    SubsetVector out;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > kDropAmplitude)
            out.push_back({coordinates[static_cast<std::size_t>(i)], v(i)});
    return out;
}

}  // namespace

Laplacian laplacian(const SimplicialComplex& complex, int k, std::size_t scale_index) {
    if (k < 0) fail(ErrorKind::invalid_argument, "laplacian dimension must be >= 0");
    Laplacian lap;
    lap.k = k;
    lap.scale_index = scale_index;
    lap.basis = complex.simplices(k);
    const auto size = static_cast<Eigen::Index>(lap.basis.size());
    lap.matrix.resize(size, size);
    if (size == 0) return lap;

    Eigen::SparseMatrix<double> result(size, size);
    if (k >= 1) {
        const auto down = to_real(boundary(complex, k).matrix);
        result = Eigen::SparseMatrix<double>(down.transpose() * down);
    }
    if (k + 1 <= complex.max_dim() && complex.count(k + 1) > 0) {
        const auto up = to_real(boundary(complex, k + 1).matrix);
        result += Eigen::SparseMatrix<double>(up * up.transpose());
    }
    result.makeCompressed();
    lap.matrix = std::move(result);
    return lap;
}

Eigen::MatrixXd DiracOperator::block(const Eigen::MatrixXd& graded, int k) const {
    const auto begin = static_cast<Eigen::Index>(offsets.at(static_cast<std::size_t>(k)));
    const auto end = static_cast<Eigen::Index>(offsets.at(static_cast<std::size_t>(k) + 1));
    return graded.block(begin, begin, end - begin, end - begin);
}

DiracOperator dirac(const SimplicialComplex& complex) {
    DiracOperator op;
    const int top = complex.max_dim();
    op.offsets.assign(static_cast<std::size_t>(std::max(top, -1) + 2), 0);
    for (int k = 0; k <= top; ++k)
        op.offsets[static_cast<std::size_t>(k) + 1] =
            op.offsets[static_cast<std::size_t>(k)] + complex.count(k);
    const auto size = static_cast<Eigen::Index>(op.offsets.back());
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 1; k <= top; ++k) {
        const auto d = boundary(complex, k).matrix;
        const auto row0 = static_cast<Eigen::Index>(op.offsets[static_cast<std::size_t>(k) - 1]);
        const auto col0 = static_cast<Eigen::Index>(op.offsets[static_cast<std::size_t>(k)]);
        for (int c = 0; c < d.outerSize(); ++c) {
            for (Eigen::SparseMatrix<int>::InnerIterator it(d, c); it; ++it) {
                const double v = it.value();
                entries.emplace_back(row0 + it.row(), col0 + it.col(), v);
                entries.emplace_back(col0 + it.col(), row0 + it.row(), v);
            }
        }
    }
    op.matrix.resize(size, size);
    op.matrix.setFromTriplets(entries.begin(), entries.end());
    return op;
}

HarmonicBasis harmonic_basis(const Laplacian& lap, const ZeroTolerance& tol) {
    HarmonicBasis basis;
    basis.k = lap.k;
    basis.coordinates = lap.basis;
    const Eigen::Index size = lap.matrix.rows();
    if (size == 0) {
        basis.vectors.resize(0, 0);
        basis.threshold = tol.abs;
        return basis;
    }

    const Eigen::MatrixXd dense = Eigen::MatrixXd(lap.matrix);
    // eigenvalues alone are much cheaper; most Laplacians have no kernel
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    const bool need_vectors = [&] {
        if (solver.info() != Eigen::Success) return true;
        const Eigen::VectorXd& ev = solver.eigenvalues();
        return ev(0) < tol.abs + tol.rel * ev.cwiseAbs().maxCoeff();
    }();
    if (need_vectors) solver.compute(dense, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigensolver did not converge for Laplacian k=" << lap.k << " (size " << size
            << ", max |entry| " << dense.cwiseAbs().maxCoeff() << ", asymmetry "
            << (dense - dense.transpose()).cwiseAbs().maxCoeff() << ")";
        fail(ErrorKind::numerical, msg.str());
    }
    const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
    basis.lambda_max = eigenvalues.cwiseAbs().maxCoeff();
    basis.threshold = tol.abs + tol.rel * basis.lambda_max;

    Eigen::Index nullity = 0;
    while (nullity < size && eigenvalues(nullity) < basis.threshold) ++nullity;
    if (nullity == 0) {
        basis.vectors.resize(size, 0);
        return basis;
    }
    const Eigen::MatrixXd kernel = solver.eigenvectors().leftCols(nullity);

    // Pivoted Gram-Schmidt on the projector columns P e_i = kernel * c_i,
    // carried out in kernel coordinates c_i = kernel.row(i)^T.
    Eigen::MatrixXd residual = kernel.transpose();  // b x size
    Eigen::MatrixXd chosen(nullity, nullity);       // columns: basis in kernel coordinates
    for (Eigen::Index m = 0; m < nullity; ++m) {
        const Eigen::VectorXd norms = residual.colwise().squaredNorm();
        const double best = norms.maxCoeff();
        Eigen::Index pivot = 0;
        while (norms(pivot) < (1.0 - 1e-8) * best) ++pivot;
        const Eigen::VectorXd w = residual.col(pivot) / std::sqrt(norms(pivot));
        chosen.col(m) = w;
        residual -= w * (w.transpose() * residual);
    }
    basis.vectors = kernel * chosen;

    for (Eigen::Index m = 0; m < nullity; ++m) {
        auto column = basis.vectors.col(m);
        const double scale = column.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < size; ++i) {
            if (std::abs(column(i)) > 1e-10 * scale) {
                if (column(i) < 0.0) column = -column;
                break;
            }
        }
    }
    return basis;
}

double dot(const SubsetVector& a, const SubsetVector& b) {
    double sum = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->simplex < ib->simplex) {
            ++ia;
        } else if (ib->simplex < ia->simplex) {
            ++ib;
        } else {
            sum += ia->amplitude * ib->amplitude;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

PooledState zero_state(std::size_t vertex_count, int k) {
    PooledState s;
    s.vertex_count = vertex_count;
    s.k = k;
    return s;
}

PooledState pooled_state(const HarmonicBasis& basis, std::size_t vertex_count) {
    PooledState state = zero_state(vertex_count, basis.k);
    const Eigen::Index b = basis.vectors.cols();
    if (b == 0) return state;

    Eigen::VectorXd sum = basis.vectors.rowwise().sum() / std::sqrt(static_cast<double>(b));
    const double norm = sum.norm();
    if (!(norm > 0.0)) fail(ErrorKind::numerical, "pooled harmonic state has zero norm");
    if (std::abs(norm - 1.0) > 0.0) sum /= norm;
    state.entries = sparse_column(sum, basis.coordinates);
    state.basis.reserve(static_cast<std::size_t>(b));
    for (Eigen::Index m = 0; m < b; ++m)
        state.basis.push_back(sparse_column(basis.vectors.col(m), basis.coordinates));
    return state;
}

}  // namespace tdaq
