#include "tdaq/features.hpp"

#include <algorithm>
#include <cmath>

#include "tdaq/complex.hpp"
#include "tdaq/error.hpp"
#include "tdaq/parallel.hpp"
#include "tdaq/rng.hpp"

namespace tdaq {

OverlapMode OverlapMode::exact_mode(OverlapBasis basis) {
    OverlapMode m;
    m.basis = basis;
    return m;
}

OverlapMode OverlapMode::shot_mode(std::uint64_t shots, std::uint64_t seed, OverlapBasis basis) {
    if (shots < 1) fail(ErrorKind::invalid_argument, "shot count must be >= 1");
    OverlapMode m;
    m.kind = Kind::shots;
    m.shots = shots;
    m.seed = seed;
    m.basis = basis;
    return m;
}

OverlapMode OverlapMode::parse(const std::string& text, std::uint64_t seed, OverlapBasis basis) {
    if (text == "exact") return exact_mode(basis);
    const std::string prefix = "shots:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string count = text.substr(prefix.size());
        std::size_t used = 0;
        unsigned long long shots = 0;
        try {
            shots = std::stoull(count, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == count.size() && !count.empty() && count[0] != '-' && shots >= 1)
            return shot_mode(shots, seed, basis);
    }
    fail(ErrorKind::invalid_argument, "overlap mode must be 'exact' or 'shots:S' with S >= 1, got '" +
                                          text + "'");
}

std::string OverlapMode::to_string() const {
    return kind == Kind::exact ? "exact" : "shots:" + std::to_string(shots);
}

OverlapBasis parse_overlap_basis(const std::string& name) {
    if (name == "canonical") return OverlapBasis::canonical;
    if (name == "projector") return OverlapBasis::projector;
    fail(ErrorKind::invalid_argument, "unknown overlap basis: " + name);
}

std::string to_string(OverlapBasis basis) {
    return basis == OverlapBasis::canonical ? "canonical" : "projector";
}

double exact_overlap(const PooledState& a, const PooledState& b, OverlapBasis basis) {
    if (a.vertex_count != b.vertex_count)
        fail(ErrorKind::integrity, "incomparable state spaces");
    if (a.is_zero() && b.is_zero()) return 1.0;
    if (a.is_zero() || b.is_zero()) return 0.0;
    if (a == b) return 1.0;
    double value = 0.0;
    if (basis == OverlapBasis::canonical) {
        const double d = dot(a.entries, b.entries);
        value = d * d;
    } else {
        for (const auto& u : a.basis)
            for (const auto& w : b.basis) {
                const double d = dot(u, w);
                value += d * d;
            }
        value /= std::sqrt(static_cast<double>(a.betti()) * static_cast<double>(b.betti()));
    }
    return value;
}

double persistence_measure(const PooledState& a, const PooledState& b) {
    return exact_overlap(a, b, OverlapBasis::canonical);
}

double estimate_overlap(double exact, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) fail(ErrorKind::invalid_argument, "shot count must be >= 1");
    const double p0 = 0.5 * (1.0 + std::clamp(exact, 0.0, 1.0));
    Rng rng(seed);
    std::uint64_t zeros = 0;
    for (std::uint64_t s = 0; s < shots; ++s)
        if (rng.uniform() < p0) ++zeros;
    const double estimate = 2.0 * static_cast<double>(zeros) / static_cast<double>(shots) - 1.0;
    return std::clamp(estimate, 0.0, 1.0);
}

double estimate_overlap(const PooledState& a, const PooledState& b, std::uint64_t shots,
                        std::uint64_t seed, OverlapBasis basis) {
    return estimate_overlap(exact_overlap(a, b, basis), shots, seed);
}

double overlap(const PooledState& a, const PooledState& b, const OverlapMode& mode,
               std::uint64_t task_seed) {
    if (mode.kind == OverlapMode::Kind::exact) return exact_overlap(a, b, mode.basis);
    return estimate_overlap(a, b, mode.shots, task_seed, mode.basis);
}

Eigen::VectorXd HarmonicFeatureSet::betti_vector() const {
    Eigen::VectorXd v(betti.size());
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < betti.rows(); ++j)
        for (Eigen::Index k = 0; k < betti.cols(); ++k) v(idx++) = betti(j, k);
    return v;
}

Eigen::VectorXd HarmonicFeatureSet::persistence_vector() const {
    Eigen::VectorXd v(persistence.size());
    Eigen::Index idx = 0;
    for (Eigen::Index k = 0; k < persistence.rows(); ++k)
        for (Eigen::Index j = 0; j < persistence.cols(); ++j) v(idx++) = persistence(k, j);
    return v;
}

bool comparable(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b) {
    if (a.vertex_count != b.vertex_count || a.max_dim != b.max_dim) return false;
    if (a.grid.size() != b.grid.size()) return false;
    for (std::size_t j = 0; j < a.grid.size(); ++j) {
        const double scale = std::max({1.0, std::abs(a.grid[j]), std::abs(b.grid[j])});
        if (std::abs(a.grid[j] - b.grid[j]) > 1e-12 * scale) return false;
    }
    return true;
}

void require_comparable(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b) {
    if (!comparable(a, b)) fail(ErrorKind::integrity, "incomparable feature sets");
}

namespace {

PooledState constant_state(std::size_t n) {
    HarmonicBasis basis;
    basis.k = 0;
    for (std::size_t v = 0; v < n; ++v) basis.coordinates.push_back(Simplex{{static_cast<Vertex>(v)}});
    basis.vectors = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), 1, 1.0 / std::sqrt(static_cast<double>(n)));
    return pooled_state(basis, n);
}

}  // namespace

HarmonicFeatureSet extract_features(const PointCloud& cloud, const ScaleGrid& grid, int max_dim,
                                    const OverlapMode& mode, const ZeroTolerance& tol) {
    if (max_dim < 0) fail(ErrorKind::invalid_argument, "max dimension must be >= 0");
    const std::size_t n = cloud.size();
    const std::size_t T = grid.size();
    const auto K = static_cast<std::size_t>(max_dim);
    const int complex_dim = std::min(max_dim + 1, static_cast<int>(n) - 1);

    const FiltrationComplex filtration = build_vr(pairwise_distances(cloud), grid, complex_dim);

    HarmonicFeatureSet out;
    out.vertex_count = n;
    out.max_dim = max_dim;
    out.grid = grid;
    out.tolerance = tol;
    out.mode = mode;
    out.name = cloud.metadata().name;
    if (cloud.metadata().generator) out.shape = to_string(cloud.metadata().generator->shape);
    out.states.assign(K + 1, std::vector<PooledState>(T));
    out.betti = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(K + 1));
    out.persistence = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K + 1),
                                            static_cast<Eigen::Index>(T - 1));

    // Delta_k at scale j only depends on the k- and (k+1)-simplices; when both
    // sets are unchanged from the previous scale the state is reused.
    std::vector<std::vector<std::size_t>> representative(K + 1, std::vector<std::size_t>(T));
    struct Task {
        std::size_t k, j;
    };
    std::vector<Task> tasks;
    for (std::size_t k = 0; k <= K; ++k) {
        for (std::size_t j = 0; j < T; ++j) {
            const int kk = static_cast<int>(k);
            const bool same = j > 0 && filtration.count(kk, j) == filtration.count(kk, j - 1) &&
                              filtration.count(kk + 1, j) == filtration.count(kk + 1, j - 1);
            representative[k][j] = same ? representative[k][j - 1] : j;
            if (!same && kk <= complex_dim) tasks.push_back({k, j});
        }
    }

    const auto full_simplex = [&](std::size_t j) {
        return n >= 2 && filtration.count(1, j) == n * (n - 1) / 2;
    };
    std::vector<SimplicialComplex> complexes(T);
    parallel_for(T, [&](std::size_t j) { complexes[j] = filtration.at(j); });

    parallel_for(tasks.size(), [&](std::size_t t) {
        const auto [k, j] = tasks[t];
        try {
            if (full_simplex(j)) {
                // the full simplex is contractible: only the constant 0-chain is harmonic
                out.states[k][j] = k == 0 ? constant_state(n) : zero_state(n, static_cast<int>(k));
                return;
            }
            const Laplacian lap = laplacian(complexes[j], static_cast<int>(k), j);
            out.states[k][j] = pooled_state(harmonic_basis(lap, tol), n);
        } catch (const Error& e) {
            fail(e.kind(), std::string(e.what()) + " (k=" + std::to_string(k) +
                               ", scale index " + std::to_string(j) + ")");
        }
    });
    for (std::size_t k = 0; k <= K; ++k) {
        for (std::size_t j = 0; j < T; ++j) {
            if (static_cast<int>(k) > complex_dim) {
                out.states[k][j] = zero_state(n, static_cast<int>(k));
            } else if (representative[k][j] != j) {
                out.states[k][j] = out.states[k][representative[k][j]];
            }
            out.betti(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                static_cast<int>(out.states[k][j].betti());
        }
    }
    for (std::size_t k = 0; k <= K; ++k) {
        for (std::size_t j = 0; j + 1 < T; ++j) {
            out.persistence(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                overlap(out.states[k][j], out.states[k][j + 1], mode, derive_seed(mode.seed, k, j));
        }
    }
    return out;
}

void validate(const HarmonicFeatureSet& f) {
    const auto T = static_cast<Eigen::Index>(f.grid.size());
    const auto levels = static_cast<Eigen::Index>(f.max_dim) + 1;
    auto bad = [](const std::string& what) { fail(ErrorKind::integrity, "invalid feature set: " + what); };
    if (f.max_dim < 0) bad("negative max dimension");
    if (f.betti.rows() != T || f.betti.cols() != levels) bad("betti matrix shape");
    if (f.persistence.rows() != levels || f.persistence.cols() != T - 1) bad("persistence matrix shape");
    if (f.states.size() != static_cast<std::size_t>(levels)) bad("state levels");
    if ((f.betti.array() < 0).any()) bad("negative betti number");
    if (f.vertex_count > 0 && f.betti(T - 1, 0) < 1) bad("beta_0 at the largest scale is zero");
    if ((f.persistence.array() < -1e-9).any() || (f.persistence.array() > 1.0 + 1e-9).any())
        bad("persistence measure outside [0, 1]");
    for (Eigen::Index k = 0; k < levels; ++k) {
        const auto& row = f.states[static_cast<std::size_t>(k)];
        if (row.size() != static_cast<std::size_t>(T)) bad("state scales");
        for (Eigen::Index j = 0; j < T; ++j) {
            const auto& s = row[static_cast<std::size_t>(j)];
            if (s.vertex_count != f.vertex_count) bad("state vertex count");
            if (static_cast<Eigen::Index>(s.betti()) != f.betti(j, k)) bad("state and betti disagree");
            if (!s.is_zero() && std::abs(dot(s.entries, s.entries) - 1.0) > 1e-9)
                bad("state not unit norm");
        }
    }
}

}  // namespace tdaq
