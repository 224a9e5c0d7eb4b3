#include "tdaq/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/Eigenvalues>

#include "tdaq/error.hpp"
#include "tdaq/parallel.hpp"
#include "tdaq/rng.hpp"

namespace tdaq {

void KernelConfig::validate() const {
    const double weights[] = {lambda_harmonic, lambda_betti, lambda_persist};
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            fail(ErrorKind::invalid_argument, "kernel weights must be non-negative");
    if (!(lambda_harmonic + lambda_betti + lambda_persist > 0.0))
        fail(ErrorKind::invalid_argument, "kernel weights must not all be zero");
    if (!(gamma_band > 0.0) || !std::isfinite(gamma_band))
        fail(ErrorKind::invalid_argument, "gamma_band must be positive");
}

int KernelConfig::nonzero_weights() const {
    return (lambda_harmonic != 0.0) + (lambda_betti != 0.0) + (lambda_persist != 0.0);
}

double k_harmonic(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, const OverlapMode& mode,
                  std::uint64_t pair_seed) {
    require_comparable(a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        for (std::size_t t = 0; t < a.grid.size(); ++t)
            sum += overlap(a.states[k][t], b.states[k][t], mode, derive_seed(pair_seed, k, t));
    return sum;
}

double k_betti(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, bool normalize) {
    if (a.betti.rows() != b.betti.rows() || a.betti.cols() != b.betti.cols())
        fail(ErrorKind::integrity, "incomparable feature sets: betti shapes differ");
    const Eigen::VectorXd va = a.betti_vector();
    const Eigen::VectorXd vb = b.betti_vector();
    const double value = va.dot(vb);
    if (!normalize) return value;
    const double norms = va.norm() * vb.norm();
    return norms > 0.0 ? value / norms : 0.0;
}

double k_persist(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, double gamma_band) {
    if (a.persistence.rows() != b.persistence.rows() || a.persistence.cols() != b.persistence.cols())
        fail(ErrorKind::integrity, "incomparable feature sets: persistence shapes differ");
    if (!(gamma_band > 0.0)) fail(ErrorKind::invalid_argument, "gamma_band must be positive");
    const double sq = (a.persistence_vector() - b.persistence_vector()).squaredNorm();
    return std::exp(-gamma_band * sq);
}

double k_topo(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, const KernelConfig& config,
              std::uint64_t pair_seed) {
    config.validate();
    double value = 0.0;
    if (config.lambda_harmonic != 0.0)
        value += config.lambda_harmonic * k_harmonic(a, b, config.overlap, pair_seed);
    else
        require_comparable(a, b);
    if (config.lambda_betti != 0.0) value += config.lambda_betti * k_betti(a, b, config.normalize_betti);
    if (config.lambda_persist != 0.0) value += config.lambda_persist * k_persist(a, b, config.gamma_band);
    return value;
}

std::uint64_t feature_key(const HarmonicFeatureSet& f) {
    std::uint64_t h = hash_string(f.name);
    auto mix_double = [&h](double x) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        h = mix_seed(h ^ bits);
    };
    for (Eigen::Index i = 0; i < f.betti.size(); ++i) h = mix_seed(h ^ static_cast<std::uint64_t>(f.betti.data()[i]));
    for (Eigen::Index i = 0; i < f.persistence.size(); ++i) mix_double(f.persistence.data()[i]);
    for (const auto& level : f.states)
        for (const auto& s : level)
            for (const auto& e : s.entries) mix_double(e.amplitude);
    return h;
}

std::uint64_t pair_seed(const KernelConfig& config, std::uint64_t key_a, std::uint64_t key_b) {
    return derive_seed(config.overlap.seed, std::min(key_a, key_b), std::max(key_a, key_b));
}

Eigen::MatrixXd KernelComponents::combine(double l_harmonic, double l_betti, double l_persist,
                                          double gamma_band) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(harmonic.rows(), harmonic.cols());
    if (l_harmonic != 0.0) out += l_harmonic * harmonic;
    if (l_betti != 0.0) out += l_betti * betti;
    if (l_persist != 0.0) out += l_persist * (-gamma_band * sq_persist_distance.array()).exp().matrix();
    return out;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t m) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(m * (m + 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);
    return pairs;
}

void require_all_comparable(const std::vector<HarmonicFeatureSet>& features) {
    for (std::size_t i = 1; i < features.size(); ++i) require_comparable(features[0], features[i]);
}

}  // namespace

KernelComponents kernel_components(const std::vector<HarmonicFeatureSet>& features,
                                   const OverlapMode& mode, bool normalize_betti) {
    require_all_comparable(features);
    const auto m = static_cast<Eigen::Index>(features.size());
    KernelComponents c;
    c.harmonic.resize(m, m);
    c.betti.resize(m, m);
    c.sq_persist_distance.resize(m, m);
    std::vector<std::uint64_t> keys(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) keys[i] = feature_key(features[i]);
    KernelConfig seeded;
    seeded.overlap = mode;
    const auto pairs = upper_pairs(features.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const auto& a = features[i];
        const auto& b = features[j];
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        const double h = k_harmonic(a, b, mode, pair_seed(seeded, keys[i], keys[j]));
        const double be = k_betti(a, b, normalize_betti);
        const double sq = (a.persistence_vector() - b.persistence_vector()).squaredNorm();
        c.harmonic(ii, jj) = c.harmonic(jj, ii) = h;
        c.betti(ii, jj) = c.betti(jj, ii) = be;
        c.sq_persist_distance(ii, jj) = c.sq_persist_distance(jj, ii) = sq;
    });
    return c;
}

KernelMatrix repair_psd(Eigen::MatrixXd values, const KernelConfig& config, std::vector<std::string> ids) {
    KernelMatrix out;
    out.config = config;
    out.ids = std::move(ids);
    out.values = 0.5 * (values + values.transpose());
    if (out.values.rows() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.values, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorKind::numerical, "Gram eigenvalue computation failed");
    out.min_eigenvalue = solver.eigenvalues()(0);
    if (out.min_eigenvalue < -kPsdTolerance) {
        out.shift_applied = std::abs(out.min_eigenvalue) + 1e-10;
        out.values.diagonal().array() += out.shift_applied;
    }
    return out;
}

KernelMatrix gram(const std::vector<HarmonicFeatureSet>& features, const KernelConfig& config) {
    config.validate();
    require_all_comparable(features);
    const auto m = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd values(m, m);
    std::vector<std::uint64_t> keys(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) keys[i] = feature_key(features[i]);
    const auto pairs = upper_pairs(features.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = k_topo(features[i], features[j], config, pair_seed(config, keys[i], keys[j]));
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    std::vector<std::string> ids;
    for (const auto& f : features) ids.push_back(f.name);
    return repair_psd(std::move(values), config, std::move(ids));
}

Eigen::VectorXd kernel_row(const std::vector<HarmonicFeatureSet>& corpus, const HarmonicFeatureSet& x,
                           const KernelConfig& config) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(corpus.size()));
    const std::uint64_t key_x = feature_key(x);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        row(static_cast<Eigen::Index>(i)) =
            k_topo(corpus[i], x, config, pair_seed(config, feature_key(corpus[i]), key_x));
    return row;
}

}  // namespace tdaq
