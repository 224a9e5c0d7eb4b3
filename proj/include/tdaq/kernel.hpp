#ifndef TDAQ_KERNEL_HPP
#define TDAQ_KERNEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdaq/features.hpp"

namespace tdaq {

/// Weights and bandwidth of the mixed topological kernel
///   k = l1 * k_harmonic + l2 * k_betti + l3 * k_persist.
struct KernelConfig {
    double lambda_harmonic = 1.0;
    double lambda_betti = 1.0;
    double lambda_persist = 1.0;
    double gamma_band = 1.0;
    OverlapMode overlap;
    bool normalize_betti = false;

    /// Throws invalid_argument unless weights are >= 0 with positive sum and
    /// gamma_band > 0.
    void validate() const;
    int nonzero_weights() const;

    bool operator==(const KernelConfig&) const = default;
};

/// Sum over k and t of state overlaps at equal scale. pair_seed keys the
/// shot-noise stream for this pair and is ignored in exact mode.
double k_harmonic(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b,
                  const OverlapMode& mode = {}, std::uint64_t pair_seed = 0);

/// Inner product of the flattened Betti matrices, optionally cosine-normalized
/// (0 if either vector is zero).
double k_betti(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, bool normalize = false);

/// exp(-gamma_band * ||P_a - P_b||^2) over the flattened persistence layers.
double k_persist(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, double gamma_band);

double k_topo(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b, const KernelConfig& config,
              std::uint64_t pair_seed = 0);

/// Cheap content key used to derive shot-noise seeds for a pair of feature
/// sets; symmetric in its arguments.
std::uint64_t pair_seed(const KernelConfig& config, std::uint64_t key_a, std::uint64_t key_b);
std::uint64_t feature_key(const HarmonicFeatureSet& features);

/// Gram matrix of the mixed kernel with the PSD repair record.
struct KernelMatrix {
    Eigen::MatrixXd values;
    KernelConfig config;
    std::vector<std::string> ids;
    double min_eigenvalue = 0.0;  // before repair
    double shift_applied = 0.0;   // diagonal shift added by the repair

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// The three component Gram matrices over one corpus; any weighted mix is
/// then a linear combination. Used by cross-validation.
struct KernelComponents {
    Eigen::MatrixXd harmonic;
    Eigen::MatrixXd betti;
    Eigen::MatrixXd sq_persist_distance;  // ||P_i - P_j||^2

    Eigen::MatrixXd combine(double l_harmonic, double l_betti, double l_persist,
                            double gamma_band) const;
};

KernelComponents kernel_components(const std::vector<HarmonicFeatureSet>& features,
                                   const OverlapMode& mode, bool normalize_betti);

/// Symmetrizes, measures the minimum eigenvalue and, if it is below -1e-8,
/// adds (|lambda_min| + 1e-10) * I.
KernelMatrix repair_psd(Eigen::MatrixXd values, const KernelConfig& config,
                        std::vector<std::string> ids = {});

inline constexpr double kPsdTolerance = 1e-8;

/// Throws integrity error if any pair of feature sets is incomparable.
KernelMatrix gram(const std::vector<HarmonicFeatureSet>& features, const KernelConfig& config);

/// Row of kernel values k(X_i, x) against a corpus.
Eigen::VectorXd kernel_row(const std::vector<HarmonicFeatureSet>& corpus,
                           const HarmonicFeatureSet& x, const KernelConfig& config);

}  // namespace tdaq

#endif
