#ifndef TDAQ_FEATURES_HPP
#define TDAQ_FEATURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdaq/geometry.hpp"
#include "tdaq/spectral.hpp"

namespace tdaq {

enum class OverlapBasis {
    canonical,  // |<psi_a|psi_b>|^2 of the pooled states
    projector,  // tr(P_a P_b) / sqrt(b_a b_b), independent of the basis choice
};

/// How state overlaps are evaluated: exactly, or by emulating a swap test
/// with a finite number of shots.
struct OverlapMode {
    enum class Kind { exact, shots };

    Kind kind = Kind::exact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    OverlapBasis basis = OverlapBasis::canonical;

    static OverlapMode exact_mode(OverlapBasis basis = OverlapBasis::canonical);
    static OverlapMode shot_mode(std::uint64_t shots, std::uint64_t seed,
                                 OverlapBasis basis = OverlapBasis::canonical);

    /// "exact" or "shots:S"; throws on anything else or S = 0.
    static OverlapMode parse(const std::string& text, std::uint64_t seed,
                             OverlapBasis basis = OverlapBasis::canonical);
    std::string to_string() const;

    bool operator==(const OverlapMode&) const = default;
};

OverlapBasis parse_overlap_basis(const std::string& name);
std::string to_string(OverlapBasis basis);

/// Exact squared overlap with the empty-space conventions: both sentinels give
/// 1, exactly one sentinel gives 0. Bitwise identical states give exactly 1.
/// Throws integrity error "incomparable state spaces" if vertex counts differ.
double exact_overlap(const PooledState& a, const PooledState& b,
                     OverlapBasis basis = OverlapBasis::canonical);

/// Adjacent-scale persistence measure: exact canonical overlap.
double persistence_measure(const PooledState& a, const PooledState& b);

/// Swap-test emulation for a known squared overlap: S Bernoulli draws with
/// P(0) = (1 + overlap) / 2, returns clamp(2 * n0 / S - 1, 0, 1).
double estimate_overlap(double exact, std::uint64_t shots, std::uint64_t seed);
double estimate_overlap(const PooledState& a, const PooledState& b, std::uint64_t shots,
                        std::uint64_t seed, OverlapBasis basis = OverlapBasis::canonical);

/// Overlap under a mode; task_seed is only used in shot mode.
double overlap(const PooledState& a, const PooledState& b, const OverlapMode& mode,
               std::uint64_t task_seed);

/// Multi-scale harmonic features of one cloud:
///   states[k][j]     pooled harmonic state of Delta_k at scale j
///   betti(j, k)      dim ker Delta_k at scale j          (T x (K+1))
///   persistence(k,j) overlap of states at scales j, j+1  ((K+1) x (T-1))
/// Flattening for kernels is row-major: betti scale-major, persistence
/// dimension-major.
struct HarmonicFeatureSet {
    std::size_t vertex_count = 0;
    int max_dim = 0;
    ScaleGrid grid{std::vector<double>{0.0, 1.0}};
    ZeroTolerance tolerance;
    OverlapMode mode;
    std::string name;
    std::string shape;  // generator family when known, else empty

    std::vector<std::vector<PooledState>> states;
    Eigen::MatrixXi betti;
    Eigen::MatrixXd persistence;

    std::size_t scale_count() const { return grid.size(); }
    Eigen::VectorXd betti_vector() const;
    Eigen::VectorXd persistence_vector() const;
};

/// Feature sets can be compared by the kernels iff n, K and grid agree.
bool comparable(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b);
/// Throws integrity error "incomparable feature sets" otherwise.
void require_comparable(const HarmonicFeatureSet& a, const HarmonicFeatureSet& b);

/// Builds the Rips filtration up to dimension K+1 (capped at n-1), so that
/// ker Delta_K is true homology, then fills the three layers for k = 0..K.
HarmonicFeatureSet extract_features(const PointCloud& cloud, const ScaleGrid& grid, int max_dim,
                                    const OverlapMode& mode = {},
                                    const ZeroTolerance& tol = {});

/// Checks the layer invariants (shapes, ranges, sentinel agreement); throws
/// integrity error on violation.
void validate(const HarmonicFeatureSet& features);

}  // namespace tdaq

#endif
