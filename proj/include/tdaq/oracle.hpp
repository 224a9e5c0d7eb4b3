#ifndef TDAQ_ORACLE_HPP
#define TDAQ_ORACLE_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdaq/geometry.hpp"

namespace tdaq::oracle {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
    double birth = 0.0;
    double death = kInfinity;

    double persistence() const { return death - birth; }
    bool essential() const { return death == kInfinity; }
    auto operator<=>(const PersistencePair&) const = default;
};

/// Persistence pairs per homology dimension 0..max_dim. Pairs of zero
/// persistence are not recorded.
struct PersistenceDiagram {
    int max_dim = 0;
    std::vector<std::vector<PersistencePair>> dims;
    /// Stand-in for infinite deaths in distance computations: the largest
    /// filtration value.
    double clip_value = 0.0;
    std::size_t vertex_count = 0;
    std::size_t simplex_count = 0;

    const std::vector<PersistencePair>& points(int k) const;
    /// Number of k-dimensional points with birth <= scale < death.
    std::size_t persistent_betti(int k, double scale) const;
    /// Canonically sorted copy of dimension k.
    std::vector<PersistencePair> sorted(int k) const;
};

struct PhOptions {
    /// Only simplices with diameter <= threshold enter the filtration.
    std::optional<double> threshold;
    /// Shuffles the order of simplices with equal diameter and dimension
    /// (a valid filtration order for every seed).
    std::optional<std::uint64_t> tie_shuffle_seed;
};

/// Vietoris-Rips persistence over Z/2 by standard column reduction with
/// clearing. Simplices up to dimension max_dim + 1 are built so that every
/// reported dimension has its deaths. Ordering: diameter, then dimension, then
/// lexicographic vertex order. Throws invalid_argument if max_dim + 1 > n.
PersistenceDiagram compute_ph(const DistanceMatrix& distances, int max_dim,
                              const PhOptions& options = {});

/// Number of compute_ph calls made in this process.
std::uint64_t reduction_invocations();

/// Bottleneck distance between the k-th dimensions, infinite deaths replaced
/// by each diagram's clip value. Binary search over candidate radii with a
/// bipartite perfect-matching feasibility test.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int k);
double bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b);

/// Max over dimensions 0..min(max_dim) of the bottleneck distances.
double max_bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b);

enum class AssignmentPolicy { generator_label, nearest_exemplar };

struct CatalogEntry {
    int class_id = 0;
    std::string name;
    PersistenceDiagram exemplar;
};

/// Finite set of diagram classes.
class DiagramClassCatalog {
public:
    /// Throws invalid_argument unless exemplars are pairwise more than 2r apart.
    DiagramClassCatalog(std::vector<CatalogEntry> entries, double radius,
                        AssignmentPolicy policy = AssignmentPolicy::generator_label);

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    double radius() const { return radius_; }
    AssignmentPolicy policy() const { return policy_; }
    std::optional<int> class_of(const std::string& name) const;

private:
    std::vector<CatalogEntry> entries_;
    double radius_;
    AssignmentPolicy policy_;
};

struct Assignment {
    int class_id = 0;
    double distance = 0.0;  // 0 under generator_label
};

/// generator_label: the class whose name is generator_shape.
/// nearest_exemplar: argmin of max_bottleneck; throws integrity error
/// "out of catalog" if the best distance exceeds the radius.
Assignment assign_class(const PersistenceDiagram& diagram, const DiagramClassCatalog& catalog,
                        const std::string& generator_shape = {});

nlohmann::json to_json(const PersistenceDiagram& diagram);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

}  // namespace tdaq::oracle

#endif
