#ifndef TDAQ_SERIALIZE_HPP
#define TDAQ_SERIALIZE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdaq/features.hpp"
#include "tdaq/geometry.hpp"
#include "tdaq/kernel.hpp"
#include "tdaq/svm.hpp"

namespace tdaq {

using Json = nlohmann::json;
namespace fs = std::filesystem;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Throws io error if unreadable.
std::string sha256_file(const fs::path& path);

std::string read_text(const fs::path& path);
/// Writes atomically-enough for our purposes (truncate + write); throws io.
void write_text(const fs::path& path, std::string_view text);

// Point clouds: one point per line, comma-separated, no header. Metadata in a
// sidecar "<stem>.meta.json" next to the CSV.
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(std::string_view text, CloudMetadata metadata = {});
fs::path sidecar_path(const fs::path& csv);
Json to_json(const GeneratorRecord& record);
GeneratorRecord generator_from_json(const Json& j);
void write_cloud(const fs::path& csv, const PointCloud& cloud);
/// Reads the CSV and, if present, its sidecar. Throws io on malformed input.
PointCloud read_cloud(const fs::path& csv);

// Feature sets.
Json to_json(const ZeroTolerance& tol);
ZeroTolerance tolerance_from_json(const Json& j);
Json to_json(const OverlapMode& mode);
OverlapMode overlap_from_json(const Json& j);
Json to_json(const HarmonicFeatureSet& features);
HarmonicFeatureSet features_from_json(const Json& j);
/// Canonical serialization (sorted keys, no whitespace).
std::string canonical_dump(const Json& j);
/// SHA-256 of the canonical serialization.
std::string digest(const HarmonicFeatureSet& features);
HarmonicFeatureSet read_features(const fs::path& path);
void write_features(const fs::path& path, const HarmonicFeatureSet& features);

// Kernels.
Json to_json(const KernelConfig& config);
KernelConfig kernel_config_from_json(const Json& j);
Json to_json(const KernelMatrix& gram);

// Models. training_paths are stored so prediction can reload the training
// features; digests let it verify them.
struct FeatureConfig;
Json model_to_json(const LsSvmModel& model, const std::vector<std::string>& training_paths,
                   const std::vector<std::string>& training_digests,
                   const FeatureConfig& feature_config);

}  // namespace tdaq

#endif
