#ifndef TDAQ_PIPELINE_HPP
#define TDAQ_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "tdaq/features.hpp"
#include "tdaq/serialize.hpp"
#include "tdaq/svm.hpp"

namespace tdaq {

/// Everything needed to re-extract features comparable with a model's
/// training set.
struct FeatureConfig {
    ScaleGrid grid{std::vector<double>{0.0, 1.0}};
    int max_dim = 1;
    OverlapMode overlap;
    ZeroTolerance tolerance;

    static FeatureConfig of(const HarmonicFeatureSet& features);
};

Json to_json(const FeatureConfig& config);
FeatureConfig feature_config_from_json(const Json& j);

/// A trained model together with its stored feature configuration.
struct StoredModel {
    LsSvmModel model;
    FeatureConfig feature_config;
    std::vector<std::string> training_paths;
    std::vector<std::string> training_digests;
};

/// Loads a model file and its training features (paths relative to the model
/// file's directory). Throws integrity error (exit 3) if a training feature
/// file's digest differs from the one recorded in the model.
StoredModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const StoredModel& stored);

/// Features of a fresh cloud under the model's configuration.
HarmonicFeatureSet features_for_model(const StoredModel& stored, const PointCloud& cloud);

/// Prediction from a feature set; throws integrity error if it is not
/// comparable with the training features.
Prediction predict_features(const StoredModel& stored, const HarmonicFeatureSet& features);

Json to_json(const Prediction& prediction, const StoredModel& stored);

}  // namespace tdaq

#endif
