#include "tdaq/pipeline.hpp"

#include "tdaq/error.hpp"

namespace tdaq {

FeatureConfig FeatureConfig::of(const HarmonicFeatureSet& f) {
    FeatureConfig c;
    c.grid = f.grid;
    c.max_dim = f.max_dim;
    c.overlap = f.mode;
    c.tolerance = f.tolerance;
    return c;
}

Json to_json(const FeatureConfig& c) {
    return Json{{"scales", c.grid.values()},
                {"K", c.max_dim},
                {"overlap", to_json(c.overlap)},
                {"tolerance", to_json(c.tolerance)}};
}

FeatureConfig feature_config_from_json(const Json& j) {
    FeatureConfig c;
    c.grid = ScaleGrid(j.at("scales").get<std::vector<double>>());
    c.max_dim = j.at("K").get<int>();
    c.overlap = overlap_from_json(j.at("overlap"));
    c.tolerance = tolerance_from_json(j.at("tolerance"));
    return c;
}

StoredModel load_model(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) fail(ErrorKind::io, "no such file: " + path.string());
    StoredModel stored;
    auto features = std::make_shared<std::vector<HarmonicFeatureSet>>();
    try {
        const Json j = Json::parse(read_text(path));
        LsSvmModel& m = stored.model;
        m.class_count = j.at("L").get<int>();
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.gamma_reg = j.at("gamma_reg").get<double>();
        m.kernel = kernel_config_from_json(j.at("kernel_config"));
        if (!j.at("truncation").is_null()) m.kappa_eff = j.at("truncation").get<double>();
        for (const auto& block : j.at("per_class")) {
            const auto alphas = block.at("alphas").get<std::vector<double>>();
            m.classes.push_back({block.at("bias").get<double>(),
                                 Eigen::Map<const Eigen::VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size()))});
        }
        stored.training_digests = j.at("training_feature_digests").get<std::vector<std::string>>();
        stored.training_paths = j.at("training_features").get<std::vector<std::string>>();
        stored.feature_config = feature_config_from_json(j.at("feature_config"));
    } catch (const Json::exception& e) {
        fail(ErrorKind::io, "malformed model file " + path.string() + ": " + e.what());
    }
    const auto& m = stored.model;
    if (static_cast<int>(m.classes.size()) != m.class_count)
        fail(ErrorKind::integrity, "model class blocks do not match L");
    if (stored.training_paths.size() != stored.training_digests.size())
        fail(ErrorKind::integrity, "model lists a different number of training files and digests");
    for (const auto& block : m.classes)
        if (static_cast<std::size_t>(block.alphas.size()) != stored.training_paths.size())
            fail(ErrorKind::integrity, "model coefficients do not match the training set size");

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    for (std::size_t i = 0; i < stored.training_paths.size(); ++i) {
        std::filesystem::path p = stored.training_paths[i];
        if (p.is_relative()) p = base / p;
        HarmonicFeatureSet f = read_features(p);
        if (digest(f) != stored.training_digests[i])
            fail(ErrorKind::integrity, "digest mismatch between model and training features " + p.string());
        features->push_back(std::move(f));
    }
    stored.model.training = std::move(features);
    return stored;
}

void save_model(const std::filesystem::path& path, const StoredModel& stored) {
    write_text(path, model_to_json(stored.model, stored.training_paths, stored.training_digests,
                                   stored.feature_config).dump(2) + "\n");
}

HarmonicFeatureSet features_for_model(const StoredModel& stored, const PointCloud& cloud) {
    const auto& training = stored.model.training;
    if (training && !training->empty() && training->front().vertex_count != cloud.size())
        fail(ErrorKind::integrity, "incomparable feature sets: cloud has " + std::to_string(cloud.size()) +
                                       " points, model expects " + std::to_string(training->front().vertex_count));
    const auto& c = stored.feature_config;
    return extract_features(cloud, c.grid, c.max_dim, c.overlap, c.tolerance);
}

Prediction predict_features(const StoredModel& stored, const HarmonicFeatureSet& features) {
    const auto& training = stored.model.training;
    if (!training || training->empty()) fail(ErrorKind::integrity, "model has no training features");
    require_comparable(training->front(), features);
    return predict(stored.model, features);
}

Json to_json(const Prediction& p, const StoredModel& stored) {
    Json j{{"class_id", p.class_id}, {"decision_values", p.decision_values}, {"tie_broken", p.tie_broken}};
    const auto& names = stored.model.class_names;
    if (p.class_id >= 1 && static_cast<std::size_t>(p.class_id) <= names.size())
        j["class_name"] = names[static_cast<std::size_t>(p.class_id - 1)];
    return j;
}

}  // namespace tdaq
