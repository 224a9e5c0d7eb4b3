#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cli_common.hpp"
#include "tdaq/error.hpp"
#include "tdaq/oracle.hpp"
#include "tdaq/pipeline.hpp"

namespace tdaq::cli {

namespace {

KernelConfig kernel_config(const KernelOptions& o) {
    if (o.lambda.size() != 3) fail(ErrorKind::invalid_argument, "--lambda needs three weights");
    KernelConfig c;
    c.lambda_harmonic = o.lambda[0];
    c.lambda_betti = o.lambda[1];
    c.lambda_persist = o.lambda[2];
    c.gamma_band = o.gamma_band;
    c.normalize_betti = o.normalize_betti;
    c.overlap = OverlapMode::parse(o.overlap, o.seed, parse_overlap_basis(o.basis));
    c.validate();
    return c;
}

void add_kernel_options(CLI::App& app, KernelOptions& o) {
    app.add_option("--lambda", o.lambda, "Weights of the harmonic, Betti and persistence kernels")
        ->expected(3)
        ->delimiter(',');
    app.add_option("--gamma-band", o.gamma_band, "Bandwidth of the persistence kernel");
    app.add_flag("--normalize-betti", o.normalize_betti, "Cosine-normalize the Betti kernel");
    app.add_option("--kernel-overlap", o.overlap, "Harmonic-kernel overlaps: exact | shots:S");
    app.add_option("--kernel-basis", o.basis, "canonical | projector");
    app.add_option("--kernel-seed", o.seed, "Seed for kernel shot noise");
}

std::vector<HarmonicFeatureSet> read_all(const std::vector<fs::path>& paths) {
    std::vector<HarmonicFeatureSet> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(read_features(p));
    return out;
}

std::string relative_to(const fs::path& target, const fs::path& base_dir) {
    const fs::path abs_target = fs::absolute(target).lexically_normal();
    const fs::path abs_base = fs::absolute(base_dir.empty() ? fs::path(".") : base_dir).lexically_normal();
    return abs_target.lexically_relative(abs_base).generic_string();
}

}  // namespace

// ---------------------------------------------------------------- gen

void add_gen(CLI::App& app, GenOptions& o) {
    app.add_option("--shape", o.shape, "circle | two_circles | sphere | torus | blob")->required();
    app.add_option("--n", o.n, "Number of points")->required();
    app.add_option("--noise", o.noise, "Per-coordinate Gaussian noise amplitude");
    app.add_option("--seed", o.seed, "64-bit seed");
    app.add_option("--out", o.out, "Output CSV")->required();
}

void run_gen(const GenOptions& o) {
    Stopwatch clock;
    const PointCloud cloud = generate(parse_shape(o.shape), o.n, o.noise, o.seed);
    write_cloud(o.out, cloud);
    RunManifest manifest("gen");
    manifest.set_config(Json{{"shape", o.shape}, {"n", o.n}, {"noise", o.noise}, {"seed", o.seed}, {"out", o.out}});
    manifest.add_seed("generator", o.seed);
    manifest.add_output(o.out);
    manifest.add_output(sidecar_path(o.out));
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

// ---------------------------------------------------------------- features

void add_features(CLI::App& app, FeaturesOptions& o) {
    app.add_option("--input", o.input, "Point-cloud CSV")->required();
    app.add_option("--scales", o.scales, "Number of grid scales T");
    app.add_option("--max-dim", o.max_dim, "Maximum homology dimension K");
    app.add_option("--grid", o.grid, "uniform | quantile");
    app.add_option("--scale-max", o.scale_max,
                   "Upper end of a uniform grid shared by a corpus (default: the cloud's diameter)");
    app.add_option("--overlap", o.overlap, "exact | shots:S");
    app.add_option("--basis", o.basis, "canonical | projector");
    app.add_option("--seed", o.seed, "Seed for shot-noise emulation");
    app.add_option("--out", o.out, "Feature JSON")->required();
}

void run_features(const FeaturesOptions& o) {
    Stopwatch clock;
    const PointCloud cloud = read_cloud(o.input);
    if (o.max_dim < 0 || static_cast<std::size_t>(o.max_dim) >= cloud.size())
        fail(ErrorKind::invalid_argument, "--max-dim must satisfy 0 <= K < n (n = " + std::to_string(cloud.size()) + ")");
    const OverlapMode mode = OverlapMode::parse(o.overlap, o.seed, parse_overlap_basis(o.basis));
    const DistanceMatrix distances = pairwise_distances(cloud);
    const ScaleGrid grid = o.scale_max ? uniform_grid(*o.scale_max, o.scales)
                                       : make_scale_grid(distances, o.scales, parse_grid_policy(o.grid));
    const HarmonicFeatureSet features = extract_features(cloud, grid, o.max_dim, mode);
    write_features(o.out, features);

    RunManifest manifest("features");
    manifest.set_config(Json{{"input", o.input},  {"scales", o.scales},   {"max_dim", o.max_dim},
                             {"grid", o.grid},    {"scale_max", o.scale_max ? Json(*o.scale_max) : Json(nullptr)},
                             {"overlap", o.overlap}, {"basis", o.basis}, {"out", o.out}});
    manifest.add_seed("overlap", o.seed);
    manifest.add_input(o.input);
    manifest.add_output(o.out);
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

// ---------------------------------------------------------------- gram

void add_gram(CLI::App& app, GramOptions& o) {
    app.add_option("--features", o.features, "Feature files or glob patterns")->required();
    add_kernel_options(app, o.kernel);
    app.add_option("--out", o.out, "Gram matrix JSON")->required();
}

void run_gram(const GramOptions& o) {
    Stopwatch clock;
    const auto paths = expand_patterns(o.features);
    const auto features = read_all(paths);
    const KernelMatrix g = gram(features, kernel_config(o.kernel));
    write_text(o.out, to_json(g).dump(2) + "\n");
    RunManifest manifest("gram");
    manifest.set_config(Json{{"features", o.features}, {"kernel", to_json(g.config)}, {"out", o.out}});
    manifest.add_seed("kernel", o.kernel.seed);
    for (const auto& p : paths) manifest.add_input(p);
    manifest.add_output(o.out);
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

// ---------------------------------------------------------------- train

void add_train(CLI::App& app, TrainOptions& o) {
    app.add_option("--features", o.features, "Feature files or glob patterns")->required();
    auto* labels = app.add_option("--labels", o.labels, "JSON object mapping feature file (path, name or stem) to class");
    auto* from_gen = app.add_flag("--labels-from-generator", o.labels_from_generator,
                                  "Use the generator family recorded in each feature file");
    labels->excludes(from_gen);
    app.add_option("--cv", o.cv, "Cross-validation grid: standard | quick | off");
    app.add_option("--gamma-reg", o.gamma_reg, "Regularization (used directly with --cv off)");
    app.add_option("--folds", o.folds, "Cross-validation folds");
    app.add_option("--seed", o.seed, "Fold assignment seed");
    app.add_option("--kappa-eff", o.kappa_eff, "Spectral truncation of the LS-SVM system");
    add_kernel_options(app, o.kernel);
    app.add_option("--out", o.out, "Model JSON")->required();
}

void run_train(const TrainOptions& o) {
    Stopwatch clock;
    if (o.labels.empty() && !o.labels_from_generator)
        fail(ErrorKind::invalid_argument, "one of --labels or --labels-from-generator is required");
    const auto paths = expand_patterns(o.features);
    auto features = read_all(paths);

    std::vector<std::string> raw;
    std::vector<int> numeric;
    if (o.labels_from_generator) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (features[i].shape.empty())
                fail(ErrorKind::invalid_argument, "no generator label in " + paths[i].string());
            raw.push_back(features[i].shape);
        }
    } else {
        const Json map = Json::parse(read_text(o.labels));
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const std::string keys[] = {paths[i].string(), paths[i].filename().string(), paths[i].stem().string(),
                                        features[i].name};
            const Json* value = nullptr;
            for (const auto& k : keys)
                if (map.contains(k)) {
                    value = &map.at(k);
                    break;
                }
            if (!value) fail(ErrorKind::invalid_argument, "label/feature count mismatch: no label for " + paths[i].string());
            if (value->is_number_integer())
                numeric.push_back(value->get<int>());
            else
                raw.push_back(value->get<std::string>());
        }
        if (!numeric.empty() && !raw.empty())
            fail(ErrorKind::invalid_argument, "labels must be all class names or all class ids");
        if (map.size() != paths.size())
            fail(ErrorKind::invalid_argument, "label/feature count mismatch: " + std::to_string(map.size()) +
                                                  " labels for " + std::to_string(paths.size()) + " feature files");
    }

    TrainingSet set;
    if (!raw.empty()) {
        std::set<std::string> names(raw.begin(), raw.end());
        set.class_names.assign(names.begin(), names.end());
        for (const auto& r : raw)
            set.labels.push_back(static_cast<int>(std::find(set.class_names.begin(), set.class_names.end(), r) -
                                                  set.class_names.begin()) + 1);
    } else {
        set.labels = numeric;
        const int top = *std::max_element(numeric.begin(), numeric.end());
        for (int c = 1; c <= top; ++c) set.class_names.push_back("class-" + std::to_string(c));
    }
    set.class_count = static_cast<int>(set.class_names.size());
    if (std::set<int>(set.labels.begin(), set.labels.end()).size() < 2)
        fail(ErrorKind::invalid_argument, "need >= 2 classes");
    set.features = std::move(features);
    set.validate();

    KernelConfig config = kernel_config(o.kernel);
    double gamma_reg = o.gamma_reg;
    Json report;
    if (o.cv != "off") {
        CvGrid grid;
        if (o.cv == "standard") {
            grid = CvGrid::standard();
        } else if (o.cv == "quick") {
            grid.lambdas = {{1, 1, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}};
            grid.gamma_bands = {1.0};
            grid.gamma_regs = {1.0, 16.0, 256.0};
        } else {
            fail(ErrorKind::invalid_argument, "--cv must be standard, quick or off");
        }
        const CvResult cv = cross_validate(set, grid, o.folds, o.seed, config);
        config = cv.best;
        gamma_reg = cv.best_gamma_reg;
        Json table = Json::array();
        for (const auto& s : cv.table)
            table.push_back(Json{{"kernel", to_json(s.config)}, {"gamma_reg", s.gamma_reg},
                                 {"fold_accuracy", s.fold_accuracy}, {"mean_accuracy", s.mean_accuracy}});
        report["cv"] = Json{{"folds", o.folds}, {"best_accuracy", cv.best_accuracy}, {"table", table}};
    }
    const KernelMatrix g = gram(set.features, config);
    StoredModel stored;
    stored.model = train(g, set, gamma_reg, o.kappa_eff);
    stored.feature_config = FeatureConfig::of(set.features.front());
    const fs::path model_dir = fs::path(o.out).parent_path();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        stored.training_paths.push_back(relative_to(paths[i], model_dir));
        stored.training_digests.push_back(digest(set.features[i]));
    }
    save_model(o.out, stored);

    int correct = 0;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (predict_from_row(stored.model, g.values.col(static_cast<Eigen::Index>(i))).class_id == set.labels[i]) ++correct;
    report["training_accuracy"] = static_cast<double>(correct) / static_cast<double>(set.size());
    report["kernel"] = to_json(config);
    report["gamma_reg"] = gamma_reg;
    report["shift_applied"] = g.shift_applied;
    report["min_eigenvalue"] = g.min_eigenvalue;
    report["class_names"] = set.class_names;
    fs::path report_path = o.out;
    report_path.replace_extension(".report.json");
    write_text(report_path, report.dump(2) + "\n");

    RunManifest manifest("train");
    manifest.set_config(Json{{"features", o.features}, {"labels", o.labels},
                             {"labels_from_generator", o.labels_from_generator}, {"cv", o.cv},
                             {"gamma_reg", o.gamma_reg}, {"folds", o.folds},
                             {"kappa_eff", o.kappa_eff ? Json(*o.kappa_eff) : Json(nullptr)}, {"out", o.out}});
    manifest.add_seed("folds", o.seed);
    manifest.add_seed("kernel", o.kernel.seed);
    for (const auto& p : paths) manifest.add_input(p);
    manifest.add_output(o.out);
    manifest.add_output(report_path);
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

// ---------------------------------------------------------------- eval

void add_eval(CLI::App& app, EvalOptions& o) {
    app.add_option("--model", o.model, "Model JSON")->required();
    app.add_option("--test-dir", o.test_dir, "Directory of point-cloud CSVs with generator sidecars")->required();
    app.add_option("--out", o.out, "Output directory for the report and curve CSVs")->required();
}

void run_eval(const EvalOptions& o) {
    Stopwatch clock;
    const StoredModel stored = load_model(o.model);
    if (!fs::is_directory(o.test_dir)) fail(ErrorKind::io, "not a directory: " + o.test_dir);
    std::vector<fs::path> clouds;
    for (const auto& entry : fs::directory_iterator(o.test_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") clouds.push_back(entry.path());
    std::sort(clouds.begin(), clouds.end());
    if (clouds.empty()) fail(ErrorKind::invalid_argument, "empty test set: no .csv files in " + o.test_dir);

    const auto& names = stored.model.class_names;
    const int L = stored.model.class_count;
    const int K = stored.feature_config.max_dim;
    const auto& grid = stored.feature_config.grid;
    std::vector<std::vector<int>> confusion(static_cast<std::size_t>(L), std::vector<int>(static_cast<std::size_t>(L), 0));
    Json samples = Json::array();
    int correct = 0, labeled = 0;
    std::size_t betti_checks = 0, betti_agree = 0;
    std::vector<std::ostringstream> betti_csv(static_cast<std::size_t>(K) + 1), persist_csv(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        auto& b = betti_csv[static_cast<std::size_t>(k)];
        auto& p = persist_csv[static_cast<std::size_t>(k)];
        b << "sample";
        p << "sample";
        for (std::size_t j = 0; j < grid.size(); ++j) b << ',' << grid[j];
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) p << ',' << grid[j] << '-' << grid[j + 1];
        b << '\n';
        p << '\n';
    }

    for (const auto& path : clouds) {
        const PointCloud cloud = read_cloud(path);
        const HarmonicFeatureSet f = features_for_model(stored, cloud);
        const Prediction p = predict_features(stored, f);
        Json sample{{"file", path.filename().string()}, {"predicted", p.class_id}, {"decision_values", p.decision_values}};

        // ground truth from the generator family, cross-checked by the oracle
        int truth = 0;
        if (cloud.metadata().generator) {
            const std::string shape = to_string(cloud.metadata().generator->shape);
            const auto it = std::find(names.begin(), names.end(), shape);
            if (it != names.end()) truth = static_cast<int>(it - names.begin()) + 1;
            sample["shape"] = shape;
        }
        const oracle::PersistenceDiagram diagram = oracle::compute_ph(pairwise_distances(cloud), K);
        for (int k = 0; k <= K; ++k)
            for (std::size_t j = 0; j < grid.size(); ++j) {
                ++betti_checks;
                if (static_cast<int>(diagram.persistent_betti(k, grid[j])) ==
                    f.betti(static_cast<Eigen::Index>(j), k))
                    ++betti_agree;
            }
        if (truth > 0) {
            ++labeled;
            ++confusion[static_cast<std::size_t>(truth - 1)][static_cast<std::size_t>(p.class_id - 1)];
            if (truth == p.class_id) ++correct;
            sample["truth"] = truth;
        }
        samples.push_back(sample);
        for (int k = 0; k <= K; ++k) {
            auto& b = betti_csv[static_cast<std::size_t>(k)];
            auto& q = persist_csv[static_cast<std::size_t>(k)];
            b << path.stem().string();
            q << path.stem().string();
            for (Eigen::Index j = 0; j < f.betti.rows(); ++j) b << ',' << f.betti(j, k);
            for (Eigen::Index j = 0; j < f.persistence.cols(); ++j) q << ',' << f.persistence(k, j);
            b << '\n';
            q << '\n';
        }
    }

    const fs::path out_dir = o.out;
    fs::create_directories(out_dir);
    RunManifest manifest("eval");
    manifest.set_config(Json{{"model", o.model}, {"test_dir", o.test_dir}, {"out", o.out}});
    manifest.add_input(o.model);
    for (const auto& c : clouds) manifest.add_input(c);
    for (int k = 0; k <= K; ++k) {
        const auto b = out_dir / ("betti_curve_k" + std::to_string(k) + ".csv");
        const auto q = out_dir / ("persistence_curve_k" + std::to_string(k) + ".csv");
        write_text(b, betti_csv[static_cast<std::size_t>(k)].str());
        write_text(q, persist_csv[static_cast<std::size_t>(k)].str());
        manifest.add_output(b);
        manifest.add_output(q);
    }
    Json report{{"samples", samples},
                {"labeled", labeled},
                {"accuracy", labeled > 0 ? Json(static_cast<double>(correct) / labeled) : Json(nullptr)},
                {"confusion", confusion},
                {"class_names", names},
                {"oracle_betti_agreement", Json{{"checked", betti_checks}, {"agree", betti_agree}}}};
    const auto report_path = out_dir / "report.json";
    write_text(report_path, report.dump(2) + "\n");
    manifest.add_output(report_path);
    manifest.add_timing("total", clock.seconds());
    record(manifest, report_path);
    std::cout << "accuracy " << (labeled > 0 ? static_cast<double>(correct) / labeled : 0.0) << " on " << labeled
              << " labeled clouds\n";
}

// ---------------------------------------------------------------- ph

void add_ph(CLI::App& app, PhOptions& o) {
    app.add_option("--input", o.input, "Point-cloud CSV")->required();
    app.add_option("--max-dim", o.max_dim, "Maximum homology dimension");
    app.add_option("--threshold", o.threshold, "Largest filtration value to include");
    app.add_option("--out", o.out, "Diagram JSON (stdout if omitted)");
}

void run_ph(const PhOptions& o) {
    Stopwatch clock;
    const PointCloud cloud = read_cloud(o.input);
    oracle::PhOptions options;
    options.threshold = o.threshold;
    const auto diagram = oracle::compute_ph(pairwise_distances(cloud), o.max_dim, options);
    const Json j = oracle::to_json(diagram);
    if (o.out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    write_text(o.out, j.dump(2) + "\n");
    RunManifest manifest("ph");
    manifest.set_config(Json{{"input", o.input}, {"max_dim", o.max_dim},
                             {"threshold", o.threshold ? Json(*o.threshold) : Json(nullptr)}, {"out", o.out}});
    manifest.add_input(o.input);
    manifest.add_output(o.out);
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

}  // namespace tdaq::cli
