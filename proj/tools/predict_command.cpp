#include <iostream>

#include "cli_common.hpp"
#include "tdaq/error.hpp"
#include "tdaq/pipeline.hpp"

namespace tdaq::cli {

void add_predict_options(CLI::App& app, PredictOptions& o) {
    app.add_option("--model", o.model, "Model JSON written by 'train'")->required();
    app.add_option("--input", o.input, "Point-cloud CSV or feature JSON")->required();
    app.add_option("--out", o.out, "Prediction JSON (stdout if omitted)");
}

void run_predict(const PredictOptions& o) {
    Stopwatch clock;
    RunManifest manifest("predict");
    manifest.set_config(Json{{"model", o.model}, {"input", o.input}, {"out", o.out}});
    manifest.add_input(o.model);
    manifest.add_input(o.input);

    const StoredModel stored = load_model(o.model);
    const fs::path input = o.input;
    if (!fs::exists(input)) fail(ErrorKind::io, "no such file: " + input.string());
    HarmonicFeatureSet features;
    if (input.extension() == ".csv") {
        features = features_for_model(stored, read_cloud(input));
    } else {
        features = read_features(input);
    }
    const Prediction p = predict_features(stored, features);
    Json out = to_json(p, stored);
    out["input_digest"] = digest(features);

    if (o.out.empty()) {
        std::cout << out.dump(2) << '\n';
        return;
    }
    write_text(o.out, out.dump(2) + "\n");
    manifest.add_output(o.out);
    manifest.add_timing("total", clock.seconds());
    record(manifest, o.out);
}

}  // namespace tdaq::cli
