// Prediction without persistent homology: features are extracted spectrally
// and scored against a trained model.
#include "cli_common.hpp"
#include "tdaq/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tdaq-predict: classify a point cloud with a trained model"};
    tdaq::cli::PredictOptions options;
    unsigned threads = 0;
    app.add_option("--threads", threads, "Bound on internal parallelism (0 = hardware)");
    tdaq::cli::add_predict_options(app, options);
    if (const int rc = tdaq::cli::parse(app, argc, argv); rc >= 0) return rc;
    tdaq::set_max_threads(threads);
    return tdaq::cli::guarded([&] { tdaq::cli::run_predict(options); });
}
