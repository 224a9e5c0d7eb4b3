#include "cli_common.hpp"
#include "commands.hpp"
#include "tdaq/parallel.hpp"

using namespace tdaq::cli;

int main(int argc, char** argv) {
    CLI::App app{"tdaq: persistence-diagram class prediction from harmonic spectral features"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Bound on internal parallelism (0 = hardware)");

    GenOptions gen;
    FeaturesOptions features;
    GramOptions gram;
    TrainOptions train;
    PredictOptions predict;
    EvalOptions eval;
    PhOptions ph;
    add_gen(*app.add_subcommand("gen", "Generate a synthetic point cloud"), gen);
    add_features(*app.add_subcommand("features", "Extract multi-scale harmonic features"), features);
    add_gram(*app.add_subcommand("gram", "Assemble the mixed-kernel Gram matrix"), gram);
    add_train(*app.add_subcommand("train", "Train the one-vs-rest LS-SVM"), train);
    add_predict_options(*app.add_subcommand("predict", "Predict the diagram class of a cloud"), predict);
    add_eval(*app.add_subcommand("eval", "Evaluate a model on a directory of clouds"), eval);
    add_ph(*app.add_subcommand("ph", "Classical persistent homology of a cloud"), ph);

    if (const int rc = parse(app, argc, argv); rc >= 0) return rc;
    tdaq::set_max_threads(threads);

    return guarded([&] {
        if (app.got_subcommand("gen")) run_gen(gen);
        else if (app.got_subcommand("features")) run_features(features);
        else if (app.got_subcommand("gram")) run_gram(gram);
        else if (app.got_subcommand("train")) run_train(train);
        else if (app.got_subcommand("predict")) run_predict(predict);
        else if (app.got_subcommand("eval")) run_eval(eval);
        else if (app.got_subcommand("ph")) run_ph(ph);
    });
}
