#ifndef TDAQ_TOOLS_COMMANDS_HPP
#define TDAQ_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace tdaq::cli {

struct GenOptions {
    std::string shape;
    std::size_t n = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct FeaturesOptions {
    std::string input;
    std::size_t scales = 12;
    int max_dim = 1;
    std::string grid = "uniform";
    std::optional<double> scale_max;
    std::string overlap = "exact";
    std::string basis = "canonical";
    std::uint64_t seed = 0;
    std::string out;
};

struct KernelOptions {
    std::vector<double> lambda{1.0, 1.0, 1.0};
    double gamma_band = 1.0;
    bool normalize_betti = false;
    std::string overlap = "exact";
    std::string basis = "canonical";
    std::uint64_t seed = 0;
};

struct GramOptions {
    std::vector<std::string> features;
    KernelOptions kernel;
    std::string out;
};

struct TrainOptions {
    std::vector<std::string> features;
    std::string labels;
    bool labels_from_generator = false;
    std::string cv = "standard";
    double gamma_reg = 16.0;
    int folds = 3;
    std::uint64_t seed = 0;
    std::optional<double> kappa_eff;
    KernelOptions kernel;
    std::string out;
};

struct EvalOptions {
    std::string model;
    std::string test_dir;
    std::string out;
};

struct PhOptions {
    std::string input;
    int max_dim = 1;
    std::optional<double> threshold;
    std::string out;
};

void add_gen(CLI::App& app, GenOptions& o);
void add_features(CLI::App& app, FeaturesOptions& o);
void add_gram(CLI::App& app, GramOptions& o);
void add_train(CLI::App& app, TrainOptions& o);
void add_eval(CLI::App& app, EvalOptions& o);
void add_ph(CLI::App& app, PhOptions& o);

void run_gen(const GenOptions& o);
void run_features(const FeaturesOptions& o);
void run_gram(const GramOptions& o);
void run_train(const TrainOptions& o);
void run_eval(const EvalOptions& o);
void run_ph(const PhOptions& o);

}  // namespace tdaq::cli

#endif
