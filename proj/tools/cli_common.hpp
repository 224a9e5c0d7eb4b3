#ifndef TDAQ_TOOLS_CLI_COMMON_HPP
#define TDAQ_TOOLS_CLI_COMMON_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdaq/manifest.hpp"

namespace tdaq::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIo = 2,
    kIntegrity = 3,
    kNumerical = 4,
};

/// Runs a command body, mapping exceptions onto exit codes and printing the
/// message to stderr.
int guarded(const std::function<void()>& body);

/// Parses argv into the app; returns -1 if parsing succeeded, else the exit
/// code to return (0 for --help, 1 for usage errors).
int parse(CLI::App& app, int argc, char** argv);

/// Expands shell-style patterns (and plain paths) in order; the matches of
/// each pattern are sorted.
std::vector<std::filesystem::path> expand_patterns(const std::vector<std::string>& patterns);

/// Appends the manifest to $TDAQ_RUN_DIR or the output's directory.
void record(const RunManifest& manifest, const std::filesystem::path& output);

struct PredictOptions {
    std::string model;
    std::string input;
    std::string out;
};

void add_predict_options(CLI::App& app, PredictOptions& options);
void run_predict(const PredictOptions& options);

}  // namespace tdaq::cli

#endif
