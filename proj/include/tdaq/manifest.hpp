#ifndef TDAQ_MANIFEST_HPP
#define TDAQ_MANIFEST_HPP

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace tdaq {

/// Record of one command invocation. Appended as one JSON line to
/// "<run dir>/manifest.jsonl"; existing lines are never rewritten.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    void set_config(nlohmann::json config) { config_ = std::move(config); }
    void add_seed(const std::string& name, std::uint64_t seed);
    void add_input(const std::filesystem::path& path);
    /// Hashes the file as it is now.
    void add_output(const std::filesystem::path& path);
    void add_timing(const std::string& phase, double seconds);

    nlohmann::json to_json() const;
    /// Appends to run_dir/manifest.jsonl, creating the directory if needed.
    std::filesystem::path append_to(const std::filesystem::path& run_dir) const;

private:
    std::string command_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json seeds_ = nlohmann::json::object();
    std::vector<std::string> inputs_;
    nlohmann::json outputs_ = nlohmann::json::array();
    nlohmann::json timings_ = nlohmann::json::object();
};

/// $TDAQ_RUN_DIR if set, else the fallback.
std::filesystem::path run_directory(const std::filesystem::path& fallback);

/// Wall-clock stopwatch.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace tdaq

#endif
