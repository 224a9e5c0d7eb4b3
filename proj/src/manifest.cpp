#include "tdaq/manifest.hpp"

#include <cstdlib>
#include <fstream>

#include "tdaq/error.hpp"
#include "tdaq/serialize.hpp"

namespace tdaq {

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }

void RunManifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path.string()); }

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs_.push_back(nlohmann::json{{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::add_timing(const std::string& phase, double seconds) { timings_[phase] = seconds; }

nlohmann::json RunManifest::to_json() const {
    return nlohmann::json{{"command", command_}, {"config", config_},   {"inputs", inputs_},
                          {"outputs", outputs_}, {"seeds", seeds_},     {"timings_s", timings_}};
}

std::filesystem::path RunManifest::append_to(const std::filesystem::path& run_dir) const {
    std::error_code ec;
    std::filesystem::create_directories(run_dir, ec);
    const auto path = run_dir / "manifest.jsonl";
    std::ofstream out(path, std::ios::app);
    if (!out) fail(ErrorKind::io, "cannot append to " + path.string());
    out << to_json().dump() << '\n';
    return path;
}

std::filesystem::path run_directory(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("TDAQ_RUN_DIR"); env && *env) return env;
    return fallback.empty() ? std::filesystem::path(".") : fallback;
}

}  // namespace tdaq
