#include "cli_common.hpp"

#include <glob.h>

#include <algorithm>
#include <iostream>

#include <json.hpp>

#include "tdaq/error.hpp"

namespace tdaq::cli {

int guarded(const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::invalid_argument: return kUsage;
            case ErrorKind::io: return kIo;
            case ErrorKind::integrity: return kIntegrity;
            case ErrorKind::numerical: return kNumerical;
        }
        return kNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}

int parse(CLI::App& app, int argc, char** argv) {
    try {
        app.parse(argc, argv);
        return -1;
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
}

std::vector<std::filesystem::path> expand_patterns(const std::vector<std::string>& patterns) {
    std::vector<std::filesystem::path> out;
    for (const auto& pattern : patterns) {
        glob_t result{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &result);
        std::vector<std::filesystem::path> matches;
        const bool literal = pattern.find_first_of("*?[") == std::string::npos;
        if (rc == 0)
            for (std::size_t i = 0; i < result.gl_pathc; ++i) {
                const std::string match = result.gl_pathv[i];
                // cloud sidecars share the .json extension
                if (!literal && match.ends_with(".meta.json")) continue;
                matches.emplace_back(match);
            }
        globfree(&result);
        if (matches.empty()) fail(ErrorKind::io, "no files match " + pattern);
        std::sort(matches.begin(), matches.end());
        out.insert(out.end(), matches.begin(), matches.end());
    }
    return out;
}

void record(const RunManifest& manifest, const std::filesystem::path& output) {
    manifest.append_to(run_directory(output.has_parent_path() ? output.parent_path() : std::filesystem::path(".")));
}

}  // namespace tdaq::cli
