#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cwlab/io.hpp"

namespace cwlab::cli {

using io::Json;

inline constexpr const char* kSchema = "cwlab-scenario/1";
inline constexpr const char* kToolVersion = "1.0.0";

/// A scenario field failed validation; `field` is a JSON path such as analyses[0].delta.
struct ScenarioError : std::runtime_error {
    ScenarioError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field(std::move(field)) {}
    std::string field;
};

struct Analysis {
    std::string id;
    std::string op;
    Json params;  // validated, defaults filled in
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::string output;
    std::vector<Analysis> analyses;
};

/// Parses and validates; throws ScenarioError naming the first bad field.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::string> known_ops();

struct RunSummary {
    int failed = 0;
    std::filesystem::path manifest;
};

/// Runs every analysis, writing artifacts and a manifest under `out`.
RunSummary run_scenario(const Scenario& s, const std::filesystem::path& scenario_path, const std::filesystem::path& out,
                        int threads);

/// Thread count from CWLAB_THREADS, default 1.
int thread_count_from_env();

}  // namespace cwlab::cli
