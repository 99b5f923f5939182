#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cwlab/io.hpp"
#include "cwlab/oracle.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace cwlab;

namespace {

constexpr int kInvalidScenario = 2;

int cmd_validate(const std::string& path) {
    try {
        const auto s = cli::load_scenario(path);
        std::cout << "ok: " << s.name << " (" << s.analyses.size() << " analyses)\n";
        return 0;
    } catch (const cli::ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kInvalidScenario;
    }
}

int cmd_run(const std::string& path, const std::string& out_override) {
    cli::Scenario s;
    try {
        s = cli::load_scenario(path);
    } catch (const cli::ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kInvalidScenario;
    }
    fs::path out = out_override.empty() ? fs::path(s.output.empty() ? "out/" + s.name : s.output) : fs::path(out_override);
    const auto sum = cli::run_scenario(s, path, out, cli::thread_count_from_env());
    std::cout << "manifest: " << sum.manifest.string() << "\n";
    if (sum.failed) {
        std::cerr << sum.failed << " analysis(es) failed; see error.json in their directories\n";
        return 1;
    }
    return 0;
}

int cmd_render(const std::string& input, std::string output) {
    const fs::path in(input);
    if (output.empty()) output = input + ".ppm";
    if (in.extension() == ".cws") {
        io::render_cellset(output, io::read_cellset(in));
    } else {
        fs::path base = in;
        if (in.extension() == ".json" || in.extension() == ".pgm") base.replace_extension();
        io::render_labels(output, io::read_label_field(base));
    }
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_oracle(std::uint64_t seed) {
    int failed = 0;
    for (const auto& r : oracle::run_all(seed)) {
        std::cout << (r.ok ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << "\n";
        failed += r.ok ? 0 : 1;
    }
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monotone decompositions and stable sets on discretized surfaces"};
    app.require_subcommand(1);

    std::string scenario, out, input, output;
    std::uint64_t seed = 1;
    auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts and manifest");
    run->add_option("scenario", scenario, "Scenario JSON file")->required();
    run->add_option("-o,--output", out, "Output directory (overrides the scenario)");
    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario, "Scenario JSON file")->required();
    auto* render = app.add_subcommand("render", "Render a cell set (.cws) or label field to a color raster");
    render->add_option("input", input, "Cell set file or label field base path")->required();
    render->add_option("-o,--output", output, "Output PPM path");
    auto* oracle_cmd = app.add_subcommand("oracle", "Compare fast routines against brute-force references");
    oracle_cmd->add_option("--seed", seed, "Random seed for the oracle inputs");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(scenario, out);
        if (*validate) return cmd_validate(scenario);
        if (*render) return cmd_render(input, output);
        if (*oracle_cmd) return cmd_oracle(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
