// Scenario runner for the digital power network simulator.
//
//   dpn run --preset table2_nobattery --out results/
//   dpn run --config grid.json --seed 7
//   dpn list-presets

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpn/config.hpp"
#include "dpn/scenario.hpp"

namespace {

std::vector<dpn::Energy> load_injected_requests(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open request file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buffer.str());
    if (!doc.is_array()) {
        throw std::runtime_error("request file must be a JSON array of amounts");
    }
    return doc.get<std::vector<dpn::Energy>>();
}

int run_command(const std::string& preset_name, const std::string& config_path,
                std::optional<std::uint64_t> seed, const std::string& out_dir,
                const std::string& inject_path,
                const std::vector<std::string>& formats) {
    dpn::Scenario scenario;
    if (!preset_name.empty()) {
        scenario = dpn::preset(preset_name);
    } else if (!config_path.empty()) {
        scenario.name = "custom";
        scenario.provenance = "config file " + config_path;
        scenario.grid = dpn::load_config_file(config_path);
    } else {
        std::cerr << "error: need --preset or --config\n";
        return 2;
    }

    if (!inject_path.empty()) {
        scenario.injected_requests = load_injected_requests(inject_path);
    }

    if (auto errors = dpn::validate_config(scenario.grid); !errors.empty()) {
        std::cerr << "error: invalid config:\n";
        for (const std::string& error : errors) {
            std::cerr << "  " << error << '\n';
        }
        return 2;
    }

    dpn::OutputFormats output;
    if (!formats.empty()) {
        output = dpn::OutputFormats{false, false, false};
        for (const std::string& format : formats) {
            if (format == "csv") output.csv = true;
            else if (format == "json") output.json = true;
            else if (format == "dot") output.dot = true;
            else {
                std::cerr << "error: unknown format '" << format << "'\n";
                return 2;
            }
        }
    }

    std::string target = out_dir.empty() ? "dpn_out/" + scenario.name : out_dir;
    dpn::ScenarioResult result = dpn::run_scenario(scenario, seed);
    auto written = dpn::write_outputs(result, target, output);

    for (const auto& path : written) {
        std::cout << "wrote " << path.string() << '\n';
    }
    if (result.comparison) {
        for (const dpn::ComparisonRow& row : result.comparison->rows) {
            std::cout << (row.pass ? "  ok   " : "  DEV  ") << row.label << ": "
                      << dpn::format_metric(row.simulated) << " vs "
                      << dpn::format_metric(row.reference) << " (dev "
                      << dpn::format_metric(100.0 * row.relative_deviation)
                      << "%, tol "
                      << dpn::format_metric(100.0 * row.tolerance) << "%)\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital power network simulator"};
    app.require_subcommand(1);

    std::string preset_name;
    std::string config_path;
    std::string out_dir;
    std::string inject_path;
    std::vector<std::string> formats;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "Run a scenario");
    run->add_option("--preset", preset_name, "Preset name (see list-presets)");
    run->add_option("--config", config_path, "Config file (JSON)");
    run->add_option("--seed", seed, "Master seed override");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--inject-requests", inject_path,
                    "JSON array of per-user requests for round 0 (bypasses the "
                    "demand step)");
    run->add_option("--format", formats,
                    "Restrict outputs: csv, json, dot (repeatable)");

    CLI::App* list = app.add_subcommand("list-presets", "Show the preset catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const dpn::Scenario& scenario : dpn::preset_catalog()) {
                std::cout << scenario.name << "\n    " << scenario.provenance
                          << '\n';
            }
            return 0;
        }
        return run_command(preset_name, config_path, seed, out_dir, inject_path,
                           formats);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
