// Scenario presets and the runner behind the CLI.
//
// A scenario is a fully-specified experiment: a grid configuration,
// optionally a (p_request, p_stay_on) sweep, optionally a routing
// snapshot. Presets resolve by name; see list in preset_names().

#ifndef DPN_SCENARIO_HPP
#define DPN_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpn/metrics.hpp"
#include "dpn/routing.hpp"
#include "dpn/types.hpp"

namespace dpn {

struct SweepSpec {
    std::vector<double> p_request_grid;
    std::vector<double> p_stay_on_grid;
};

struct RoutingScenario {
    RoutingParams params;
    std::vector<int> sources;
    std::vector<int> consumers;
    // Draw Fig-8-style edge probability annotations from the routing
    // stream (display metadata only).
    bool annotate_edge_probabilities = true;
};

struct Scenario {
    std::string name;
    std::string provenance;
    GridConfig grid;
    std::optional<SweepSpec> sweep;
    std::optional<RoutingScenario> routing;
    std::vector<Energy> injected_requests;
    std::optional<std::string> compare_reference;
    std::map<std::string, double> compare_tolerances;
};

std::vector<std::string> preset_names();
const std::vector<Scenario>& preset_catalog();
// Throws std::invalid_argument for an unknown name.
Scenario preset(const std::string& name);

// 11-point probability grid {0, 0.1, ..., 1.0}.
std::vector<double> default_probability_grid();

struct PointResult {
    std::size_t point_index = 0;
    double p_request = 0.0;
    double p_stay_on = 0.0;
    SummaryTable summary;
};

struct ScenarioResult {
    Scenario scenario;
    std::vector<RoundRecord> rounds;
    std::vector<PointResult> points;
    std::optional<RoutingPlan> plan;
    std::optional<EnergyGraph> graph;
    std::optional<ComparisonReport> comparison;
};

// Runs every (grid point x replica) task; replicas are independent RNG
// substreams merged by index, so thread count never changes results.
ScenarioResult run_scenario(const Scenario& scenario,
                            std::optional<std::uint64_t> seed_override = {},
                            std::size_t threads = 0);

struct OutputFormats {
    bool csv = true;
    bool json = true;
    bool dot = true;
};

// Writes rounds.csv, summary.json and, for routing scenarios,
// snapshot.dot / snapshot.json into out_dir. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(
    const ScenarioResult& result, const std::filesystem::path& out_dir,
    const OutputFormats& formats = {});

} // namespace dpn

#endif // DPN_SCENARIO_HPP
