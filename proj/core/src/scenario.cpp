#include "dpn/scenario.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dpn/config.hpp"
#include "dpn/rng.hpp"
#include "dpn/simulation.hpp"

namespace dpn {

std::vector<double> default_probability_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(static_cast<double>(i) / 10.0);
    }
    return grid;
}

namespace {

std::vector<double> coarse_probability_grid() {
    return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
}

GaParams queue_draining_ga() {
    GaParams ga;
    ga.w_energy = 0.4;
    ga.w_count = 0.2;
    ga.w_queue_age = 0.4;
    return ga;
}

Scenario make_fig3() {
    Scenario s;
    s.name = "fig3";
    s.provenance =
        "500 users, cap 150, queue-stay 0.1, smallest-first; 11x11 sweep over "
        "(p_request, p_stay_on)";
    s.grid.n_users = 500;
    s.grid.energy_cap = 150.0;
    s.grid.p_stay_queue = 0.1;
    s.grid.policy = AllocationPolicy::SmallestFirst;
    s.grid.n_rounds = 200;
    s.grid.n_simulations = 3;
    s.sweep = SweepSpec{default_probability_grid(), default_probability_grid()};
    return s;
}

Scenario make_fig4() {
    Scenario s = make_fig3();
    s.name = "fig4";
    s.provenance =
        "500 users, cap 150, queue-stay 0.5, smallest-first; 11x11 sweep over "
        "(p_request, p_stay_on)";
    s.grid.p_stay_queue = 0.5;
    return s;
}

Scenario make_fig5() {
    Scenario s;
    s.name = "fig5";
    s.provenance =
        "cap 250, 500 users, largest-first: queueing only when the stay-ON "
        "probability nears 1";
    s.grid.n_users = 500;
    s.grid.energy_cap = 250.0;
    s.grid.p_stay_queue = 0.1;
    s.grid.policy = AllocationPolicy::LargestFirst;
    s.grid.n_rounds = 200;
    s.grid.n_simulations = 3;
    s.sweep = SweepSpec{default_probability_grid(), default_probability_grid()};
    return s;
}

Scenario make_cap_two_thirds() {
    Scenario s;
    s.name = "cap_two_thirds";
    s.provenance =
        "cap 333.3 (= 2/3 of the 500-user maximum): every request fits, no "
        "queueing anywhere on the grid";
    s.grid.n_users = 500;
    s.grid.energy_cap = 500.0 * 2.0 / 3.0;
    s.grid.p_stay_queue = 1.0;
    s.grid.policy = AllocationPolicy::SmallestFirst;
    s.grid.n_rounds = 200;
    s.grid.n_simulations = 3;
    s.sweep = SweepSpec{default_probability_grid(), default_probability_grid()};
    return s;
}

Scenario make_table1() {
    Scenario s;
    s.name = "table1";
    s.provenance =
        "10-user micro-grid snapshot: cap 3, largest-first, 1-unit battery "
        "serving the one queued user";
    s.grid.n_users = 10;
    s.grid.energy_cap = 3.0;
    s.grid.p_request = 0.3;
    s.grid.p_stay_on = 0.3;
    s.grid.p_stay_queue = 1.0;
    s.grid.policy = AllocationPolicy::LargestFirst;
    s.grid.n_special_users = 10;
    s.grid.battery = StorageConfig{1.0, 1.0};
    s.grid.n_rounds = 1;
    s.grid.n_simulations = 1;
    s.injected_requests = {0.4974, 0.4869, 0.0, 0.5473, 0.0,
                           0.0,    0.5221, 0.0, 0.9519, 0.0};
    return s;
}

Scenario make_table2_nobattery() {
    Scenario s;
    s.name = "table2_nobattery";
    s.provenance =
        "500 users, cap 100, p=0.5/0.5, queue-stay 1, smallest-first, 50 sims "
        "x 50 rounds, no storage";
    s.grid.n_users = 500;
    s.grid.energy_cap = 100.0;
    s.grid.p_request = 0.5;
    s.grid.p_stay_on = 0.5;
    s.grid.p_stay_queue = 1.0;
    s.grid.policy = AllocationPolicy::SmallestFirst;
    s.grid.n_special_users = 50;
    s.grid.n_rounds = 50;
    s.grid.n_simulations = 50;
    s.compare_reference = "table2_nobattery";
    s.compare_tolerances = {{"energy_distributed", 0.01},
                            {"customers_received", 0.10},
                            {"customers_in_queue", 0.15},
                            {"customers_requested", 0.10}};
    return s;
}

Scenario make_table2_battery() {
    Scenario s = make_table2_nobattery();
    s.name = "table2_battery";
    s.provenance =
        "as table2_nobattery plus a 10-unit battery serving the 50 special "
        "users from the queue";
    s.grid.battery = StorageConfig{10.0, 10.0};
    s.compare_reference = "table2_battery";
    return s;
}

Scenario make_table3_unopt() {
    Scenario s = make_table2_battery();
    s.name = "table3_unopt";
    s.provenance =
        "battery interfaced with a solar panel (cap 10, p_sun 0.5), greedy "
        "allocation";
    s.grid.solar = SolarConfig{10.0, 0.5};
    s.compare_reference = "table3_unopt";
    return s;
}

Scenario make_table3_opt() {
    Scenario s = make_table3_unopt();
    s.name = "table3_opt";
    s.provenance =
        "solar + battery with the genetic allocator (queue-age weighted "
        "fitness) draining the queue";
    s.grid.policy = AllocationPolicy::GeneticOptimizer;
    s.grid.ga = queue_draining_ga();
    s.compare_reference = "table3_opt";
    return s;
}

Scenario make_ga_fig6() {
    Scenario s;
    s.name = "ga_fig6";
    s.provenance =
        "genetic allocator sweep: 500 users, cap 200, battery 20, 40 special "
        "users, 20 sims x 50 rounds, 6x6 probability grid";
    s.grid.n_users = 500;
    s.grid.energy_cap = 200.0;
    s.grid.p_stay_queue = 1.0;
    s.grid.policy = AllocationPolicy::GeneticOptimizer;
    s.grid.ga = queue_draining_ga();
    s.grid.n_special_users = 40;
    s.grid.battery = StorageConfig{20.0, 20.0};
    s.grid.n_rounds = 50;
    s.grid.n_simulations = 20;
    s.sweep = SweepSpec{coarse_probability_grid(), coarse_probability_grid()};
    return s;
}

Scenario make_ieee39() {
    Scenario s;
    s.name = "ieee39";
    s.provenance =
        "routing snapshot on the 39-bus New England graph: 2 sources, 12 "
        "consumers, 5 users per source, 6% path loss";
    RoutingScenario routing;
    routing.params.path_loss = 0.06;
    routing.params.max_users_per_source = 5;
    routing.params.global_capacity = 100.0;
    routing.sources = {30, 38};
    routing.consumers = {1, 3, 4, 7, 8, 14, 15, 16, 20, 21, 24, 27};
    s.routing = routing;
    s.grid.n_users = 12;
    s.grid.energy_cap = 100.0;
    return s;
}

} // namespace

const std::vector<Scenario>& preset_catalog() {
    static const std::vector<Scenario> catalog{
        make_fig3(),
        make_fig4(),
        make_fig5(),
        make_cap_two_thirds(),
        make_table1(),
        make_table2_battery(),
        make_table2_nobattery(),
        make_table3_unopt(),
        make_table3_opt(),
        make_ga_fig6(),
        make_ieee39(),
    };
    return catalog;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const Scenario& scenario : preset_catalog()) {
        names.push_back(scenario.name);
    }
    return names;
}

Scenario preset(const std::string& name) {
    for (const Scenario& scenario : preset_catalog()) {
        if (scenario.name == name) return scenario;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

namespace {

ScenarioResult run_routing_scenario(Scenario scenario) {
    ScenarioResult result;
    EnergyGraph graph = ieee39_topology();
    const RoutingScenario& routing = *scenario.routing;

    for (const TopologyNode& node : graph.nodes()) {
        graph.set_role(node.id, NodeRole::Idle);
    }
    for (int source : routing.sources) graph.set_role(source, NodeRole::Source);
    for (int consumer : routing.consumers) {
        graph.set_role(consumer, NodeRole::Consumer);
    }

    RngStream rng = RngBundle::derive(scenario.grid.seed, 0, RngBundle::Routing);
    std::map<int, Energy> demands;
    for (int consumer : routing.consumers) {
        demands[consumer] = rng.uniform_pos(scenario.grid.max_request_per_user);
    }
    if (routing.annotate_edge_probabilities) {
        for (TopologyEdge& edge : graph.edges()) {
            edge.probability = 0.5 + 0.5 * rng.next_double();
        }
    }

    result.plan = route(graph, demands, routing.params);
    result.graph = std::move(graph);
    result.scenario = std::move(scenario);
    return result;
}

} // namespace

ScenarioResult run_scenario(const Scenario& scenario,
                            std::optional<std::uint64_t> seed_override,
                            std::size_t threads) {
    Scenario resolved = scenario;
    if (seed_override) resolved.grid.seed = *seed_override;

    if (auto errors = validate_config(resolved.grid); !errors.empty()) {
        std::string message = "invalid config for scenario " + resolved.name;
        for (const std::string& error : errors) message += "\n  " + error;
        throw std::invalid_argument(message);
    }

    if (resolved.routing) {
        return run_routing_scenario(std::move(resolved));
    }

    struct Point {
        double p_request;
        double p_stay_on;
    };
    std::vector<Point> grid_points;
    if (resolved.sweep) {
        for (double p_request : resolved.sweep->p_request_grid) {
            for (double p_stay_on : resolved.sweep->p_stay_on_grid) {
                grid_points.push_back({p_request, p_stay_on});
            }
        }
    } else {
        grid_points.push_back({resolved.grid.p_request, resolved.grid.p_stay_on});
    }

    const std::size_t sims = resolved.grid.n_simulations;
    const std::size_t task_count = grid_points.size() * sims;
    std::vector<RunResult> runs(task_count);

    const std::vector<Energy>* injected =
        resolved.injected_requests.empty() ? nullptr : &resolved.injected_requests;

    auto run_task = [&](std::size_t task) {
        std::size_t point = task / sims;
        GridConfig config = resolved.grid;
        config.p_request = grid_points[point].p_request;
        config.p_stay_on = grid_points[point].p_stay_on;
        runs[task] = run_simulation(config, task, injected);
    };

    std::size_t workers = threads ? threads : std::thread::hardware_concurrency();
    workers = std::max<std::size_t>(1, std::min(workers, task_count));
    if (workers == 1) {
        for (std::size_t task = 0; task < task_count; ++task) run_task(task);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t task = next.fetch_add(1);
                    if (task >= task_count) return;
                    run_task(task);
                }
            });
        }
        for (std::thread& worker : pool) worker.join();
    }

    ScenarioResult result;
    for (std::size_t point = 0; point < grid_points.size(); ++point) {
        std::vector<RunAccumulator> accumulators(sims);
        for (std::size_t sim = 0; sim < sims; ++sim) {
            const RunResult& run = runs[point * sims + sim];
            accumulators[sim].config_digest = run.config_digest;
            accumulators[sim].waits = run.waits;
            for (std::size_t r = 0; r < run.rounds.size(); ++r) {
                record_round(run.rounds[r], accumulators[sim]);
                result.rounds.push_back(RoundRecord{point,
                                                    grid_points[point].p_request,
                                                    grid_points[point].p_stay_on,
                                                    sim, r, run.rounds[r]});
            }
        }
        PointResult point_result;
        point_result.point_index = point;
        point_result.p_request = grid_points[point].p_request;
        point_result.p_stay_on = grid_points[point].p_stay_on;
        point_result.summary = aggregate(accumulators);
        result.points.push_back(std::move(point_result));
    }

    if (resolved.compare_reference && result.points.size() == 1) {
        result.comparison =
            compare_to_reference(result.points.front().summary,
                                 *resolved.compare_reference,
                                 resolved.compare_tolerances);
    }
    result.scenario = std::move(resolved);
    return result;
}

std::vector<std::filesystem::path> write_outputs(
    const ScenarioResult& result, const std::filesystem::path& out_dir,
    const OutputFormats& formats) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    auto write_file = [&](const std::filesystem::path& path,
                          const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << content;
        written.push_back(path);
    };

    if (formats.csv) {
        std::ostringstream csv;
        write_rounds_csv(csv, result.rounds);
        write_file(out_dir / "rounds.csv", csv.str());
    }

    if (formats.json) {
        nlohmann::json summary;
        summary["scenario"] = result.scenario.name;
        summary["seed"] = result.scenario.grid.seed;
        nlohmann::json points = nlohmann::json::array();
        for (const PointResult& point : result.points) {
            nlohmann::json entry;
            entry["p_request"] = point.p_request;
            entry["p_stay_on"] = point.p_stay_on;
            entry["summary"] = nlohmann::json::parse(summary_to_json(point.summary));
            points.push_back(std::move(entry));
        }
        summary["points"] = std::move(points);
        if (result.comparison) {
            summary["comparison"] =
                nlohmann::json::parse(comparison_to_json(*result.comparison));
        }
        write_file(out_dir / "summary.json", summary.dump(2));
    }

    if (result.plan && result.graph) {
        if (formats.dot) {
            write_file(out_dir / "snapshot.dot",
                       export_snapshot(*result.plan, *result.graph,
                                       SnapshotFormat::Dot));
        }
        if (formats.json) {
            write_file(out_dir / "snapshot.json",
                       export_snapshot(*result.plan, *result.graph,
                                       SnapshotFormat::Json));
        }
    }
    return written;
}

} // namespace dpn
