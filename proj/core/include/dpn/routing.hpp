// Spatial energy-path planning over a role-annotated graph.
//
// Shortest paths use Dijkstra with a deterministic tie-break: among
// equal-cost paths the lexicographically smallest node sequence wins.
// Path loss is flat per path by default (delivered = sent * (1 - loss));
// a per-hop mode is available as a knob.

#ifndef DPN_ROUTING_HPP
#define DPN_ROUTING_HPP

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpn/types.hpp"

namespace dpn {

enum class NodeRole { Source, Consumer, Idle, PassThrough, Queued };

std::string to_string(NodeRole role);
std::optional<NodeRole> node_role_from_string(const std::string& name);

struct TopologyNode {
    int id = 0;
    NodeRole role = NodeRole::Idle;
};

struct TopologyEdge {
    int a = 0;
    int b = 0;
    double weight = 1.0;
    // Fig-8-style connection probability; rendered in snapshots, never
    // used in path cost.
    std::optional<double> probability;
};

class EnergyGraph {
public:
    // Throws std::invalid_argument on duplicate ids, dangling edge
    // endpoints, self-loops, or negative weights.
    void add_node(int id, NodeRole role = NodeRole::Idle);
    void add_edge(int a, int b, double weight = 1.0,
                  std::optional<double> probability = std::nullopt);

    bool has_node(int id) const;
    NodeRole role(int id) const;
    void set_role(int id, NodeRole role);

    const std::vector<TopologyNode>& nodes() const { return nodes_; }
    const std::vector<TopologyEdge>& edges() const { return edges_; }
    std::vector<TopologyEdge>& edges() { return edges_; }

    std::vector<int> nodes_with_role(NodeRole role) const;

    // Neighbor list as (node id, edge weight), deterministic order.
    std::vector<std::pair<int, double>> neighbors(int id) const;

private:
    std::size_t index_of(int id) const;

    std::vector<TopologyNode> nodes_;
    std::vector<TopologyEdge> edges_;
    std::map<int, std::size_t> index_;
};

// Topology documents are JSON: {"nodes": [{"id", "role"?}],
// "edges": [{"a", "b", "weight"?, "probability"?}]}.
EnergyGraph load_topology_text(std::string_view json_text);
EnergyGraph load_topology_file(const std::filesystem::path& path);

// The standard 39-bus / 46-line New England test system; generator
// buses 30-39 are marked Source, the rest Idle.
EnergyGraph ieee39_topology();

struct PathResult {
    bool reachable = false;
    std::vector<int> nodes; // source first, destination last
    double cost = std::numeric_limits<double>::infinity();
};

// Throws std::invalid_argument when src or dst is not in the graph; an
// unreachable destination is a result, not an error.
PathResult shortest_path(const EnergyGraph& graph, int src, int dst);

enum class ConsumerOrder { DescendingDemand, AscendingDemand, Arrival };

struct RoutingParams {
    double path_loss = 0.06;
    std::size_t max_users_per_source = 5;
    Energy global_capacity = std::numeric_limits<double>::infinity();
    ConsumerOrder order = ConsumerOrder::DescendingDemand;
    bool per_hop_loss = false;
};

struct Assignment {
    int consumer = 0;
    int source = 0;
    std::vector<int> path; // source first, consumer last
    Energy sent = 0.0;
    Energy delivered = 0.0;

    bool operator==(const Assignment&) const = default;
};

struct RoutingPlan {
    std::vector<Assignment> assignments;
    std::vector<int> queued;

    bool operator==(const RoutingPlan&) const = default;
};

// Assigns each consumer to the nearest source with a free fan-out slot;
// sent = demand / (1 - loss) so the demand arrives intact. Consumers
// that would push total sent past global_capacity, or that no source
// can serve, are queued.
RoutingPlan route(const EnergyGraph& graph, const std::map<int, Energy>& demands,
                  const RoutingParams& params);

enum class SnapshotFormat { Dot, Json };

// Display roles per node (a node may hold several at once, e.g. source
// and consumer of distinct assignments).
std::map<int, std::vector<NodeRole>> snapshot_roles(const RoutingPlan& plan,
                                                    const EnergyGraph& graph);

std::string export_snapshot(const RoutingPlan& plan, const EnergyGraph& graph,
                            SnapshotFormat format);

// Inverse of the JSON export; round-trips losslessly.
RoutingPlan import_snapshot(std::string_view json_text);

} // namespace dpn

#endif // DPN_ROUTING_HPP
