#include "dpn/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dpn {

std::string to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Source: return "source";
        case NodeRole::Consumer: return "consumer";
        case NodeRole::Idle: return "idle";
        case NodeRole::PassThrough: return "pass_through";
        case NodeRole::Queued: return "queued";
    }
    return "idle";
}

std::optional<NodeRole> node_role_from_string(const std::string& name) {
    if (name == "source") return NodeRole::Source;
    if (name == "consumer") return NodeRole::Consumer;
    if (name == "idle") return NodeRole::Idle;
    if (name == "pass_through") return NodeRole::PassThrough;
    if (name == "queued") return NodeRole::Queued;
    return std::nullopt;
}

void EnergyGraph::add_node(int id, NodeRole role) {
    if (index_.contains(id)) {
        throw std::invalid_argument("topology: duplicate node id " +
                                    std::to_string(id));
    }
    index_[id] = nodes_.size();
    nodes_.push_back(TopologyNode{id, role});
}

void EnergyGraph::add_edge(int a, int b, double weight,
                           std::optional<double> probability) {
    if (!index_.contains(a) || !index_.contains(b)) {
        throw std::invalid_argument("topology: edge " + std::to_string(a) + "-" +
                                    std::to_string(b) +
                                    " references an unknown node");
    }
    if (a == b) {
        throw std::invalid_argument("topology: self-loop at node " +
                                    std::to_string(a));
    }
    if (weight < 0.0) {
        throw std::invalid_argument("topology: negative weight on edge " +
                                    std::to_string(a) + "-" + std::to_string(b));
    }
    edges_.push_back(TopologyEdge{a, b, weight, probability});
}

bool EnergyGraph::has_node(int id) const { return index_.contains(id); }

std::size_t EnergyGraph::index_of(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::invalid_argument("graph: unknown node id " + std::to_string(id));
    }
    return it->second;
}

NodeRole EnergyGraph::role(int id) const { return nodes_[index_of(id)].role; }

void EnergyGraph::set_role(int id, NodeRole role) {
    nodes_[index_of(id)].role = role;
}

std::vector<int> EnergyGraph::nodes_with_role(NodeRole role) const {
    std::vector<int> result;
    for (const TopologyNode& node : nodes_) {
        if (node.role == role) result.push_back(node.id);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<std::pair<int, double>> EnergyGraph::neighbors(int id) const {
    std::vector<std::pair<int, double>> result;
    for (const TopologyEdge& edge : edges_) {
        if (edge.a == id) result.emplace_back(edge.b, edge.weight);
        if (edge.b == id) result.emplace_back(edge.a, edge.weight);
    }
    std::sort(result.begin(), result.end());
    return result;
}

namespace {

using nlohmann::json;

EnergyGraph graph_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
        throw std::invalid_argument(
            "topology: document needs 'nodes' and 'edges' arrays");
    }
    EnergyGraph graph;
    for (const json& node : doc.at("nodes")) {
        int id = node.at("id").get<int>();
        NodeRole role = NodeRole::Idle;
        if (node.contains("role")) {
            auto parsed = node_role_from_string(node.at("role").get<std::string>());
            if (!parsed) {
                throw std::invalid_argument("topology: unknown role '" +
                                            node.at("role").get<std::string>() +
                                            "' on node " + std::to_string(id));
            }
            role = *parsed;
        }
        graph.add_node(id, role);
    }
    for (const json& edge : doc.at("edges")) {
        double weight = edge.value("weight", 1.0);
        std::optional<double> probability;
        if (edge.contains("probability")) {
            probability = edge.at("probability").get<double>();
        }
        graph.add_edge(edge.at("a").get<int>(), edge.at("b").get<int>(), weight,
                       probability);
    }
    return graph;
}

} // namespace

EnergyGraph load_topology_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("topology: invalid JSON: ") +
                                    e.what());
    }
    return graph_from_json(doc);
}

EnergyGraph load_topology_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("topology: cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_topology_text(buffer.str());
}

EnergyGraph ieee39_topology() {
    // 34 transmission lines plus 12 transformer branches of the New
    // England test system; all unit weight.
    static constexpr std::pair<int, int> kLines[] = {
        {1, 2},   {1, 39},  {2, 3},   {2, 25},  {2, 30},  {3, 4},   {3, 18},
        {4, 5},   {4, 14},  {5, 6},   {5, 8},   {6, 7},   {6, 11},  {6, 31},
        {7, 8},   {8, 9},   {9, 39},  {10, 11}, {10, 13}, {10, 32}, {11, 12},
        {12, 13}, {13, 14}, {14, 15}, {15, 16}, {16, 17}, {16, 19}, {16, 21},
        {16, 24}, {17, 18}, {17, 27}, {19, 20}, {19, 33}, {20, 34}, {21, 22},
        {22, 23}, {22, 35}, {23, 24}, {23, 36}, {25, 26}, {25, 37}, {26, 27},
        {26, 28}, {26, 29}, {28, 29}, {29, 38},
    };
    EnergyGraph graph;
    for (int id = 1; id <= 39; ++id) {
        graph.add_node(id, id >= 30 ? NodeRole::Source : NodeRole::Idle);
    }
    for (const auto& [a, b] : kLines) {
        graph.add_edge(a, b);
    }
    return graph;
}

namespace {

// Lexicographic order on node sequences; ties in cost resolve to the
// smaller sequence so results are platform-independent.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Label {
    double cost;
    std::vector<int> path;
    int node;
};

struct LabelGreater {
    bool operator()(const Label& a, const Label& b) const {
        if (a.cost != b.cost) return a.cost > b.cost;
        return lex_less(b.path, a.path);
    }
};

} // namespace

PathResult shortest_path(const EnergyGraph& graph, int src, int dst) {
    if (!graph.has_node(src) || !graph.has_node(dst)) {
        throw std::invalid_argument("shortest_path: node not in graph");
    }
    PathResult result;
    if (src == dst) {
        result.reachable = true;
        result.nodes = {src};
        result.cost = 0.0;
        return result;
    }

    std::priority_queue<Label, std::vector<Label>, LabelGreater> frontier;
    frontier.push(Label{0.0, {src}, src});
    std::map<int, bool> settled;

    while (!frontier.empty()) {
        Label label = frontier.top();
        frontier.pop();
        if (settled[label.node]) continue;
        settled[label.node] = true;
        if (label.node == dst) {
            result.reachable = true;
            result.nodes = std::move(label.path);
            result.cost = label.cost;
            return result;
        }
        for (const auto& [next, weight] : graph.neighbors(label.node)) {
            if (settled[next]) continue;
            Label extended{label.cost + weight, label.path, next};
            extended.path.push_back(next);
            frontier.push(std::move(extended));
        }
    }
    return result; // unreachable
}

RoutingPlan route(const EnergyGraph& graph, const std::map<int, Energy>& demands,
                  const RoutingParams& params) {
    if (params.path_loss < 0.0 || params.path_loss >= 1.0) {
        throw std::invalid_argument("routing: path_loss must be in [0, 1)");
    }
    std::vector<int> sources = graph.nodes_with_role(NodeRole::Source);
    if (sources.empty()) {
        throw std::invalid_argument("routing: no source node in graph");
    }
    for (const auto& [consumer, demand] : demands) {
        if (demand <= 0.0) {
            throw std::invalid_argument("routing: demand must be positive for node " +
                                        std::to_string(consumer));
        }
        if (!graph.has_node(consumer)) {
            throw std::invalid_argument("routing: unknown consumer " +
                                        std::to_string(consumer));
        }
    }

    std::vector<std::pair<int, Energy>> order(demands.begin(), demands.end());
    switch (params.order) {
        case ConsumerOrder::DescendingDemand:
            std::stable_sort(order.begin(), order.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.second != b.second) return a.second > b.second;
                                 return a.first < b.first;
                             });
            break;
        case ConsumerOrder::AscendingDemand:
            std::stable_sort(order.begin(), order.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.second != b.second) return a.second < b.second;
                                 return a.first < b.first;
                             });
            break;
        case ConsumerOrder::Arrival:
            break; // map order: ascending consumer id
    }

    std::map<int, std::size_t> load; // assignments per source
    RoutingPlan plan;
    Energy total_sent = 0.0;

    for (const auto& [consumer, demand] : order) {
        int best_source = 0;
        PathResult best_path;
        bool found = false;
        for (int source : sources) {
            if (load[source] >= params.max_users_per_source) continue;
            PathResult path = shortest_path(graph, source, consumer);
            if (!path.reachable) continue;
            if (!found || path.cost < best_path.cost ||
                (path.cost == best_path.cost && source < best_source)) {
                best_source = source;
                best_path = std::move(path);
                found = true;
            }
        }

        if (!found) {
            plan.queued.push_back(consumer);
            continue;
        }

        double loss = params.path_loss;
        if (params.per_hop_loss) {
            std::size_t hops = best_path.nodes.size() - 1;
            loss = 1.0 - std::pow(1.0 - params.path_loss,
                                  static_cast<double>(hops));
        }
        Energy sent = demand / (1.0 - loss);
        if (total_sent + sent > params.global_capacity + kEnergyTol) {
            plan.queued.push_back(consumer);
            continue;
        }
        total_sent += sent;
        ++load[best_source];
        plan.assignments.push_back(Assignment{consumer, best_source,
                                              std::move(best_path.nodes), sent,
                                              sent * (1.0 - loss)});
    }
    return plan;
}

std::map<int, std::vector<NodeRole>> snapshot_roles(const RoutingPlan& plan,
                                                    const EnergyGraph& graph) {
    std::map<int, std::vector<NodeRole>> roles;
    auto add_role = [&](int id, NodeRole role) {
        auto& list = roles[id];
        if (std::find(list.begin(), list.end(), role) == list.end()) {
            list.push_back(role);
        }
    };

    for (const Assignment& assignment : plan.assignments) {
        add_role(assignment.source, NodeRole::Source);
        add_role(assignment.consumer, NodeRole::Consumer);
        for (std::size_t i = 1; i + 1 < assignment.path.size(); ++i) {
            add_role(assignment.path[i], NodeRole::PassThrough);
        }
    }
    for (int consumer : plan.queued) {
        add_role(consumer, NodeRole::Queued);
    }
    for (const TopologyNode& node : graph.nodes()) {
        if (!roles.contains(node.id)) {
            add_role(node.id, NodeRole::Idle);
        }
    }
    return roles;
}

namespace {

// Fill colors follow the Fig-8 key: sources green, receiving users
// orange, idle users light yellow, queued users red, pass-through blue.
const char* role_color(NodeRole role) {
    switch (role) {
        case NodeRole::Source: return "green";
        case NodeRole::Consumer: return "orange";
        case NodeRole::Idle: return "lightyellow";
        case NodeRole::PassThrough: return "blue";
        case NodeRole::Queued: return "red";
    }
    return "lightyellow";
}

NodeRole display_role(const std::vector<NodeRole>& roles) {
    // Precedence when a node plays several roles at once.
    for (NodeRole preferred :
         {NodeRole::Source, NodeRole::Queued, NodeRole::Consumer,
          NodeRole::PassThrough, NodeRole::Idle}) {
        if (std::find(roles.begin(), roles.end(), preferred) != roles.end()) {
            return preferred;
        }
    }
    return NodeRole::Idle;
}

std::string export_dot(const RoutingPlan& plan, const EnergyGraph& graph) {
    std::ostringstream out;
    auto roles = snapshot_roles(plan, graph);

    out << "digraph dpn_snapshot {\n";
    out << "  node [style=filled, fontsize=10];\n";
    for (const TopologyNode& node : graph.nodes()) {
        out << "  n" << node.id << " [label=\"" << node.id << "\", fillcolor=\""
            << role_color(display_role(roles[node.id])) << "\"];\n";
    }
    for (const TopologyEdge& edge : graph.edges()) {
        out << "  n" << edge.a << " -> n" << edge.b
            << " [dir=none, color=gray60";
        if (edge.probability) {
            char label[32];
            std::snprintf(label, sizeof(label), "%.2f", *edge.probability);
            out << ", label=\"" << label << "\", fontsize=8";
        }
        out << "];\n";
    }
    for (const Assignment& assignment : plan.assignments) {
        for (std::size_t i = 0; i + 1 < assignment.path.size(); ++i) {
            out << "  n" << assignment.path[i] << " -> n"
                << assignment.path[i + 1]
                << " [color=lightblue3, penwidth=2.0];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string export_json(const RoutingPlan& plan, const EnergyGraph& graph) {
    json doc;
    auto roles = snapshot_roles(plan, graph);

    json nodes = json::array();
    for (const TopologyNode& node : graph.nodes()) {
        json names = json::array();
        for (NodeRole role : roles[node.id]) names.push_back(to_string(role));
        nodes.push_back({{"id", node.id}, {"roles", std::move(names)}});
    }
    doc["nodes"] = std::move(nodes);

    json assignments = json::array();
    for (const Assignment& assignment : plan.assignments) {
        assignments.push_back({{"consumer", assignment.consumer},
                               {"source", assignment.source},
                               {"path", assignment.path},
                               {"sent", assignment.sent},
                               {"delivered", assignment.delivered}});
    }
    doc["assignments"] = std::move(assignments);
    doc["queued"] = plan.queued;
    return doc.dump(2);
}

} // namespace

std::string export_snapshot(const RoutingPlan& plan, const EnergyGraph& graph,
                            SnapshotFormat format) {
    switch (format) {
        case SnapshotFormat::Dot: return export_dot(plan, graph);
        case SnapshotFormat::Json: return export_json(plan, graph);
    }
    throw std::invalid_argument("export_snapshot: unknown format");
}

RoutingPlan import_snapshot(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("snapshot: invalid JSON: ") +
                                    e.what());
    }
    RoutingPlan plan;
    for (const json& assignment : doc.at("assignments")) {
        plan.assignments.push_back(
            Assignment{assignment.at("consumer").get<int>(),
                       assignment.at("source").get<int>(),
                       assignment.at("path").get<std::vector<int>>(),
                       assignment.at("sent").get<double>(),
                       assignment.at("delivered").get<double>()});
    }
    plan.queued = doc.at("queued").get<std::vector<int>>();
    return plan;
}

} // namespace dpn
