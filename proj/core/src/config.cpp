#include "dpn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dpn {

namespace {

using nlohmann::json;

void check_probability(std::vector<std::string>& errors, const std::string& field,
                       double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        errors.push_back(field + ": probability out of range [0,1], got " +
                         std::to_string(value));
    }
}

} // namespace

std::string to_string(AllocationPolicy policy) {
    switch (policy) {
        case AllocationPolicy::SmallestFirst: return "smallest_first";
        case AllocationPolicy::LargestFirst: return "largest_first";
        case AllocationPolicy::GeneticOptimizer: return "genetic";
    }
    return "smallest_first";
}

std::optional<AllocationPolicy> policy_from_string(const std::string& name) {
    if (name == "smallest_first") return AllocationPolicy::SmallestFirst;
    if (name == "largest_first") return AllocationPolicy::LargestFirst;
    if (name == "genetic") return AllocationPolicy::GeneticOptimizer;
    return std::nullopt;
}

std::vector<std::string> validate_config(const GridConfig& config) {
    std::vector<std::string> errors;

    check_probability(errors, "p_request", config.p_request);
    check_probability(errors, "p_stay_on", config.p_stay_on);
    check_probability(errors, "p_stay_queue", config.p_stay_queue);
    check_probability(errors, "p_change_queue_status", config.p_change_queue_status);

    if (config.energy_cap < 0.0) {
        errors.push_back("energy_cap: negative cap");
    }
    if (config.max_request_per_user <= 0.0) {
        errors.push_back("max_request_per_user: must be positive");
    }
    if (config.n_special_users > config.n_users) {
        errors.push_back("n_special_users: exceeds n_users (" +
                         std::to_string(config.n_special_users) + " > " +
                         std::to_string(config.n_users) + ")");
    }
    if (config.n_users == 0) {
        errors.push_back("n_users: must be at least 1");
    }
    if (config.n_rounds == 0) {
        errors.push_back("n_rounds: must be at least 1");
    }
    if (config.n_simulations == 0) {
        errors.push_back("n_simulations: must be at least 1");
    }

    if (config.battery) {
        if (config.battery->capacity < 0.0) {
            errors.push_back("battery.capacity: negative cap");
        }
        if (config.battery->initial_charge < 0.0 ||
            config.battery->initial_charge > config.battery->capacity + kEnergyTol) {
            errors.push_back("battery.initial_charge: outside [0, capacity]");
        }
    }
    if (config.solar) {
        if (config.solar->solar_cap < 0.0) {
            errors.push_back("solar.solar_cap: negative cap");
        }
        check_probability(errors, "solar.p_sun", config.solar->p_sun);
    }
    if (config.solar && !config.battery) {
        errors.push_back("solar: requires a battery (solar production charges it)");
    }
    if (config.ga) {
        check_probability(errors, "ga.mutation_rate", config.ga->mutation_rate);
        check_probability(errors, "ga.crossover_rate", config.ga->crossover_rate);
        if (config.ga->population_size == 0) {
            errors.push_back("ga.population_size: must be at least 1");
        }
        if (config.ga->elitism >= config.ga->population_size) {
            errors.push_back("ga.elitism: must be smaller than population_size");
        }
    }
    if (config.policy == AllocationPolicy::GeneticOptimizer && !config.ga) {
        errors.push_back("policy: genetic requires a ga parameter block");
    }

    return errors;
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw std::runtime_error(std::string(key) + ": wrong type");
        }
    }
}

GaParams parse_ga(const json& j) {
    GaParams ga;
    read_field(j, "population_size", ga.population_size);
    read_field(j, "generations", ga.generations);
    read_field(j, "mutation_rate", ga.mutation_rate);
    read_field(j, "crossover_rate", ga.crossover_rate);
    read_field(j, "elitism", ga.elitism);
    read_field(j, "w_energy", ga.w_energy);
    read_field(j, "w_count", ga.w_count);
    read_field(j, "w_queue_age", ga.w_queue_age);
    return ga;
}

} // namespace

GridConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw std::runtime_error("config: top level must be an object");
    }

    GridConfig config;
    read_field(j, "n_users", config.n_users);
    read_field(j, "energy_cap", config.energy_cap);
    read_field(j, "p_stay_queue", config.p_stay_queue);
    read_field(j, "p_change_queue_status", config.p_change_queue_status);
    read_field(j, "n_special_users", config.n_special_users);
    read_field(j, "n_rounds", config.n_rounds);
    read_field(j, "n_simulations", config.n_simulations);
    read_field(j, "seed", config.seed);
    read_field(j, "p_request", config.p_request);
    read_field(j, "p_stay_on", config.p_stay_on);
    read_field(j, "max_request_per_user", config.max_request_per_user);

    if (auto it = j.find("policy"); it != j.end()) {
        std::string name = it->get<std::string>();
        auto policy = policy_from_string(name);
        if (!policy) {
            throw std::runtime_error("policy: unknown value '" + name +
                                     "' (expected smallest_first, largest_first "
                                     "or genetic)");
        }
        config.policy = *policy;
    }
    if (auto it = j.find("battery"); it != j.end() && !it->is_null()) {
        StorageConfig battery;
        read_field(*it, "capacity", battery.capacity);
        battery.initial_charge = battery.capacity; // default: starts full
        read_field(*it, "initial_charge", battery.initial_charge);
        config.battery = battery;
    }
    if (auto it = j.find("solar"); it != j.end() && !it->is_null()) {
        SolarConfig solar;
        read_field(*it, "solar_cap", solar.solar_cap);
        read_field(*it, "p_sun", solar.p_sun);
        config.solar = solar;
    }
    if (auto it = j.find("ga"); it != j.end() && !it->is_null()) {
        config.ga = parse_ga(*it);
    }
    return config;
}

GridConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string config_to_json(const GridConfig& config) {
    json j;
    j["n_users"] = config.n_users;
    j["energy_cap"] = config.energy_cap;
    j["p_stay_queue"] = config.p_stay_queue;
    j["p_change_queue_status"] = config.p_change_queue_status;
    j["policy"] = to_string(config.policy);
    j["n_special_users"] = config.n_special_users;
    j["n_rounds"] = config.n_rounds;
    j["n_simulations"] = config.n_simulations;
    j["seed"] = config.seed;
    j["p_request"] = config.p_request;
    j["p_stay_on"] = config.p_stay_on;
    j["max_request_per_user"] = config.max_request_per_user;
    if (config.battery) {
        j["battery"] = {{"capacity", config.battery->capacity},
                        {"initial_charge", config.battery->initial_charge}};
    }
    if (config.solar) {
        j["solar"] = {{"solar_cap", config.solar->solar_cap},
                      {"p_sun", config.solar->p_sun}};
    }
    if (config.ga) {
        j["ga"] = {{"population_size", config.ga->population_size},
                   {"generations", config.ga->generations},
                   {"mutation_rate", config.ga->mutation_rate},
                   {"crossover_rate", config.ga->crossover_rate},
                   {"elitism", config.ga->elitism},
                   {"w_energy", config.ga->w_energy},
                   {"w_count", config.ga->w_count},
                   {"w_queue_age", config.ga->w_queue_age}};
    }
    return j.dump(2);
}

} // namespace dpn
