#include "dpn/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace dpn {

namespace {

constexpr std::array<MetricField, 17> kFields{{
    {"effective_cap", "Effective energy cap for the round",
     &RoundMetrics::effective_cap},
    {"energy_distributed", "Energy distributed per round",
     &RoundMetrics::energy_distributed},
    {"energy_requested", "Energy requested per round",
     &RoundMetrics::energy_requested},
    {"customers_requested", "Number of customers that requested energy per round",
     &RoundMetrics::customers_requested},
    {"customers_received", "Number of customers that received energy per round",
     &RoundMetrics::customers_received},
    {"customers_in_queue", "Number of customers in the queue per round",
     &RoundMetrics::customers_in_queue},
    {"customers_entered_queue",
     "Number of customers that entered the queue per round",
     &RoundMetrics::customers_entered_queue},
    {"customers_satisfied_from_queue",
     "Number of customers that were satisfied in the queue per round",
     &RoundMetrics::customers_satisfied_from_queue},
    {"customers_dropped", "Number of requests dropped from the queue per round",
     &RoundMetrics::customers_dropped},
    {"battery_distributed", "Energy distributed by the battery per round",
     &RoundMetrics::battery_distributed},
    {"battery_available", "Energy available in the battery per round",
     &RoundMetrics::battery_available},
    {"battery_requested", "Energy requested from battery per round",
     &RoundMetrics::battery_requested},
    {"customers_requested_battery",
     "Number of customers that requested from the battery per round",
     &RoundMetrics::customers_requested_battery},
    {"customers_received_battery",
     "Number of customers that received energy from the battery per round",
     &RoundMetrics::customers_received_battery},
    {"solar_produced", "Solar energy produced per round",
     &RoundMetrics::solar_produced},
    {"grid_bonus", "Solar overflow added to the next round's cap",
     &RoundMetrics::grid_bonus},
    {"total_delivered", "Total energy delivered (Battery+Grid) per round",
     &RoundMetrics::total_delivered},
}};

struct WaitField {
    const char* key;
    const char* label;
    double RunWaitStats::*member;
    std::size_t RunWaitStats::*weight; // nullptr -> weight by run
};

constexpr std::array<WaitField, 6> kWaitFields{{
    {"rounds_in_queue", "Number of rounds a customer spends in the queue",
     &RunWaitStats::rounds_in_queue, &RunWaitStats::episodes},
    {"rounds_to_satisfaction",
     "Number of rounds a customer in the queue waits to be satisfied",
     &RunWaitStats::rounds_to_satisfaction, &RunWaitStats::satisfied_episodes},
    {"battery_wait", "Wait time to receive energy from the battery",
     &RunWaitStats::battery_wait, &RunWaitStats::battery_episodes},
    {"never_satisfied_in_queue",
     "Number of customers that were never satisfied in the queue",
     &RunWaitStats::never_satisfied_in_queue, nullptr},
    {"unsatisfied_at_end",
     "Number of customers not satisfied by the end of the rounds",
     &RunWaitStats::unsatisfied_at_end, nullptr},
    {"never_satisfied_by_battery",
     "Number of customers that were never satisfied by the battery",
     &RunWaitStats::never_satisfied_by_battery, nullptr},
}};

} // namespace

std::span<const MetricField> round_metric_fields() { return kFields; }

double Welford::sample_stddev() const { return std::sqrt(sample_variance()); }

RunAccumulator::RunAccumulator() : fields_(kFields.size()) {}

void RunAccumulator::add(const RoundMetrics& metrics) {
    for (std::size_t i = 0; i < kFields.size(); ++i) {
        fields_[i].add(metrics.*(kFields[i].member));
    }
    if (metrics.customers_in_queue == 0.0) {
        ++queue_empty_rounds_;
    }
    ++rounds_;
}

void record_round(const RoundMetrics& metrics, RunAccumulator& accumulator) {
    accumulator.add(metrics);
}

const SummaryEntry* SummaryTable::find(std::string_view key) const {
    for (const SummaryEntry& entry : entries) {
        if (entry.key == key) return &entry;
    }
    return nullptr;
}

double SummaryTable::mean_of(std::string_view key) const {
    const SummaryEntry* entry = find(key);
    if (!entry) {
        throw std::invalid_argument("summary: unknown metric " + std::string(key));
    }
    return entry->mean;
}

SummaryTable aggregate(const std::vector<RunAccumulator>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate: no runs");
    }
    for (const RunAccumulator& run : runs) {
        if (run.config_digest != runs.front().config_digest) {
            throw std::invalid_argument("aggregate: config mismatch between runs");
        }
    }

    SummaryTable table;
    table.runs = runs.size();
    for (const RunAccumulator& run : runs) table.total_rounds += run.rounds();

    for (std::size_t i = 0; i < kFields.size(); ++i) {
        double pooled = 0.0;
        std::size_t pooled_n = 0;
        Welford between;
        for (const RunAccumulator& run : runs) {
            pooled += run.field(i).mean() * static_cast<double>(run.field(i).count());
            pooled_n += run.field(i).count();
            between.add(run.field(i).mean());
        }
        SummaryEntry entry;
        entry.key = kFields[i].key;
        entry.label = kFields[i].table_label;
        entry.mean = pooled_n ? pooled / static_cast<double>(pooled_n) : 0.0;
        entry.stddev = runs.size() > 1 ? between.sample_stddev() : 0.0;
        table.entries.push_back(std::move(entry));
    }

    for (const WaitField& field : kWaitFields) {
        double weighted = 0.0;
        double weight_sum = 0.0;
        Welford between;
        for (const RunAccumulator& run : runs) {
            double w = field.weight
                           ? static_cast<double>(run.waits.*(field.weight))
                           : 1.0;
            weighted += (run.waits.*(field.member)) * w;
            weight_sum += w;
            between.add(run.waits.*(field.member));
        }
        SummaryEntry entry;
        entry.key = field.key;
        entry.label = field.label;
        entry.mean = weight_sum > 0.0 ? weighted / weight_sum : 0.0;
        entry.stddev = runs.size() > 1 ? between.sample_stddev() : 0.0;
        table.entries.push_back(std::move(entry));
    }

    {
        double empty = 0.0;
        for (const RunAccumulator& run : runs) {
            empty += static_cast<double>(run.queue_empty_rounds());
        }
        SummaryEntry entry;
        entry.key = "queue_empty_fraction";
        entry.label = "Fraction of rounds with an empty queue";
        entry.mean = table.total_rounds
                         ? empty / static_cast<double>(table.total_rounds)
                         : 0.0;
        table.entries.push_back(std::move(entry));
    }
    {
        double episodes = 0.0;
        double satisfied = 0.0;
        for (const RunAccumulator& run : runs) {
            episodes += static_cast<double>(run.waits.episodes);
            satisfied += static_cast<double>(run.waits.satisfied_episodes);
        }
        SummaryEntry total;
        total.key = "queue_episodes";
        total.label = "Queue episodes over all runs";
        total.mean = episodes;
        table.entries.push_back(std::move(total));
        SummaryEntry sat;
        sat.key = "queue_satisfied_episodes";
        sat.label = "Queue episodes ending in a grant over all runs";
        sat.mean = satisfied;
        table.entries.push_back(std::move(sat));
    }
    return table;
}

namespace {

const std::map<std::string, std::map<std::string, double>>& golden_tables() {
    static const std::map<std::string, std::map<std::string, double>> tables{
        {"table2_nobattery",
         {
             {"energy_distributed", 99.5326},
             {"energy_requested", 190.4968},
             {"customers_in_queue", 92.9716},
             {"customers_received", 202.5528},
             {"customers_requested", 295.5244},
             {"customers_entered_queue", 6.8888},
             {"customers_satisfied_from_queue", 4.8032},
             {"unsatisfied_at_end", 104.2800},
             {"never_satisfied_in_queue", 79.2000},
             {"total_delivered", 99.5326},
             {"rounds_to_satisfaction", 10.7096},
             {"rounds_in_queue", 9.2972},
         }},
        {"table2_battery",
         {
             {"energy_distributed", 99.5224},
             {"energy_requested", 189.0862},
             {"customers_in_queue", 91.5224},
             {"customers_received", 203.1692},
             {"customers_requested", 294.6916},
             {"customers_entered_queue", 6.7464},
             {"customers_satisfied_from_queue", 4.6908},
             {"unsatisfied_at_end", 102.7800},
             {"never_satisfied_in_queue", 79.3600},
             {"battery_distributed", 0.4662},
             {"battery_available", 9.4556},
             {"battery_requested", 9.4556},
             {"customers_requested_battery", 9.2533},
             {"customers_received_battery", 0.4752},
             {"never_satisfied_by_battery", 25.8200},
             {"total_delivered", 99.9886},
             {"rounds_to_satisfaction", 10.5674},
             {"rounds_in_queue", 9.1522},
             {"battery_wait", 9.4713},
         }},
        {"table3_unopt",
         {
             {"energy_distributed", 99.53},
             {"energy_requested", 189.80},
             {"customers_in_queue", 92.29},
             {"customers_received", 203.10},
             {"customers_requested", 295.4},
             {"customers_satisfied_from_queue", 4.83},
             {"battery_distributed", 2.417},
             {"battery_available", 0.897},
             {"solar_produced", 2.443},
             {"customers_requested_battery", 9.312},
             {"customers_received_battery", 2.476},
             {"total_delivered", 101.9},
             {"rounds_to_satisfaction", 10.56},
             {"rounds_in_queue", 9.229},
             {"battery_wait", 0.2033},
         }},
        {"table3_opt",
         {
             {"energy_distributed", 99.978},
             {"energy_requested", 148.23},
             {"customers_in_queue", 96.73},
             {"customers_received", 200.356},
             {"customers_requested", 297.11},
             {"customers_satisfied_from_queue", 47.73},
             {"battery_distributed", 2.5571},
             {"battery_available", 0.0020},
             {"solar_produced", 2.5571},
             {"customers_requested_battery", 49.9740},
             {"customers_received_battery", 6.49},
             {"total_delivered", 102.55},
             {"rounds_to_satisfaction", 2.0856},
             {"rounds_in_queue", 9.67},
             {"battery_wait", 6.3794},
         }},
    };
    return tables;
}

std::string label_for_key(const std::string& key) {
    for (const MetricField& field : kFields) {
        if (key == field.key) return field.table_label;
    }
    for (const WaitField& field : kWaitFields) {
        if (key == field.key) return field.label;
    }
    return key;
}

} // namespace

const std::map<std::string, double>& reference_table(const std::string& name) {
    const auto& tables = golden_tables();
    auto it = tables.find(name);
    if (it == tables.end()) {
        throw std::invalid_argument("unknown reference table: " + name);
    }
    return it->second;
}

ComparisonReport compare_to_reference(const SummaryTable& summary,
                                      const std::string& reference,
                                      const std::map<std::string, double>& tolerances,
                                      double default_tolerance) {
    const auto& golden = reference_table(reference);

    ComparisonReport report;
    report.reference = reference;
    for (const auto& [key, value] : golden) {
        const SummaryEntry* entry = summary.find(key);
        if (!entry) continue;

        ComparisonRow row;
        row.key = key;
        row.label = label_for_key(key);
        row.simulated = entry->mean;
        row.reference = value;
        row.relative_deviation =
            value != 0.0 ? std::abs(entry->mean - value) / std::abs(value)
                         : std::abs(entry->mean);
        auto tol = tolerances.find(key);
        row.tolerance = tol != tolerances.end() ? tol->second : default_tolerance;
        row.pass = row.relative_deviation <= row.tolerance;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string format_metric(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> rows) {
    out << "point_index,p_request,p_stay_on,sim,round";
    for (const MetricField& field : kFields) {
        out << ',' << field.key;
    }
    out << '\n';
    for (const RoundRecord& row : rows) {
        out << row.point_index << ',' << format_metric(row.p_request) << ','
            << format_metric(row.p_stay_on) << ',' << row.sim << ',' << row.round;
        for (const MetricField& field : kFields) {
            out << ',' << format_metric(row.metrics.*(field.member));
        }
        out << '\n';
    }
}

std::string summary_to_json(const SummaryTable& summary) {
    nlohmann::json j;
    j["runs"] = summary.runs;
    j["total_rounds"] = summary.total_rounds;
    nlohmann::json entries = nlohmann::json::array();
    for (const SummaryEntry& entry : summary.entries) {
        entries.push_back({{"key", entry.key},
                           {"label", entry.label},
                           {"mean", entry.mean},
                           {"stddev", entry.stddev}});
    }
    j["metrics"] = std::move(entries);
    return j.dump(2);
}

std::string comparison_to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["reference"] = report.reference;
    j["all_pass"] = report.all_pass;
    nlohmann::json rows = nlohmann::json::array();
    for (const ComparisonRow& row : report.rows) {
        rows.push_back({{"key", row.key},
                        {"label", row.label},
                        {"simulated", row.simulated},
                        {"reference", row.reference},
                        {"relative_deviation", row.relative_deviation},
                        {"tolerance", row.tolerance},
                        {"pass", row.pass}});
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

} // namespace dpn
