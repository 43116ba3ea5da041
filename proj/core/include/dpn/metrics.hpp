// Per-round counters, cross-simulation aggregation, and golden-table
// comparison.
//
// Per-round metric keys mirror the summary-table row labels the grid
// operator reports (one key per row); the label registry keeps the
// golden comparison self-documenting.

#ifndef DPN_METRICS_HPP
#define DPN_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpn/types.hpp"

namespace dpn {

struct RoundMetrics {
    double effective_cap = 0.0;
    double energy_distributed = 0.0;
    double energy_requested = 0.0;
    double customers_requested = 0.0;
    double customers_received = 0.0;
    double customers_in_queue = 0.0;
    double customers_entered_queue = 0.0;
    double customers_satisfied_from_queue = 0.0;
    double customers_dropped = 0.0;
    double battery_distributed = 0.0;
    double battery_available = 0.0;
    double battery_requested = 0.0;
    double customers_requested_battery = 0.0;
    double customers_received_battery = 0.0;
    double solar_produced = 0.0;
    double grid_bonus = 0.0;
    double total_delivered = 0.0;
};

struct MetricField {
    const char* key;
    const char* table_label;
    double RoundMetrics::*member;
};

std::span<const MetricField> round_metric_fields();

// Numerically stable one-pass mean/variance.
class Welford {
public:
    void add(double x) {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const { return n_; }
    double mean() const { return n_ ? mean_ : 0.0; }
    double sample_variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double sample_stddev() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Queue-wait statistics collected over one complete run.
struct RunWaitStats {
    // Mean rounds an entry waits in the queue per episode; episodes cut
    // short by the end of the run count the rounds they did wait.
    double rounds_in_queue = 0.0;
    // Mean rounds from entering the queue to the grant, inclusive of
    // the grant round (satisfied episodes only).
    double rounds_to_satisfaction = 0.0;
    // Mean rounds from entering the queue to a battery grant.
    double battery_wait = 0.0;
    double never_satisfied_in_queue = 0.0;
    double unsatisfied_at_end = 0.0;
    double never_satisfied_by_battery = 0.0;

    std::size_t episodes = 0;
    std::size_t satisfied_episodes = 0;
    std::size_t battery_episodes = 0;
};

// Streaming accumulator over the rounds of a single run.
class RunAccumulator {
public:
    RunAccumulator();

    void add(const RoundMetrics& metrics);

    const Welford& field(std::size_t index) const { return fields_[index]; }
    std::size_t rounds() const { return rounds_; }
    std::size_t queue_empty_rounds() const { return queue_empty_rounds_; }

    RunWaitStats waits;
    // Digest of the generating config; aggregate() refuses to pool runs
    // with differing digests.
    std::uint64_t config_digest = 0;

private:
    std::vector<Welford> fields_;
    std::size_t rounds_ = 0;
    std::size_t queue_empty_rounds_ = 0;
};

void record_round(const RoundMetrics& metrics, RunAccumulator& accumulator);

struct SummaryEntry {
    std::string key;
    std::string label;
    double mean = 0.0;
    // Variation across runs (stddev of per-run means); 0 for a single run.
    double stddev = 0.0;
};

struct SummaryTable {
    std::vector<SummaryEntry> entries;
    std::size_t runs = 0;
    std::size_t total_rounds = 0;

    const SummaryEntry* find(std::string_view key) const;
    double mean_of(std::string_view key) const;
};

// Pools means over all rounds of all runs; per-run variation becomes the
// between-run stddev. Throws std::invalid_argument when runs carry
// different config digests.
SummaryTable aggregate(const std::vector<RunAccumulator>& runs);

struct ComparisonRow {
    std::string key;
    std::string label;
    double simulated = 0.0;
    double reference = 0.0;
    double relative_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::string reference;
    std::vector<ComparisonRow> rows;
    bool all_pass = true;
};

// Known references: table2_battery, table2_nobattery, table3_unopt,
// table3_opt. Tolerances are relative fractions keyed by metric; keys
// absent from the map use default_tolerance. Throws std::invalid_argument
// for an unknown reference name.
ComparisonReport compare_to_reference(const SummaryTable& summary,
                                      const std::string& reference,
                                      const std::map<std::string, double>& tolerances,
                                      double default_tolerance = 0.10);

// Golden per-round means transcribed from the reference tables.
const std::map<std::string, double>& reference_table(const std::string& name);

// One row per simulated round, with the sweep/replica context that
// identifies it. Column order is fixed; see README.
struct RoundRecord {
    std::size_t point_index = 0;
    double p_request = 0.0;
    double p_stay_on = 0.0;
    std::size_t sim = 0;
    std::size_t round = 0;
    RoundMetrics metrics;
};

void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> rows);
std::string summary_to_json(const SummaryTable& summary);
std::string comparison_to_json(const ComparisonReport& report);

// Deterministic float formatting shared by the CSV and JSON writers.
std::string format_metric(double value);

} // namespace dpn

#endif // DPN_METRICS_HPP
