#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itr/core/config.hpp"
#include "itr/eval/metrics.hpp"

namespace itr {

// Rule labels used in reports.
//   optimal             posterior loss-minimizing rule from the flexible model
//   distilled_tree      tree fit to the optimal rule's soft labels
//   direct_tree         tree fit to (X, T, Y), then loss-minimized
//   distilled_logistic  logistic fit to the soft labels
//   direct_logistic     logistic fit to (X, T, Y), then loss-minimized
inline constexpr const char* kRuleOptimal = "optimal";
inline constexpr const char* kRuleDistilledTree = "distilled_tree";
inline constexpr const char* kRuleDirectTree = "direct_tree";
inline constexpr const char* kRuleDistilledLogistic = "distilled_logistic";
inline constexpr const char* kRuleDirectLogistic = "direct_logistic";

inline constexpr const char* kMetrics[] = {"R", "V", "accuracy", "precision", "recall"};

struct ReplicateRecord {
    std::string scenario;
    int replicate = 0;
    int threshold = 0;  // percent
    std::string rule;
    RuleScore score;
};

struct ReplicateFailure {
    std::string scenario;
    int replicate = 0;
    std::string message;
};

struct SummaryRow {
    std::string scenario;
    int threshold = 0;
    std::string rule;
    std::string metric;
    double mean = 0.0;
    std::optional<double> se;  // needs two or more defined replicates
    std::size_t n_defined = 0;
};

struct ReplicationReport {
    std::vector<SummaryRow> summary;
    // Sorted by (scenario, replicate, threshold, rule).
    std::vector<ReplicateRecord> records;
    std::vector<ReplicateFailure> failures;
    std::size_t replicates = 0;
};

// Scores every rule of one simulated replicate at every threshold.
std::vector<ReplicateRecord> run_replicate(const ExperimentConfig& config,
                                           const std::string& scenario, int replicate);

// Runs all (scenario, replicate) jobs on `jobs` worker threads and aggregates.
// Output does not depend on the worker count or completion order.
ReplicationReport run_replications(const ExperimentConfig& config, unsigned jobs = 1);

// Means and standard errors over the defined values of each metric.
std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records);

// scenario,threshold,rule,metric,mean,se,n_defined
void write_report_csv(const ReplicationReport& report, const std::string& path);
// One row per (scenario, replicate, threshold, rule) with every metric.
void write_replicates_csv(const ReplicationReport& report, const std::string& path);
// scenario,metric,threshold,<rule>_mean,<rule>_se,... for plotting metric x threshold x rule panels.
void write_plot_data_csv(const ReplicationReport& report, const std::string& path);

}  // namespace itr
