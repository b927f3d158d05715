#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "labsched/search.hpp"

namespace labsched {

struct ResultRecord {
    std::string instance;
    std::string algo;
    std::string nbhd;
    std::uint64_t seed = 0;
    int rep = 0;  // 1-based repetition index
    double best_mtat = 0.0;
    std::uint64_t evals = 0;
    double cpu_seconds = 0.0;
};

// instance name -> optimal or best-so-far MTAT
using BestKnownTable = std::map<std::string, double>;

struct Metrics {
    double bre = 0.0;
    double are = 0.0;
    double wre = 0.0;
    double arpd = 0.0;
    double acpu = 0.0;
};

// Relative errors e_l = (I_l - C*) / C*; BRE = min, WRE = max,
// ARE = ARPD = mean; ACPU = mean cpu seconds.
Metrics compute_metrics(std::span<const ResultRecord> records, double c_star);

struct FriedmanResult {
    std::vector<double> average_ranks;  // per treatment, 1 = best (lowest value)
    double chi2 = 0.0;
};

// Per-row average ranks (ties share the mean rank) and the Friedman statistic
// chi2 = 12/(N T (T+1)) * sum R_j^2 - 3 N (T+1) over rank sums R_j.
FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& matrix);

struct Manifest {
    std::vector<std::string> instance_globs;
    std::vector<std::string> algos;
    std::vector<std::string> nbhds;
    int reps = 1;
    std::uint64_t budget = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string results_path = "results.csv";
    std::string metrics_path = "metrics.csv";
};

Manifest parse_manifest(const std::filesystem::path& path);

std::uint64_t cell_seed(std::uint64_t master, const std::string& instance, const std::string& algo,
                        const std::string& nbhd, int rep);

std::vector<ResultRecord> read_results_csv(const std::filesystem::path& path);
void write_results_csv(std::span<const ResultRecord> records, const std::filesystem::path& path);

BestKnownTable best_known_from_records(std::span<const ResultRecord> records);
BestKnownTable read_best_known_csv(const std::filesystem::path& path);
void write_best_known_csv(const BestKnownTable& table, const std::filesystem::path& path);

struct MetricsRow {
    std::string instance;
    std::string algo;
    std::string nbhd;
    Metrics metrics;
};

std::vector<MetricsRow> metrics_from_records(std::span<const ResultRecord> records,
                                             const BestKnownTable& best);
void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);

struct SuiteReport {
    std::size_t cells_total = 0;
    std::size_t cells_run = 0;
    std::size_t cells_skipped = 0;  // already present in the results file
    std::vector<std::string> errors;
};

// Runs every (instance x algo x nbhd x rep) cell with derived per-cell seeds,
// merging into any existing results file (present cells are skipped), then
// recomputes metrics against the best-known values of the merged results.
// Per-cell failures are reported in the returned errors and in a sidecar
// `<results>.errors.csv`; the suite continues past them.
SuiteReport run_suite(const Manifest& manifest);

}  // namespace labsched
