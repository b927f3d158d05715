#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "labsched/search.hpp"

namespace labsched {

struct FdcSample {
    double fitness = 0.0;
    double distance = 0.0;  // normalized JPR distance to the reference solution
};

// Pearson correlation of fitness against distance, population normalization.
// Throws std::domain_error when either coordinate has zero variance.
double fdc(std::span<const FdcSample> samples);

// Builds FDC samples from a finished run's accepted solutions, measuring
// distance to the run's best solution.
std::vector<FdcSample> fdc_samples_from_run(const SearchResult& result);

struct WalkSeries {
    std::vector<double> fitness;
    MoveKind kind = MoveKind::Swap;
    std::uint64_t seed = 0;
};

// Random walk of `length` solutions from a random start; each step applies a
// uniformly sampled move and records the decoded MTAT (lowest-index ties).
WalkSeries random_walk(const Instance& inst, MoveKind kind, std::size_t length,
                       std::uint64_t seed, int block_size = kDefaultBlockSize);

// Lag-s autocorrelation with full-series mean and population variance.
// Throws std::domain_error on a constant series.
double autocorrelation(std::span<const double> series, std::size_t lag);

using LonKey = std::array<std::uint64_t, 2>;
LonKey lon_key(std::span<const SpecimenId> perm);

struct LonNode {
    double fitness = 0.0;
    std::uint64_t in_weight = 0;          // weighted incoming degree
    std::vector<SpecimenId> solution;     // kept for small instances only

    bool operator==(const LonNode&) const = default;
};

// Local optima network: one node per distinct recorded optimum, one directed
// edge per observed transition between consecutive optima of a run, with
// multiplicities merged into weights. Self-loops are dropped.
class LonGraph {
  public:
    void add_run(std::span<const AcceptedSample> optima, bool keep_solutions);
    void merge(const LonGraph& other);

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::map<LonKey, LonNode>& nodes() const { return nodes_; }
    const std::map<std::pair<LonKey, LonKey>, std::uint64_t>& edges() const { return edges_; }

    bool operator==(const LonGraph&) const = default;

  private:
    std::map<LonKey, LonNode> nodes_;
    std::map<std::pair<LonKey, LonKey>, std::uint64_t> edges_;
};

// Default (runs N, stagnation M) by instance size: exhaustive settings for
// toy instances, reduced cost from 100 specimens up.
std::pair<std::uint64_t, std::uint64_t> lon_defaults(int num_specimens);

// Runs the solver N times (run seeds derived from `seed`), each terminating
// once the best-so-far has not improved for M consecutive evaluations, and
// merges the per-run optima logs. threads == 0 picks the hardware count.
LonGraph build_lon(const Instance& inst, const SolverConfig& solver, std::uint64_t runs,
                   std::uint64_t stagnation, std::uint64_t seed, int threads = 1);

struct Plateau {
    double fitness = 0.0;
    std::vector<LonKey> members;
    bool sink = false;  // no escape edge toward strictly better fitness
};

struct PlateauGraph {
    std::vector<Plateau> plateaus;
    double average_size = 0.0;
    std::size_t num_sinks() const;
};

// Groups nodes connected by edges whose endpoint fitnesses agree within the
// relative tolerance; every group becomes one plateau.
PlateauGraph compress_plateaus(const LonGraph& g, double rel_tol = 1e-6);

enum class GraphFormat { GraphML, Dot };

// Byte-stable export with node attributes fitness, size (weighted incoming
// degree), plateau id and sink flag, plus edge weights.
void export_graph(const LonGraph& g, const PlateauGraph& plateaus, GraphFormat format,
                  std::ostream& out);

}  // namespace labsched
