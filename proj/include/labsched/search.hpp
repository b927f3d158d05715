#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "labsched/neighborhoods.hpp"
#include "labsched/schedule.hpp"

namespace labsched {

struct NeighborhoodSpec {
    enum class Mode { Fixed, MetaLamarckian, Auto };
    Mode mode = Mode::Fixed;
    MoveKind kind = MoveKind::Swap;
    int block_size = kDefaultBlockSize;
    bool resplit_blocks = false;  // rebuild block membership from the current sequence per move
    int aps_block_floor = 200;    // Auto: sizes from this up use BlockInsert, Swap below

    static NeighborhoodSpec fixed(MoveKind k, int block = kDefaultBlockSize) {
        return {Mode::Fixed, k, block, false};
    }
    static NeighborhoodSpec meta_lamarckian(int block = kDefaultBlockSize) {
        return {Mode::MetaLamarckian, MoveKind::Swap, block, false};
    }
    static NeighborhoodSpec automatic() { return {Mode::Auto, MoveKind::Swap, kDefaultBlockSize, false}; }
};

std::string to_string(const NeighborhoodSpec& spec);
NeighborhoodSpec neighborhood_from_string(const std::string& s);

struct AnnealConfig {
    double initial_temp = 0.0;   // <= 0: calibrate from mean |dE| of 100 sampled moves
    double cooling = 0.98;       // lambda in (0,1]; 1 keeps the temperature fixed
    int metropolis = 0;          // theta; <= 0: ceil(n / block_size)
    std::uint64_t budget = 10000;  // decode-call budget
    std::uint64_t stagnation = 0;  // stop after this many non-improving evals (0: off)
    NeighborhoodSpec nbhd;
    TiePolicy tie = TiePolicy::seeded(0);
    std::uint64_t seed = 0;
    bool log_accepted = false;
};

struct ScatterConfig {
    int refset_size = 10;
    std::uint64_t budget = 10000;
    std::uint64_t stagnation = 0;
    std::uint64_t improvement_budget = 0;  // decode calls per improvement; 0: max(theta, budget/5)
    double initial_temp = 0.0;             // improvement temperature; <= 0: calibrate once
    double cooling = 0.98;                 // per Metropolis block, threaded across phases
    NeighborhoodSpec nbhd;
    TiePolicy tie = TiePolicy::seeded(0);
    std::uint64_t seed = 0;
    bool log_accepted = false;
};

struct TraceEntry {
    std::uint64_t eval = 0;  // 1-based decode-call index
    double mtat = 0.0;
};

struct AcceptedSample {
    std::uint64_t eval = 0;
    std::vector<SpecimenId> vss;
    double mtat = 0.0;
};

struct SearchResult {
    std::vector<SpecimenId> best;
    double best_mtat = std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;           // strict best-so-far improvements
    std::vector<AcceptedSample> optima_log;  // same events with the solutions, feeds the LON
    std::uint64_t evaluations = 0;
    double wall_seconds = 0.0;
    std::uint64_t uphill_accepts = 0;
    std::vector<AcceptedSample> accepted_log;  // filled when log_accepted is set
};

// Counts decode calls against a budget and tracks the best-so-far solution.
// Every engine evaluation goes through one of these, so traces, optima logs
// and budget accounting agree across algorithms.
class Evaluator {
  public:
    Evaluator(const Instance& inst, TiePolicy tie, std::uint64_t budget, std::uint64_t stagnation,
              std::uint64_t seed, bool log_accepted);

    // Decodes and counts one evaluation; optionally reports the schedule's
    // total machine idle time through `idle_out`.
    double evaluate(std::span<const SpecimenId> order, std::int64_t* idle_out = nullptr);
    bool exhausted() const;
    std::uint64_t remaining() const;

    std::uint64_t evaluations() const { return evals_; }
    double best_mtat() const { return best_mtat_; }
    const std::vector<SpecimenId>& best() const { return best_; }

    void note_accepted(std::span<const SpecimenId> order, double mtat);
    void harvest(SearchResult& out) const;

  private:
    const Instance* inst_;
    TiePolicy tie_;
    std::uint64_t budget_;
    std::uint64_t stagnation_;
    std::uint64_t seed_;
    bool log_accepted_;

    std::uint64_t evals_ = 0;
    std::uint64_t since_improvement_ = 0;
    double best_mtat_ = std::numeric_limits<double>::infinity();
    std::vector<SpecimenId> best_;
    std::vector<TraceEntry> trace_;
    std::vector<AcceptedSample> optima_;
    std::vector<AcceptedSample> accepted_;
};

// Block-based constructive heuristic: blocks ranked by descending total
// processing time are inserted one at a time into the position minimizing
// MTAT. With block_size 1 and the idle tie-break off this is the classic
// insertion heuristic. `evaluations` (when given) receives the number of
// decode calls spent.
SpecimenSequence neh_b(const Instance& inst, int block_size, bool idle_tiebreak,
                       std::uint64_t seed, std::uint64_t* evaluations = nullptr,
                       Evaluator* shared = nullptr);

SearchResult anneal(const Instance& inst, const AnnealConfig& cfg);

struct CombineStep {
    std::size_t position = 0;          // 0-based position in the trial solution
    SpecimenId candidate1 = 0;
    SpecimenId candidate2 = 0;
    double departure1 = 0.0;           // l1 departure if parent 1 donates
    double departure2 = 0.0;
    int chosen_parent = 0;             // 1 or 2; 0 when candidates were identical
};

struct CombineTrace {
    std::array<double, 2> weights{};
    std::vector<CombineStep> steps;
};

// Min-max vote construction: fills the trial solution left to right, choosing
// the parent whose donation keeps the normalized vote vector closest (l1) to
// the influence weights derived from the parents' objective values.
std::vector<SpecimenId> combine_solutions(std::span<const SpecimenId> p1,
                                          std::span<const SpecimenId> p2, double mtat1,
                                          double mtat2, Rng& rng, CombineTrace* trace = nullptr);

SearchResult scatter_search(const Instance& inst, const ScatterConfig& cfg);

// Reward-driven neighborhood selection state (meta-Lamarckian learning).
struct MlState {
    std::array<double, kMoveKindCount> reward{};
    int trained_arms = 0;  // arms already run once in the training stage

    bool training_done() const { return trained_arms >= kMoveKindCount; }
    std::array<double, kMoveKindCount> probabilities() const;
};

MoveKind ml_select(const MlState& state, Rng& rng);
void ml_update(MlState& state, MoveKind kind, double mtat_before, double mtat_after, int theta);

// Syntactic selection rule: Swap below the block floor, BlockInsert from the
// floor (200 specimens) up.
MoveKind aps_select_neighborhood(int num_specimens, int block_floor = 200);
MoveKind aps_select_neighborhood(const Instance& inst);

struct SolverConfig {
    enum class Algo { SA, FTA, SS };
    Algo algo = Algo::SA;
    NeighborhoodSpec nbhd;
    std::uint64_t budget = 10000;
    std::uint64_t stagnation = 0;
    std::uint64_t seed = 0;
    TiePolicy tie = TiePolicy::seeded(0);
    bool log_accepted = false;

    double initial_temp = 0.0;
    double cooling = 0.98;
    int metropolis = 0;
    int refset_size = 10;
    std::uint64_t improvement_budget = 0;
};

std::string to_string(SolverConfig::Algo a);
SolverConfig::Algo algo_from_string(const std::string& s);

SearchResult run_solver(const Instance& inst, const SolverConfig& cfg);

}  // namespace labsched
