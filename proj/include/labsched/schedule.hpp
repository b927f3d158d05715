#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labsched/instance.hpp"

namespace labsched {

// Permutation of the specimen ids; position encodes processing precedence.
struct SpecimenSequence {
    std::vector<SpecimenId> order;
};

struct OpRef {
    SpecimenId i = 0;
    int j = 0;  // 1-based operation index

    bool operator==(const OpRef&) const = default;
};

struct Batch {
    int line = 0;
    int machine = 0;   // k within line
    int position = 0;  // r, 1-based processing order on the machine
    std::vector<OpRef> members;
    std::int64_t proc_time = 0;  // max member time
    std::int64_t start = 0;
    std::int64_t completion = 0;

    bool operator==(const Batch&) const = default;
};

struct Schedule {
    std::vector<int> line_of;                           // [id-1] -> line
    std::vector<Batch> batches;
    std::vector<std::array<std::int64_t, 4>> available; // E_{i,j}, [id-1][j-1]
    std::vector<std::int64_t> tat;                      // [id-1]
    double mtat = 0.0;

    bool operator==(const Schedule&) const = default;
};

// The one-valued decision variables of a schedule.
struct Assignment {
    struct XEntry { SpecimenId i; int l; };
    struct YEntry { SpecimenId i; int j; int d; int l; int k; };
    struct ZEntry { int d; int l; int k; int r; };

    std::vector<XEntry> x;
    std::vector<YEntry> y;
    std::vector<ZEntry> z;
};

// Resolves ties of FABM Step (1.3.3), where several machines end up with the
// same remaining capacity after insertion.
class TieChooser {
  public:
    virtual ~TieChooser() = default;
    // `tied` holds (line, machine) pairs sorted ascending; returns an index into it.
    virtual std::size_t choose(std::span<const std::pair<int, int>> tied) = 0;
};

enum class TieRule { LowestIndex, SeededRandom, Recorded };

struct TiePolicy {
    TieRule rule = TieRule::SeededRandom;
    std::uint64_t seed = 0;
    std::vector<std::pair<int, int>> recorded;  // consumed in order when rule == Recorded

    static TiePolicy lowest_index() { return {TieRule::LowestIndex, 0, {}}; }
    static TiePolicy seeded(std::uint64_t s) { return {TieRule::SeededRandom, s, {}}; }
    static TiePolicy with_choices(std::vector<std::pair<int, int>> c) {
        return {TieRule::Recorded, 0, std::move(c)};
    }
};

// The recorded choice list that reproduces the reference schedule on the
// example6 fixture (also shipped as data/paper_example_ties.json).
TiePolicy paper_example_ties();

// First Available Batch Machine decoding: distributes specimens to lines,
// groups operations into capacity-bounded batches, sequences and times them.
// Pure function of (instance, sequence, tie policy).
Schedule decode_fabm(const Instance& inst, const SpecimenSequence& vss,
                     const TiePolicy& tie = TiePolicy::lowest_index());
Schedule decode_fabm(const Instance& inst, const SpecimenSequence& vss, TieChooser& chooser);

// Decodes a subsequence covering only part of the instance's specimens
// (used by constructive insertion heuristics). The returned schedule and its
// MTAT cover exactly the given specimens.
Schedule decode_partial(const Instance& inst, std::span<const SpecimenId> order,
                        TieChooser& chooser);

double evaluate_mtat(const Schedule& sched);

// Total machine idle time: completion of the machine's last batch minus the
// machine's total busy time, summed over machines that process anything.
std::int64_t total_idle_time(const Schedule& sched);

class InfeasibleAssignment : public std::runtime_error {
  public:
    InfeasibleAssignment(int constraint, const std::string& msg)
        : std::runtime_error("constraint(" + std::to_string(constraint) + "): " + msg),
          constraint_(constraint) {}
    int constraint() const { return constraint_; }

  private:
    int constraint_;
};

// Earliest-start timing of a structurally consistent assignment; throws
// InfeasibleAssignment naming the violated constraint otherwise.
Schedule realize_from_assignment(const Instance& inst, const Assignment& asg);

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& sched);

Assignment export_assignment(const Schedule& sched);

void save_schedule(const Schedule& sched, const std::filesystem::path& path);
Schedule load_schedule(const Instance& inst, const std::filesystem::path& path);

Assignment load_assignment(const std::filesystem::path& path);
void save_assignment(const Assignment& asg, const std::filesystem::path& path);

// The reference variable set for the example6 fixture (also shipped as
// data/example6_assignment.json); realizes to MTAT 1569.50.
Assignment example6_reference_assignment();

// Writes one CSV row per batch: line,machine,position,start,completion,members.
void write_batch_csv(const Schedule& sched, std::ostream& out);

}  // namespace labsched
