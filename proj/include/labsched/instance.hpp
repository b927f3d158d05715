#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace labsched {

enum class StageKind : int {
    Centrifugation = 0,
    Decapping = 1,
    BiochemicalTest = 2,
    ImmunologicTest = 3,
    Validation = 4,
};
constexpr int kStageCount = 5;

std::string to_string(StageKind s);
StageKind stage_from_string(const std::string& s);

enum class TestKind : int { Biochemical = 0, Immunologic = 1 };
std::string to_string(TestKind k);
TestKind test_kind_from_string(const std::string& s);

using SpecimenId = int;
constexpr int kOpsPerSpecimen = 4;

struct Machine {
    int line = 0;      // 1-based line index l
    int index = 0;     // 1-based machine index k within the line
    StageKind stage = StageKind::Centrifugation;
    int capacity = 0;  // simultaneous specimens, >= 1

    bool operator==(const Machine&) const = default;
};

struct Specimen {
    SpecimenId id = 0;  // 1-based
    TestKind kind = TestKind::Biochemical;
    std::vector<StageKind> route;  // always length 4: C, D, B|I, V

    bool operator==(const Specimen&) const = default;
};

struct LineDesc {
    std::vector<Machine> machines;

    bool operator==(const LineDesc&) const = default;
};

// Processing seconds per (specimen, operation, line). All machines of a stage
// group within a line share the value, mirroring the merged columns of the
// instance tables; the file format keys by line so a per-machine extension
// stays possible.
class ProcessingTimeTable {
  public:
    ProcessingTimeTable() = default;
    ProcessingTimeTable(int num_specimens, int num_lines)
        : n_(num_specimens),
          lines_(num_lines),
          seconds_(static_cast<std::size_t>(num_specimens) * kOpsPerSpecimen * num_lines, 0) {}

    std::int64_t at(SpecimenId i, int j, int line) const { return seconds_[offset(i, j, line)]; }
    void set(SpecimenId i, int j, int line, std::int64_t sec) { seconds_[offset(i, j, line)] = sec; }

    int num_specimens() const { return n_; }
    int num_lines() const { return lines_; }

    bool operator==(const ProcessingTimeTable&) const = default;

  private:
    std::size_t offset(SpecimenId i, int j, int line) const;

    int n_ = 0;
    int lines_ = 0;
    std::vector<std::int64_t> seconds_;
};

struct Instance {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<LineDesc> lines;
    std::vector<Specimen> specimens;  // ids 1..n in order
    ProcessingTimeTable times;

    int num_specimens() const { return static_cast<int>(specimens.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }
    const Specimen& specimen(SpecimenId id) const { return specimens[static_cast<std::size_t>(id - 1)]; }

    bool operator==(const Instance&) const = default;
};

struct StageProfile {
    int machine_count = 0;
    int capacity = 0;
    int time_lo = 0;  // seconds, inclusive
    int time_hi = 0;  // seconds, inclusive
};

struct GenerationProfile {
    // [line 0|1][stage]
    std::array<std::array<StageProfile, kStageCount>, 2> line_stage{};

    const StageProfile& at(int line, StageKind s) const {
        return line_stage[static_cast<std::size_t>(line - 1)][static_cast<std::size_t>(s)];
    }
};

GenerationProfile realistic_profile();
GenerationProfile toy_profile();

Instance generate_instance(const GenerationProfile& profile, int n_bio, int n_immuno, int idx,
                           std::uint64_t seed);

struct Violation {
    std::string where;    // offending entity, e.g. "machine M_{2,1}" or "constraint(5)"
    std::string message;
};

std::vector<Violation> validate_instance(const Instance& inst);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);
std::string instance_to_json_text(const Instance& inst);
Instance instance_from_json_text(const std::string& text);

// Benchmark enumeration: toy sizes {2,4,6,8} at ratio 1:1, five instances
// each; realistic sizes {100..500} at ratios 1:4, 1:1, 4:1, ten each.
struct BenchmarkEntry {
    int n_bio = 0;
    int n_immuno = 0;
    int idx = 0;
};
std::vector<BenchmarkEntry> benchmark_plan(bool toy);

// The six-specimen fixture used throughout the docs and tests: two identical
// 8-machine lines with stage capacities [2,1,2,2,1] and a fixed time table.
Instance example6();

}  // namespace labsched
