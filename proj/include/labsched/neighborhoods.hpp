#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "labsched/instance.hpp"
#include "labsched/rng.hpp"

namespace labsched {

enum class MoveKind : int { Insert = 0, Swap = 1, Inverse = 2, BlockInsert = 3 };
constexpr int kMoveKindCount = 4;

std::string to_string(MoveKind k);
MoveKind move_kind_from_string(const std::string& s);

constexpr int kDefaultBlockSize = 4;

// Normalized job-precedence distance: the fraction of unordered id pairs
// whose relative order differs between the two permutations.
double jpr_distance(std::span<const SpecimenId> p1, std::span<const SpecimenId> p2);

// Partition of the ids into ordered blocks. Membership is fixed at creation;
// a block's elements may later be scattered through the sequence by moves.
struct BlockPartition {
    int block_size = kDefaultBlockSize;
    std::vector<std::vector<SpecimenId>> blocks;

    std::size_t num_blocks() const { return blocks.size(); }

    static BlockPartition from_sequence(std::span<const SpecimenId> seq, int block_size);
};

// Consecutive blocks over ids 1..n; the last block keeps the residue.
BlockPartition split_blocks(std::size_t n, int block_size);

// Unordered pair of distinct positions (element moves) or block indices
// (BlockInsert); a < b, 0-based.
struct MoveParams {
    std::size_t a = 0;
    std::size_t b = 0;
};

// Applies one move. Insert moves the later element immediately before the
// earlier one; Swap exchanges them; Inverse reverses the elements strictly
// between the two positions (endpoints excluded); BlockInsert moves all
// elements of the block whose first element appears later to immediately
// before the first element of the other block, preserving in-block order.
std::vector<SpecimenId> apply_move(MoveKind kind, std::span<const SpecimenId> vss,
                                   MoveParams params, const BlockPartition* partition = nullptr);

// Inclusive-endpoint inversion variant; excluded from the distance theory.
std::vector<SpecimenId> apply_inverse_inclusive(std::span<const SpecimenId> vss, MoveParams params);

// Uniform over all unordered distinct position pairs (or block pairs).
MoveParams sample_move(MoveKind kind, std::size_t n_or_blocks, Rng& rng);

struct DistanceMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form expectation and variance of the inter-neighbor JPR distance.
// BlockInsert assumes b >= 2 contiguous equal-size blocks (n divisible by b).
DistanceMoments theoretical_moments(MoveKind kind, int n, int b = 0);

struct ScatteredBlockBounds {
    double mean_lower = 0.0;
    double mean_upper = 0.0;
    double var_lower = 0.0;
    double var_upper = 0.0;
};

// Bounds on the BlockInsert moments when block members are scattered through
// the sequence; requires n divisible by b, b >= 2.
ScatteredBlockBounds scattered_block_bounds(int n, int b);

// Moments of jpr_distance(x, move(x)) from a fixed reference permutation.
// samples == 0 enumerates every move exactly; otherwise Monte Carlo.
DistanceMoments empirical_moments(MoveKind kind, int n, int block_size, std::uint64_t samples,
                                  std::uint64_t seed);

}  // namespace labsched
