#include "labsched/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace labsched {

std::string to_string(MoveKind k) {
    switch (k) {
        case MoveKind::Insert: return "ins";
        case MoveKind::Swap: return "swp";
        case MoveKind::Inverse: return "inv";
        case MoveKind::BlockInsert: return "inb";
    }
    throw std::invalid_argument("unknown MoveKind");
}

MoveKind move_kind_from_string(const std::string& s) {
    if (s == "ins") return MoveKind::Insert;
    if (s == "swp") return MoveKind::Swap;
    if (s == "inv") return MoveKind::Inverse;
    if (s == "inb") return MoveKind::BlockInsert;
    throw std::invalid_argument("unknown neighborhood: " + s);
}

namespace {

// Counts pairs ordered differently in the two permutations via merge sort,
// O(n log n).
std::uint64_t count_inversions(std::vector<int>& a, std::vector<int>& buf, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(a, buf, lo, mid) + count_inversions(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
            buf[k++] = a[i++];
        } else {
            inv += mid - i;
            buf[k++] = a[j++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

}  // namespace

double jpr_distance(std::span<const SpecimenId> p1, std::span<const SpecimenId> p2) {
    const std::size_t n = p1.size();
    if (n != p2.size() || n < 2)
        throw std::invalid_argument("jpr_distance: need two permutations of the same ids, n >= 2");
    std::unordered_map<SpecimenId, int> rank2;
    rank2.reserve(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (!rank2.emplace(p2[pos], static_cast<int>(pos)).second)
            throw std::invalid_argument("jpr_distance: second sequence repeats an id");
    }
    std::vector<int> seq;
    seq.reserve(n);
    for (SpecimenId id : p1) {
        auto it = rank2.find(id);
        if (it == rank2.end())
            throw std::invalid_argument("jpr_distance: sequences hold different ids");
        seq.push_back(it->second);
    }
    std::vector<int> buf(n);
    const std::uint64_t discordant = count_inversions(seq, buf, 0, n);
    const double dmax = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(discordant) / dmax;
}

BlockPartition BlockPartition::from_sequence(std::span<const SpecimenId> seq, int block_size) {
    if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
    BlockPartition part;
    part.block_size = block_size;
    for (std::size_t begin = 0; begin < seq.size(); begin += static_cast<std::size_t>(block_size)) {
        const std::size_t end = std::min(seq.size(), begin + static_cast<std::size_t>(block_size));
        part.blocks.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(begin),
                                 seq.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return part;
}

BlockPartition split_blocks(std::size_t n, int block_size) {
    if (n < 1) throw std::invalid_argument("split_blocks: n must be >= 1");
    std::vector<SpecimenId> ids(n);
    std::iota(ids.begin(), ids.end(), 1);
    return BlockPartition::from_sequence(ids, block_size);
}

namespace {

std::vector<SpecimenId> block_insert(std::span<const SpecimenId> vss, const BlockPartition& part,
                                     std::size_t g, std::size_t h) {
    if (g == h || g >= part.num_blocks() || h >= part.num_blocks())
        throw std::invalid_argument("block insert: need two distinct block indices");

    std::unordered_map<SpecimenId, int> owner;
    for (std::size_t bi = 0; bi < part.num_blocks(); ++bi)
        for (SpecimenId id : part.blocks[bi]) owner[id] = static_cast<int>(bi);

    auto first_pos = [&vss, &owner](int block) {
        for (std::size_t pos = 0; pos < vss.size(); ++pos) {
            auto it = owner.find(vss[pos]);
            if (it != owner.end() && it->second == block) return pos;
        }
        throw std::invalid_argument("block insert: block has no element in the sequence");
    };

    // The block whose first element appears later is the back block and moves.
    std::size_t pos_g = first_pos(static_cast<int>(g));
    std::size_t pos_h = first_pos(static_cast<int>(h));
    int front = static_cast<int>(g), back = static_cast<int>(h);
    if (pos_g > pos_h) std::swap(front, back);
    const SpecimenId front_first = vss[std::min(pos_g, pos_h)];

    std::vector<SpecimenId> moved;
    moved.reserve(vss.size());
    for (SpecimenId id : vss) {
        auto it = owner.find(id);
        if (it != owner.end() && it->second == back) moved.push_back(id);
    }

    std::vector<SpecimenId> result;
    result.reserve(vss.size());
    for (SpecimenId id : vss) {
        auto it = owner.find(id);
        if (it != owner.end() && it->second == back) continue;
        if (id == front_first)
            for (SpecimenId m : moved) result.push_back(m);
        result.push_back(id);
    }
    return result;
}

}  // namespace

std::vector<SpecimenId> apply_move(MoveKind kind, std::span<const SpecimenId> vss,
                                   MoveParams params, const BlockPartition* partition) {
    if (kind == MoveKind::BlockInsert) {
        if (!partition) throw std::invalid_argument("block insert requires a partition");
        return block_insert(vss, *partition, params.a, params.b);
    }
    const std::size_t n = vss.size();
    if (params.a >= params.b || params.b >= n)
        throw std::invalid_argument("move positions must be distinct and in range");
    std::vector<SpecimenId> out(vss.begin(), vss.end());
    switch (kind) {
        case MoveKind::Insert: {
            SpecimenId moved = out[params.b];
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(params.b));
            out.insert(out.begin() + static_cast<std::ptrdiff_t>(params.a), moved);
            break;
        }
        case MoveKind::Swap:
            std::swap(out[params.a], out[params.b]);
            break;
        case MoveKind::Inverse:
            // Endpoints excluded; a gap of zero or one elements is a no-op.
            if (params.b - params.a >= 2)
                std::reverse(out.begin() + static_cast<std::ptrdiff_t>(params.a) + 1,
                             out.begin() + static_cast<std::ptrdiff_t>(params.b));
            break;
        case MoveKind::BlockInsert:
            break;
    }
    return out;
}

std::vector<SpecimenId> apply_inverse_inclusive(std::span<const SpecimenId> vss, MoveParams params) {
    const std::size_t n = vss.size();
    if (params.a >= params.b || params.b >= n)
        throw std::invalid_argument("move positions must be distinct and in range");
    std::vector<SpecimenId> out(vss.begin(), vss.end());
    std::reverse(out.begin() + static_cast<std::ptrdiff_t>(params.a),
                 out.begin() + static_cast<std::ptrdiff_t>(params.b) + 1);
    return out;
}

MoveParams sample_move(MoveKind kind, std::size_t n_or_blocks, Rng& rng) {
    (void)kind;
    if (n_or_blocks < 2) throw std::invalid_argument("sample_move: need at least two positions");
    std::size_t a = static_cast<std::size_t>(rng.below(n_or_blocks));
    std::size_t b = static_cast<std::size_t>(rng.below(n_or_blocks - 1));
    if (b >= a) ++b;
    if (a > b) std::swap(a, b);
    return MoveParams{a, b};
}

DistanceMoments theoretical_moments(MoveKind kind, int n, int b) {
    if (n < 2) throw std::invalid_argument("theoretical_moments: n must be >= 2");
    const double nn = n;
    DistanceMoments m;
    switch (kind) {
        case MoveKind::Swap:
            m.mean = 2.0 * (2.0 * nn - 1.0) / (3.0 * nn * (nn - 1.0));
            m.variance = 8.0 * (nn + 1.0) * (nn - 2.0) / (9.0 * nn * nn * (nn - 1.0) * (nn - 1.0));
            break;
        case MoveKind::Insert:
            m.mean = 2.0 * (nn + 1.0) / (3.0 * nn * (nn - 1.0));
            m.variance = 2.0 * (nn + 1.0) * (nn - 2.0) / (9.0 * nn * nn * (nn - 1.0) * (nn - 1.0));
            break;
        case MoveKind::Inverse:
            m.mean = (nn - 2.0) * (nn - 3.0) / (6.0 * nn * (nn - 1.0));
            m.variance = (nn + 1.0) * (nn - 2.0) * (nn - 3.0) * (7.0 * nn - 18.0) /
                         (180.0 * nn * nn * (nn - 1.0) * (nn - 1.0));
            break;
        case MoveKind::BlockInsert: {
            if (b < 2) throw std::invalid_argument("theoretical_moments: block insert needs b >= 2");
            if (n % b != 0)
                throw std::invalid_argument(
                    "theoretical_moments: block insert assumes equal-size contiguous blocks, n "
                    "divisible by b");
            const double bb = b;
            m.mean = 2.0 * nn * (bb + 1.0) / (3.0 * bb * bb * (nn - 1.0));
            m.variance = 2.0 * (bb + 1.0) * (bb - 2.0) * nn * nn /
                         (9.0 * bb * bb * bb * bb * (nn - 1.0) * (nn - 1.0));
            break;
        }
    }
    return m;
}

ScatteredBlockBounds scattered_block_bounds(int n, int b) {
    if (b < 2 || n < 2 || n % b != 0)
        throw std::invalid_argument("scattered_block_bounds: need b >= 2 and n divisible by b");
    const double nn = n, bb = b;
    ScatteredBlockBounds out;
    out.mean_upper = ((4.0 * bb + 1.0) * nn + (-2.0 * bb + 1.0) * bb) / (3.0 * bb * bb * (nn - 1.0));
    out.mean_lower = (3.0 * nn + (2.0 * bb - 1.0) * bb) / (3.0 * bb * bb * (nn - 1.0));

    const double d2 = (nn - 1.0) * (nn - 1.0);
    double var_hi = (6.0 * (3.0 * bb * bb + bb - 2.0) * nn * nn -
                     6.0 * (bb - 2.0) * (bb + 1.0) * bb * nn -
                     2.0 * (5.0 * bb + 2.0) * (bb + 1.0) * bb * bb) /
                    (9.0 * bb * bb * bb * bb * d2);
    out.var_upper = std::min(1.0, var_hi);

    double var_lo =
        ((-80.0 * bb * bb * bb * bb - 4.0 * bb * bb * bb - 89.0 * bb * bb + bb + 6.0) * nn * nn +
         5.0 * (-16.0 * bb * bb + 4.0 * bb + 5.0) * (bb - 1.0) * bb * bb * nn +
         5.0 * (4.0 * bb * bb * bb * bb - 8.0 * bb * bb * bb + 5.0 * bb * bb + bb - 1.0) * bb * bb) /
        (45.0 * d2 * bb * bb * bb * bb * bb * (bb - 1.0));
    out.var_lower = std::max(0.0, var_lo);
    return out;
}

DistanceMoments empirical_moments(MoveKind kind, int n, int block_size, std::uint64_t samples,
                                  std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("empirical_moments: n must be >= 2");
    std::vector<SpecimenId> ref(static_cast<std::size_t>(n));
    std::iota(ref.begin(), ref.end(), 1);
    BlockPartition part = split_blocks(static_cast<std::size_t>(n), block_size);
    const std::size_t domain =
        kind == MoveKind::BlockInsert ? part.num_blocks() : static_cast<std::size_t>(n);
    if (domain < 2) throw std::invalid_argument("empirical_moments: fewer than two move targets");
    const BlockPartition* pp = kind == MoveKind::BlockInsert ? &part : nullptr;

    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t count = 0;
    auto record = [&](MoveParams mp) {
        std::vector<SpecimenId> moved = apply_move(kind, ref, mp, pp);
        double d = moved == ref ? 0.0 : jpr_distance(ref, moved);
        sum += d;
        sum_sq += d * d;
        ++count;
    };

    if (samples == 0) {
        for (std::size_t a = 0; a + 1 < domain; ++a)
            for (std::size_t b = a + 1; b < domain; ++b) record(MoveParams{a, b});
    } else {
        Rng rng(seed);
        for (std::uint64_t s = 0; s < samples; ++s) record(sample_move(kind, domain, rng));
    }

    DistanceMoments m;
    m.mean = sum / static_cast<double>(count);
    m.variance = sum_sq / static_cast<double>(count) - m.mean * m.mean;
    if (m.variance < 0.0) m.variance = 0.0;
    return m;
}

}  // namespace labsched
