#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "labsched/rng.hpp"

namespace labsched::testing {

namespace {

// Follows a scripted prefix of tie choices, then takes branch 0 for any
// further tie while appending (choice, fan-out) entries to the script.
class BranchingChooser : public TieChooser {
  public:
    explicit BranchingChooser(std::vector<std::pair<std::size_t, std::size_t>>& script)
        : script_(script) {}

    std::size_t choose(std::span<const std::pair<int, int>> tied) override {
        if (cursor_ < script_.size()) return script_[cursor_++].first;
        script_.emplace_back(0, tied.size());
        ++cursor_;
        return 0;
    }

  private:
    std::vector<std::pair<std::size_t, std::size_t>>& script_;
    std::size_t cursor_ = 0;
};

}  // namespace

std::set<double> reachable_mtats(const Instance& inst, std::size_t max_decodes) {
    const int n = inst.num_specimens();
    std::vector<SpecimenId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);

    std::set<double> out;
    std::size_t decodes = 0;
    do {
        std::vector<std::pair<std::size_t, std::size_t>> script;
        for (;;) {
            if (++decodes > max_decodes)
                throw std::runtime_error("reachable_mtats: branch budget exceeded");
            BranchingChooser chooser(script);
            Schedule sched = decode_fabm(inst, SpecimenSequence{perm}, chooser);
            out.insert(sched.mtat);
            while (!script.empty() && script.back().first + 1 >= script.back().second)
                script.pop_back();
            if (script.empty()) break;
            ++script.back().first;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

double min_reachable_mtat(const Instance& inst) {
    std::set<double> all = reachable_mtats(inst);
    return *all.begin();
}

namespace {

struct Candidate {
    std::vector<int> line_of;                                 // per specimen
    std::vector<std::array<int, 4>> machine_of;               // k per op
};

void enumerate_batchings(const Instance& inst, const Candidate& cand, double& best) {
    const int n = inst.num_specimens();

    // Ops per machine.
    std::map<std::pair<int, int>, std::vector<OpRef>> ops;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= kOpsPerSpecimen; ++j)
            ops[{cand.line_of[static_cast<std::size_t>(i - 1)],
                 cand.machine_of[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]}]
                .push_back(OpRef{i, j});

    // Per machine, every grouping of its ops into an ordered batch sequence.
    std::vector<std::vector<std::vector<std::vector<OpRef>>>> variants_per_machine;
    std::vector<std::pair<int, int>> machine_keys;
    for (const auto& [key, members] : ops) {
        const Machine& m = inst.lines[static_cast<std::size_t>(key.first - 1)]
                               .machines[static_cast<std::size_t>(key.second - 1)];
        std::vector<std::vector<std::vector<OpRef>>> variants;
        if (members.size() == 1) {
            variants.push_back({{members[0]}});
        } else if (members.size() == 2) {
            if (m.capacity >= 2) variants.push_back({{members[0], members[1]}});
            variants.push_back({{members[0]}, {members[1]}});
            variants.push_back({{members[1]}, {members[0]}});
        } else {
            throw std::runtime_error("brute force supports at most two specimens");
        }
        variants_per_machine.push_back(std::move(variants));
        machine_keys.push_back(key);
    }

    std::vector<std::size_t> pick(variants_per_machine.size(), 0);
    for (;;) {
        Assignment asg;
        for (int i = 1; i <= n; ++i)
            asg.x.push_back({i, cand.line_of[static_cast<std::size_t>(i - 1)]});
        for (std::size_t mi = 0; mi < machine_keys.size(); ++mi) {
            const auto& batches = variants_per_machine[mi][pick[mi]];
            for (std::size_t d = 0; d < batches.size(); ++d) {
                for (const OpRef& op : batches[d])
                    asg.y.push_back({op.i, op.j, static_cast<int>(d) + 1, machine_keys[mi].first,
                                     machine_keys[mi].second});
                asg.z.push_back({static_cast<int>(d) + 1, machine_keys[mi].first,
                                 machine_keys[mi].second, static_cast<int>(d) + 1});
            }
        }
        try {
            Schedule sched = realize_from_assignment(inst, asg);
            best = std::min(best, sched.mtat);
        } catch (const InfeasibleAssignment&) {
            // Cyclic timing dependencies; skip.
        }

        std::size_t level = 0;
        while (level < pick.size()) {
            if (++pick[level] < variants_per_machine[level].size()) break;
            pick[level] = 0;
            ++level;
        }
        if (level >= pick.size()) break;
    }
}

}  // namespace

double brute_force_min_mtat(const Instance& inst) {
    const int n = inst.num_specimens();
    if (n > 2) throw std::invalid_argument("brute_force_min_mtat: supports n <= 2 only");

    double best = std::numeric_limits<double>::infinity();
    const int lines = inst.num_lines();

    std::vector<int> line_of(static_cast<std::size_t>(n), 1);
    for (;;) {
        // Machine options per specimen-op on the chosen line.
        std::vector<std::array<std::vector<int>, 4>> options(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            const Specimen& sp = inst.specimen(i);
            const int line = line_of[static_cast<std::size_t>(i - 1)];
            for (int j = 1; j <= kOpsPerSpecimen; ++j) {
                for (const Machine& m : inst.lines[static_cast<std::size_t>(line - 1)].machines)
                    if (m.stage == sp.route[static_cast<std::size_t>(j - 1)])
                        options[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]
                            .push_back(m.index);
            }
        }

        std::vector<std::array<int, 4>> machine_idx(static_cast<std::size_t>(n), {0, 0, 0, 0});
        std::function<void(int, int)> recurse = [&](int i, int j) {
            if (i > n) {
                Candidate cand;
                cand.line_of = line_of;
                cand.machine_of.assign(static_cast<std::size_t>(n), {0, 0, 0, 0});
                for (int ii = 1; ii <= n; ++ii)
                    for (int jj = 1; jj <= kOpsPerSpecimen; ++jj)
                        cand.machine_of[static_cast<std::size_t>(ii - 1)]
                                       [static_cast<std::size_t>(jj - 1)] =
                            options[static_cast<std::size_t>(ii - 1)][static_cast<std::size_t>(
                                jj - 1)][static_cast<std::size_t>(
                                machine_idx[static_cast<std::size_t>(ii - 1)]
                                           [static_cast<std::size_t>(jj - 1)])];
                enumerate_batchings(inst, cand, best);
                return;
            }
            int ni = j == kOpsPerSpecimen ? i + 1 : i;
            int nj = j == kOpsPerSpecimen ? 1 : j + 1;
            auto& opts =
                options[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            for (std::size_t o = 0; o < opts.size(); ++o) {
                machine_idx[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
                    static_cast<int>(o);
                recurse(ni, nj);
            }
        };
        recurse(1, 1);

        int level = 0;
        while (level < n) {
            if (++line_of[static_cast<std::size_t>(level)] <= lines) break;
            line_of[static_cast<std::size_t>(level)] = 1;
            ++level;
        }
        if (level >= n) break;
    }
    return best;
}

double jpr_distance_naive(const std::vector<SpecimenId>& a, const std::vector<SpecimenId>& b) {
    const std::size_t n = a.size();
    std::map<SpecimenId, std::size_t> pos_b;
    for (std::size_t p = 0; p < n; ++p) pos_b[b[p]] = p;
    std::size_t discordant = 0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            if (pos_b.at(a[p]) > pos_b.at(a[q])) ++discordant;
    return static_cast<double>(discordant) /
           (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double correlation_one_pass(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    return (m * sxy - sx * sy) / std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
}

double friedman_chi2_oracle(const std::vector<std::vector<double>>& matrix) {
    const double n = static_cast<double>(matrix.size());
    const double t = static_cast<double>(matrix.front().size());
    std::vector<double> rank_sums(matrix.front().size(), 0.0);
    for (const auto& row : matrix) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            double below = 0.0, equal = 0.0;
            for (double v : row) {
                if (v < row[j]) below += 1.0;
                if (v == row[j]) equal += 1.0;
            }
            rank_sums[j] += below + (equal + 1.0) / 2.0;
        }
    }
    double sum_sq = 0.0;
    for (double r : rank_sums) sum_sq += r * r;
    return 12.0 / (n * t * (t + 1.0)) * sum_sq - 3.0 * n * (t + 1.0);
}

std::vector<SpecimenId> random_permutation(int n, std::uint64_t seed) {
    std::vector<SpecimenId> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 1);
    Rng rng(seed);
    rng.shuffle(ids);
    return ids;
}

}  // namespace labsched::testing
