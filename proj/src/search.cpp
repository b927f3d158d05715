#include "labsched/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace labsched {

namespace {

constexpr std::uint64_t kTieStream = 0x7431;
constexpr std::uint64_t kEngineStream = 0x5a21;
constexpr std::uint64_t kNehStream = 0x4e45;
constexpr std::uint64_t kRefillStream = 0x5246;

std::vector<SpecimenId> identity_order(int n) {
    std::vector<SpecimenId> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 1);
    return ids;
}

}  // namespace

std::string to_string(const NeighborhoodSpec& spec) {
    switch (spec.mode) {
        case NeighborhoodSpec::Mode::MetaLamarckian: return "ml";
        case NeighborhoodSpec::Mode::Auto: return "auto";
        case NeighborhoodSpec::Mode::Fixed: return to_string(spec.kind);
    }
    return "?";
}

NeighborhoodSpec neighborhood_from_string(const std::string& s) {
    if (s == "ml") return NeighborhoodSpec::meta_lamarckian();
    if (s == "auto") return NeighborhoodSpec::automatic();
    return NeighborhoodSpec::fixed(move_kind_from_string(s));
}

std::string to_string(SolverConfig::Algo a) {
    switch (a) {
        case SolverConfig::Algo::SA: return "sa";
        case SolverConfig::Algo::FTA: return "fta";
        case SolverConfig::Algo::SS: return "ss";
    }
    return "?";
}

SolverConfig::Algo algo_from_string(const std::string& s) {
    if (s == "sa") return SolverConfig::Algo::SA;
    if (s == "fta") return SolverConfig::Algo::FTA;
    if (s == "ss") return SolverConfig::Algo::SS;
    throw std::invalid_argument("unknown algorithm: " + s);
}

Evaluator::Evaluator(const Instance& inst, TiePolicy tie, std::uint64_t budget,
                     std::uint64_t stagnation, std::uint64_t seed, bool log_accepted)
    : inst_(&inst),
      tie_(std::move(tie)),
      budget_(budget),
      stagnation_(stagnation),
      seed_(seed),
      log_accepted_(log_accepted) {
    if (budget_ < 1) throw std::invalid_argument("evaluation budget must be >= 1");
}

bool Evaluator::exhausted() const {
    if (evals_ >= budget_) return true;
    return stagnation_ > 0 && since_improvement_ >= stagnation_;
}

std::uint64_t Evaluator::remaining() const { return evals_ >= budget_ ? 0 : budget_ - evals_; }

double Evaluator::evaluate(std::span<const SpecimenId> order, std::int64_t* idle_out) {
    if (evals_ >= budget_) throw std::logic_error("Evaluator: budget exceeded");
    ++evals_;
    TiePolicy tie = tie_;
    if (tie.rule == TieRule::SeededRandom) tie.seed = substream(seed_, {kTieStream, evals_, tie_.seed});
    double mtat;
    if (static_cast<int>(order.size()) == inst_->num_specimens()) {
        SpecimenSequence vss{std::vector<SpecimenId>(order.begin(), order.end())};
        Schedule sched = decode_fabm(*inst_, vss, tie);
        mtat = sched.mtat;
        if (idle_out) *idle_out = total_idle_time(sched);
        if (mtat < best_mtat_) {
            best_mtat_ = mtat;
            best_.assign(order.begin(), order.end());
            trace_.push_back(TraceEntry{evals_, mtat});
            optima_.push_back(AcceptedSample{evals_, best_, mtat});
            since_improvement_ = 0;
        } else {
            ++since_improvement_;
        }
    } else {
        // Partial decodes (constructive insertion) spend budget but never
        // compete with full solutions.
        struct Lowest : TieChooser {
            std::size_t choose(std::span<const std::pair<int, int>>) override { return 0; }
        } lowest;
        Schedule sched = decode_partial(*inst_, order, lowest);
        mtat = sched.mtat;
        if (idle_out) *idle_out = total_idle_time(sched);
        ++since_improvement_;
    }
    return mtat;
}

void Evaluator::note_accepted(std::span<const SpecimenId> order, double mtat) {
    if (log_accepted_)
        accepted_.push_back(
            AcceptedSample{evals_, std::vector<SpecimenId>(order.begin(), order.end()), mtat});
}

void Evaluator::harvest(SearchResult& out) const {
    out.best = best_;
    out.best_mtat = best_mtat_;
    out.trace = trace_;
    out.optima_log = optima_;
    out.evaluations = evals_;
    out.accepted_log = accepted_;
}

MoveKind aps_select_neighborhood(int num_specimens, int block_floor) {
    return num_specimens >= block_floor ? MoveKind::BlockInsert : MoveKind::Swap;
}

MoveKind aps_select_neighborhood(const Instance& inst) {
    return aps_select_neighborhood(inst.num_specimens());
}

namespace {

struct ResolvedNbhd {
    bool ml = false;
    MoveKind kind = MoveKind::Swap;
    int block_size = kDefaultBlockSize;
    bool resplit = false;
};

ResolvedNbhd resolve_nbhd(const NeighborhoodSpec& spec, const Instance& inst) {
    ResolvedNbhd r;
    r.block_size = std::max(1, spec.block_size);
    r.resplit = spec.resplit_blocks;
    const int n = inst.num_specimens();
    // Block moves need at least two blocks.
    if (n >= 2) r.block_size = std::min(r.block_size, std::max(1, n / 2));
    switch (spec.mode) {
        case NeighborhoodSpec::Mode::Fixed:
            r.kind = spec.kind;
            break;
        case NeighborhoodSpec::Mode::Auto:
            r.kind = aps_select_neighborhood(inst.num_specimens(), spec.aps_block_floor);
            break;
        case NeighborhoodSpec::Mode::MetaLamarckian:
            r.ml = true;
            break;
    }
    return r;
}

int default_theta(int n, int block_size) {
    int bs = std::max(1, block_size);
    return std::max(1, (n + bs - 1) / bs);
}

struct MoveContext {
    ResolvedNbhd nbhd;
    BlockPartition partition;

    std::vector<SpecimenId> neighbor(MoveKind kind, std::span<const SpecimenId> current, Rng& rng) {
        if (kind == MoveKind::BlockInsert) {
            if (nbhd.resplit) partition = BlockPartition::from_sequence(current, nbhd.block_size);
            MoveParams mp = sample_move(kind, partition.num_blocks(), rng);
            return apply_move(kind, current, mp, &partition);
        }
        MoveParams mp = sample_move(kind, current.size(), rng);
        return apply_move(kind, current, mp);
    }
};

double calibrate_t0(Evaluator& ev, Rng& rng, MoveContext& ctx, std::span<const SpecimenId> start,
                    double f_start, bool ml) {
    double sum_abs = 0.0;
    std::uint64_t samples = 0;
    const std::uint64_t want = std::min<std::uint64_t>(100, ev.remaining());
    for (std::uint64_t s = 0; s < want && !ev.exhausted(); ++s) {
        MoveKind kind = ml ? static_cast<MoveKind>(s % kMoveKindCount) : ctx.nbhd.kind;
        std::vector<SpecimenId> nb = ctx.neighbor(kind, start, rng);
        sum_abs += std::abs(ev.evaluate(nb) - f_start);
        ++samples;
    }
    if (samples == 0) return 1.0;
    const double mean_abs = sum_abs / static_cast<double>(samples);
    return std::max(mean_abs / std::log(2.0), 1e-12);
}

struct AnnealOutcome {
    std::vector<SpecimenId> best;
    double best_mtat = std::numeric_limits<double>::infinity();
    double final_temp = 0.0;
};

// Core Metropolis loop shared by SA, FTA and the scatter-search improvement.
// Spends at most `sub_budget` evaluations from `ev`.
AnnealOutcome anneal_impl(Evaluator& ev, Rng& rng,
                          std::vector<SpecimenId> current, double f_current, double t0,
                          double cooling, int theta, std::uint64_t sub_budget, MoveContext& ctx,
                          MlState* ml, std::uint64_t* uphill, bool log_accepted) {
    AnnealOutcome out;
    out.best = current;
    out.best_mtat = f_current;
    if (log_accepted) ev.note_accepted(current, f_current);

    double temp = std::max(t0, 1e-12);
    std::uint64_t spent = 0;
    static constexpr std::array<MoveKind, 4> kTrainingOrder = {
        MoveKind::Insert, MoveKind::Swap, MoveKind::Inverse, MoveKind::BlockInsert};

    while (!ev.exhausted() && spent < sub_budget) {
        MoveKind kind;
        if (ml) {
            kind = ml->training_done() ? ml_select(*ml, rng)
                                       : kTrainingOrder[static_cast<std::size_t>(ml->trained_arms)];
        } else {
            kind = ctx.nbhd.kind;
        }
        const double block_start_mtat = f_current;

        for (int t = 0; t < theta && !ev.exhausted() && spent < sub_budget; ++t) {
            std::vector<SpecimenId> nb = ctx.neighbor(kind, current, rng);
            const double f_new = ev.evaluate(nb);
            ++spent;
            const double delta = f_new - f_current;
            bool accept = delta <= 0.0;
            if (!accept) accept = rng.uniform01() < std::exp(-delta / temp);
            if (accept) {
                if (delta > 0.0 && uphill) ++(*uphill);
                current = std::move(nb);
                f_current = f_new;
                if (log_accepted) ev.note_accepted(current, f_current);
                if (f_current < out.best_mtat) {
                    out.best_mtat = f_current;
                    out.best = current;
                }
            }
        }

        if (ml) ml_update(*ml, kind, block_start_mtat, f_current, theta);
        temp = std::max(temp * cooling, 1e-300);
    }
    out.final_temp = temp;
    return out;
}

}  // namespace

namespace {

// Degenerate single-specimen instances have exactly one sequence; every
// engine just evaluates it.
SearchResult trivial_result(const Instance& inst, const TiePolicy& tie, std::uint64_t seed,
                            bool log_accepted) {
    Evaluator ev(inst, tie, 1, 0, seed, log_accepted);
    std::vector<SpecimenId> only{1};
    double mtat = ev.evaluate(only);
    ev.note_accepted(only, mtat);
    SearchResult result;
    ev.harvest(result);
    return result;
}

}  // namespace

SearchResult anneal(const Instance& inst, const AnnealConfig& cfg) {
    if (!(cfg.cooling > 0.0 && cfg.cooling <= 1.0))
        throw std::invalid_argument("cooling coefficient must lie in (0, 1]");
    if (inst.num_specimens() < 2)
        return trivial_result(inst, cfg.tie, cfg.seed, cfg.log_accepted);
    const auto start_time = std::chrono::steady_clock::now();

    Evaluator ev(inst, cfg.tie, cfg.budget, cfg.stagnation, cfg.seed, cfg.log_accepted);
    Rng rng(substream(cfg.seed, {kEngineStream}));
    ResolvedNbhd nbhd = resolve_nbhd(cfg.nbhd, inst);
    const int theta = cfg.metropolis > 0 ? cfg.metropolis
                                         : default_theta(inst.num_specimens(), cfg.nbhd.block_size);

    // Initial state: a random sequence of all pending specimens.
    std::vector<SpecimenId> start = identity_order(inst.num_specimens());
    rng.shuffle(start);
    double f_start = ev.evaluate(start);

    MoveContext ctx{nbhd, BlockPartition::from_sequence(start, nbhd.block_size)};
    MlState ml;
    double t0 = cfg.initial_temp;
    if (t0 <= 0.0) t0 = calibrate_t0(ev, rng, ctx, start, f_start, nbhd.ml);

    SearchResult result;
    anneal_impl(ev, rng, std::move(start), f_start, t0, cfg.cooling, theta,
                std::numeric_limits<std::uint64_t>::max(), ctx, nbhd.ml ? &ml : nullptr,
                &result.uphill_accepts, cfg.log_accepted);

    ev.harvest(result);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

namespace {

struct NehOutcome {
    std::vector<SpecimenId> order;
    double mtat = std::numeric_limits<double>::infinity();
    bool evaluated = false;
};

NehOutcome neh_b_impl(const Instance& inst, int block_size, bool idle_tiebreak, std::uint64_t seed,
                      std::uint64_t* evaluations, Evaluator* shared) {
    if (block_size < 1) throw std::invalid_argument("neh_b: block size must be >= 1");
    const int n = inst.num_specimens();
    Rng rng(substream(seed, {kNehStream}));

    // Priority: total processing time over all operations and both lines,
    // descending; equal totals keep a seed-shuffled order.
    std::vector<SpecimenId> ids = identity_order(n);
    rng.shuffle(ids);
    std::vector<std::int64_t> total(static_cast<std::size_t>(n) + 1, 0);
    for (const Specimen& sp : inst.specimens)
        for (int j = 1; j <= kOpsPerSpecimen; ++j)
            for (int line = 1; line <= inst.num_lines(); ++line)
                total[static_cast<std::size_t>(sp.id)] += inst.times.at(sp.id, j, line);
    std::stable_sort(ids.begin(), ids.end(), [&total](SpecimenId a, SpecimenId b) {
        return total[static_cast<std::size_t>(a)] > total[static_cast<std::size_t>(b)];
    });

    BlockPartition blocks = BlockPartition::from_sequence(ids, block_size);

    std::uint64_t local_evals = 0;
    struct Lowest : TieChooser {
        std::size_t choose(std::span<const std::pair<int, int>>) override { return 0; }
    } lowest;
    struct Eval {
        double mtat;
        std::int64_t idle;
    };
    auto evaluate = [&](std::span<const SpecimenId> order) -> Eval {
        if (shared) {
            std::int64_t idle = 0;
            double m = shared->evaluate(order, idle_tiebreak ? &idle : nullptr);
            return Eval{m, idle};
        }
        ++local_evals;
        Schedule s = decode_partial(inst, order, lowest);
        return Eval{s.mtat, idle_tiebreak ? total_idle_time(s) : 0};
    };

    NehOutcome out;
    std::vector<std::vector<SpecimenId>> placed;  // sequence of entities
    for (std::size_t bi = 0; bi < blocks.num_blocks(); ++bi) {
        if (shared && shared->exhausted()) {
            // Budget ran dry: append the remaining entities unevaluated.
            placed.push_back(blocks.blocks[bi]);
            continue;
        }
        double best_mtat = std::numeric_limits<double>::infinity();
        std::int64_t best_idle = std::numeric_limits<std::int64_t>::max();
        std::vector<std::size_t> best_positions;
        double best_full_mtat = std::numeric_limits<double>::infinity();
        for (std::size_t pos = 0; pos <= placed.size(); ++pos) {
            std::vector<SpecimenId> candidate;
            for (std::size_t p = 0; p < placed.size(); ++p) {
                if (p == pos)
                    candidate.insert(candidate.end(), blocks.blocks[bi].begin(),
                                     blocks.blocks[bi].end());
                candidate.insert(candidate.end(), placed[p].begin(), placed[p].end());
            }
            if (pos == placed.size())
                candidate.insert(candidate.end(), blocks.blocks[bi].begin(),
                                 blocks.blocks[bi].end());
            Eval e = evaluate(candidate);
            bool better = e.mtat < best_mtat - 1e-12;
            bool tie = std::abs(e.mtat - best_mtat) <= 1e-12;
            if (idle_tiebreak && tie) {
                if (e.idle < best_idle) {
                    better = true;
                } else if (e.idle > best_idle) {
                    tie = false;
                }
            }
            if (better) {
                best_mtat = e.mtat;
                best_idle = e.idle;
                best_positions.assign(1, pos);
            } else if (tie) {
                best_positions.push_back(pos);
            }
            if (bi + 1 == blocks.num_blocks()) best_full_mtat = std::min(best_full_mtat, e.mtat);
            if (shared && shared->exhausted()) break;
        }
        std::size_t chosen = best_positions.empty()
                                 ? placed.size()
                                 : best_positions[static_cast<std::size_t>(
                                       rng.below(best_positions.size()))];
        placed.insert(placed.begin() + static_cast<std::ptrdiff_t>(chosen), blocks.blocks[bi]);
        if (bi + 1 == blocks.num_blocks() && !best_positions.empty()) {
            out.mtat = best_mtat;
            out.evaluated = true;
        }
    }

    for (const auto& entity : placed) out.order.insert(out.order.end(), entity.begin(), entity.end());
    if (evaluations) *evaluations = local_evals;
    return out;
}

}  // namespace

SpecimenSequence neh_b(const Instance& inst, int block_size, bool idle_tiebreak, std::uint64_t seed,
                       std::uint64_t* evaluations, Evaluator* shared) {
    return SpecimenSequence{
        neh_b_impl(inst, block_size, idle_tiebreak, seed, evaluations, shared).order};
}

std::vector<SpecimenId> combine_solutions(std::span<const SpecimenId> p1,
                                          std::span<const SpecimenId> p2, double mtat1,
                                          double mtat2, Rng& rng, CombineTrace* trace) {
    if (p1.size() != p2.size())
        throw std::invalid_argument("combine_solutions: parents differ in length");
    if (!(mtat1 > 0.0) || !(mtat2 > 0.0))
        throw std::invalid_argument("combine_solutions: objective values must be positive");
    const std::size_t n = p1.size();

    // The better parent (lower MTAT) carries the larger influence weight.
    const double w1 = mtat2 / (mtat1 + mtat2);
    const double w2 = mtat1 / (mtat1 + mtat2);
    if (trace) {
        trace->weights = {w1, w2};
        trace->steps.clear();
    }

    std::unordered_set<SpecimenId> used;
    used.reserve(n);
    std::vector<SpecimenId> trial;
    trial.reserve(n);
    double v1 = 0.0, v2 = 0.0;
    std::size_t c1 = 0, c2 = 0;

    for (std::size_t t = 0; t < n; ++t) {
        while (c1 < n && used.count(p1[c1])) ++c1;
        while (c2 < n && used.count(p2[c2])) ++c2;
        if (c1 >= n || c2 >= n)
            throw std::invalid_argument("combine_solutions: parents are not permutations of the same ids");
        const SpecimenId cand1 = p1[c1];
        const SpecimenId cand2 = p2[c2];

        CombineStep step;
        step.position = t;
        step.candidate1 = cand1;
        step.candidate2 = cand2;

        if (cand1 == cand2) {
            trial.push_back(cand1);
            used.insert(cand1);
            step.chosen_parent = 0;
        } else {
            const double total = v1 + v2 + 1.0;
            const double dep1 = std::abs((v1 + 1.0) / total - w1) + std::abs(v2 / total - w2);
            const double dep2 = std::abs(v1 / total - w1) + std::abs((v2 + 1.0) / total - w2);
            step.departure1 = dep1;
            step.departure2 = dep2;
            int pick;
            if (dep1 < dep2)
                pick = 1;
            else if (dep2 < dep1)
                pick = 2;
            else
                pick = rng.below(2) == 0 ? 1 : 2;
            step.chosen_parent = pick;
            if (pick == 1) {
                trial.push_back(cand1);
                used.insert(cand1);
                v1 += 1.0;
            } else {
                trial.push_back(cand2);
                used.insert(cand2);
                v2 += 1.0;
            }
        }
        if (trace) trace->steps.push_back(step);
    }
    return trial;
}

SearchResult scatter_search(const Instance& inst, const ScatterConfig& cfg) {
    if (cfg.refset_size < 2) throw std::invalid_argument("refset size must be >= 2");
    if (inst.num_specimens() < 2)
        return trivial_result(inst, cfg.tie, cfg.seed, cfg.log_accepted);
    const auto start_time = std::chrono::steady_clock::now();

    Evaluator ev(inst, cfg.tie, cfg.budget, cfg.stagnation, cfg.seed, cfg.log_accepted);
    Rng rng(substream(cfg.seed, {kEngineStream, 0x55}));
    ResolvedNbhd nbhd = resolve_nbhd(cfg.nbhd, inst);
    const int theta = default_theta(inst.num_specimens(), cfg.nbhd.block_size);
    // The improvement phase carries the search: it needs room for sustained
    // descent, not just one Metropolis block (see the decisions ledger).
    const std::uint64_t improve_budget =
        cfg.improvement_budget > 0
            ? cfg.improvement_budget
            : std::max<std::uint64_t>(static_cast<std::uint64_t>(theta), cfg.budget / 5);

    struct Member {
        std::vector<SpecimenId> order;
        double mtat;
    };
    std::vector<Member> refset;

    auto seed_member = [&](std::uint64_t s) -> Member {
        NehOutcome got = neh_b_impl(inst, nbhd.block_size, true, s, nullptr, &ev);
        double mtat = got.mtat;
        if (!got.evaluated) {
            mtat = ev.exhausted() ? std::numeric_limits<double>::infinity()
                                  : ev.evaluate(got.order);
        }
        return Member{std::move(got.order), mtat};
    };

    for (int r = 0; r < cfg.refset_size && !ev.exhausted(); ++r)
        refset.push_back(seed_member(substream(cfg.seed, {kNehStream, static_cast<std::uint64_t>(r)})));
    while (refset.size() < 2) {
        std::vector<SpecimenId> order = identity_order(inst.num_specimens());
        rng.shuffle(order);
        refset.push_back(Member{std::move(order), std::numeric_limits<double>::infinity()});
    }

    auto best_index = [&refset]() {
        std::size_t bi = 0;
        for (std::size_t i = 1; i < refset.size(); ++i)
            if (refset[i].mtat < refset[bi].mtat) bi = i;
        return bi;
    };

    MlState ml;
    // One annealing schedule threads through the whole run: the improvement
    // temperature starts at the calibrated value and cools by `cooling` after
    // every improvement phase.
    double temperature = cfg.initial_temp;
    std::uint64_t refill_round = 0;
    SearchResult result;

    while (!ev.exhausted()) {
        const std::size_t bi = best_index();

        // Subset generation: the best member and the member furthest from it.
        std::size_t fi = bi;
        double furthest = -1.0;
        for (std::size_t i = 0; i < refset.size(); ++i) {
            if (i == bi) continue;
            double d = jpr_distance(refset[bi].order, refset[i].order);
            if (d > furthest) {
                furthest = d;
                fi = i;
            }
        }
        if (fi == bi || furthest <= 0.0) {
            // Reference set collapsed to one point: refill with fresh
            // constructive solutions under a perturbed seed.
            ++refill_round;
            for (std::size_t i = 0; i < refset.size() && !ev.exhausted(); ++i) {
                if (i == bi) continue;
                refset[i] = seed_member(substream(cfg.seed, {kRefillStream, refill_round,
                                                             static_cast<std::uint64_t>(i)}));
            }
            continue;
        }

        std::vector<SpecimenId> trial = combine_solutions(refset[bi].order, refset[fi].order,
                                                          refset[bi].mtat, refset[fi].mtat, rng);
        if (ev.exhausted()) break;
        double trial_mtat = ev.evaluate(trial);

        MoveContext ctx{nbhd, BlockPartition::from_sequence(trial, nbhd.block_size)};
        if (temperature <= 0.0) {
            double t0 = 0.0;
            if (!ev.exhausted()) t0 = calibrate_t0(ev, rng, ctx, trial, trial_mtat, nbhd.ml);
            temperature = t0 > 0.0 ? t0 : 1.0;
        }
        AnnealOutcome improved =
            anneal_impl(ev, rng, std::move(trial), trial_mtat, temperature, cfg.cooling, theta,
                        improve_budget, ctx, nbhd.ml ? &ml : nullptr, &result.uphill_accepts,
                        cfg.log_accepted);
        temperature = improved.final_temp;

        // Reference set update: the improved trial replaces the member
        // furthest from the best; the incumbent refreshes when beaten.
        refset[fi] = Member{std::move(improved.best), improved.best_mtat};
    }

    ev.harvest(result);
    if (result.best.empty()) {
        const std::size_t bi = best_index();
        result.best = refset[bi].order;
        result.best_mtat = refset[bi].mtat;
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

std::array<double, kMoveKindCount> MlState::probabilities() const {
    std::array<double, kMoveKindCount> p{};
    double sum = 0.0;
    for (double r : reward) sum += r;
    if (sum <= 0.0) {
        p.fill(1.0 / kMoveKindCount);
        return p;
    }
    for (int i = 0; i < kMoveKindCount; ++i) p[static_cast<std::size_t>(i)] = reward[static_cast<std::size_t>(i)] / sum;
    return p;
}

MoveKind ml_select(const MlState& state, Rng& rng) {
    const auto p = state.probabilities();
    double u = rng.uniform01();
    double acc = 0.0;
    for (int i = 0; i < kMoveKindCount; ++i) {
        acc += p[static_cast<std::size_t>(i)];
        if (u < acc) return static_cast<MoveKind>(i);
    }
    return static_cast<MoveKind>(kMoveKindCount - 1);
}

void ml_update(MlState& state, MoveKind kind, double mtat_before, double mtat_after, int theta) {
    if (theta < 1) throw std::invalid_argument("ml_update: theta must be >= 1");
    state.reward[static_cast<std::size_t>(kind)] +=
        std::abs(mtat_before - mtat_after) / static_cast<double>(theta);
    if (!state.training_done()) ++state.trained_arms;
}

SearchResult run_solver(const Instance& inst, const SolverConfig& cfg) {
    switch (cfg.algo) {
        case SolverConfig::Algo::SA:
        case SolverConfig::Algo::FTA: {
            AnnealConfig ac;
            ac.initial_temp = cfg.initial_temp;
            ac.cooling = cfg.algo == SolverConfig::Algo::FTA ? 1.0 : cfg.cooling;
            ac.metropolis = cfg.metropolis;
            ac.budget = cfg.budget;
            ac.stagnation = cfg.stagnation;
            ac.nbhd = cfg.nbhd;
            ac.tie = cfg.tie;
            ac.seed = cfg.seed;
            ac.log_accepted = cfg.log_accepted;
            return anneal(inst, ac);
        }
        case SolverConfig::Algo::SS: {
            ScatterConfig sc;
            sc.refset_size = cfg.refset_size;
            sc.initial_temp = cfg.initial_temp;
            sc.cooling = cfg.cooling;
            sc.budget = cfg.budget;
            sc.stagnation = cfg.stagnation;
            sc.improvement_budget = cfg.improvement_budget;
            sc.nbhd = cfg.nbhd;
            sc.tie = cfg.tie;
            sc.seed = cfg.seed;
            sc.log_accepted = cfg.log_accepted;
            return scatter_search(inst, sc);
        }
    }
    throw std::logic_error("unknown algorithm");
}

}  // namespace labsched
