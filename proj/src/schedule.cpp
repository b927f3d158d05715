#include "labsched/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "labsched/rng.hpp"

namespace labsched {

using nlohmann::json;

namespace {

class LowestIndexChooser : public TieChooser {
  public:
    std::size_t choose(std::span<const std::pair<int, int>>) override { return 0; }
};

class SeededChooser : public TieChooser {
  public:
    explicit SeededChooser(std::uint64_t seed) : rng_(seed) {}
    std::size_t choose(std::span<const std::pair<int, int>> tied) override {
        return static_cast<std::size_t>(rng_.below(tied.size()));
    }

  private:
    Rng rng_;
};

class RecordedChooser : public TieChooser {
  public:
    explicit RecordedChooser(const std::vector<std::pair<int, int>>& choices) : choices_(choices) {}
    std::size_t choose(std::span<const std::pair<int, int>> tied) override {
        if (cursor_ >= choices_.size())
            throw std::invalid_argument("recorded tie policy: choice list exhausted");
        const auto want = choices_[cursor_++];
        for (std::size_t idx = 0; idx < tied.size(); ++idx)
            if (tied[idx] == want) return idx;
        throw std::invalid_argument("recorded tie policy: choice M_{" + std::to_string(want.first) +
                                    "," + std::to_string(want.second) + "} is not tied here");
    }

  private:
    const std::vector<std::pair<int, int>>& choices_;
    std::size_t cursor_ = 0;
};

struct QueueEntry {
    OpRef op;
    std::int64_t avail = 0;
    std::int64_t proc = 0;
};

struct MachineState {
    const Machine* machine = nullptr;
    std::vector<QueueEntry> queue;
    std::size_t closed = 0;               // entries already batched
    std::int64_t last_completion = 0;     // completion of the newest closed batch
    int batch_count = 0;
};

struct Decoder {
    const Instance& inst;
    TieChooser& chooser;
    std::vector<MachineState> machines;          // flattened
    std::vector<std::vector<std::size_t>> by_line_stage;  // (line-1)*5+stage -> machine idx
    Schedule sched;
    std::vector<std::array<std::int64_t, 4>> op_completion;

    Decoder(const Instance& in, TieChooser& ch) : inst(in), chooser(ch) {
        const int n = inst.num_specimens();
        sched.line_of.assign(static_cast<std::size_t>(n), 0);
        sched.available.assign(static_cast<std::size_t>(n), {0, 0, 0, 0});
        sched.tat.assign(static_cast<std::size_t>(n), 0);
        op_completion.assign(static_cast<std::size_t>(n), {0, 0, 0, 0});
        by_line_stage.assign(static_cast<std::size_t>(inst.num_lines()) * kStageCount, {});
        for (const LineDesc& line : inst.lines)
            for (const Machine& m : line.machines) {
                by_line_stage[static_cast<std::size_t>(m.line - 1) * kStageCount +
                              static_cast<std::size_t>(m.stage)]
                    .push_back(machines.size());
                machines.push_back(MachineState{&m, {}, 0, 0, 0});
            }
    }

    int open_len(const MachineState& ms) const {
        return static_cast<int>(ms.queue.size() - ms.closed);
    }

    void close_chunk(MachineState& ms) {
        std::int64_t avail_max = 0;
        std::int64_t proc_max = 0;
        Batch batch;
        batch.line = ms.machine->line;
        batch.machine = ms.machine->index;
        batch.position = ++ms.batch_count;
        for (std::size_t q = ms.closed; q < ms.queue.size(); ++q) {
            avail_max = std::max(avail_max, ms.queue[q].avail);
            proc_max = std::max(proc_max, ms.queue[q].proc);
            batch.members.push_back(ms.queue[q].op);
        }
        batch.proc_time = proc_max;
        batch.start = std::max(ms.last_completion, avail_max);
        batch.completion = batch.start + proc_max;
        ms.last_completion = batch.completion;
        ms.closed = ms.queue.size();
        for (const OpRef& op : batch.members)
            op_completion[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)] =
                batch.completion;
        sched.batches.push_back(std::move(batch));
    }

    void dispatch(SpecimenId id, int j, std::int64_t avail) {
        const Specimen& sp = inst.specimen(id);
        StageKind stage = sp.route[static_cast<std::size_t>(j - 1)];
        std::vector<std::size_t> eligible;
        if (j == 1) {
            for (int line = 1; line <= inst.num_lines(); ++line)
                for (std::size_t idx : by_line_stage[static_cast<std::size_t>(line - 1) * kStageCount +
                                                     static_cast<std::size_t>(stage)])
                    eligible.push_back(idx);
        } else {
            const int line = sched.line_of[static_cast<std::size_t>(id - 1)];
            eligible = by_line_stage[static_cast<std::size_t>(line - 1) * kStageCount +
                                     static_cast<std::size_t>(stage)];
        }
        if (eligible.empty())
            throw std::invalid_argument("no eligible machine for operation O_{" +
                                        std::to_string(id) + "," + std::to_string(j) + "}");

        // Step (1.2): a machine is available when its closed batches finish by
        // the operation's availability, so joining it does not queue behind
        // already-sequenced work.
        std::vector<std::size_t> available;
        for (std::size_t idx : eligible)
            if (machines[idx].last_completion <= avail) available.push_back(idx);

        std::size_t target;
        if (available.empty()) {
            // Step (1.2.2): waiting list of the machine freeing up first.
            target = eligible[0];
            for (std::size_t idx : eligible)
                if (machines[idx].last_completion < machines[target].last_completion) target = idx;
        } else if (available.size() == 1) {
            target = available[0];
        } else {
            // Step (1.3.2): smallest remaining capacity after insertion.
            int best_rem = std::numeric_limits<int>::max();
            for (std::size_t idx : available) {
                const MachineState& ms = machines[idx];
                int rem = ms.machine->capacity - (open_len(ms) % ms.machine->capacity) - 1;
                best_rem = std::min(best_rem, rem);
            }
            std::vector<std::size_t> tied;
            for (std::size_t idx : available) {
                const MachineState& ms = machines[idx];
                int rem = ms.machine->capacity - (open_len(ms) % ms.machine->capacity) - 1;
                if (rem == best_rem) tied.push_back(idx);
            }
            if (tied.size() == 1) {
                target = tied[0];
            } else {
                std::vector<std::pair<int, int>> labels;
                labels.reserve(tied.size());
                for (std::size_t idx : tied)
                    labels.emplace_back(machines[idx].machine->line, machines[idx].machine->index);
                std::size_t pick = chooser.choose(labels);
                if (pick >= tied.size())
                    throw std::logic_error("tie chooser returned an out-of-range index");
                target = tied[pick];
            }
        }

        MachineState& ms = machines[target];
        if (j == 1) sched.line_of[static_cast<std::size_t>(id - 1)] = ms.machine->line;
        sched.available[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j - 1)] = avail;
        ms.queue.push_back(QueueEntry{OpRef{id, j}, avail,
                                      inst.times.at(id, j, ms.machine->line)});
        if (open_len(ms) == ms.machine->capacity) close_chunk(ms);
    }

    Schedule run(std::span<const SpecimenId> order) {
        std::vector<int> vss_pos(static_cast<std::size_t>(inst.num_specimens()) + 1, 0);
        for (std::size_t p = 0; p < order.size(); ++p)
            vss_pos[static_cast<std::size_t>(order[p])] = static_cast<int>(p);

        for (int j = 1; j <= kOpsPerSpecimen; ++j) {
            // Step (2.1): ascending arriving time, VSS precedence on ties.
            std::vector<SpecimenId> todo(order.begin(), order.end());
            std::stable_sort(todo.begin(), todo.end(), [&](SpecimenId a, SpecimenId b) {
                std::int64_t ea = j == 1 ? 0 : op_completion[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(j - 2)];
                std::int64_t eb = j == 1 ? 0 : op_completion[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(j - 2)];
                if (ea != eb) return ea < eb;
                return vss_pos[static_cast<std::size_t>(a)] < vss_pos[static_cast<std::size_t>(b)];
            });
            for (SpecimenId id : todo) {
                std::int64_t avail =
                    j == 1 ? 0 : op_completion[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j - 2)];
                dispatch(id, j, avail);
            }
            // Step (2.2): the remaining specimens form a single residual batch.
            for (MachineState& ms : machines)
                if (ms.closed < ms.queue.size()) close_chunk(ms);
        }

        double sum = 0.0;
        for (SpecimenId id : order) {
            std::int64_t tat = op_completion[static_cast<std::size_t>(id - 1)][kOpsPerSpecimen - 1];
            sched.tat[static_cast<std::size_t>(id - 1)] = tat;
            sum += static_cast<double>(tat);
        }
        sched.mtat = sum / static_cast<double>(order.size());
        return std::move(sched);
    }
};

void check_full_permutation(const Instance& inst, std::span<const SpecimenId> order) {
    const int n = inst.num_specimens();
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("sequence must cover exactly the instance's specimens");
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    for (SpecimenId id : order) {
        if (id < 1 || id > n || seen[static_cast<std::size_t>(id)])
            throw std::invalid_argument("sequence is not a permutation of the specimen ids");
        seen[static_cast<std::size_t>(id)] = true;
    }
}

}  // namespace

TiePolicy paper_example_ties() {
    return TiePolicy::with_choices({{2, 1}, {1, 2}, {2, 2}, {2, 4}, {2, 6}, {1, 6}});
}

Schedule decode_fabm(const Instance& inst, const SpecimenSequence& vss, TieChooser& chooser) {
    check_full_permutation(inst, vss.order);
    Decoder dec(inst, chooser);
    return dec.run(vss.order);
}

Schedule decode_fabm(const Instance& inst, const SpecimenSequence& vss, const TiePolicy& tie) {
    switch (tie.rule) {
        case TieRule::LowestIndex: {
            LowestIndexChooser c;
            return decode_fabm(inst, vss, c);
        }
        case TieRule::SeededRandom: {
            SeededChooser c(tie.seed);
            return decode_fabm(inst, vss, c);
        }
        case TieRule::Recorded: {
            RecordedChooser c(tie.recorded);
            return decode_fabm(inst, vss, c);
        }
    }
    throw std::logic_error("unknown tie rule");
}

Schedule decode_partial(const Instance& inst, std::span<const SpecimenId> order,
                        TieChooser& chooser) {
    std::vector<bool> seen(static_cast<std::size_t>(inst.num_specimens()) + 1, false);
    for (SpecimenId id : order) {
        if (id < 1 || id > inst.num_specimens() || seen[static_cast<std::size_t>(id)])
            throw std::invalid_argument("partial sequence repeats or exceeds the specimen ids");
        seen[static_cast<std::size_t>(id)] = true;
    }
    if (order.empty()) throw std::invalid_argument("partial sequence must not be empty");
    Decoder dec(inst, chooser);
    return dec.run(order);
}

double evaluate_mtat(const Schedule& sched) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < sched.line_of.size(); ++i)
        if (sched.line_of[i] != 0) {
            sum += static_cast<double>(sched.tat[i]);
            ++count;
        }
    if (count == 0) throw std::invalid_argument("evaluate_mtat: schedule is empty");
    return sum / static_cast<double>(count);
}

std::int64_t total_idle_time(const Schedule& sched) {
    std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> per_machine;  // busy, last
    for (const Batch& b : sched.batches) {
        auto& [busy, last] = per_machine[{b.line, b.machine}];
        busy += b.proc_time;
        last = std::max(last, b.completion);
    }
    std::int64_t idle = 0;
    for (const auto& [key, val] : per_machine) idle += val.second - val.first;
    return idle;
}

Schedule realize_from_assignment(const Instance& inst, const Assignment& asg) {
    const int n = inst.num_specimens();

    std::vector<int> line_of(static_cast<std::size_t>(n), 0);
    for (const auto& x : asg.x) {
        if (x.i < 1 || x.i > n || x.l < 1 || x.l > inst.num_lines())
            throw InfeasibleAssignment(2, "X entry out of range");
        if (line_of[static_cast<std::size_t>(x.i - 1)] != 0)
            throw InfeasibleAssignment(2, "specimen J_" + std::to_string(x.i) +
                                              " assigned to more than one line");
        line_of[static_cast<std::size_t>(x.i - 1)] = x.l;
    }
    for (int i = 1; i <= n; ++i)
        if (line_of[static_cast<std::size_t>(i - 1)] == 0)
            throw InfeasibleAssignment(2, "specimen J_" + std::to_string(i) + " has no line");

    struct BatchKey {
        int l, k, d;
        auto operator<=>(const BatchKey&) const = default;
    };
    std::map<BatchKey, std::vector<OpRef>> members;
    std::vector<std::array<BatchKey, 4>> op_batch(static_cast<std::size_t>(n));
    std::vector<std::array<bool, 4>> op_seen(static_cast<std::size_t>(n), {false, false, false, false});

    auto machine_at = [&inst](int l, int k) -> const Machine& {
        if (l < 1 || l > inst.num_lines()) throw InfeasibleAssignment(3, "line index out of range");
        const auto& ms = inst.lines[static_cast<std::size_t>(l - 1)].machines;
        if (k < 1 || k > static_cast<int>(ms.size()))
            throw InfeasibleAssignment(3, "machine index out of range");
        return ms[static_cast<std::size_t>(k - 1)];
    };

    for (const auto& y : asg.y) {
        if (y.i < 1 || y.i > n || y.j < 1 || y.j > kOpsPerSpecimen)
            throw InfeasibleAssignment(4, "Y entry out of range");
        auto& seen = op_seen[static_cast<std::size_t>(y.i - 1)][static_cast<std::size_t>(y.j - 1)];
        if (seen)
            throw InfeasibleAssignment(4, "operation O_{" + std::to_string(y.i) + "," +
                                              std::to_string(y.j) + "} assigned to several batches");
        seen = true;
        const Machine& m = machine_at(y.l, y.k);
        const Specimen& sp = inst.specimen(y.i);
        if (m.stage != sp.route[static_cast<std::size_t>(y.j - 1)])
            throw InfeasibleAssignment(3, "operation O_{" + std::to_string(y.i) + "," +
                                              std::to_string(y.j) + "} on an ineligible machine");
        if (y.l != line_of[static_cast<std::size_t>(y.i - 1)])
            throw InfeasibleAssignment(3, "operation O_{" + std::to_string(y.i) + "," +
                                              std::to_string(y.j) + "} off its specimen's line");
        members[BatchKey{y.l, y.k, y.d}].push_back(OpRef{y.i, y.j});
        op_batch[static_cast<std::size_t>(y.i - 1)][static_cast<std::size_t>(y.j - 1)] =
            BatchKey{y.l, y.k, y.d};
    }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= kOpsPerSpecimen; ++j)
            if (!op_seen[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)])
                throw InfeasibleAssignment(4, "operation O_{" + std::to_string(i) + "," +
                                                  std::to_string(j) + "} is unassigned");

    for (const auto& [key, ops] : members) {
        const Machine& m = machine_at(key.l, key.k);
        if (static_cast<int>(ops.size()) > m.capacity)
            throw InfeasibleAssignment(5, "batch B_" + std::to_string(key.d) + " on M_{" +
                                              std::to_string(key.l) + "," + std::to_string(key.k) +
                                              "} exceeds capacity");
    }

    std::map<BatchKey, int> position;
    std::map<std::tuple<int, int, int>, BatchKey> by_position;
    for (const auto& z : asg.z) {
        BatchKey key{z.l, z.k, z.d};
        if (!members.count(key))
            throw InfeasibleAssignment(7, "position assigned to empty batch B_" +
                                              std::to_string(z.d) + " on M_{" + std::to_string(z.l) +
                                              "," + std::to_string(z.k) + "}");
        if (position.count(key))
            throw InfeasibleAssignment(7, "batch B_" + std::to_string(z.d) +
                                              " placed in more than one position");
        if (z.r < 1) throw InfeasibleAssignment(6, "position index must be positive");
        auto slot = std::make_tuple(z.l, z.k, z.r);
        if (by_position.count(slot))
            throw InfeasibleAssignment(6, "two batches share position " + std::to_string(z.r) +
                                              " on M_{" + std::to_string(z.l) + "," +
                                              std::to_string(z.k) + "}");
        position[key] = z.r;
        by_position[slot] = key;
    }
    for (const auto& [key, ops] : members)
        if (!position.count(key))
            throw InfeasibleAssignment(7, "batch B_" + std::to_string(key.d) + " on M_{" +
                                              std::to_string(key.l) + "," + std::to_string(key.k) +
                                              "} has no position");

    // Renumber positions per machine to 1..B keeping the given order.
    std::map<std::pair<int, int>, std::vector<BatchKey>> machine_batches;
    for (const auto& [slot, key] : by_position)
        machine_batches[{std::get<0>(slot), std::get<1>(slot)}].push_back(key);

    Schedule sched;
    sched.line_of = line_of;
    sched.available.assign(static_cast<std::size_t>(n), {0, 0, 0, 0});
    sched.tat.assign(static_cast<std::size_t>(n), 0);

    struct Pending {
        BatchKey key;
        int position;
        std::vector<OpRef> ops;
        BatchKey prev;      // previous position on machine
        bool has_prev = false;
    };
    std::map<BatchKey, Pending> pending;
    for (auto& [mk, keys] : machine_batches) {
        for (std::size_t idx = 0; idx < keys.size(); ++idx) {
            Pending p;
            p.key = keys[idx];
            p.position = static_cast<int>(idx) + 1;
            p.ops = members[keys[idx]];
            if (idx > 0) {
                p.prev = keys[idx - 1];
                p.has_prev = true;
            }
            pending[keys[idx]] = std::move(p);
        }
    }

    std::map<BatchKey, std::int64_t> completion;
    std::vector<std::array<std::int64_t, 4>> op_completion(static_cast<std::size_t>(n), {0, 0, 0, 0});
    bool progress = true;
    while (progress && !pending.empty()) {
        progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            const Pending& p = it->second;
            bool ready = !p.has_prev || completion.count(p.prev);
            std::int64_t avail_max = 0;
            if (ready) {
                for (const OpRef& op : p.ops) {
                    if (op.j == 1) continue;
                    const BatchKey& prior =
                        op_batch[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 2)];
                    if (!completion.count(prior)) {
                        ready = false;
                        break;
                    }
                    avail_max = std::max(avail_max, completion[prior]);
                }
            }
            if (!ready) {
                ++it;
                continue;
            }
            std::int64_t proc_max = 0;
            for (const OpRef& op : p.ops)
                proc_max = std::max(proc_max, inst.times.at(op.i, op.j, p.key.l));
            std::int64_t start = avail_max;
            if (p.has_prev) start = std::max(start, completion[p.prev]);
            Batch batch;
            batch.line = p.key.l;
            batch.machine = p.key.k;
            batch.position = p.position;
            batch.members = p.ops;
            batch.proc_time = proc_max;
            batch.start = start;
            batch.completion = start + proc_max;
            completion[p.key] = batch.completion;
            for (const OpRef& op : p.ops) {
                op_completion[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)] =
                    batch.completion;
                sched.available[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)] =
                    op.j == 1 ? 0
                              : op_completion[static_cast<std::size_t>(op.i - 1)]
                                             [static_cast<std::size_t>(op.j - 2)];
            }
            sched.batches.push_back(std::move(batch));
            it = pending.erase(it);
            progress = true;
        }
    }
    if (!pending.empty())
        throw InfeasibleAssignment(11, "circular batch dependencies, no feasible timing exists");

    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        std::int64_t tat = op_completion[static_cast<std::size_t>(i - 1)][kOpsPerSpecimen - 1];
        sched.tat[static_cast<std::size_t>(i - 1)] = tat;
        sum += static_cast<double>(tat);
    }
    sched.mtat = sum / static_cast<double>(n);
    return sched;
}

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& sched) {
    std::vector<Violation> out;
    auto flag = [&out](int constraint, std::string msg) {
        out.push_back(Violation{"constraint(" + std::to_string(constraint) + ")", std::move(msg)});
    };
    const int n = inst.num_specimens();
    if (static_cast<int>(sched.line_of.size()) != n || static_cast<int>(sched.tat.size()) != n) {
        flag(2, "schedule shape does not match the instance");
        return out;
    }

    for (int i = 1; i <= n; ++i) {
        int line = sched.line_of[static_cast<std::size_t>(i - 1)];
        if (line < 1 || line > inst.num_lines())
            flag(2, "specimen J_" + std::to_string(i) + " has no valid line");
    }

    std::vector<std::array<int, 4>> op_count(static_cast<std::size_t>(n), {0, 0, 0, 0});
    std::vector<std::array<std::int64_t, 4>> op_completion(static_cast<std::size_t>(n), {0, 0, 0, 0});
    std::map<std::pair<int, int>, std::vector<const Batch*>> per_machine;

    for (const Batch& b : sched.batches) {
        if (b.line < 1 || b.line > inst.num_lines() || b.machine < 1 ||
            b.machine > static_cast<int>(inst.lines[static_cast<std::size_t>(b.line - 1)].machines.size())) {
            flag(3, "batch on unknown machine");
            continue;
        }
        const Machine& m =
            inst.lines[static_cast<std::size_t>(b.line - 1)].machines[static_cast<std::size_t>(b.machine - 1)];
        if (static_cast<int>(b.members.size()) > m.capacity)
            flag(5, "batch at M_{" + std::to_string(b.line) + "," + std::to_string(b.machine) +
                        "} position " + std::to_string(b.position) + " has " +
                        std::to_string(b.members.size()) + " members, capacity " +
                        std::to_string(m.capacity));
        std::int64_t proc_max = 0;
        for (const OpRef& op : b.members) {
            if (op.i < 1 || op.i > n || op.j < 1 || op.j > kOpsPerSpecimen) {
                flag(4, "member operation out of range");
                continue;
            }
            op_count[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)]++;
            op_completion[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)] =
                b.completion;
            const Specimen& sp = inst.specimen(op.i);
            if (m.stage != sp.route[static_cast<std::size_t>(op.j - 1)])
                flag(3, "operation O_{" + std::to_string(op.i) + "," + std::to_string(op.j) +
                            "} on an ineligible machine");
            if (b.line != sched.line_of[static_cast<std::size_t>(op.i - 1)])
                flag(2, "operation O_{" + std::to_string(op.i) + "," + std::to_string(op.j) +
                            "} processed off its specimen's line");
            proc_max = std::max(proc_max, inst.times.at(op.i, op.j, b.line));
        }
        if (b.proc_time != proc_max)
            flag(8, "batch time at M_{" + std::to_string(b.line) + "," + std::to_string(b.machine) +
                        "} position " + std::to_string(b.position) + " is " +
                        std::to_string(b.proc_time) + ", max member time is " +
                        std::to_string(proc_max));
        if (b.start < 0 || b.completion < 0) flag(14, "negative batch times");
        if (b.completion != b.start + b.proc_time)
            flag(10, "completion differs from start plus processing time");
        per_machine[{b.line, b.machine}].push_back(&b);
    }

    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= kOpsPerSpecimen; ++j) {
            int c = op_count[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            if (c != 1)
                flag(4, "operation O_{" + std::to_string(i) + "," + std::to_string(j) +
                            "} appears in " + std::to_string(c) + " batches");
        }

    for (auto& [mk, batches] : per_machine) {
        std::sort(batches.begin(), batches.end(),
                  [](const Batch* a, const Batch* b) { return a->position < b->position; });
        for (std::size_t r = 0; r < batches.size(); ++r) {
            if (batches[r]->position != static_cast<int>(r) + 1) {
                flag(6, "positions on M_{" + std::to_string(mk.first) + "," +
                            std::to_string(mk.second) + "} are not 1..B");
                break;
            }
        }
        for (std::size_t r = 1; r < batches.size(); ++r)
            if (batches[r]->start < batches[r - 1]->completion)
                flag(9, "batch at position " + std::to_string(batches[r]->position) + " on M_{" +
                            std::to_string(mk.first) + "," + std::to_string(mk.second) +
                            "} starts before its predecessor completes");
    }

    // Members must be available when their batch starts (11)-(12).
    for (const Batch& b : sched.batches)
        for (const OpRef& op : b.members) {
            if (op.j <= 1 || op.i < 1 || op.i > n) continue;
            std::int64_t prior =
                op_completion[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 2)];
            if (b.start < prior)
                flag(12, "operation O_{" + std::to_string(op.i) + "," + std::to_string(op.j) +
                             "} starts before operation O_{" + std::to_string(op.i) + "," +
                             std::to_string(op.j - 1) + "} completes");
        }

    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        std::int64_t last =
            op_completion[static_cast<std::size_t>(i - 1)][kOpsPerSpecimen - 1];
        if (sched.tat[static_cast<std::size_t>(i - 1)] != last)
            flag(15, "TAT of specimen J_" + std::to_string(i) + " is " +
                         std::to_string(sched.tat[static_cast<std::size_t>(i - 1)]) +
                         ", completion of its last operation is " + std::to_string(last));
        if (sched.tat[static_cast<std::size_t>(i - 1)] < 0) flag(13, "negative TAT");
        sum += static_cast<double>(last);
    }
    if (n > 0 && std::abs(sched.mtat - sum / n) > 1e-9) flag(1, "stored MTAT is not the TAT mean");
    return out;
}

Assignment export_assignment(const Schedule& sched) {
    Assignment asg;
    for (std::size_t i = 0; i < sched.line_of.size(); ++i)
        if (sched.line_of[i] != 0)
            asg.x.push_back({static_cast<SpecimenId>(i + 1), sched.line_of[i]});
    for (const Batch& b : sched.batches) {
        for (const OpRef& op : b.members)
            asg.y.push_back({op.i, op.j, b.position, b.line, b.machine});
        asg.z.push_back({b.position, b.line, b.machine, b.position});
    }
    return asg;
}

Assignment example6_reference_assignment() {
    Assignment a;
    a.x = {{4, 1}, {6, 1}, {1, 2}, {2, 2}, {3, 2}, {5, 2}};
    a.y = {
        {4, 1, 1, 1, 2}, {4, 2, 1, 1, 3}, {4, 3, 1, 1, 6}, {4, 4, 1, 1, 8},
        {6, 1, 1, 1, 2}, {6, 2, 2, 1, 3}, {6, 3, 1, 1, 6}, {6, 4, 2, 1, 8},
        {1, 1, 1, 2, 1}, {1, 2, 1, 2, 3}, {1, 3, 1, 2, 4}, {1, 4, 1, 2, 8},
        {2, 1, 2, 2, 2}, {2, 2, 2, 2, 3}, {2, 3, 1, 2, 5}, {2, 4, 2, 2, 8},
        {3, 1, 1, 2, 1}, {3, 2, 3, 2, 3}, {3, 3, 1, 2, 4}, {3, 4, 3, 2, 8},
        {5, 1, 2, 2, 2}, {5, 2, 4, 2, 3}, {5, 3, 1, 2, 6}, {5, 4, 4, 2, 8},
    };
    a.z = {
        {1, 1, 2, 1}, {1, 1, 3, 2}, {2, 1, 3, 1}, {1, 1, 6, 1}, {1, 1, 8, 2}, {2, 1, 8, 1},
        {1, 2, 1, 1}, {2, 2, 2, 1}, {1, 2, 3, 2}, {2, 2, 3, 4}, {3, 2, 3, 1}, {4, 2, 3, 3},
        {1, 2, 4, 1}, {1, 2, 5, 1}, {1, 2, 6, 1}, {1, 2, 8, 2}, {2, 2, 8, 3}, {3, 2, 8, 1},
        {4, 2, 8, 4},
    };
    return a;
}

namespace {

void require_keys_sched(const json& obj, std::initializer_list<const char*> keys,
                        const std::string& where) {
    for (const char* k : keys)
        if (!obj.contains(k)) throw std::runtime_error("schedule file: missing field '" + std::string(k) + "' in " + where);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw std::runtime_error("schedule file: unknown field '" + it.key() + "' in " + where);
    }
}

}  // namespace

void save_schedule(const Schedule& sched, const std::filesystem::path& path) {
    json j;
    j["line_of"] = json::object();
    for (std::size_t i = 0; i < sched.line_of.size(); ++i)
        if (sched.line_of[i] != 0) j["line_of"][std::to_string(i + 1)] = sched.line_of[i];
    j["batches"] = json::array();
    for (const Batch& b : sched.batches) {
        json members = json::array();
        for (const OpRef& op : b.members) members.push_back({{"i", op.i}, {"j", op.j}});
        j["batches"].push_back({{"l", b.line},
                                {"k", b.machine},
                                {"r", b.position},
                                {"members", std::move(members)},
                                {"start", b.start},
                                {"completion", b.completion}});
    }
    j["tat"] = json::object();
    for (std::size_t i = 0; i < sched.tat.size(); ++i)
        if (sched.line_of[i] != 0) j["tat"][std::to_string(i + 1)] = sched.tat[i];
    j["mtat"] = sched.mtat;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

Schedule load_schedule(const Instance& inst, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json j = json::parse(in);
    require_keys_sched(j, {"line_of", "batches", "tat", "mtat"}, "top level");

    const int n = inst.num_specimens();
    Schedule sched;
    sched.line_of.assign(static_cast<std::size_t>(n), 0);
    sched.available.assign(static_cast<std::size_t>(n), {0, 0, 0, 0});
    sched.tat.assign(static_cast<std::size_t>(n), 0);
    for (auto it = j.at("line_of").begin(); it != j.at("line_of").end(); ++it)
        sched.line_of[static_cast<std::size_t>(std::stoi(it.key()) - 1)] = it.value().get<int>();
    for (const json& jb : j.at("batches")) {
        require_keys_sched(jb, {"l", "k", "r", "members", "start", "completion"}, "batches");
        Batch b;
        b.line = jb.at("l").get<int>();
        b.machine = jb.at("k").get<int>();
        b.position = jb.at("r").get<int>();
        for (const json& jm : jb.at("members")) {
            require_keys_sched(jm, {"i", "j"}, "members");
            OpRef op{jm.at("i").get<int>(), jm.at("j").get<int>()};
            b.members.push_back(op);
        }
        b.start = jb.at("start").get<std::int64_t>();
        b.completion = jb.at("completion").get<std::int64_t>();
        b.proc_time = b.completion - b.start;
        sched.batches.push_back(std::move(b));
    }
    for (auto it = j.at("tat").begin(); it != j.at("tat").end(); ++it)
        sched.tat[static_cast<std::size_t>(std::stoi(it.key()) - 1)] = it.value().get<std::int64_t>();
    sched.mtat = j.at("mtat").get<double>();

    // Recompute availability from the batch timing.
    std::vector<std::array<std::int64_t, 4>> completion(static_cast<std::size_t>(n), {0, 0, 0, 0});
    for (const Batch& b : sched.batches)
        for (const OpRef& op : b.members)
            if (op.i >= 1 && op.i <= n && op.j >= 1 && op.j <= kOpsPerSpecimen)
                completion[static_cast<std::size_t>(op.i - 1)][static_cast<std::size_t>(op.j - 1)] =
                    b.completion;
    for (int i = 1; i <= n; ++i)
        for (int jx = 2; jx <= kOpsPerSpecimen; ++jx)
            sched.available[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(jx - 1)] =
                completion[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(jx - 2)];
    return sched;
}

void save_assignment(const Assignment& asg, const std::filesystem::path& path) {
    json j;
    j["X"] = json::array();
    for (const auto& x : asg.x) j["X"].push_back({{"i", x.i}, {"l", x.l}});
    j["Y"] = json::array();
    for (const auto& y : asg.y)
        j["Y"].push_back({{"i", y.i}, {"j", y.j}, {"d", y.d}, {"l", y.l}, {"k", y.k}});
    j["Z"] = json::array();
    for (const auto& z : asg.z) j["Z"].push_back({{"d", z.d}, {"l", z.l}, {"k", z.k}, {"r", z.r}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

Assignment load_assignment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json j = json::parse(in);
    require_keys_sched(j, {"X", "Y", "Z"}, "top level");
    Assignment asg;
    for (const json& jx : j.at("X")) {
        require_keys_sched(jx, {"i", "l"}, "X");
        asg.x.push_back({jx.at("i").get<int>(), jx.at("l").get<int>()});
    }
    for (const json& jy : j.at("Y")) {
        require_keys_sched(jy, {"i", "j", "d", "l", "k"}, "Y");
        asg.y.push_back({jy.at("i").get<int>(), jy.at("j").get<int>(), jy.at("d").get<int>(),
                         jy.at("l").get<int>(), jy.at("k").get<int>()});
    }
    for (const json& jz : j.at("Z")) {
        require_keys_sched(jz, {"d", "l", "k", "r"}, "Z");
        asg.z.push_back({jz.at("d").get<int>(), jz.at("l").get<int>(), jz.at("k").get<int>(),
                         jz.at("r").get<int>()});
    }
    return asg;
}

void write_batch_csv(const Schedule& sched, std::ostream& out) {
    out << "line,machine,position,start,completion,members\n";
    std::vector<const Batch*> ordered;
    for (const Batch& b : sched.batches) ordered.push_back(&b);
    std::sort(ordered.begin(), ordered.end(), [](const Batch* a, const Batch* b) {
        return std::tie(a->line, a->machine, a->position) < std::tie(b->line, b->machine, b->position);
    });
    for (const Batch* b : ordered) {
        out << b->line << ',' << b->machine << ',' << b->position << ',' << b->start << ','
            << b->completion << ',';
        for (std::size_t i = 0; i < b->members.size(); ++i) {
            if (i) out << ' ';
            out << 'O' << b->members[i].i << '.' << b->members[i].j;
        }
        out << '\n';
    }
}

}  // namespace labsched
