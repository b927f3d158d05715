#include "labsched/instance.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "labsched/rng.hpp"

namespace labsched {

using nlohmann::json;

std::string to_string(StageKind s) {
    switch (s) {
        case StageKind::Centrifugation: return "Centrifugation";
        case StageKind::Decapping: return "Decapping";
        case StageKind::BiochemicalTest: return "BiochemicalTest";
        case StageKind::ImmunologicTest: return "ImmunologicTest";
        case StageKind::Validation: return "Validation";
    }
    throw std::invalid_argument("unknown StageKind");
}

StageKind stage_from_string(const std::string& s) {
    if (s == "Centrifugation") return StageKind::Centrifugation;
    if (s == "Decapping") return StageKind::Decapping;
    if (s == "BiochemicalTest") return StageKind::BiochemicalTest;
    if (s == "ImmunologicTest") return StageKind::ImmunologicTest;
    if (s == "Validation") return StageKind::Validation;
    throw std::invalid_argument("unknown stage name: " + s);
}

std::string to_string(TestKind k) {
    return k == TestKind::Biochemical ? "biochemical" : "immunologic";
}

TestKind test_kind_from_string(const std::string& s) {
    if (s == "biochemical") return TestKind::Biochemical;
    if (s == "immunologic") return TestKind::Immunologic;
    throw std::invalid_argument("unknown test kind: " + s);
}

std::size_t ProcessingTimeTable::offset(SpecimenId i, int j, int line) const {
    if (i < 1 || i > n_ || j < 1 || j > kOpsPerSpecimen || line < 1 || line > lines_)
        throw std::out_of_range("ProcessingTimeTable: index out of range");
    return (static_cast<std::size_t>(i - 1) * kOpsPerSpecimen + static_cast<std::size_t>(j - 1)) *
               static_cast<std::size_t>(lines_) +
           static_cast<std::size_t>(line - 1);
}

GenerationProfile realistic_profile() {
    GenerationProfile p;
    auto set = [&p](int line, StageKind s, int count, int cap, int lo, int hi) {
        p.line_stage[static_cast<std::size_t>(line - 1)][static_cast<std::size_t>(s)] =
            StageProfile{count, cap, lo, hi};
    };
    set(1, StageKind::Centrifugation, 2, 84, 480, 600);
    set(1, StageKind::Decapping, 1, 1, 2, 2);
    set(1, StageKind::BiochemicalTest, 2, 84, 480, 600);
    set(1, StageKind::ImmunologicTest, 2, 84, 1080, 1800);
    set(1, StageKind::Validation, 1, 1, 4, 6);
    set(2, StageKind::Centrifugation, 4, 32, 300, 360);
    set(2, StageKind::Decapping, 1, 1, 4, 6);
    set(2, StageKind::BiochemicalTest, 2, 60, 300, 720);
    set(2, StageKind::ImmunologicTest, 2, 48, 900, 2700);
    set(2, StageKind::Validation, 1, 1, 4, 6);
    return p;
}

GenerationProfile toy_profile() {
    GenerationProfile p = realistic_profile();
    p.line_stage[1][static_cast<std::size_t>(StageKind::Centrifugation)].machine_count = 2;
    for (int line = 0; line < 2; ++line) {
        p.line_stage[static_cast<std::size_t>(line)][static_cast<std::size_t>(StageKind::Centrifugation)].capacity = 2;
        p.line_stage[static_cast<std::size_t>(line)][static_cast<std::size_t>(StageKind::BiochemicalTest)].capacity = 2;
        p.line_stage[static_cast<std::size_t>(line)][static_cast<std::size_t>(StageKind::ImmunologicTest)].capacity = 2;
    }
    return p;
}

namespace {

constexpr std::array<StageKind, kStageCount> kStageOrder = {
    StageKind::Centrifugation, StageKind::Decapping, StageKind::BiochemicalTest,
    StageKind::ImmunologicTest, StageKind::Validation};

std::vector<StageKind> route_for(TestKind kind) {
    return {StageKind::Centrifugation, StageKind::Decapping,
            kind == TestKind::Biochemical ? StageKind::BiochemicalTest
                                          : StageKind::ImmunologicTest,
            StageKind::Validation};
}

}  // namespace

Instance generate_instance(const GenerationProfile& profile, int n_bio, int n_immuno, int idx,
                           std::uint64_t seed) {
    if (n_bio < 0 || n_immuno < 0 || n_bio + n_immuno < 1)
        throw std::invalid_argument("generate_instance: need at least one specimen");
    const int n = n_bio + n_immuno;

    Instance inst;
    inst.name = "INSTANCE_" + std::to_string(n_bio) + "_" + std::to_string(n_immuno) + "_" +
                std::to_string(idx);
    inst.seed = seed;

    for (int line = 1; line <= 2; ++line) {
        LineDesc desc;
        int k = 1;
        for (StageKind s : kStageOrder) {
            const StageProfile& sp = profile.at(line, s);
            for (int c = 0; c < sp.machine_count; ++c)
                desc.machines.push_back(Machine{line, k++, s, sp.capacity});
        }
        inst.lines.push_back(std::move(desc));
    }

    inst.specimens.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        TestKind kind = i <= n_bio ? TestKind::Biochemical : TestKind::Immunologic;
        inst.specimens.push_back(Specimen{i, kind, route_for(kind)});
    }

    // idx participates in the stream key so INSTANCE_B_I_1..K differ under one seed.
    inst.times = ProcessingTimeTable(n, 2);
    for (const Specimen& sp : inst.specimens) {
        for (int j = 1; j <= kOpsPerSpecimen; ++j) {
            StageKind stage = sp.route[static_cast<std::size_t>(j - 1)];
            for (int line = 1; line <= 2; ++line) {
                const StageProfile& prof = profile.at(line, stage);
                Rng rng(substream(seed, {static_cast<std::uint64_t>(idx),
                                         static_cast<std::uint64_t>(sp.id),
                                         static_cast<std::uint64_t>(j),
                                         static_cast<std::uint64_t>(line)}));
                inst.times.set(sp.id, j, line, rng.uniform_int(prof.time_lo, prof.time_hi));
            }
        }
    }
    return inst;
}

std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out;
    auto flag = [&out](std::string where, std::string msg) {
        out.push_back(Violation{std::move(where), std::move(msg)});
    };

    if (inst.lines.empty()) flag("instance", "no job shop lines");
    for (std::size_t li = 0; li < inst.lines.size(); ++li) {
        const int line = static_cast<int>(li) + 1;
        for (std::size_t ki = 0; ki < inst.lines[li].machines.size(); ++ki) {
            const Machine& m = inst.lines[li].machines[ki];
            std::string id = "machine M_{" + std::to_string(line) + "," + std::to_string(ki + 1) + "}";
            if (m.line != line) flag(id, "line index mismatch");
            if (m.index != static_cast<int>(ki) + 1) flag(id, "machine index mismatch");
            if (m.capacity < 1) flag(id, "capacity must be >= 1");
        }
    }

    for (std::size_t si = 0; si < inst.specimens.size(); ++si) {
        const Specimen& sp = inst.specimens[si];
        std::string id = "specimen J_" + std::to_string(sp.id);
        if (sp.id != static_cast<int>(si) + 1) flag(id, "ids must be 1..n in order");
        if (sp.route.size() != kOpsPerSpecimen) {
            flag(id, "route must have exactly 4 operations");
            continue;
        }
        std::vector<StageKind> expect = route_for(sp.kind);
        if (sp.route != expect) flag(id, "route must be centrifugation, decapping, analysis, validation");
    }

    // Every (stage, line) pair used by any route needs at least one machine,
    // otherwise constraint (2) cannot be satisfied on that line.
    for (const Specimen& sp : inst.specimens) {
        if (sp.route.size() != kOpsPerSpecimen) continue;
        for (std::size_t li = 0; li < inst.lines.size(); ++li) {
            for (int j = 1; j <= kOpsPerSpecimen; ++j) {
                StageKind stage = sp.route[static_cast<std::size_t>(j - 1)];
                bool found = false;
                for (const Machine& m : inst.lines[li].machines)
                    if (m.stage == stage) { found = true; break; }
                if (!found)
                    flag("line " + std::to_string(li + 1),
                         "no machine for stage " + to_string(stage) + " required by operation O_{" +
                             std::to_string(sp.id) + "," + std::to_string(j) + "}");
            }
        }
    }

    if (inst.times.num_specimens() != inst.num_specimens() ||
        inst.times.num_lines() != inst.num_lines()) {
        flag("times", "table shape does not match instance");
        return out;
    }
    for (const Specimen& sp : inst.specimens) {
        for (int j = 1; j <= kOpsPerSpecimen; ++j)
            for (int line = 1; line <= inst.num_lines(); ++line)
                if (inst.times.at(sp.id, j, line) <= 0)
                    flag("times(" + std::to_string(sp.id) + "," + std::to_string(j) + "," +
                             std::to_string(line) + ")",
                         "processing seconds must be positive");
    }
    return out;
}

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> keys,
                  const std::string& where) {
    for (const char* k : keys)
        if (!obj.contains(k)) throw std::runtime_error("instance file: missing field '" + std::string(k) + "' in " + where);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw std::runtime_error("instance file: unknown field '" + it.key() + "' in " + where);
    }
}

}  // namespace

std::string instance_to_json_text(const Instance& inst) {
    json j;
    j["name"] = inst.name;
    j["seed"] = inst.seed;
    j["lines"] = json::array();
    for (const LineDesc& line : inst.lines) {
        json jl;
        jl["machines"] = json::array();
        for (const Machine& m : line.machines)
            jl["machines"].push_back({{"stage", to_string(m.stage)}, {"capacity", m.capacity}});
        j["lines"].push_back(std::move(jl));
    }
    j["specimens"] = json::array();
    for (const Specimen& sp : inst.specimens) {
        json routes = json::array();
        for (StageKind s : sp.route) routes.push_back(to_string(s));
        j["specimens"].push_back(
            {{"id", sp.id}, {"kind", to_string(sp.kind)}, {"route", std::move(routes)}});
    }
    j["times"] = json::array();
    for (const Specimen& sp : inst.specimens)
        for (int op = 1; op <= kOpsPerSpecimen; ++op)
            for (int line = 1; line <= inst.num_lines(); ++line)
                j["times"].push_back({{"i", sp.id},
                                      {"j", op},
                                      {"line", line},
                                      {"seconds", inst.times.at(sp.id, op, line)}});
    return j.dump(2) + "\n";
}

Instance instance_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("instance file: ") + e.what());
    }
    require_keys(j, {"name", "seed", "lines", "specimens", "times"}, "top level");

    Instance inst;
    inst.name = j.at("name").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();

    int line_no = 0;
    for (const json& jl : j.at("lines")) {
        ++line_no;
        require_keys(jl, {"machines"}, "lines[" + std::to_string(line_no) + "]");
        LineDesc desc;
        int k = 0;
        for (const json& jm : jl.at("machines")) {
            ++k;
            require_keys(jm, {"stage", "capacity"},
                         "machine " + std::to_string(line_no) + "," + std::to_string(k));
            desc.machines.push_back(Machine{line_no, k,
                                            stage_from_string(jm.at("stage").get<std::string>()),
                                            jm.at("capacity").get<int>()});
        }
        inst.lines.push_back(std::move(desc));
    }

    for (const json& js : j.at("specimens")) {
        require_keys(js, {"id", "kind", "route"}, "specimens");
        Specimen sp;
        sp.id = js.at("id").get<int>();
        sp.kind = test_kind_from_string(js.at("kind").get<std::string>());
        for (const json& jr : js.at("route")) sp.route.push_back(stage_from_string(jr.get<std::string>()));
        inst.specimens.push_back(std::move(sp));
    }

    inst.times = ProcessingTimeTable(inst.num_specimens(), inst.num_lines());
    for (const json& jt : j.at("times")) {
        require_keys(jt, {"i", "j", "line", "seconds"}, "times");
        inst.times.set(jt.at("i").get<int>(), jt.at("j").get<int>(), jt.at("line").get<int>(),
                       jt.at("seconds").get<std::int64_t>());
    }
    return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << instance_to_json_text(inst);
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return instance_from_json_text(ss.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::vector<BenchmarkEntry> benchmark_plan(bool toy) {
    std::vector<BenchmarkEntry> plan;
    if (toy) {
        for (int n : {2, 4, 6, 8})
            for (int idx = 1; idx <= 5; ++idx) plan.push_back({n / 2, n / 2, idx});
    } else {
        for (int n : {100, 200, 300, 400, 500})
            for (auto [bio_num, bio_den] : {std::pair{1, 5}, std::pair{1, 2}, std::pair{4, 5}}) {
                int n_bio = n * bio_num / bio_den;
                for (int idx = 1; idx <= 10; ++idx) plan.push_back({n_bio, n - n_bio, idx});
            }
    }
    return plan;
}

Instance example6() {
    Instance inst;
    inst.name = "example6";
    inst.seed = 0;

    for (int line = 1; line <= 2; ++line) {
        LineDesc desc;
        int k = 1;
        auto add = [&](StageKind s, int count, int cap) {
            for (int c = 0; c < count; ++c) desc.machines.push_back(Machine{line, k++, s, cap});
        };
        add(StageKind::Centrifugation, 2, 2);
        add(StageKind::Decapping, 1, 1);
        add(StageKind::BiochemicalTest, 2, 2);
        add(StageKind::ImmunologicTest, 2, 2);
        add(StageKind::Validation, 1, 1);
        inst.lines.push_back(std::move(desc));
    }

    for (int i = 1; i <= 6; ++i) {
        TestKind kind = i <= 3 ? TestKind::Biochemical : TestKind::Immunologic;
        inst.specimens.push_back(Specimen{i, kind, route_for(kind)});
    }

    inst.times = ProcessingTimeTable(6, 2);
    // {line1, line2} seconds per operation.
    const int t[6][4][2] = {
        {{545, 332}, {2, 5}, {545, 530}, {5, 5}},
        {{593, 356}, {2, 5}, {593, 695}, {5, 5}},
        {{530, 325}, {2, 4}, {530, 475}, {4, 4}},
        {{597, 358}, {2, 5}, {1787, 2669}, {5, 5}},
        {{516, 318}, {2, 4}, {1297, 1442}, {4, 4}},
        {{564, 342}, {2, 5}, {1584, 2161}, {5, 5}},
    };
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 4; ++j)
            for (int line = 1; line <= 2; ++line)
                inst.times.set(i, j, line, t[i - 1][j - 1][line - 1]);
    return inst;
}

}  // namespace labsched
