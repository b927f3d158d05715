#include "labsched/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "labsched/rng.hpp"

namespace labsched {

double fdc(std::span<const FdcSample> samples) {
    const std::size_t m = samples.size();
    if (m < 2) throw std::invalid_argument("fdc: need at least two samples");
    double fbar = 0.0, dbar = 0.0;
    for (const FdcSample& s : samples) {
        fbar += s.fitness;
        dbar += s.distance;
    }
    fbar /= static_cast<double>(m);
    dbar /= static_cast<double>(m);
    double cov = 0.0, var_f = 0.0, var_d = 0.0;
    for (const FdcSample& s : samples) {
        cov += (s.fitness - fbar) * (s.distance - dbar);
        var_f += (s.fitness - fbar) * (s.fitness - fbar);
        var_d += (s.distance - dbar) * (s.distance - dbar);
    }
    if (var_f <= 0.0 || var_d <= 0.0)
        throw std::domain_error("fdc: zero variance in fitness or distance");
    const double mm = static_cast<double>(m);
    const double sigma_f = std::sqrt(var_f / mm);
    const double sigma_d = std::sqrt(var_d / mm);
    return cov / (mm * sigma_f * sigma_d);
}

std::vector<FdcSample> fdc_samples_from_run(const SearchResult& result) {
    std::vector<FdcSample> out;
    if (result.best.empty()) return out;
    for (const AcceptedSample& a : result.accepted_log) {
        double d = a.vss == result.best ? 0.0 : jpr_distance(a.vss, result.best);
        out.push_back(FdcSample{a.mtat, d});
    }
    return out;
}

WalkSeries random_walk(const Instance& inst, MoveKind kind, std::size_t length, std::uint64_t seed,
                       int block_size) {
    if (length < 2) throw std::invalid_argument("random_walk: length must be >= 2");
    const int n = inst.num_specimens();
    Rng rng(substream(seed, {0x77a1}));

    std::vector<SpecimenId> current(static_cast<std::size_t>(n));
    std::iota(current.begin(), current.end(), 1);
    rng.shuffle(current);

    int bs = std::max(1, std::min(block_size, std::max(1, n / 2)));
    BlockPartition part = BlockPartition::from_sequence(current, bs);

    WalkSeries series;
    series.kind = kind;
    series.seed = seed;
    series.fitness.reserve(length);

    TiePolicy tie = TiePolicy::lowest_index();
    auto decode = [&](const std::vector<SpecimenId>& order) {
        return decode_fabm(inst, SpecimenSequence{order}, tie).mtat;
    };
    series.fitness.push_back(decode(current));
    for (std::size_t step = 1; step < length; ++step) {
        if (kind == MoveKind::BlockInsert) {
            MoveParams mp = sample_move(kind, part.num_blocks(), rng);
            current = apply_move(kind, current, mp, &part);
        } else {
            MoveParams mp = sample_move(kind, current.size(), rng);
            current = apply_move(kind, current, mp);
        }
        series.fitness.push_back(decode(current));
    }
    return series;
}

double autocorrelation(std::span<const double> series, std::size_t lag) {
    const std::size_t m = series.size();
    if (m < 2) throw std::invalid_argument("autocorrelation: need at least two points");
    if (lag >= m) throw std::invalid_argument("autocorrelation: lag must be below the length");
    double mean = 0.0;
    for (double f : series) mean += f;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double f : series) var += (f - mean) * (f - mean);
    var /= static_cast<double>(m);
    if (var <= 0.0) throw std::domain_error("autocorrelation: constant series");
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < m; ++t) acc += (series[t] - mean) * (series[t + lag] - mean);
    return acc / (var * static_cast<double>(m - lag));
}

LonKey lon_key(std::span<const SpecimenId> perm) {
    std::uint64_t h1 = 0x9ae16a3b2f90404fULL;
    std::uint64_t h2 = 0xc3a5c85c97cb3127ULL;
    for (SpecimenId id : perm) {
        h1 = mix64(h1 ^ static_cast<std::uint64_t>(id));
        h2 = mix64(h2 + static_cast<std::uint64_t>(id) * 0x9ddfea08eb382d69ULL);
    }
    return LonKey{h1, h2};
}

void LonGraph::add_run(std::span<const AcceptedSample> optima, bool keep_solutions) {
    LonKey prev{};
    bool have_prev = false;
    for (const AcceptedSample& opt : optima) {
        LonKey key = lon_key(opt.vss);
        if (!keep_solutions) {
            // Large instances drop the permutations; fitness joins the key so
            // that distinct optima with colliding decodes stay separate.
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(opt.mtat));
            std::memcpy(&bits, &opt.mtat, sizeof(bits));
            key[0] = mix64(key[0] ^ bits);
            key[1] = mix64(key[1] + bits);
        }
        auto [it, fresh] = nodes_.try_emplace(key);
        if (fresh) {
            it->second.fitness = opt.mtat;
            if (keep_solutions) it->second.solution = opt.vss;
        }
        if (have_prev && !(prev == key)) {
            ++edges_[{prev, key}];
            ++it->second.in_weight;
        }
        prev = key;
        have_prev = true;
    }
}

void LonGraph::merge(const LonGraph& other) {
    for (const auto& [key, node] : other.nodes_) {
        auto [it, fresh] = nodes_.try_emplace(key, node);
        if (!fresh) {
            it->second.in_weight += node.in_weight;
            if (it->second.solution.empty() && !node.solution.empty())
                it->second.solution = node.solution;
        }
    }
    for (const auto& [edge, weight] : other.edges_) edges_[edge] += weight;
}

std::pair<std::uint64_t, std::uint64_t> lon_defaults(int num_specimens) {
    if (num_specimens < 100) return {1000, 10000};
    return {50, 1000};
}

LonGraph build_lon(const Instance& inst, const SolverConfig& solver, std::uint64_t runs,
                   std::uint64_t stagnation, std::uint64_t seed, int threads) {
    if (runs < 1 || stagnation < 1)
        throw std::invalid_argument("build_lon: runs and stagnation must be >= 1");
    const bool keep_solutions = inst.num_specimens() < 100;

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max<std::size_t>(1, hw ? hw : 1);
    workers = std::min<std::size_t>(workers, runs);

    std::vector<LonGraph> partial(workers);
    auto work = [&](std::size_t w) {
        for (std::uint64_t r = w; r < runs; r += workers) {
            SolverConfig cfg = solver;
            cfg.seed = substream(seed, {0x10f, r});
            cfg.stagnation = stagnation;
            cfg.budget = std::numeric_limits<std::uint64_t>::max() / 2;
            SearchResult result = run_solver(inst, cfg);
            partial[w].add_run(result.optima_log, keep_solutions);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }

    LonGraph merged;
    for (const LonGraph& g : partial) merged.merge(g);
    return merged;
}

std::size_t PlateauGraph::num_sinks() const {
    std::size_t count = 0;
    for (const Plateau& p : plateaus)
        if (p.sink) ++count;
    return count;
}

namespace {

bool fitness_close(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

PlateauGraph compress_plateaus(const LonGraph& g, double rel_tol) {
    std::vector<LonKey> keys;
    keys.reserve(g.nodes().size());
    for (const auto& [key, node] : g.nodes()) keys.push_back(key);
    std::map<LonKey, std::size_t> index;
    for (std::size_t i = 0; i < keys.size(); ++i) index[keys[i]] = i;

    // Union-find over equal-fitness edges, direction ignored.
    std::vector<std::size_t> parent(keys.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [edge, weight] : g.edges()) {
        const double fa = g.nodes().at(edge.first).fitness;
        const double fb = g.nodes().at(edge.second).fitness;
        if (fitness_close(fa, fb, rel_tol)) {
            std::size_t ra = find(index.at(edge.first));
            std::size_t rb = find(index.at(edge.second));
            if (ra != rb) parent[ra] = rb;
        }
    }

    std::map<std::size_t, Plateau> groups;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        Plateau& p = groups[find(i)];
        p.members.push_back(keys[i]);
        p.fitness = g.nodes().at(keys[i]).fitness;
    }

    // A plateau is a sink unless some member has an escape edge to a strictly
    // better (lower fitness) plateau.
    std::map<LonKey, std::size_t> root_of;
    for (std::size_t i = 0; i < keys.size(); ++i) root_of[keys[i]] = find(i);
    std::map<std::size_t, bool> improvable;
    for (const auto& [edge, weight] : g.edges()) {
        std::size_t ra = root_of.at(edge.first);
        std::size_t rb = root_of.at(edge.second);
        if (ra == rb) continue;
        const double fa = groups.at(ra).fitness;
        const double fb = groups.at(rb).fitness;
        if (fb < fa && !fitness_close(fa, fb, rel_tol)) improvable[ra] = true;
    }

    PlateauGraph out;
    for (auto& [root, plateau] : groups) {
        plateau.sink = !improvable.count(root);
        std::sort(plateau.members.begin(), plateau.members.end());
        out.plateaus.push_back(std::move(plateau));
    }
    std::sort(out.plateaus.begin(), out.plateaus.end(), [](const Plateau& a, const Plateau& b) {
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        return a.members < b.members;
    });
    out.average_size = out.plateaus.empty()
                           ? 0.0
                           : static_cast<double>(g.nodes().size()) /
                                 static_cast<double>(out.plateaus.size());
    return out;
}

namespace {

std::string key_name(const LonKey& key) {
    char buf[36];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(key[0]),
                  static_cast<unsigned long long>(key[1]));
    return std::string("n") + buf;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void export_graph(const LonGraph& g, const PlateauGraph& plateaus, GraphFormat format,
                  std::ostream& out) {
    std::map<LonKey, std::size_t> plateau_of;
    std::map<LonKey, bool> sink_of;
    for (std::size_t p = 0; p < plateaus.plateaus.size(); ++p)
        for (const LonKey& key : plateaus.plateaus[p].members) {
            plateau_of[key] = p;
            sink_of[key] = plateaus.plateaus[p].sink;
        }

    if (format == GraphFormat::GraphML) {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
            << "  <key id=\"fitness\" for=\"node\" attr.name=\"fitness\" attr.type=\"double\"/>\n"
            << "  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"long\"/>\n"
            << "  <key id=\"plateau\" for=\"node\" attr.name=\"plateau\" attr.type=\"long\"/>\n"
            << "  <key id=\"sink\" for=\"node\" attr.name=\"sink\" attr.type=\"boolean\"/>\n"
            << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
            << "  <graph id=\"lon\" edgedefault=\"directed\">\n";
        for (const auto& [key, node] : g.nodes()) {
            out << "    <node id=\"" << key_name(key) << "\">\n"
                << "      <data key=\"fitness\">" << fmt_double(node.fitness) << "</data>\n"
                << "      <data key=\"size\">" << node.in_weight << "</data>\n"
                << "      <data key=\"plateau\">" << plateau_of[key] << "</data>\n"
                << "      <data key=\"sink\">" << (sink_of[key] ? "true" : "false") << "</data>\n"
                << "    </node>\n";
        }
        std::size_t eid = 0;
        for (const auto& [edge, weight] : g.edges()) {
            out << "    <edge id=\"e" << eid++ << "\" source=\"" << key_name(edge.first)
                << "\" target=\"" << key_name(edge.second) << "\">\n"
                << "      <data key=\"weight\">" << weight << "</data>\n"
                << "    </edge>\n";
        }
        out << "  </graph>\n</graphml>\n";
    } else {
        out << "digraph lon {\n";
        for (const auto& [key, node] : g.nodes()) {
            out << "  " << key_name(key) << " [fitness=" << fmt_double(node.fitness)
                << ", size=" << node.in_weight << ", plateau=" << plateau_of[key]
                << ", sink=" << (sink_of[key] ? "true" : "false") << "];\n";
        }
        for (const auto& [edge, weight] : g.edges())
            out << "  " << key_name(edge.first) << " -> " << key_name(edge.second)
                << " [weight=" << weight << "];\n";
        out << "}\n";
    }
}

}  // namespace labsched
