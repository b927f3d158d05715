#include "labsched/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "labsched/kvconfig.hpp"
#include "labsched/rng.hpp"

namespace labsched {

Metrics compute_metrics(std::span<const ResultRecord> records, double c_star) {
    if (records.empty()) throw std::invalid_argument("compute_metrics: no records");
    if (!(c_star > 0.0)) throw std::invalid_argument("compute_metrics: C* must be positive");
    Metrics m;
    m.bre = std::numeric_limits<double>::infinity();
    m.wre = -std::numeric_limits<double>::infinity();
    double sum_err = 0.0, sum_cpu = 0.0;
    for (const ResultRecord& r : records) {
        const double e = (r.best_mtat - c_star) / c_star;
        m.bre = std::min(m.bre, e);
        m.wre = std::max(m.wre, e);
        sum_err += e;
        sum_cpu += r.cpu_seconds;
    }
    m.are = sum_err / static_cast<double>(records.size());
    m.arpd = m.are;
    m.acpu = sum_cpu / static_cast<double>(records.size());
    return m;
}

FriedmanResult friedmanResultImpl(const std::vector<std::vector<double>>& matrix) {
    if (matrix.empty()) throw std::invalid_argument("friedman_ranks: no rows");
    const std::size_t treatments = matrix.front().size();
    if (treatments < 2) throw std::invalid_argument("friedman_ranks: need at least two treatments");
    for (const auto& row : matrix)
        if (row.size() != treatments)
            throw std::invalid_argument("friedman_ranks: ragged matrix");

    std::vector<double> rank_sum(treatments, 0.0);
    for (const auto& row : matrix) {
        std::vector<std::size_t> idx(treatments);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&row](std::size_t a, std::size_t b) { return row[a] < row[b]; });
        std::size_t i = 0;
        while (i < treatments) {
            std::size_t j = i;
            while (j + 1 < treatments && row[idx[j + 1]] == row[idx[i]]) ++j;
            // Ties share the average of the ranks they span.
            const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank_sum[idx[k]] += avg_rank;
            i = j + 1;
        }
    }

    FriedmanResult out;
    const double n_rows = static_cast<double>(matrix.size());
    const double t = static_cast<double>(treatments);
    out.average_ranks.resize(treatments);
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < treatments; ++j) {
        out.average_ranks[j] = rank_sum[j] / n_rows;
        sum_sq += rank_sum[j] * rank_sum[j];
    }
    out.chi2 = 12.0 / (n_rows * t * (t + 1.0)) * sum_sq - 3.0 * n_rows * (t + 1.0);
    return out;
}

FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& matrix) {
    return friedmanResultImpl(matrix);
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& instance, const std::string& algo,
                        const std::string& nbhd, int rep) {
    auto text_key = [](const std::string& s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) h = mix64(h ^ c);
        return h;
    };
    return substream(master,
                     {text_key(instance), text_key(algo), text_key(nbhd),
                      static_cast<std::uint64_t>(rep)});
}

namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

}  // namespace

std::vector<ResultRecord> read_results_csv(const std::filesystem::path& path) {
    std::vector<ResultRecord> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() != 8)
            throw std::runtime_error("results csv: expected 8 columns, got " +
                                     std::to_string(f.size()));
        ResultRecord r;
        r.instance = f[0];
        r.algo = f[1];
        r.nbhd = f[2];
        r.seed = std::stoull(f[3]);
        r.rep = std::stoi(f[4]);
        r.best_mtat = std::stod(f[5]);
        r.evals = std::stoull(f[6]);
        r.cpu_seconds = std::stod(f[7]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_results_csv(std::span<const ResultRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "instance,algo,nbhd,seed,rep,best_mtat,evals,cpu_seconds\n";
    for (const ResultRecord& r : records)
        out << r.instance << ',' << r.algo << ',' << r.nbhd << ',' << r.seed << ',' << r.rep << ','
            << fmt_double(r.best_mtat) << ',' << r.evals << ',' << fmt_double(r.cpu_seconds)
            << '\n';
}

BestKnownTable best_known_from_records(std::span<const ResultRecord> records) {
    BestKnownTable table;
    for (const ResultRecord& r : records) {
        auto [it, fresh] = table.try_emplace(r.instance, r.best_mtat);
        if (!fresh) it->second = std::min(it->second, r.best_mtat);
    }
    return table;
}

BestKnownTable read_best_known_csv(const std::filesystem::path& path) {
    BestKnownTable table;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() != 2) throw std::runtime_error("best-known csv: expected 2 columns");
        table[f[0]] = std::stod(f[1]);
    }
    return table;
}

void write_best_known_csv(const BestKnownTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "instance,best_mtat\n";
    for (const auto& [name, value] : table) out << name << ',' << fmt_double(value) << '\n';
}

std::vector<MetricsRow> metrics_from_records(std::span<const ResultRecord> records,
                                             const BestKnownTable& best) {
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<ResultRecord>> cells;
    for (const ResultRecord& r : records) cells[{r.instance, r.algo, r.nbhd}].push_back(r);
    std::vector<MetricsRow> rows;
    for (const auto& [key, cell] : cells) {
        auto it = best.find(std::get<0>(key));
        if (it == best.end())
            throw std::runtime_error("no best-known value for instance " + std::get<0>(key));
        rows.push_back(MetricsRow{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                  compute_metrics(cell, it->second)});
    }
    return rows;
}

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "instance,algo,nbhd,BRE,ARE,WRE,ARPD,ACPU\n";
    for (const MetricsRow& r : rows)
        out << r.instance << ',' << r.algo << ',' << r.nbhd << ',' << fmt_double(r.metrics.bre)
            << ',' << fmt_double(r.metrics.are) << ',' << fmt_double(r.metrics.wre) << ','
            << fmt_double(r.metrics.arpd) << ',' << fmt_double(r.metrics.acpu) << '\n';
}

Manifest parse_manifest(const std::filesystem::path& path) {
    KvConfig cfg = KvConfig::parse_file(path);
    Manifest m;
    m.instance_globs = cfg.get_list("instances");
    m.algos = cfg.get_list("algos");
    m.nbhds = cfg.get_list("nbhds");
    m.reps = static_cast<int>(cfg.get_int("reps", 1));
    m.budget = cfg.get_u64("budget", 10000);
    m.seed = cfg.get_u64("seed", 0);
    m.threads = static_cast<int>(cfg.get_int("threads", 1));
    m.results_path = cfg.get("out", "results.csv");
    m.metrics_path = cfg.get("metrics", "metrics.csv");
    if (m.instance_globs.empty()) throw std::runtime_error("manifest: 'instances' is required");
    if (m.algos.empty()) throw std::runtime_error("manifest: 'algos' is required");
    if (m.nbhds.empty()) throw std::runtime_error("manifest: 'nbhds' is required");
    return m;
}

namespace {

// Glob with '*' (any run, no separator crossing not enforced) and '?'.
bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
    namespace fs = std::filesystem;
    std::vector<fs::path> out;
    fs::path pat(pattern);
    if (pattern.find('*') == std::string::npos && pattern.find('?') == std::string::npos) {
        out.push_back(pat);
        return out;
    }
    fs::path dir = pat.parent_path().empty() ? fs::path(".") : pat.parent_path();
    std::string leaf = pat.filename().string();
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && glob_match(leaf, entry.path().filename().string()))
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

SuiteReport run_suite(const Manifest& manifest) {
    namespace fs = std::filesystem;
    SuiteReport report;

    std::vector<fs::path> instance_files;
    for (const std::string& glob : manifest.instance_globs)
        for (const fs::path& p : expand_glob(glob)) instance_files.push_back(p);

    std::vector<ResultRecord> existing = read_results_csv(manifest.results_path);
    std::set<std::tuple<std::string, std::string, std::string, int>> present;
    for (const ResultRecord& r : existing) present.insert({r.instance, r.algo, r.nbhd, r.rep});

    struct Cell {
        fs::path file;
        std::string instance_name;
        std::string algo;
        std::string nbhd;
        int rep;
    };
    std::vector<Cell> cells;
    std::mutex mu;

    for (const fs::path& file : instance_files) {
        std::string name = file.stem().string();
        for (const std::string& algo : manifest.algos)
            for (const std::string& nbhd : manifest.nbhds)
                for (int rep = 1; rep <= manifest.reps; ++rep) {
                    ++report.cells_total;
                    if (present.count({name, algo, nbhd, rep})) {
                        ++report.cells_skipped;
                        continue;
                    }
                    cells.push_back(Cell{file, name, algo, nbhd, rep});
                }
    }

    std::vector<ResultRecord> fresh;
    std::size_t next = 0;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(
                                                           std::max(1, manifest.threads)),
                                                       cells.empty() ? 1 : cells.size()));

    auto work = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= cells.size()) return;
                idx = next++;
            }
            const Cell& cell = cells[idx];
            try {
                Instance inst = load_instance(cell.file);
                SolverConfig cfg;
                cfg.algo = algo_from_string(cell.algo);
                cfg.nbhd = neighborhood_from_string(cell.nbhd);
                cfg.budget = manifest.budget;
                cfg.seed = cell_seed(manifest.seed, cell.instance_name, cell.algo, cell.nbhd,
                                     cell.rep);
                SearchResult result = run_solver(inst, cfg);
                ResultRecord record{cell.instance_name, cell.algo,       cell.nbhd,
                                    cfg.seed,           cell.rep,        result.best_mtat,
                                    result.evaluations, result.wall_seconds};
                std::lock_guard<std::mutex> lock(mu);
                fresh.push_back(std::move(record));
                ++report.cells_run;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                report.errors.push_back(cell.instance_name + "," + cell.algo + "," + cell.nbhd +
                                        "," + std::to_string(cell.rep) + ": " + e.what());
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    std::vector<ResultRecord> all = std::move(existing);
    all.insert(all.end(), fresh.begin(), fresh.end());
    std::sort(all.begin(), all.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.instance, a.algo, a.nbhd, a.rep) <
               std::tie(b.instance, b.algo, b.nbhd, b.rep);
    });
    write_results_csv(all, manifest.results_path);

    if (!all.empty()) {
        BestKnownTable best = best_known_from_records(all);
        std::vector<MetricsRow> rows = metrics_from_records(all, best);
        write_metrics_csv(rows, manifest.metrics_path);
    }

    if (!report.errors.empty()) {
        std::ofstream err(manifest.results_path + ".errors.csv");
        err << "instance,algo,nbhd,rep,error\n";
        for (const std::string& e : report.errors) err << e << '\n';
    }
    return report;
}

}  // namespace labsched
