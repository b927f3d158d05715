#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "labsched/bench.hpp"
#include "labsched/kvconfig.hpp"
#include "labsched/landscape.hpp"

namespace fs = std::filesystem;
using namespace labsched;

namespace {

std::vector<SpecimenId> parse_permutation(const std::string& text) {
    std::vector<SpecimenId> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

TiePolicy tie_policy_from_name(const std::string& name, std::uint64_t seed) {
    if (name == "lowest-index") return TiePolicy::lowest_index();
    if (name == "seeded-random") return TiePolicy::seeded(seed);
    if (name == "paper-example") return paper_example_ties();
    throw CLI::ValidationError("--tie", "expected lowest-index, seeded-random or paper-example");
}

void apply_solver_overrides(SolverConfig& cfg, const KvConfig& kv) {
    cfg.initial_temp = kv.get_double("initial_temp", cfg.initial_temp);
    cfg.cooling = kv.get_double("cooling", cfg.cooling);
    cfg.metropolis = static_cast<int>(kv.get_int("metropolis", cfg.metropolis));
    cfg.refset_size = static_cast<int>(kv.get_int("refset", cfg.refset_size));
    cfg.improvement_budget = kv.get_u64("improvement_budget", cfg.improvement_budget);
    cfg.stagnation = kv.get_u64("stagnation", cfg.stagnation);
    cfg.nbhd.block_size = static_cast<int>(kv.get_int("block", cfg.nbhd.block_size));
    cfg.nbhd.aps_block_floor =
        static_cast<int>(kv.get_int("aps_block_floor", cfg.nbhd.aps_block_floor));
    if (kv.has("blocks"))
        cfg.nbhd.resplit_blocks = kv.get("blocks", "fixed") == "resplit";
}

int cmd_gen(const std::string& profile_name, int bio, int immuno, int count, std::uint64_t seed,
            const std::string& out_dir) {
    GenerationProfile profile = profile_name == "toy" ? toy_profile() : realistic_profile();
    fs::create_directories(out_dir);
    for (int idx = 1; idx <= count; ++idx) {
        Instance inst = generate_instance(profile, bio, immuno, idx, seed);
        auto violations = validate_instance(inst);
        if (!violations.empty()) {
            std::cerr << "generated instance failed validation: " << violations.front().message
                      << "\n";
            return 1;
        }
        fs::path path = fs::path(out_dir) / (inst.name + ".json");
        save_instance(inst, path);
        std::cout << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed clinical-laboratory scheduling toolkit"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate benchmark instances");
    std::string gen_profile = "toy";
    int gen_bio = 1, gen_immuno = 1, gen_count = 1;
    std::uint64_t gen_seed = 1;
    std::string gen_out = ".";
    gen->add_option("--profile", gen_profile)->check(CLI::IsMember({"toy", "realistic"}));
    gen->add_option("--bio", gen_bio)->required();
    gen->add_option("--immuno", gen_immuno)->required();
    gen->add_option("--count", gen_count);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);

    // ---- decode ----
    auto* decode = app.add_subcommand("decode", "Decode a specimen sequence into a schedule");
    std::string dec_instance, dec_vss, dec_tie = "lowest-index", dec_out, dec_csv;
    std::uint64_t dec_tie_seed = 0;
    decode->add_option("--instance", dec_instance)->required();
    decode->add_option("--vss", dec_vss)->required();
    decode->add_option("--tie", dec_tie);
    decode->add_option("--tie-seed", dec_tie_seed);
    decode->add_option("--out", dec_out);
    decode->add_option("--csv", dec_csv);

    // ---- validate ----
    auto* validate = app.add_subcommand("validate", "Validate an instance or a schedule");
    std::string val_instance, val_schedule;
    validate->add_option("--instance", val_instance)->required();
    validate->add_option("--schedule", val_schedule);

    // ---- distance ----
    auto* distance = app.add_subcommand("distance", "JPR distance between two permutations");
    std::string dist_p1, dist_p2;
    distance->add_option("--p1", dist_p1)->required();
    distance->add_option("--p2", dist_p2)->required();

    // ---- moments ----
    auto* moments = app.add_subcommand("moments", "Inter-neighbor distance moments");
    std::string mom_kind = "swp";
    int mom_n = 100, mom_block = kDefaultBlockSize;
    std::uint64_t mom_samples = 0, mom_seed = 1;
    bool mom_empirical = false;
    moments->add_option("--kind", mom_kind)->check(CLI::IsMember({"swp", "ins", "inv", "inb"}));
    moments->add_option("--n", mom_n)->required();
    moments->add_option("--block", mom_block);
    moments->add_option("--samples", mom_samples)->each([&mom_empirical](const std::string&) {
        mom_empirical = true;
    });
    moments->add_option("--seed", mom_seed);

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "Run a metaheuristic on an instance");
    std::string sol_instance, sol_algo = "sa", sol_nbhd = "swp", sol_out, sol_config,
                sol_tie = "seeded-random";
    std::uint64_t sol_evals = 10000, sol_seed = 0;
    int sol_reps = 1;
    solve->add_option("--instance", sol_instance)->required();
    solve->add_option("--algo", sol_algo)->check(CLI::IsMember({"sa", "fta", "ss"}));
    solve->add_option("--nbhd", sol_nbhd)
        ->check(CLI::IsMember({"ins", "swp", "inv", "inb", "ml", "auto"}));
    solve->add_option("--evals", sol_evals);
    solve->add_option("--reps", sol_reps);
    solve->add_option("--seed", sol_seed);
    solve->add_option("--out", sol_out);
    solve->add_option("--config", sol_config);
    solve->add_option("--tie", sol_tie);

    // ---- landscape ----
    auto* landscape = app.add_subcommand("landscape", "Fitness landscape analyzers");
    landscape->require_subcommand(1);
    std::string land_instance, land_algo = "sa", land_nbhd = "swp", land_out = "landscape";
    std::uint64_t land_seed = 0, land_runs = 0, land_stagnation = 0, land_evals = 10000;
    std::size_t land_walk = 500;
    std::size_t land_lag = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--instance", land_instance)->required();
        sub->add_option("--algo", land_algo)->check(CLI::IsMember({"sa", "fta", "ss"}));
        sub->add_option("--nbhd", land_nbhd)
            ->check(CLI::IsMember({"ins", "swp", "inv", "inb", "ml", "auto"}));
        sub->add_option("--seed", land_seed);
        sub->add_option("--out", land_out);
        sub->add_option("--evals", land_evals);
    };
    auto* land_fdc = landscape->add_subcommand("fdc", "Fitness distance correlation");
    add_common(land_fdc);
    auto* land_ac = landscape->add_subcommand("ac", "Random-walk autocorrelation");
    add_common(land_ac);
    land_ac->add_option("--walk", land_walk);
    land_ac->add_option("--lag", land_lag);
    auto* land_lon = landscape->add_subcommand("lon", "Local optima network");
    add_common(land_lon);
    land_lon->add_option("--runs", land_runs);
    land_lon->add_option("--stagnation", land_stagnation);

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Run an experiment manifest");
    std::string bench_manifest;
    bench->add_option("--manifest", bench_manifest)->required();

    // ---- metrics ----
    auto* metrics = app.add_subcommand("metrics", "Compute metrics from results");
    std::string met_results, met_best, met_out = "metrics.csv";
    bool met_friedman = false;
    metrics->add_option("--results", met_results)->required();
    metrics->add_option("--bestknown", met_best);
    metrics->add_option("--out", met_out);
    metrics->add_flag("--friedman", met_friedman);

    // ---- bestknown ----
    auto* bestknown = app.add_subcommand("bestknown", "Best-known values from results");
    std::string bk_results, bk_out = "bestknown.csv";
    bestknown->add_option("--results", bk_results)->required();
    bestknown->add_option("--out", bk_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_profile, gen_bio, gen_immuno, gen_count, gen_seed, gen_out);

        if (decode->parsed()) {
            Instance inst = load_instance(dec_instance);
            SpecimenSequence vss{parse_permutation(dec_vss)};
            Schedule sched = decode_fabm(inst, vss, tie_policy_from_name(dec_tie, dec_tie_seed));
            std::printf("mtat %.2f\n", sched.mtat);
            if (!dec_out.empty()) save_schedule(sched, dec_out);
            if (!dec_csv.empty()) {
                std::ofstream csv(dec_csv);
                write_batch_csv(sched, csv);
            }
            return 0;
        }

        if (validate->parsed()) {
            Instance inst = load_instance(val_instance);
            std::vector<Violation> violations;
            if (val_schedule.empty()) {
                violations = validate_instance(inst);
            } else {
                Schedule sched = load_schedule(inst, val_schedule);
                violations = validate_schedule(inst, sched);
            }
            for (const Violation& v : violations)
                std::cout << v.where << ": " << v.message << "\n";
            std::cout << (violations.empty() ? "OK" : "INVALID") << "\n";
            return violations.empty() ? 0 : 1;
        }

        if (distance->parsed()) {
            auto p1 = parse_permutation(dist_p1);
            auto p2 = parse_permutation(dist_p2);
            std::printf("%.6f\n", jpr_distance(p1, p2));
            return 0;
        }

        if (moments->parsed()) {
            MoveKind kind = move_kind_from_string(mom_kind);
            int b = (mom_n + mom_block - 1) / mom_block;
            DistanceMoments theory = theoretical_moments(kind, mom_n, kind == MoveKind::BlockInsert ? b : 0);
            std::cout << "kind,n,block,source,mean,variance\n";
            std::printf("%s,%d,%d,theory,%.6g,%.6g\n", mom_kind.c_str(), mom_n, mom_block,
                        theory.mean, theory.variance);
            if (mom_empirical || mom_samples > 0) {
                DistanceMoments emp = empirical_moments(kind, mom_n, mom_block, mom_samples, mom_seed);
                std::printf("%s,%d,%d,%s,%.6g,%.6g\n", mom_kind.c_str(), mom_n, mom_block,
                            mom_samples == 0 ? "exhaustive" : "sampled", emp.mean, emp.variance);
            }
            return 0;
        }

        if (solve->parsed()) {
            Instance inst = load_instance(sol_instance);
            std::vector<ResultRecord> records;
            if (!sol_out.empty()) records = read_results_csv(sol_out);
            for (int rep = 1; rep <= sol_reps; ++rep) {
                SolverConfig cfg;
                cfg.algo = algo_from_string(sol_algo);
                cfg.nbhd = neighborhood_from_string(sol_nbhd);
                cfg.budget = sol_evals;
                cfg.seed = cell_seed(sol_seed, inst.name, sol_algo, sol_nbhd, rep);
                cfg.tie = tie_policy_from_name(sol_tie, cfg.seed);
                if (!sol_config.empty()) apply_solver_overrides(cfg, KvConfig::parse_file(sol_config));
                SearchResult result = run_solver(inst, cfg);
                std::printf("rep %d best %.2f evals %llu wall %.2fs\n", rep, result.best_mtat,
                            static_cast<unsigned long long>(result.evaluations),
                            result.wall_seconds);
                if (!sol_out.empty())
                    records.push_back(ResultRecord{inst.name, sol_algo, sol_nbhd, cfg.seed, rep,
                                                   result.best_mtat, result.evaluations,
                                                   result.wall_seconds});
            }
            if (!sol_out.empty()) write_results_csv(records, sol_out);
            return 0;
        }

        if (landscape->parsed()) {
            Instance inst = load_instance(land_instance);
            SolverConfig cfg;
            cfg.algo = algo_from_string(land_algo);
            cfg.nbhd = neighborhood_from_string(land_nbhd);
            cfg.budget = land_evals;
            cfg.seed = land_seed;

            if (land_fdc->parsed()) {
                cfg.log_accepted = true;
                SearchResult result = run_solver(inst, cfg);
                auto samples = fdc_samples_from_run(result);
                std::ofstream csv(land_out + "_fdc.csv");
                csv << "fitness,distance\n";
                for (const FdcSample& s : samples)
                    csv << s.fitness << ',' << s.distance << '\n';
                std::printf("samples %zu fdc %.4f\n", samples.size(), fdc(samples));
                return 0;
            }
            if (land_ac->parsed()) {
                MoveKind kind = cfg.nbhd.mode == NeighborhoodSpec::Mode::Fixed
                                    ? cfg.nbhd.kind
                                    : aps_select_neighborhood(inst);
                WalkSeries walk = random_walk(inst, kind, land_walk, land_seed);
                std::ofstream csv(land_out + "_ac.csv");
                csv << "lag,ac\n";
                for (std::size_t s = 0; s <= land_lag; ++s)
                    csv << s << ',' << autocorrelation(walk.fitness, s) << '\n';
                std::printf("walk %zu ac(%zu) %.4f\n", walk.fitness.size(), land_lag,
                            autocorrelation(walk.fitness, land_lag));
                return 0;
            }
            if (land_lon->parsed()) {
                auto [def_runs, def_m] = lon_defaults(inst.num_specimens());
                std::uint64_t runs = land_runs > 0 ? land_runs : def_runs;
                std::uint64_t stagnation = land_stagnation > 0 ? land_stagnation : def_m;
                LonGraph g = build_lon(inst, cfg, runs, stagnation, land_seed, 0);
                PlateauGraph plateaus = compress_plateaus(g);
                {
                    std::ofstream out(land_out + ".graphml");
                    export_graph(g, plateaus, GraphFormat::GraphML, out);
                }
                {
                    std::ofstream out(land_out + ".dot");
                    export_graph(g, plateaus, GraphFormat::Dot, out);
                }
                std::ofstream stats(land_out + "_plateaus.csv");
                stats << "plateau,fitness,size,sink\n";
                for (std::size_t p = 0; p < plateaus.plateaus.size(); ++p)
                    stats << p << ',' << plateaus.plateaus[p].fitness << ','
                          << plateaus.plateaus[p].members.size() << ','
                          << (plateaus.plateaus[p].sink ? 1 : 0) << '\n';
                std::printf("nodes %zu edges %zu plateaus %zu average size %.2f sinks %zu\n",
                            g.num_nodes(), g.num_edges(), plateaus.plateaus.size(),
                            plateaus.average_size, plateaus.num_sinks());
                return 0;
            }
        }

        if (bench->parsed()) {
            Manifest manifest = parse_manifest(bench_manifest);
            SuiteReport report = run_suite(manifest);
            std::printf("cells %zu run %zu skipped %zu errors %zu\n", report.cells_total,
                        report.cells_run, report.cells_skipped, report.errors.size());
            return report.errors.empty() ? 0 : 1;
        }

        if (metrics->parsed()) {
            auto records = read_results_csv(met_results);
            if (records.empty()) {
                std::cerr << "no records in " << met_results << "\n";
                return 1;
            }
            BestKnownTable best = met_best.empty() ? best_known_from_records(records)
                                                   : read_best_known_csv(met_best);
            auto rows = metrics_from_records(records, best);
            write_metrics_csv(rows, met_out);
            std::printf("wrote %zu metric rows to %s\n", rows.size(), met_out.c_str());
            if (met_friedman) {
                // Rank neighborhoods by ARPD across instances (rows grouped per nbhd).
                std::map<std::string, std::map<std::string, double>> by_instance;
                std::set<std::string> nbhds;
                for (const MetricsRow& r : rows) {
                    by_instance[r.instance][r.nbhd] = r.metrics.arpd;
                    nbhds.insert(r.nbhd);
                }
                std::vector<std::vector<double>> matrix;
                for (const auto& [inst_name, cells] : by_instance) {
                    if (cells.size() != nbhds.size()) continue;
                    std::vector<double> row;
                    for (const std::string& nb : nbhds) row.push_back(cells.at(nb));
                    matrix.push_back(std::move(row));
                }
                if (!matrix.empty()) {
                    FriedmanResult fr = friedman_ranks(matrix);
                    std::size_t j = 0;
                    for (const std::string& nb : nbhds)
                        std::printf("rank %s %.2f\n", nb.c_str(), fr.average_ranks[j++]);
                    std::printf("chi2 %.4f\n", fr.chi2);
                }
            }
            return 0;
        }

        if (bestknown->parsed()) {
            auto records = read_results_csv(bk_results);
            write_best_known_csv(best_known_from_records(records), bk_out);
            std::printf("wrote %s\n", bk_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
