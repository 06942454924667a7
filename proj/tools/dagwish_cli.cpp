// Command-line harness: estimate | benchmark | heatmap | simulate.
// All runs are driven by an optional versioned JSON config plus flags
// (flags win). Exit codes: 0 ok, 2 usage/input error, 3 numerical failure.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dagwish/dagwishart.hpp"
#include "dagwish/ensemble.hpp"
#include "dagwish/errors.hpp"
#include "dagwish/io.hpp"
#include "dagwish/rng.hpp"
#include "dagwish/selection.hpp"
#include "dagwish/simbench.hpp"

namespace {

using json = nlohmann::json;
using namespace dagwish;

constexpr int kConfigVersion = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
    int K = 100;
    int grid_size = 50;
    Variant variant = Variant::DagwBic;
    std::string out = ".";
    std::string data;
    // benchmark / simulate scenario
    std::string scenario = "banded";
    int p = 30;
    int n = 100;
    int reps = 20;
    std::vector<std::string> methods{"dagw-bic", "dagw", "mle", "bayes"};
    SelectionConfig selection{0.1, 200, 10, 200, 5, 0};
    std::string echo;  // canonical config echo for output files
};

const std::set<std::string> kTopKeys = {
    "version", "seed",    "workers", "K",    "grid_size", "variant", "out",
    "data",    "case",    "p",       "n",    "reps",      "methods", "selection"};
const std::set<std::string> kSelectionKeys = {"ridge", "n_thresholds", "sss_iters",
                                              "sss_pool", "cv_folds"};

void load_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config parse error: " + std::string(e.what()));
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != kConfigVersion)
        throw UsageError("config must declare \"version\": 1");
    for (const auto& [key, value] : j.items())
        if (!kTopKeys.count(key)) throw UsageError("unknown config key: " + key);
    try {
        if (j.contains("seed")) {
            cfg.seed = j["seed"].get<std::uint64_t>();
            cfg.seed_set = true;
        }
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("K")) cfg.K = j["K"].get<int>();
        if (j.contains("grid_size")) cfg.grid_size = j["grid_size"].get<int>();
        if (j.contains("variant")) cfg.variant = variant_from_name(j["variant"].get<std::string>());
        if (j.contains("out")) cfg.out = j["out"].get<std::string>();
        if (j.contains("data")) cfg.data = j["data"].get<std::string>();
        if (j.contains("case")) cfg.scenario = j["case"].get<std::string>();
        if (j.contains("p")) cfg.p = j["p"].get<int>();
        if (j.contains("n")) cfg.n = j["n"].get<int>();
        if (j.contains("reps")) cfg.reps = j["reps"].get<int>();
        if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
        if (j.contains("selection")) {
            const json& s = j["selection"];
            if (!s.is_object()) throw UsageError("selection must be an object");
            for (const auto& [key, value] : s.items())
                if (!kSelectionKeys.count(key)) throw UsageError("unknown selection key: " + key);
            if (s.contains("ridge")) cfg.selection.ridge = s["ridge"].get<double>();
            if (s.contains("n_thresholds"))
                cfg.selection.n_thresholds = s["n_thresholds"].get<int>();
            if (s.contains("sss_iters")) cfg.selection.sss_iters = s["sss_iters"].get<int>();
            if (s.contains("sss_pool")) cfg.selection.sss_pool = s["sss_pool"].get<int>();
            if (s.contains("cv_folds")) cfg.selection.cv_folds = s["cv_folds"].get<int>();
        }
    } catch (const json::exception& e) {
        throw UsageError("config value error: " + std::string(e.what()));
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
}

// Canonical echo embedded in every output artifact: everything that affects
// the result. Worker count is excluded on purpose — results are identical
// across thread counts and the bytes must say so.
std::string config_echo(const RunConfig& cfg, const std::string& command) {
    std::ostringstream s;
    s << "command=" << command << " seed=" << cfg.seed << " K=" << cfg.K
      << " grid_size=" << cfg.grid_size << " variant=" << variant_name(cfg.variant)
      << " selection=ridge:" << format_double(cfg.selection.ridge)
      << ",n_thresholds:" << cfg.selection.n_thresholds
      << ",sss_iters:" << cfg.selection.sss_iters << ",sss_pool:" << cfg.selection.sss_pool
      << ",cv_folds:" << cfg.selection.cv_folds;
    if (command == "benchmark" || command == "simulate")
        s << " case=" << cfg.scenario << " p=" << cfg.p << " n=" << cfg.n
          << " reps=" << cfg.reps;
    return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    out << content;
}

int cmd_estimate(RunConfig& cfg) {
    if (cfg.data.empty()) throw UsageError("estimate requires a data file (--data or config)");
    Matrix Y = load_matrix_file(cfg.data);
    std::filesystem::create_directories(cfg.out);

    auto t0 = std::chrono::steady_clock::now();
    PriorTemplate prior;
    EnsembleEstimate est =
        estimate(Y, cfg.K, cfg.selection, prior, cfg.variant, cfg.seed, cfg.grid_size,
                 cfg.workers);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string echo = config_echo(cfg, "estimate");
    json out;
    out["version"] = kConfigVersion;
    out["seed"] = cfg.seed;
    out["config"] = echo;
    out["tau_b"] = format_double(est.tau_b);
    json sigmas = json::array();
    for (const Permutation& s : est.sigmas) sigmas.push_back(s);
    out["sigma"] = sigmas;
    json edge_counts = json::array();
    for (const Dag& d : est.per_perm_dags) {
        int e = 0;
        for (int j = 0; j < d.dim(); ++j) e += d.nu(j);
        edge_counts.push_back(e);
    }
    out["per_permutation_edges"] = edge_counts;
    auto matrix_rows = [](const Matrix& m) {
        json rows = json::array();
        for (int r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < m.cols(); ++c) row.push_back(format_double(m(r, c)));
            rows.push_back(row);
        }
        return rows;
    };
    out["L_bar"] = matrix_rows(est.L_bar);
    json dbar = json::array();
    for (double v : est.D_bar) dbar.push_back(format_double(v));
    out["D_bar"] = dbar;

    const std::filesystem::path dir(cfg.out);
    write_file(dir / "estimate.json", out.dump(2) + "\n");
    Matrix omega(est.omega_check_tau.dim(), est.omega_check_tau.dim());
    for (int i = 0; i < omega.rows(); ++i)
        for (int j = 0; j < omega.cols(); ++j) omega(i, j) = est.omega_check_tau(i, j);
    save_matrix_file((dir / "omega_check_tau.txt").string(), omega);
    std::cout << "estimate: wrote " << (dir / "estimate.json").string() << " and "
              << (dir / "omega_check_tau.txt").string() << " (" << wall << " s)\n";
    return 0;
}

int cmd_benchmark(RunConfig& cfg) {
    if (!cfg.seed_set) throw UsageError("benchmark requires an explicit seed");
    if (cfg.methods.empty()) throw UsageError("benchmark requires a non-empty method list");
    ScenarioSpec spec;
    try {
        spec.scenario = case_from_name(cfg.scenario);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    spec.p = cfg.p;
    spec.n = cfg.n;
    spec.reps = cfg.reps;
    spec.seed = cfg.seed;
    std::vector<Variant> methods;
    for (const std::string& m : cfg.methods) {
        try {
            methods.push_back(variant_from_name(m));
        } catch (const ParseError& e) {
            throw UsageError(e.what());
        }
    }
    std::filesystem::create_directories(cfg.out);
    const std::filesystem::path dir(cfg.out);
    const std::string echo = config_echo(cfg, "benchmark");

    std::vector<BenchRow> rows;
    if (cfg.workers <= 1) {
        // Serial path: run repetitions one by one so partial results survive
        // an interrupted run, then aggregate in the same order as the
        // library's all-at-once path (byte-identical output).
        std::ofstream partial(dir / "benchmark_partial.csv");
        partial << "# " << echo << "\ncase,p,n,rep,method,loss,value\n";
        std::vector<std::vector<LossReport>> table(
            static_cast<std::size_t>(spec.reps), std::vector<LossReport>(methods.size()));
        for (int r = 0; r < spec.reps; ++r) {
            RepEstimates est = run_rep(spec, methods, cfg.selection, cfg.K, cfg.grid_size, r, 1);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                LossReport loss = losses(est.estimates[m].second, est.omega0, est.dag0);
                table[static_cast<std::size_t>(r)][m] = loss;
                for (int l = 1; l <= 5; ++l)
                    partial << case_name(spec.scenario) << ',' << spec.p << ',' << spec.n << ','
                            << r << ',' << variant_name(methods[m]) << ",L" << l << ','
                            << format_double(loss.by_index(l)) << "\n";
            }
            partial.flush();
        }
        for (std::size_t m = 0; m < methods.size(); ++m)
            for (int l = 1; l <= 5; ++l) {
                double mean = 0.0;
                for (int r = 0; r < spec.reps; ++r)
                    mean += table[static_cast<std::size_t>(r)][m].by_index(l);
                mean /= spec.reps;
                double se = std::numeric_limits<double>::quiet_NaN();
                if (spec.reps > 1) {
                    double ss = 0.0;
                    for (int r = 0; r < spec.reps; ++r) {
                        double d = table[static_cast<std::size_t>(r)][m].by_index(l) - mean;
                        ss += d * d;
                    }
                    se = std::sqrt(ss / (spec.reps - 1)) /
                         std::sqrt(static_cast<double>(spec.reps));
                }
                rows.push_back(BenchRow{case_name(spec.scenario), spec.p, spec.n,
                                        variant_name(methods[m]), "L" + std::to_string(l), mean,
                                        se, spec.reps, spec.seed});
            }
    } else {
        rows = run_benchmark(spec, methods, cfg.selection, cfg.K, cfg.grid_size, cfg.workers);
    }
    std::string csv = benchmark_csv(rows, echo);
    write_file(dir / "benchmark.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_heatmap(const std::vector<std::string>& inputs, RunConfig& cfg) {
    if (inputs.empty()) throw UsageError("heatmap requires at least one matrix file");
    std::vector<Matrix> mats;
    double scale = 0.0;
    for (const std::string& path : inputs) {
        Matrix m = load_matrix_file(path);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) scale = std::max(scale, std::fabs(m(r, c)));
        mats.push_back(std::move(m));
    }
    std::filesystem::create_directories(cfg.out);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        std::filesystem::path in(inputs[i]);
        std::filesystem::path out =
            std::filesystem::path(cfg.out) / (in.stem().string() + ".svg");
        write_file(out, heatmap_svg(mats[i], scale));
        std::cout << "heatmap: wrote " << out.string() << "\n";
    }
    return 0;
}

int cmd_simulate(RunConfig& cfg) {
    ScenarioSpec spec;
    try {
        spec.scenario = case_from_name(cfg.scenario);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    spec.p = cfg.p;
    spec.n = cfg.n;
    spec.seed = cfg.seed;
    Rng rng(cfg.seed);
    auto [omega0, dag0] = make_omega(spec, rng);
    Matrix Y = sample_gaussian(omega0, spec.n, rng);
    std::filesystem::create_directories(cfg.out);
    const std::filesystem::path dir(cfg.out);
    save_sym_matrix_file((dir / "omega0.txt").string(), omega0);
    save_dag_file((dir / "dag0.txt").string(), dag0);
    save_matrix_file((dir / "data.txt").string(), Y);
    write_file(dir / "simulate_config.txt", config_echo(cfg, "simulate") + "\n");
    std::cout << "simulate: wrote omega0.txt, dag0.txt, data.txt in " << cfg.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-invariant sparse precision-matrix estimation"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> workers_flag, k_flag;
    std::optional<std::string> variant_flag, out_flag;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (version 1)");
        sub->add_option("--seed", seed_flag, "run seed");
        sub->add_option("--workers", workers_flag, "worker threads");
        sub->add_option("--variant", variant_flag, "dagw-bic|dagw|mle|bayes");
        sub->add_option("--K", k_flag, "ensemble size (number of permutations)");
        sub->add_option("--out", out_flag, "output directory");
    };

    CLI::App* est = app.add_subcommand("estimate", "estimate a precision matrix from data");
    add_common(est);
    std::string data_flag;
    est->add_option("--data", data_flag, "input data matrix file (rows = observations)");

    CLI::App* bench = app.add_subcommand("benchmark", "run a simulation benchmark");
    add_common(bench);
    std::optional<std::string> case_flag;
    std::optional<int> p_flag, n_flag, reps_flag;
    bench->add_option("--case", case_flag, "banded|ar|sparse3pct|compound|permuted-compound");
    bench->add_option("--p", p_flag, "dimension");
    bench->add_option("--n", n_flag, "sample size");
    bench->add_option("--reps", reps_flag, "repetitions");

    CLI::App* heat = app.add_subcommand("heatmap", "render matrix heatmaps (shared scale)");
    add_common(heat);
    std::vector<std::string> heat_inputs;
    heat->add_option("inputs", heat_inputs, "matrix files");

    CLI::App* sim = app.add_subcommand("simulate", "write a synthetic truth and dataset");
    add_common(sim);
    sim->add_option("--case", case_flag, "banded|ar|sparse3pct|compound|permuted-compound");
    sim->add_option("--p", p_flag, "dimension");
    sim->add_option("--n", n_flag, "sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) load_config(config_path, cfg);
        // Flags override the config.
        if (seed_flag) {
            cfg.seed = *seed_flag;
            cfg.seed_set = true;
        }
        if (workers_flag) cfg.workers = *workers_flag;
        if (k_flag) cfg.K = *k_flag;
        if (variant_flag) cfg.variant = variant_from_name(*variant_flag);
        if (out_flag) cfg.out = *out_flag;
        if (!data_flag.empty()) cfg.data = data_flag;
        if (case_flag) cfg.scenario = *case_flag;
        if (p_flag) cfg.p = *p_flag;
        if (n_flag) cfg.n = *n_flag;
        if (reps_flag) cfg.reps = *reps_flag;

        if (est->parsed()) return cmd_estimate(cfg);
        if (bench->parsed()) return cmd_benchmark(cfg);
        if (heat->parsed()) return cmd_heatmap(heat_inputs, cfg);
        if (sim->parsed()) return cmd_simulate(cfg);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "numerical failure (factorization): " << e.what() << "\n";
        return 3;
    } catch (const NoValidThreshold& e) {
        std::cerr << "numerical failure (threshold selection): " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
