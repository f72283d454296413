// sketchbench: sweeps of randomized low-rank approximation over sketch
// distributions, bound checks, and test-matrix generation.
#include "sketchbench/bounds.hpp"
#include "sketchbench/config.hpp"
#include "sketchbench/error.hpp"
#include "sketchbench/experiment.hpp"
#include "sketchbench/report.hpp"
#include "sketchbench/test_matrices.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace sb = sketchbench;
namespace ex = sketchbench::experiment;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitViolation = 4;

struct SweepOptions {
    std::string config;
    std::size_t workers = 0;
    bool raw = false;
    bool print_config = false;
};

void add_sweep_options(CLI::App* cmd, SweepOptions& o) {
    cmd->add_option("--config", o.config, "sweep config file")->required();
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_flag("--raw", o.raw, "also write per-trial rows");
    cmd->add_flag("--print-config", o.print_config, "print the normalized config and exit");
}

std::string raw_path_for(const ex::SweepConfig& cfg) {
    if (!cfg.raw_path.empty()) return cfg.raw_path;
    if (!cfg.csv_path.empty()) return cfg.csv_path + ".raw.csv";
    return "sweep.raw.csv";
}

void write_outputs(const ex::SweepConfig& cfg, const ex::SweepResult& res, bool raw) {
    if (cfg.csv_path.empty()) ex::write_csv(std::cout, res.aggregates);
    else ex::emit_csv(res.aggregates, cfg.csv_path);
    if (!cfg.svg_path.empty()) ex::emit_svg(res.aggregates, cfg.svg_path, cfg.log_y);
    if (raw || !cfg.raw_path.empty()) ex::emit_raw_csv(cfg, res.records, raw_path_for(cfg));
}

int run_sweep_cmd(const SweepOptions& o, bool force_nystrom) {
    ex::SweepConfig cfg = ex::load_config(o.config);
    if (force_nystrom) {
        cfg.algorithm = ex::Algorithm::nystrom;
        cfg.bounds = false;
        ex::validate(cfg);
    }
    if (o.print_config) {
        std::cout << ex::print_config(cfg);
        return 0;
    }
    const auto res = ex::run_sweep(cfg, o.workers);
    write_outputs(cfg, res, o.raw);
    return 0;
}

struct BoundOptions {
    SweepOptions sweep;
    std::string calibrate;
    std::string constants;
    std::string bounds_csv;
    std::vector<std::string> classes{"entries", "columns", "bounded", "moment"};
    std::vector<std::string> tails;
    double epsilon = 0.5;
};

int run_bounds_cmd(const BoundOptions& o) {
    ex::SweepConfig cfg = ex::load_config(o.sweep.config);
    cfg.bounds = true;
    if (cfg.algorithm != ex::Algorithm::rsvd) throw sb::Error(sb::ErrorCode::ConfigError, "bounds mode needs rsvd");
    ex::validate(cfg);
    if (o.sweep.print_config) {
        std::cout << ex::print_config(cfg);
        return 0;
    }

    const sb::DenseMatrix a = sb::testmat::generate(cfg.matrix);
    const auto res = ex::run_sweep(cfg, a, o.sweep.workers);
    write_outputs(cfg, res, o.sweep.raw);

    const auto& s = *res.bounds;
    std::fprintf(stderr,
                 "checked %zu trials (%zu not applicable)\n"
                 "structural bound violations: %zu\n"
                 "covariance chain violations: %zu of %zu\n"
                 "gaussian tail exceedances: %zu of %zu (allowed %.2f)\n",
                 s.checked, s.not_applicable, s.structural_violations, s.chain_violations, s.chain_checked,
                 s.gaussian_exceedances, s.gaussian_trials, s.gaussian_allowed);

    const auto spectrum = sb::linalg::split_spectrum(a, cfg.k);
    sb::bounds::BoundParams params;
    params.epsilon = o.epsilon;
    params.delta = cfg.delta;
    if (!o.constants.empty()) params.constants = sb::bounds::load_constants(o.constants);
    params.tails = {{"K_E", 1.0}, {"K_C", 1.0}, {"K_perp", 1.0}, {"K_k", std::sqrt(double(cfg.k))},
                    {"K_M", double(cfg.k)}, {"gamma", 1.0}};
    for (const auto& t : o.tails) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw sb::Error(sb::ErrorCode::ConfigError, "--tail expects name=value");
        try {
            params.tails[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
        } catch (const std::exception&) {
            throw sb::Error(sb::ErrorCode::ConfigError, "--tail value is not a number: " + t);
        }
    }

    std::vector<sb::bounds::BoundReport> reports;
    for (const auto& name : o.classes) {
        const auto cls = sb::bounds::parse_class(name);
        for (std::size_t ell : cfg.ell_grid) reports.push_back(sb::bounds::term_bound(cls, params, spectrum, ell, cfg.q));
    }
    if (o.bounds_csv.empty()) {
        ex::write_bounds_csv(std::cout, reports);
    } else {
        std::ofstream out(o.bounds_csv);
        if (!out) throw sb::Error(sb::ErrorCode::IoError, "cannot write " + o.bounds_csv);
        ex::write_bounds_csv(out, reports);
    }

    if (!o.calibrate.empty()) {
        // Calibrate against Gaussian trials at the largest ell.
        const std::size_t ell = cfg.ell_grid.back();
        std::vector<double> t;
        for (const auto& rec : res.records) {
            if (rec.ell != ell || !rec.structural || !rec.structural->applicable) continue;
            if (std::holds_alternative<sb::dist::Gaussian>(cfg.distributions[rec.distribution_id].kind)) {
                t.push_back(rec.structural->t);
            }
        }
        auto fitted = sb::bounds::calibrate_constants(t, spectrum, ell, params);
        auto merged = params.constants;
        for (const auto& [k, v] : fitted) merged[k] = v;
        sb::bounds::save_constants(o.calibrate, merged);
    }
    return s.deterministic_ok() ? 0 : kExitViolation;
}

struct GenOptions {
    std::string kind = "fast_decay";
    sb::testmat::MatrixRecipe recipe;
    std::string output;
};

int run_gen_cmd(GenOptions o) {
    o.recipe.kind = sb::testmat::parse_recipe_kind(o.kind);
    const auto a = sb::testmat::generate(o.recipe);
    if (o.output.empty()) sb::write_matrix(std::cout, a);
    else sb::save_matrix(o.output, a);
    return 0;
}

struct WidthOptions {
    std::size_t count = 20;
    std::size_t max_dim = 100;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
};

int run_width_cmd(const WidthOptions& o) {
    if (o.max_dim < 1) throw sb::Error(sb::ErrorCode::ConfigError, "--max-dim must be positive");
    int bad = 0;
    std::printf("case,rows,cols,estimate,stderr,frobenius,ok\n");
    for (std::size_t c = 0; c < o.count; ++c) {
        sb::RandomStream rs(sb::SeedSpec{o.seed, std::uint32_t(c), 0xb0000000u});
        const std::size_t rows = 1 + rs.uniform_index(o.max_dim);
        const std::size_t cols = 1 + rs.uniform_index(o.max_dim);
        sb::DenseMatrix h(rows, cols);
        for (double& x : h.data()) x = rs.normal();
        const auto w = sb::bounds::mc_gaussian_width(h, o.samples, sb::SeedSpec{o.seed, std::uint32_t(c), 0xb0000001u});
        const double fro = sb::frobenius_norm(h);
        const bool ok = w.estimate <= fro + 3.0 * w.stderr_;
        bad += !ok;
        std::printf("%zu,%zu,%zu,%.10g,%.3g,%.10g,%s\n", c, rows, cols, w.estimate, w.stderr_, fro, ok ? "yes" : "no");
    }
    return bad ? 1 : 0;
}

int exit_code_for(const sb::Error& e) {
    switch (e.code()) {
    case sb::ErrorCode::ConfigError:
    case sb::ErrorCode::ParseError:
    case sb::ErrorCode::InvalidParam:
        return kExitConfig;
    case sb::ErrorCode::IoError:
        return kExitIo;
    default:
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized low-rank approximation sweeps"};
    app.require_subcommand(1);

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "randomized SVD sweep over distributions and ell");
    add_sweep_options(sweep, sweep_opts);

    SweepOptions nys_opts;
    auto* nys = app.add_subcommand("nystrom-sweep", "truncated Nystrom sweep");
    add_sweep_options(nys, nys_opts);

    BoundOptions bound_opts;
    auto* bnd = app.add_subcommand("bounds", "sweep with structural bound checks and closed-form bounds");
    add_sweep_options(bnd, bound_opts.sweep);
    bnd->add_option("--calibrate", bound_opts.calibrate, "write fitted constants to this file");
    bnd->add_option("--constants", bound_opts.constants, "constants file (name = value)");
    bnd->add_option("--bounds-csv", bound_opts.bounds_csv, "where to write closed-form bounds");
    bnd->add_option("--class", bound_opts.classes, "bound classes to evaluate");
    bnd->add_option("--tail", bound_opts.tails, "tail parameter, e.g. K_E=1.5");
    bnd->add_option("--epsilon", bound_opts.epsilon, "epsilon for the closed-form bounds");

    GenOptions gen_opts;
    auto* gen = app.add_subcommand("gen-matrix", "write a test matrix in the text format");
    gen->add_option("--kind", gen_opts.kind, "fast_decay, controlled_gap, fast_decay_psd, rbf_laplacian");
    gen->add_option("--m", gen_opts.recipe.m, "rows (controlled_gap)");
    gen->add_option("--n", gen_opts.recipe.n, "columns");
    gen->add_option("--r", gen_opts.recipe.r, "leading rank");
    gen->add_option("--d", gen_opts.recipe.d, "decay exponent");
    gen->add_option("--density", gen_opts.recipe.density, "factor density (controlled_gap)");
    gen->add_option("--seed", gen_opts.recipe.seed, "generator seed");
    gen->add_option("--features", gen_opts.recipe.path, "feature CSV (rbf_laplacian)");
    gen->add_flag("--header", gen_opts.recipe.header, "feature CSV has a header row");
    gen->add_option("-o,--output", gen_opts.output, "output path (default stdout)");

    WidthOptions width_opts;
    auto* width = app.add_subcommand("width-check", "Monte-Carlo Gaussian width vs Frobenius norm");
    width->add_option("--count", width_opts.count, "number of random matrices");
    width->add_option("--max-dim", width_opts.max_dim, "largest row/column count");
    width->add_option("--samples", width_opts.samples, "Gaussian samples per matrix");
    width->add_option("--seed", width_opts.seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sweep) return run_sweep_cmd(sweep_opts, false);
        if (*nys) return run_sweep_cmd(nys_opts, true);
        if (*bnd) return run_bounds_cmd(bound_opts);
        if (*gen) return run_gen_cmd(gen_opts);
        if (*width) return run_width_cmd(width_opts);
    } catch (const sb::Error& e) {
        std::cerr << "sketchbench: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "sketchbench: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
