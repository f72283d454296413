#include "sketchbench/experiment.hpp"

#include "sketchbench/bounds.hpp"
#include "sketchbench/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace sketchbench::experiment {

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct TrialContext {
    const SweepConfig& config;
    const DenseMatrix& a;
    double norm_a;
    std::optional<linalg::SpectrumInfo> spectrum;
    std::vector<dist::DistributionSpec> resolved;
    std::size_t ell_max;
};

double isotropic_scale(const dist::DistributionSpec& spec, std::size_t n, std::size_t ell) {
    if (!dist::has_finite_variance(spec)) return 1.0;
    return dist::column_scale(spec, n, ell);
}

void run_trial(const TrialContext& ctx, std::size_t dist_id, std::size_t trial, SweepRecord* out) {
    const SweepConfig& cfg = ctx.config;
    const SeedSpec seed{cfg.master_seed, std::uint32_t(trial), std::uint32_t(dist_id)};
    const auto& spec = ctx.resolved[dist_id];
    const std::size_t n = ctx.a.cols();

    for (std::size_t e = 0; e < cfg.ell_grid.size(); ++e) {
        out[e].distribution_id = dist_id;
        out[e].ell = cfg.ell_grid[e];
        out[e].trial = trial;
        out[e].seed = seed.stream_key();
    }

    DenseMatrix omega;
    try {
        omega = dist::sample(spec, n, ctx.ell_max, seed);
    } catch (const Error& err) {
        for (std::size_t e = 0; e < cfg.ell_grid.size(); ++e) {
            out[e].failed = true;
            out[e].error = err.what();
        }
        return;
    }

    for (std::size_t e = 0; e < cfg.ell_grid.size(); ++e) {
        SweepRecord& rec = out[e];
        const DenseMatrix om = omega.leading_columns(rec.ell);
        try {
            if (cfg.algorithm == Algorithm::rsvd) {
                const auto approx = lowrank::randomized_svd(ctx.a, om, {rec.ell, cfg.q, cfg.stabilized});
                rec.relative_error = lowrank::relative_error(ctx.a, approx, ctx.norm_a);
            } else {
                auto approx = lowrank::nystrom(ctx.a, om);
                if (approx.rank() > cfg.k) approx = lowrank::truncate(approx, cfg.k);
                rec.relative_error = lowrank::relative_error(ctx.a, approx, ctx.norm_a);
            }
        } catch (const Error& err) {
            rec.failed = true;
            rec.error = err.what();
        }
        if (cfg.bounds && ctx.spectrum) {
            try {
                rec.structural = lowrank::structural_report(ctx.a, *ctx.spectrum, om, cfg.q, false,
                                                            isotropic_scale(spec, n, ctx.ell_max));
            } catch (const Error& err) {
                if (!rec.failed) {
                    rec.failed = true;
                    rec.error = err.what();
                }
            }
        }
    }
}

BoundSummary summarize(const SweepConfig& cfg, const linalg::SpectrumInfo& spectrum,
                       const std::vector<SweepRecord>& records) {
    BoundSummary s;
    const double sp = spectrum.sigma_perp_norm();
    const double sr = sp > 0.0 ? spectrum.sigma_perp_stable_rank() : 0.0;
    for (const auto& rec : records) {
        if (!rec.structural) continue;
        const auto& r = *rec.structural;
        if (!r.applicable) {
            ++s.not_applicable;
            continue;
        }
        ++s.checked;
        if (!r.bound_holds) ++s.structural_violations;
        if (r.covariance_applicable) {
            ++s.chain_checked;
            if (!r.covariance_holds) ++s.chain_violations;
        }
        const bool gaussian = std::holds_alternative<dist::Gaussian>(cfg.distributions[rec.distribution_id].kind);
        if (gaussian && rec.ell >= cfg.k + 4) {
            ++s.gaussian_trials;
            if (r.t > bounds::gauss_bound(cfg.k, rec.ell - cfg.k, cfg.delta, sp, sr)) ++s.gaussian_exceedances;
        }
    }
    const double nt = double(s.gaussian_trials);
    s.gaussian_allowed = cfg.delta * nt + 3.0 * std::sqrt(nt * cfg.delta * (1.0 - cfg.delta));
    return s;
}

} // namespace

std::vector<Aggregate> aggregate(const SweepConfig& cfg, const std::vector<SweepRecord>& records) {
    std::vector<Aggregate> out;
    const std::size_t n_ell = cfg.ell_grid.size();
    for (std::size_t d = 0; d < cfg.distributions.size(); ++d) {
        for (std::size_t e = 0; e < n_ell; ++e) {
            Aggregate agg;
            agg.distribution = dist::to_string(cfg.distributions[d]);
            agg.ell = cfg.ell_grid[e];
            agg.trials = cfg.trials;
            // Records are laid out as [distribution][trial][ell].
            double mean = 0.0;
            double m2 = 0.0;
            std::size_t ok = 0;
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                const SweepRecord& rec = records[(d * cfg.trials + t) * n_ell + e];
                if (rec.failed) {
                    ++agg.failures;
                    continue;
                }
                ++ok;
                const double delta = rec.relative_error - mean;
                mean += delta / double(ok);
                m2 += delta * (rec.relative_error - mean);
            }
            agg.mean_re = ok ? mean : std::numeric_limits<double>::quiet_NaN();
            agg.std_re = ok > 1 ? std::sqrt(m2 / double(ok - 1)) : (ok == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
            out.push_back(std::move(agg));
        }
    }
    return out;
}

SweepResult run_sweep(const SweepConfig& config, std::size_t workers) {
    validate(config);
    return run_sweep(config, testmat::generate(config.matrix), workers);
}

SweepResult run_sweep(const SweepConfig& config, const DenseMatrix& a, std::size_t workers) {
    validate(config);
    if (a.empty()) throw Error(ErrorCode::EmptyInput, "empty test matrix");
    const bool needs_leverage = std::any_of(config.distributions.begin(), config.distributions.end(), [](const auto& s) {
        const auto* lev = std::get_if<dist::LeverageScore>(&s.kind);
        return lev && lev->probabilities.empty();
    });

    TrialContext ctx{config, a, linalg::spectral_norm(a).value, std::nullopt, {}, 0};
    if (config.bounds || needs_leverage) ctx.spectrum = linalg::split_spectrum(a, config.k);
    for (const auto& spec : config.distributions) {
        ctx.resolved.push_back(ctx.spectrum ? dist::with_leverage_scores(spec, ctx.spectrum->vk) : spec);
    }
    ctx.ell_max = *std::max_element(config.ell_grid.begin(), config.ell_grid.end());

    const std::size_t n_ell = config.ell_grid.size();
    const std::size_t tasks = config.distributions.size() * config.trials;
    SweepResult result;
    result.records.resize(tasks * n_ell);
    parallel_for(tasks, workers, [&](std::size_t i) {
        run_trial(ctx, i / config.trials, i % config.trials, &result.records[i * n_ell]);
    });
    result.aggregates = aggregate(config, result.records);
    if (config.bounds) result.bounds = summarize(config, *ctx.spectrum, result.records);
    return result;
}

SweepResult run_bound_check(const SweepConfig& config, std::size_t workers) {
    SweepConfig c = config;
    c.bounds = true;
    return run_sweep(c, workers);
}

} // namespace sketchbench::experiment
