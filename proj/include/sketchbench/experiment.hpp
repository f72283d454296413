#pragma once

#include "sketchbench/config.hpp"
#include "sketchbench/lowrank.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sketchbench::experiment {

struct SweepRecord {
    std::size_t distribution_id = 0;
    std::size_t ell = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double relative_error = 0.0;
    bool failed = false;
    std::string error;
    std::optional<lowrank::StructuralReport> structural;
};

struct Aggregate {
    std::string distribution;
    std::size_t ell = 0;
    std::size_t trials = 0;
    double mean_re = 0.0;
    /// Sample standard deviation over successful trials.
    double std_re = 0.0;
    std::size_t failures = 0;
};

struct BoundSummary {
    std::size_t checked = 0;
    std::size_t not_applicable = 0;
    std::size_t structural_violations = 0;
    std::size_t chain_checked = 0;
    std::size_t chain_violations = 0;
    std::size_t gaussian_trials = 0;
    std::size_t gaussian_exceedances = 0;
    /// delta * N + 3 sqrt(N delta (1 - delta))
    double gaussian_allowed = 0.0;

    bool deterministic_ok() const noexcept { return structural_violations == 0 && chain_violations == 0; }
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::vector<Aggregate> aggregates;
    std::optional<BoundSummary> bounds;
};

/// Runs every (distribution, trial) pair on `workers` threads (0 picks the
/// hardware concurrency). Output does not depend on the worker count.
SweepResult run_sweep(const SweepConfig& config, std::size_t workers = 0);
SweepResult run_sweep(const SweepConfig& config, const DenseMatrix& a, std::size_t workers = 0);

/// Per-trial structural reports plus the violation summary. Forces bounds on.
SweepResult run_bound_check(const SweepConfig& config, std::size_t workers = 0);

std::vector<Aggregate> aggregate(const SweepConfig& config, const std::vector<SweepRecord>& records);

/// Runs fn(i) for i in [0, count) on a pool of threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

} // namespace sketchbench::experiment
