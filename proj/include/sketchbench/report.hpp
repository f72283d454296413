#pragma once

#include "sketchbench/bounds.hpp"
#include "sketchbench/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace sketchbench::experiment {

// Columns: distribution, ell, trials, mean_re, std_re, failures.
void write_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);
void emit_csv(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path);

/// One row per trial, including the structural diagnostics when present.
void write_raw_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRecord>& records);
void emit_raw_csv(const SweepConfig& config, const std::vector<SweepRecord>& records,
                  const std::filesystem::path& path);

// Columns: class, k, ell, delta, epsilon, term_bound, error_bound.
void write_bounds_csv(std::ostream& out, const std::vector<bounds::BoundReport>& reports);

/// Mean relative error against ell, one polyline per distribution, with
/// one-standard-deviation error bars.
void write_svg(std::ostream& out, const std::vector<Aggregate>& aggregates, bool log_y);
void emit_svg(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path, bool log_y);

} // namespace sketchbench::experiment
