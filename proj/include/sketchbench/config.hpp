#pragma once

#include "sketchbench/distributions.hpp"
#include "sketchbench/test_matrices.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sketchbench::experiment {

enum class Algorithm { rsvd, nystrom };

struct SweepConfig {
    testmat::MatrixRecipe matrix;
    Algorithm algorithm = Algorithm::rsvd;
    std::size_t q = 1;
    bool stabilized = true;
    std::size_t k = 15;
    std::vector<dist::DistributionSpec> distributions;
    std::vector<std::size_t> ell_grid;
    std::size_t trials = 100;
    std::uint64_t master_seed = 0;

    std::string csv_path;
    std::string svg_path;
    bool log_y = false;
    /// Per-trial rows go here when non-empty.
    std::string raw_path;
    bool bounds = false;
    /// Failure probability for the Gaussian tail check in bounds mode.
    double delta = 0.1;
};

/// INI-style text with [matrix], [algorithm], [sweep] and [output] sections.
/// Throws Error(ConfigError) on unknown keys or bad values.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::filesystem::path& path);
/// Canonical form; parse_config(print_config(c)) reproduces c.
std::string print_config(const SweepConfig& config);

void validate(const SweepConfig& config);

} // namespace sketchbench::experiment
