#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "divtest/divergences.hpp"
#include "divtest/simplex.hpp"
#include "divtest/toml_lite.hpp"

namespace divtest {

/// Invalid user configuration; the CLI maps this to exit code 2.  Messages
/// name the offending field.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// One experiment description: the TOML file contents plus any flag
/// overrides, validated against the library preconditions before any compute
/// starts.
struct ExperimentConfig {
    std::vector<double> null_dist;
    std::vector<double> alt_dist;
    std::string divergence = "kl";  // kl | alpha | renyi | chisq
    double alpha = 0.0;
    double eps = 0.05;
    std::vector<std::int64_t> n_grid;
    std::string mode = "exact";  // exact | mc | both
    std::int64_t trials = 10000;
    std::int64_t seed = 0;
    bool seed_explicit = false;  // set by the file or a flag; blocks the env fallback
    std::string output_path = "divtest_out.csv";

    // Pipeline-specific knobs.
    double margin = 0.0;        // asymptotic-threshold slack, in [0, eps)
    double threshold_r = 0.0;   // fixed test threshold; 0 = calibrate exactly
    double r_tilde = 0.0;       // optimizer ball radius; 0 = auto (0.25 V / tau^2)
    double grid_step = 1e-3;    // brute-force lattice spacing
    int threads = 0;            // worker cap; 0 = no cap
    int dof_override = 0;       // chi-squared dof+1 used by predictors; 0 = alphabet size

    /// Merge values from a parsed TOML table (file layer; flags override later).
    void apply_toml(const TomlTable& table);

    bool needs_alt() const { return true; }

    /// Field-by-field validation; throws config_error naming the field.
    /// `require_alt` demands a valid alt_dist distinct from null_dist,
    /// `min_grid` the minimal number of n_grid entries.
    void validate(bool require_alt, std::size_t min_grid = 1) const;

    Distribution null_distribution() const { return Distribution(null_dist); }
    Distribution alt_distribution() const { return Distribution(alt_dist); }
    DivergenceSpec divergence_spec() const;
};

}  // namespace divtest
