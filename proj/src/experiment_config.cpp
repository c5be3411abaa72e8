#include "divtest/experiment_config.hpp"

#include <algorithm>
#include <cmath>

#include "divtest/errors.hpp"

namespace divtest {

void ExperimentConfig::apply_toml(const TomlTable& t) {
    static const char* known[] = {"null_dist", "alt_dist", "divergence", "alpha",
                                  "eps",       "n_grid",   "mode",       "trials",
                                  "seed",      "output_path", "margin",  "threshold_r",
                                  "r_tilde",   "grid_step", "threads",   "dof_override"};
    for (const auto& [key, value] : t.values()) {
        (void)value;
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw config_error("unknown config key '" + key + "'");
    }
    if (t.has("null_dist")) null_dist = t.get_double_array("null_dist");
    if (t.has("alt_dist")) alt_dist = t.get_double_array("alt_dist");
    if (t.has("divergence")) divergence = t.get_string("divergence");
    if (t.has("alpha")) alpha = t.get_double("alpha");
    if (t.has("eps")) eps = t.get_double("eps");
    if (t.has("n_grid")) n_grid = t.get_int_array("n_grid");
    if (t.has("mode")) mode = t.get_string("mode");
    if (t.has("trials")) trials = t.get_int("trials");
    if (t.has("seed")) {
        seed = t.get_int("seed");
        seed_explicit = true;
    }
    if (t.has("output_path")) output_path = t.get_string("output_path");
    if (t.has("margin")) margin = t.get_double("margin");
    if (t.has("threshold_r")) threshold_r = t.get_double("threshold_r");
    if (t.has("r_tilde")) r_tilde = t.get_double("r_tilde");
    if (t.has("grid_step")) grid_step = t.get_double("grid_step");
    if (t.has("threads")) threads = static_cast<int>(t.get_int("threads"));
    if (t.has("dof_override")) dof_override = static_cast<int>(t.get_int("dof_override"));
}

namespace {

void validate_dist(const std::vector<double>& w, const char* field) {
    if (w.size() < 2) throw config_error(std::string(field) + ": needs at least 2 entries");
    double sum = 0.0;
    for (double x : w) {
        if (!(x > 0.0)) throw config_error(std::string(field) + ": entries must be > 0");
        sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw config_error(std::string(field) + ": entries must sum to 1 (got " +
                           std::to_string(sum) + ")");
}

}  // namespace

void ExperimentConfig::validate(bool require_alt, std::size_t min_grid) const {
    validate_dist(null_dist, "null_dist");
    if (require_alt) {
        validate_dist(alt_dist, "alt_dist");
        if (alt_dist.size() != null_dist.size())
            throw config_error("alt_dist: size differs from null_dist");
        double gap = 0.0;
        for (std::size_t i = 0; i < null_dist.size(); ++i)
            gap = std::max(gap, std::fabs(null_dist[i] - alt_dist[i]));
        if (gap <= 1e-12) throw config_error("alt_dist: must differ from null_dist");
    }
    if (divergence != "kl" && divergence != "alpha" && divergence != "renyi" &&
        divergence != "chisq")
        throw config_error("divergence: must be one of kl|alpha|renyi|chisq");
    if (divergence == "alpha" && (alpha == 1.0 || alpha == -1.0))
        throw config_error("alpha: alpha-divergence requires alpha != +-1");
    if (divergence == "renyi" && (!(alpha > 0.0) || alpha == 1.0))
        throw config_error("alpha: Renyi divergence requires alpha > 0, alpha != 1");
    if (!(eps > 0.0 && eps < 1.0)) throw config_error("eps: must lie in (0,1)");
    if (n_grid.size() < min_grid)
        throw config_error("n_grid: needs at least " + std::to_string(min_grid) + " entries");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw config_error("n_grid: entries must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw config_error("n_grid: must be strictly ascending");
    }
    if (mode != "exact" && mode != "mc" && mode != "both")
        throw config_error("mode: must be one of exact|mc|both");
    if (mode != "exact" && trials < 1) throw config_error("trials: must be >= 1 for mc runs");
    if (margin < 0.0 || margin >= eps) throw config_error("margin: must satisfy 0 <= margin < eps");
    if (threshold_r < 0.0) throw config_error("threshold_r: must be >= 0");
    if (r_tilde < 0.0) throw config_error("r_tilde: must be >= 0");
    if (!(grid_step > 0.0 && grid_step <= 0.1))
        throw config_error("grid_step: must lie in (0, 0.1]");
    if (threads < 0) throw config_error("threads: must be >= 0");
    if (dof_override < 0) throw config_error("dof_override: must be >= 0");
    if (output_path.empty()) throw config_error("output_path: must not be empty");
}

DivergenceSpec ExperimentConfig::divergence_spec() const {
    if (divergence == "kl") return DivergenceSpec::kl_divergence();
    if (divergence == "alpha") return DivergenceSpec::alpha_divergence(alpha);
    if (divergence == "renyi") return DivergenceSpec::renyi_divergence(alpha);
    if (divergence == "chisq") return DivergenceSpec::chi_squared();
    throw config_error("divergence: must be one of kl|alpha|renyi|chisq");
}

}  // namespace divtest
