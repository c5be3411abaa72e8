#pragma once

#include <stdexcept>
#include <string>

namespace divtest {

/// Error codes for every failure mode the library reports. The CLI maps
/// these onto process exit codes (config 2, budget 3, math domain 4).
enum class errc {
    non_positive_entry,
    not_normalized,
    symbol_out_of_range,
    dimension_mismatch,
    invalid_alpha,
    equal_distributions,
    margin_too_large,
    budget_exceeded,
    radius_too_large,
    n_too_small,
    prob_out_of_range,
    non_positive_argument,
    negative_argument,
    degenerate_grid,
    non_convex_f,
    invalid_argument,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

inline const char* errc_name(errc code) {
    switch (code) {
        case errc::non_positive_entry: return "NonPositiveEntry";
        case errc::not_normalized: return "NotNormalized";
        case errc::symbol_out_of_range: return "SymbolOutOfRange";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::invalid_alpha: return "InvalidAlpha";
        case errc::equal_distributions: return "EqualDistributions";
        case errc::margin_too_large: return "MarginTooLarge";
        case errc::budget_exceeded: return "BudgetExceeded";
        case errc::radius_too_large: return "RadiusTooLarge";
        case errc::n_too_small: return "NTooSmall";
        case errc::prob_out_of_range: return "ProbOutOfRange";
        case errc::non_positive_argument: return "NonPositiveArgument";
        case errc::negative_argument: return "NegativeArgument";
        case errc::degenerate_grid: return "DegenerateGrid";
        case errc::non_convex_f: return "NonConvexF";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace divtest
