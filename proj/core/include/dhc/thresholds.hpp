// thresholds.hpp — locating the first-broken and all-broken dissipation strengths

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dhc {

struct BrokenCount {
    std::size_t broken = 0;
    std::size_t total = 0;

    double fraction() const { return total == 0 ? 0.0 : static_cast<double>(broken) / static_cast<double>(total); }
};

struct ThresholdOptions {
    double precision = 1e-4;  // bisection stops when the bracket is narrower than this
    std::size_t threads = 1;
};

struct ThresholdScan {
    std::vector<double> gammas;
    std::vector<double> fractions;
    std::size_t baseline = 0;  // modes broken at any γ > 0; excluded from γ_PT
    std::optional<double> gamma_pt;
    std::optional<double> gamma_star;
    bool monotone = true;
};

/// Scans an ascending grid, then bisects inside the first bracketing interval.
/// γ_PT is the smallest γ with more than `baseline` broken modes; γ* the smallest
/// with every mode broken. A threshold the grid does not bracket is left empty.
ThresholdScan scan_thresholds(std::span<const double> grid, const std::function<BrokenCount(double)>& count,
                              std::size_t baseline, const ThresholdOptions& options = {});

/// Inclusive grid start, start+step, ..., keeping `stop` when within 1e-12 of a step.
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace dhc
