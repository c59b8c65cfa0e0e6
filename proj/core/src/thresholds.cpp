#include "dhc/thresholds.hpp"

#include <cmath>

#include "dhc/error.hpp"
#include "dhc/parallel.hpp"

namespace dhc {

namespace {

template <class Pred>
double bisect(double lo, double hi, Pred&& broken, double precision) {
    // Invariant: !broken(lo), broken(hi).
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        if (broken(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

ThresholdScan scan_thresholds(std::span<const double> grid, const std::function<BrokenCount(double)>& count,
                              std::size_t baseline, const ThresholdOptions& options) {
    if (grid.empty()) throw ConfigError("threshold scan needs a non-empty gamma grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError("gamma grid must be strictly increasing");
    if (!(options.precision > 0.0)) throw ConfigError("threshold precision must be positive");

    std::vector<BrokenCount> counts(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) { counts[i] = count(grid[i]); });

    ThresholdScan out;
    out.baseline = baseline;
    out.gammas.assign(grid.begin(), grid.end());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.fractions.push_back(counts[i].fraction());
        if (i > 0 && out.fractions[i] < out.fractions[i - 1]) out.monotone = false;
    }

    auto first = [&](auto&& pred) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (pred(counts[i])) return i;
        return std::nullopt;
    };
    auto pt = [&](const BrokenCount& c) { return c.broken > baseline; };
    auto all = [](const BrokenCount& c) { return c.total > 0 && c.broken == c.total; };

    if (auto i = first(pt); i && *i > 0)
        out.gamma_pt = bisect(grid[*i - 1], grid[*i], [&](double g) { return pt(count(g)); }, options.precision);
    if (auto i = first(all); i && *i > 0)
        out.gamma_star = bisect(grid[*i - 1], grid[*i], [&](double g) { return all(count(g)); }, options.precision);
    return out;
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw ConfigError("gamma grid bounds must be finite");
    if (!(step > 0.0)) throw ConfigError("gamma grid step must be positive");
    if (stop < start) throw ConfigError("gamma grid stop is below start");
    const double span = (stop - start) / step;
    if (span > 1e7) throw ConfigError("gamma grid has too many points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-12 / step)) + 1;
    std::vector<double> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) grid.push_back(start + static_cast<double>(i) * step);
    if (std::abs(grid.back() - stop) <= 1e-12) grid.back() = stop;
    return grid;
}

}  // namespace dhc
