#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipdyn/minimize.hpp"
#include "ipdyn/model.hpp"

namespace ipdyn {

struct ParamBounds {
    Interval alpha;
    Interval b;
    Interval n_max;
    Interval n0;  ///< used only when n0 is fitted

    void validate(bool fit_n0) const;
};

/// alpha in (0, 1e3], b in [0, 1e2], n_max in [max(y), 1e6], n0 in [0, max(y)].
ParamBounds default_bounds(std::span<const double> values);

struct FitOptions {
    std::size_t starts = 16;
    std::uint64_t seed = 0;
    bool fit_n0 = false;
    std::size_t max_evaluations_per_start = 6000;
};

struct FitResult {
    ModelParams params;
    double rss = 0.0;
    std::size_t n_evals = 0;
    bool converged = false;
    bool low_confidence = false;  ///< data ends before reaching half of the fitted plateau
    bool degenerate = false;      ///< fewer distinct time points than parameters + 1
    ParamBounds bounds;
    std::vector<double> start_rss;  ///< best objective reached from each start, in start order
};

/// Sum of squared residuals of closed_form against the observations.
double rss(const ModelParams& params, std::span<const double> times, std::span<const double> values);
double rss(const ModelParams& params, const Trajectory& observed);

/// closed_form(t_i) * (1 + noise_sigma * z_i), z_i standard normal, floored at 0.
Trajectory synth(const ModelParams& params, const std::vector<double>& t_grid, double noise_sigma,
                 std::uint64_t seed);

/// Multi-start least squares against closed_form. Start points are a Latin
/// hypercube over the (log-warped) bounds; each is refined by Nelder-Mead
/// with restarts. Deterministic given seed. Times must be nondecreasing;
/// repeated time points are allowed and reported as degenerate.
FitResult fit(std::span<const double> times, std::span<const double> values, const ParamBounds& bounds,
              const FitOptions& opts = {});
FitResult fit(const Trajectory& observed, const ParamBounds& bounds, const FitOptions& opts = {});

}  // namespace ipdyn
