#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ipdyn {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct Minimum1D {
    double x = 0.0;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Golden-section search on [a, b] until the bracket is narrower than width_tol.
/// Assumes f is unimodal on the bracket.
Minimum1D golden_section(const std::function<double(double)>& f, double a, double b, double width_tol);

/// Uniform grid scan followed by golden-section refinement inside the cells
/// adjacent to the best grid point, to a bracket width of 1e-6 * range width.
/// Ties go to the smaller abscissa.
Minimum1D scan_and_refine(const std::function<double(double)>& f, Interval range, std::size_t grid_points);

struct SimplexOptions {
    double initial_step = 0.1;
    double rel_spread_tol = 1e-10;
    double abs_spread_tol = 0.0;  ///< objective spread below this also terminates
    std::size_t max_evaluations = 4000;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;  ///< spread criterion met before the budget ran out
};

/// Nelder-Mead downhill simplex with standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
                          const SimplexOptions& opts = {});

}  // namespace ipdyn
