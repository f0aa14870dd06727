#pragma once

#include <cstdint>
#include <vector>

#include "ipdyn/minimize.hpp"
#include "ipdyn/model.hpp"

namespace ipdyn {

/// Weights of J = integral over [0, horizon] of (c_protect b(t) + c_infringe N(t)) dt.
struct CostSpec {
    double c_protect = 1.0;
    double c_infringe = 1.0;
    double horizon = 1.0;

    void validate() const;
};

/// Piecewise-constant protection level: levels[k] applies on
/// [breakpoints[k], breakpoints[k + 1]).
struct PolicySchedule {
    std::vector<double> breakpoints;
    std::vector<double> levels;

    void validate() const;

    static PolicySchedule uniform(double horizon, std::vector<double> levels);
    static PolicySchedule constant(double horizon, double level) { return uniform(horizon, {level}); }
};

/// N at every breakpoint, carrying each segment's end state into the next.
std::vector<double> breakpoint_states(const ModelParams& base, const PolicySchedule& schedule);

/// Total cost J; the N-integral on each segment uses adaptive Gauss-Kronrod
/// quadrature of the closed form at relative tolerance 1e-8. base.b is ignored.
double cost(const ModelParams& base, const PolicySchedule& schedule, const CostSpec& spec);

struct StaticOptimum {
    double level = 0.0;
    double cost = 0.0;
};

StaticOptimum optimize_static(const ModelParams& base, const CostSpec& spec, Interval b_range,
                              std::size_t grid_points = 41);

struct ScheduleOptions {
    std::size_t grid_points = 41;    ///< per-coordinate scan before golden refinement
    std::size_t random_starts = 4;   ///< in addition to static, all-low and all-high starts
    std::size_t max_cycles = 200;
};

struct ScheduleOptimum {
    PolicySchedule schedule;
    double cost = 0.0;
    std::size_t cycles = 0;
};

/// Coordinate descent over the levels of a K-segment uniform schedule. Each
/// coordinate is minimized by scan_and_refine with the others held fixed;
/// descent starts from the cheapest of the candidate level vectors (the
/// static optimum among them) and stops when a cycle gains < 1e-9 J.
ScheduleOptimum optimize_schedule(const ModelParams& base, const CostSpec& spec, std::size_t segments,
                                  Interval b_range, std::uint64_t seed, const ScheduleOptions& opts = {});

}  // namespace ipdyn
