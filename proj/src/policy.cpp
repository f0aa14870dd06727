#include "ipdyn/policy.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ipdyn/errors.hpp"
#include "ipdyn/random.hpp"

namespace ipdyn {

namespace {

constexpr double kQuadratureTol = 1e-8;

double segment_integral(const ModelParams& seg, double duration) {
    if (seg.alpha == 0.0 && seg.n0 == 0.0) return 0.0;
    auto n_of_t = [&](double t) { return closed_form(seg, t); };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(n_of_t, 0.0, duration, 20, kQuadratureTol);
}

void check_b_range(Interval r) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0 || r.hi < r.lo) {
        throw InvalidInput("b_range", "must satisfy 0 <= lo <= hi < inf");
    }
}

}  // namespace

void CostSpec::validate() const {
    if (!std::isfinite(c_protect) || c_protect < 0.0) throw InvalidInput("c_protect", "must be finite and >= 0");
    if (!std::isfinite(c_infringe) || c_infringe < 0.0) throw InvalidInput("c_infringe", "must be finite and >= 0");
    if (!std::isfinite(horizon) || horizon <= 0.0) throw InvalidInput("horizon", "must be finite and > 0");
    if (c_protect == 0.0 && c_infringe == 0.0) throw InvalidInput("c_protect", "cost weights must not both be zero");
}

void PolicySchedule::validate() const {
    if (levels.empty()) throw InvalidInput("levels", "must be nonempty");
    if (breakpoints.size() != levels.size() + 1) throw InvalidInput("breakpoints", "must have one more entry than levels");
    if (breakpoints.front() != 0.0) throw InvalidInput("breakpoints", "must start at 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i]) || !(breakpoints[i] > breakpoints[i - 1])) {
            throw InvalidInput("breakpoints", "must be finite and strictly increasing");
        }
    }
    for (double b : levels) {
        if (!std::isfinite(b) || b < 0.0) throw InvalidInput("levels", "must be finite and >= 0");
    }
}

PolicySchedule PolicySchedule::uniform(double horizon, std::vector<double> levels) {
    if (!std::isfinite(horizon) || horizon <= 0.0) throw InvalidInput("horizon", "must be finite and > 0");
    if (levels.empty()) throw InvalidInput("levels", "must be nonempty");
    const std::size_t k = levels.size();
    PolicySchedule s{std::vector<double>(k + 1), std::move(levels)};
    for (std::size_t i = 0; i < k; ++i) s.breakpoints[i] = horizon * static_cast<double>(i) / static_cast<double>(k);
    s.breakpoints[k] = horizon;
    return s;
}

std::vector<double> breakpoint_states(const ModelParams& base, const PolicySchedule& schedule) {
    base.validate();
    schedule.validate();
    std::vector<double> states{base.n0};
    for (std::size_t k = 0; k < schedule.levels.size(); ++k) {
        const ModelParams seg = base.with_b(schedule.levels[k]).with_n0(states.back());
        states.push_back(closed_form(seg, schedule.breakpoints[k + 1] - schedule.breakpoints[k]));
    }
    return states;
}

double cost(const ModelParams& base, const PolicySchedule& schedule, const CostSpec& spec) {
    base.validate();
    schedule.validate();
    spec.validate();
    if (std::abs(schedule.breakpoints.back() - spec.horizon) > 1e-12 * spec.horizon) {
        throw InvalidInput("breakpoints", "last breakpoint must equal the horizon");
    }

    double total = 0.0;
    double n = base.n0;
    for (std::size_t k = 0; k < schedule.levels.size(); ++k) {
        const double dt = schedule.breakpoints[k + 1] - schedule.breakpoints[k];
        const ModelParams seg = base.with_b(schedule.levels[k]).with_n0(n);
        total += spec.c_protect * schedule.levels[k] * dt;
        if (spec.c_infringe != 0.0) total += spec.c_infringe * segment_integral(seg, dt);
        n = closed_form(seg, dt);
    }
    return total;
}

StaticOptimum optimize_static(const ModelParams& base, const CostSpec& spec, Interval b_range,
                              std::size_t grid_points) {
    base.validate();
    spec.validate();
    check_b_range(b_range);
    auto f = [&](double b) { return cost(base, PolicySchedule::constant(spec.horizon, b), spec); };
    const Minimum1D m = scan_and_refine(f, b_range, grid_points);
    return {m.x, m.value};
}

ScheduleOptimum optimize_schedule(const ModelParams& base, const CostSpec& spec, std::size_t segments,
                                  Interval b_range, std::uint64_t seed, const ScheduleOptions& opts) {
    base.validate();
    spec.validate();
    check_b_range(b_range);
    if (segments < 1) throw InvalidInput("segments", "must be >= 1");

    auto evaluate = [&](const std::vector<double>& levels) {
        return cost(base, PolicySchedule::uniform(spec.horizon, levels), spec);
    };

    const StaticOptimum fixed = optimize_static(base, spec, b_range, opts.grid_points);
    std::vector<std::vector<double>> candidates{
        std::vector<double>(segments, fixed.level),
        std::vector<double>(segments, b_range.lo),
        std::vector<double>(segments, b_range.hi),
    };
    auto rng = detail::make_rng(seed, segments);
    for (std::size_t i = 0; i < opts.random_starts; ++i) {
        std::vector<double> levels(segments);
        for (double& b : levels) b = b_range.lo + b_range.width() * detail::uniform01(rng);
        candidates.push_back(std::move(levels));
    }

    std::vector<double> levels = candidates.front();
    double best = fixed.cost;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double c = evaluate(candidates[i]);
        if (c < best) {
            best = c;
            levels = candidates[i];
        }
    }

    std::size_t cycles = 0;
    while (cycles < opts.max_cycles) {
        ++cycles;
        const double before = best;
        for (std::size_t k = 0; k < segments; ++k) {
            auto along = [&](double b) {
                std::vector<double> trial = levels;
                trial[k] = b;
                return evaluate(trial);
            };
            const Minimum1D m = scan_and_refine(along, b_range, opts.grid_points);
            if (m.value < best) {
                best = m.value;
                levels[k] = m.x;
            }
        }
        if (before - best < 1e-9 * std::abs(before)) break;
    }
    return {PolicySchedule::uniform(spec.horizon, std::move(levels)), best, cycles};
}

}  // namespace ipdyn
