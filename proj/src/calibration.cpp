#include "ipdyn/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ipdyn/errors.hpp"
#include "ipdyn/random.hpp"

namespace ipdyn {

namespace {

void check_interval(const std::string& field, const Interval& iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
        throw InvalidInput(field, "must be a finite interval with lo <= hi");
    }
}

// Maps a unit coordinate onto a bound interval. Wide intervals (or ones that
// touch zero) are warped logarithmically so that starts cover several decades.
class Axis {
public:
    explicit Axis(Interval iv) : iv_(iv) {
        const double w = iv.width();
        if (w == 0.0 || (iv.lo > 0.0 && iv.hi <= 100.0 * iv.lo)) return;
        warped_ = true;
        delta_ = std::max(iv.lo, 1e-6 * w);
        kappa_ = std::log1p(w / delta_);
    }

    double to_value(double z) const {
        z = std::clamp(z, 0.0, 1.0);
        if (!warped_) return iv_.lo + iv_.width() * z;
        return std::min(iv_.hi, iv_.lo + delta_ * std::expm1(kappa_ * z));
    }

private:
    Interval iv_;
    bool warped_ = false;
    double delta_ = 0.0;
    double kappa_ = 0.0;
};

struct Problem {
    std::span<const double> times;
    std::span<const double> values;
    std::vector<Axis> axes;
    double fixed_n0 = 0.0;
    bool fit_n0 = false;

    ModelParams params_at(const std::vector<double>& z) const {
        ModelParams p;
        p.alpha = axes[0].to_value(z[0]);
        p.b = axes[1].to_value(z[1]);
        p.n_max = axes[2].to_value(z[2]);
        p.n0 = fit_n0 ? std::min(axes[3].to_value(z[3]), p.n_max) : fixed_n0;
        return p;
    }

    double objective(const std::vector<double>& z) const { return rss(params_at(z), times, values); }
};

// Latin hypercube in the unit cube: one point per stratum along every axis.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, std::uint64_t seed) {
    auto rng = detail::make_rng(seed, 0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < dim; ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(i));
            std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            pts[i][k] = (static_cast<double>(perm[i]) + detail::uniform01(rng)) / static_cast<double>(n);
        }
    }
    return pts;
}

}  // namespace

void ParamBounds::validate(bool fit_n0) const {
    check_interval("bounds.alpha", alpha);
    check_interval("bounds.b", b);
    check_interval("bounds.n_max", n_max);
    if (alpha.lo < 0.0) throw InvalidInput("bounds.alpha", "lower bound must be >= 0");
    if (b.lo < 0.0) throw InvalidInput("bounds.b", "lower bound must be >= 0");
    if (n_max.lo <= 0.0) throw InvalidInput("bounds.n_max", "lower bound must be > 0");
    if (fit_n0) {
        check_interval("bounds.n0", n0);
        if (n0.lo < 0.0) throw InvalidInput("bounds.n0", "lower bound must be >= 0");
        if (n0.hi > n_max.lo) throw InvalidInput("bounds.n0", "upper bound must not exceed bounds.n_max lower bound");
    }
}

ParamBounds default_bounds(std::span<const double> values) {
    const double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    const double floor_n_max = std::max(top, 1e-9);
    return {{0.0, 1e3}, {0.0, 1e2}, {floor_n_max, std::max(1e6, floor_n_max)}, {0.0, top}};
}

double rss(const ModelParams& params, std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw InvalidInput("observed", "times and values differ in length");
    if (times.empty()) throw InvalidInput("observed", "must be nonempty");
    double sum = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0) throw InvalidInput("observed", "times must be >= 0");
        const double r = closed_form(params, times[i]) - values[i];
        sum += r * r;
    }
    return sum;
}

double rss(const ModelParams& params, const Trajectory& observed) {
    return rss(params, observed.times(), observed.values());
}

Trajectory synth(const ModelParams& params, const std::vector<double>& t_grid, double noise_sigma,
                 std::uint64_t seed) {
    params.validate();
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw InvalidInput("noise_sigma", "must be finite and >= 0");
    auto rng = detail::make_rng(seed, 0);
    std::vector<double> values;
    values.reserve(t_grid.size());
    for (double t : t_grid) {
        const double clean = closed_form(params, t);
        const double y = noise_sigma > 0.0 ? clean * (1.0 + noise_sigma * detail::standard_normal(rng)) : clean;
        values.push_back(std::max(0.0, y));
    }
    return Trajectory(t_grid, std::move(values), {"synth", params});
}

FitResult fit(std::span<const double> times, std::span<const double> values, const ParamBounds& bounds,
              const FitOptions& opts) {
    if (times.size() != values.size()) throw InvalidInput("observed", "times and values differ in length");
    if (times.size() < 4) throw InvalidInput("observed", "needs at least 4 samples");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) throw InvalidInput("observed", "must be finite");
        if (times[i] < 0.0) throw InvalidInput("observed", "times must be >= 0");
        if (values[i] < 0.0) throw InvalidInput("observed", "values must be >= 0");
        if (i > 0 && times[i] < times[i - 1]) throw InvalidInput("observed", "times must be nondecreasing");
    }
    if (opts.starts < 1) throw InvalidInput("starts", "must be >= 1");
    bounds.validate(opts.fit_n0);

    Problem prob{times, values, {Axis(bounds.alpha), Axis(bounds.b), Axis(bounds.n_max)}, 0.0, opts.fit_n0};
    if (opts.fit_n0) {
        prob.axes.emplace_back(bounds.n0);
    } else {
        prob.fixed_n0 = times[0] == 0.0 ? values[0] : 0.0;
        if (prob.fixed_n0 > bounds.n_max.lo) {
            throw InvalidInput("bounds.n_max", "lower bound is below the initial observation");
        }
    }

    const std::size_t dim = prob.axes.size();
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] != times[i - 1]) ++distinct;
    }

    double scale = 0.0;
    for (double y : values) scale += y * y;

    SimplexOptions nm;
    nm.initial_step = 0.1;
    nm.rel_spread_tol = 1e-10;
    nm.abs_spread_tol = 1e-26 * scale;

    auto objective = [&](const std::vector<double>& z) {
        std::vector<double> clamped(z);
        for (double& c : clamped) c = std::clamp(c, 0.0, 1.0);
        return prob.objective(clamped);
    };

    FitResult result;
    result.bounds = bounds;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_z;
    bool best_converged = false;
    bool any_improved = false;

    for (const auto& start : latin_hypercube(opts.starts, dim, opts.seed)) {
        const double initial = objective(start);
        std::size_t used = 1;
        SimplexResult run{start, initial, 0, false};
        // Restart from the incumbent until a restart stops paying off.
        while (used < opts.max_evaluations_per_start) {
            nm.max_evaluations = opts.max_evaluations_per_start - used;
            SimplexResult next = nelder_mead(objective, run.x, nm);
            used += next.evaluations;
            const bool improved = next.value < run.value - 1e-10 * std::abs(run.value);
            if (next.value <= run.value) {
                run.x = std::move(next.x);
                run.value = next.value;
            }
            run.converged = next.converged;
            if (!next.converged || !improved || run.value <= nm.abs_spread_tol) break;
        }
        for (double& c : run.x) c = std::clamp(c, 0.0, 1.0);
        result.n_evals += used;
        result.start_rss.push_back(run.value);
        if (run.value < initial) any_improved = true;
        if (run.value < best) {
            best = run.value;
            best_z = run.x;
            best_converged = run.converged;
        }
    }

    result.params = prob.params_at(best_z);
    result.rss = rss(result.params, times, values);
    result.degenerate = distinct < dim + 1;
    result.converged = any_improved && best_converged && !result.degenerate;

    const Regime regime = classify_regime(result.params);
    if (!regime.stationary) {
        const double reached = closed_form(result.params, times.back()) - result.params.n0;
        result.low_confidence = std::abs(reached) < 0.5 * std::abs(regime.limit - result.params.n0);
    }
    return result;
}

FitResult fit(const Trajectory& observed, const ParamBounds& bounds, const FitOptions& opts) {
    return fit(observed.times(), observed.values(), bounds, opts);
}

}  // namespace ipdyn
