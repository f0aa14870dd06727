#include "ipdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

namespace ipdyn {

namespace {

constexpr double kOvershootSlack = 1e-9;

// Raw RK4 update without range handling.
double rk4_raw(const ModelParams& p, double n, double h) {
    const double k1 = rhs(p, n);
    const double k2 = rhs(p, n + 0.5 * h * k1);
    const double k3 = rhs(p, n + 0.5 * h * k2);
    const double k4 = rhs(p, n + h * k3);
    return n + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// nullopt when the step leaves the admissible range by more than the slack.
std::optional<double> rk4_checked(const ModelParams& p, double n, double h) {
    double next;
    try {
        next = rk4_raw(p, n, h);
    } catch (const InvalidInput&) {
        return std::nullopt;
    }
    if (!std::isfinite(next)) return std::nullopt;
    const double slack = kOvershootSlack * p.n_max;
    const double upper = std::max(n, p.n_max);
    if (next < -slack || next > upper + slack) return std::nullopt;
    return std::clamp(next, 0.0, upper);
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void require_t_end(double t_end) {
    if (!std::isfinite(t_end) || t_end <= 0.0) throw InvalidInput("t_end", "must be finite and > 0");
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!std::isfinite(step) || step <= 0.0) throw InvalidInput("step", "must be finite and > 0");
    if (!std::isfinite(rel_tol) || rel_tol <= 0.0) throw InvalidInput("rel_tol", "must be finite and > 0");
    if (!std::isfinite(abs_tol) || abs_tol <= 0.0) throw InvalidInput("abs_tol", "must be finite and > 0");
    if (max_steps < 1) throw InvalidInput("max_steps", "must be >= 1");
}

double step_rk4(const ModelParams& params, double n, double h) {
    params.validate();
    if (!std::isfinite(h) || h <= 0.0) throw InvalidInput("h", "must be finite and > 0");
    if (!std::isfinite(n) || n < 0.0) throw InvalidInput("n", "must be finite and >= 0");
    const auto next = rk4_checked(params, n, h);
    if (!next) {
        throw NumericalFailure("step_rk4: non-finite or out-of-range update from n=" + fmt_g(n) +
                               " h=" + fmt_g(h) + " for " + params.describe());
    }
    return *next;
}

Trajectory integrate(const ModelParams& params, double t_end, const IntegratorConfig& cfg) {
    params.validate();
    cfg.validate();
    require_t_end(t_end);

    const double h = cfg.step;
    // Avoid a sliver final step when t_end is a multiple of h up to rounding.
    const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / h - 1e-9)));

    Trajectory traj({}, {}, {"integrate", params});
    traj.push_back(0.0, params.n0);
    double n = params.n0;
    double t = 0.0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        if (i > cfg.max_steps) {
            throw IntegrationFailure("integrate: step budget " + std::to_string(cfg.max_steps) +
                                         " exceeded before t_end=" + fmt_g(t_end) + " for " + params.describe(),
                                     std::move(traj));
        }
        const double t_next = (i == n_steps) ? t_end : static_cast<double>(i) * h;
        const auto next = rk4_checked(params, n, t_next - t);
        if (!next) {
            throw IntegrationFailure("integrate: numerical failure at t=" + fmt_g(t) + " for " + params.describe(),
                                     std::move(traj));
        }
        n = *next;
        t = t_next;
        traj.push_back(t, n);
    }
    return traj;
}

Trajectory integrate_adaptive(const ModelParams& params, double t_end, const IntegratorConfig& cfg) {
    params.validate();
    cfg.validate();
    require_t_end(t_end);

    Trajectory traj({}, {}, {"integrate_adaptive", params});
    traj.push_back(0.0, params.n0);
    double n = params.n0;
    double t = 0.0;
    double h = std::min(cfg.step, t_end);
    const double h_min = 1e-14 * t_end;
    std::size_t accepted = 0;

    while (t < t_end) {
        if (accepted >= cfg.max_steps) {
            throw IntegrationFailure("integrate_adaptive: step budget " + std::to_string(cfg.max_steps) +
                                         " exceeded at t=" + fmt_g(t) + " for " + params.describe(),
                                     std::move(traj));
        }
        if (h < h_min) {
            throw IntegrationFailure("integrate_adaptive: step underflow h=" + fmt_g(h) + " at t=" + fmt_g(t) +
                                         " for " + params.describe(),
                                     std::move(traj));
        }
        const bool last = t + h >= t_end;
        const double step = last ? t_end - t : h;

        const auto full = rk4_checked(params, n, step);
        std::optional<double> half;
        std::optional<double> two_half;
        if (full) half = rk4_checked(params, n, 0.5 * step);
        if (half) two_half = rk4_checked(params, *half, 0.5 * step);
        if (!two_half) {
            h = 0.5 * step;
            continue;
        }

        const double err = std::abs(*two_half - *full) / 15.0;
        const double tol = cfg.rel_tol * std::abs(*two_half) + cfg.abs_tol;
        if (err > tol) {
            h = 0.5 * step;
            continue;
        }

        t = last ? t_end : t + step;
        n = *two_half;
        traj.push_back(t, n);
        ++accepted;

        const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 2.0;
        h = step * std::clamp(grow, 1.0, 2.0);
    }
    return traj;
}

PassageResult first_passage(const ModelParams& params, double level, const IntegratorConfig& cfg, double t_max) {
    params.validate();
    cfg.validate();
    if (!std::isfinite(level) || level < 0.0) throw InvalidInput("level", "must be finite and >= 0");
    if (!std::isfinite(t_max) || t_max <= 0.0) throw InvalidInput("t_max", "must be finite and > 0");

    const double n0 = params.n0;
    if (level == n0) return {PassageStatus::Reached, 0.0, {}};

    const Regime regime = classify_regime(params);
    const bool rising = level > n0;
    const bool beyond = regime.stationary || (rising ? level >= regime.limit : level <= regime.limit);
    if (beyond) {
        return {PassageStatus::BeyondLimit, 0.0,
                std::string(rising ? "exceeds" : "below") + " limit " + fmt_g(regime.limit)};
    }

    auto crossed = [&](double n) { return rising ? n >= level : n <= level; };

    const double h = cfg.step;
    const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_max / h - 1e-9)));
    double n = n0;
    double t = 0.0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        if (i > cfg.max_steps) {
            throw NumericalFailure("first_passage: step budget exceeded for " + params.describe());
        }
        const double t_next = (i == n_steps) ? t_max : static_cast<double>(i) * h;
        const double n_next = step_rk4(params, n, t_next - t);
        if (crossed(n_next)) {
            double lo = 0.0;
            double hi = t_next - t;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                if (crossed(step_rk4(params, n, mid))) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return {PassageStatus::Reached, t + hi, {}};
        }
        n = n_next;
        t = t_next;
    }
    return {PassageStatus::HorizonTooShort, 0.0, "not reached by t_max " + fmt_g(t_max)};
}

}  // namespace ipdyn
