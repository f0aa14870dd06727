#include "ipdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ipdyn/errors.hpp"

namespace ipdyn {

namespace {

void require_finite(const char* field, double v) {
    if (!std::isfinite(v)) throw InvalidInput(field, "must be finite");
}

// Reached when a settling target cannot be inverted analytically to the
// required accuracy.
double bisect_closed_form(const ModelParams& p, double target, double tol_crit) {
    double lo = 0.0;
    double hi = 1.0;
    while (closed_form(p, hi, tol_crit) < target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalFailure("settling_time: target not bracketed for " + p.describe());
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (closed_form(p, mid, tol_crit) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

}  // namespace

void ModelParams::validate() const {
    require_finite("alpha", alpha);
    require_finite("b", b);
    require_finite("n_max", n_max);
    require_finite("n0", n0);
    if (alpha < 0.0) throw InvalidInput("alpha", "must be >= 0");
    if (b < 0.0) throw InvalidInput("b", "must be >= 0");
    if (n_max <= 0.0) throw InvalidInput("n_max", "must be > 0");
    if (n0 < 0.0 || n0 > n_max) throw InvalidInput("n0", "must lie in [0, n_max]");
}

std::string ModelParams::describe() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "alpha=%.12g b=%.12g n_max=%.12g n0=%.12g", alpha, b, n_max, n0);
    return buf;
}

std::string_view to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::Saturation: return "Saturation";
        case RegimeKind::Controlled: return "Controlled";
        case RegimeKind::Critical: return "Critical";
    }
    return "unknown";
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::SemiStable: return "semi-stable";
        case Stability::Neutral: return "neutral";
        case Stability::OutOfDomain: return "out-of-domain";
    }
    return "unknown";
}

Trajectory::Trajectory(std::vector<double> times, std::vector<double> values, TrajectoryMeta meta)
    : times_(std::move(times)), values_(std::move(values)), meta_(std::move(meta)) {
    if (times_.size() != values_.size()) throw InvalidInput("values", "length differs from times");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require_finite("times", times_[i]);
        require_finite("values", values_[i]);
        if (i > 0 && !(times_[i] > times_[i - 1])) throw InvalidInput("times", "must be strictly increasing");
    }
}

void Trajectory::push_back(double t, double n) {
    if (!times_.empty() && !(t > times_.back())) throw InvalidInput("times", "must be strictly increasing");
    times_.push_back(t);
    values_.push_back(n);
}

double rhs(const ModelParams& params, double n) {
    if (!std::isfinite(n)) throw InvalidInput("n", "must be finite");
    return (1.0 - n / params.n_max) * (params.alpha - params.b * n);
}

double convergence_exponent(const ModelParams& params) {
    return (params.alpha - params.b * params.n_max) / params.n_max;
}

bool is_critical(const ModelParams& params, double tol_crit) {
    const double removal = params.b * params.n_max;
    return std::abs(removal - params.alpha) <= tol_crit * std::max(params.alpha, removal);
}

std::vector<Equilibrium> equilibria(const ModelParams& params, double tol_crit) {
    params.validate();
    const double m = params.n_max;
    if (params.b == 0.0) {
        // alpha == 0 too means rhs vanishes everywhere.
        return {{m, params.alpha > 0.0 ? Stability::Stable : Stability::Neutral}};
    }
    if (is_critical(params, tol_crit)) return {{m, Stability::SemiStable}};

    const double inner = params.alpha / params.b;
    if (inner < m) return {{inner, Stability::Stable}, {m, Stability::Unstable}};
    return {{m, Stability::Stable}, {inner, Stability::OutOfDomain}};
}

Regime classify_regime(const ModelParams& params, double tol_crit) {
    params.validate();
    if (!(tol_crit > 0.0 && tol_crit <= 0.1)) throw InvalidInput("tol_crit", "must lie in (0, 0.1]");

    Regime r;
    if (is_critical(params, tol_crit)) {
        r.kind = RegimeKind::Critical;
        r.limit = params.n_max;
        r.lambda = 0.0;
    } else {
        r.lambda = convergence_exponent(params);
        if (r.lambda > 0.0) {
            r.kind = RegimeKind::Saturation;
            r.limit = params.n_max;
        } else {
            r.kind = RegimeKind::Controlled;
            r.limit = params.alpha / params.b;
        }
    }
    if (rhs(params, params.n0) == 0.0) {
        r.stationary = true;
        r.limit = params.n0;
    }
    return r;
}

double closed_form(const ModelParams& params, double t, double tol_crit) {
    params.validate();
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("t", "must be finite and >= 0");
    if (t == 0.0) return params.n0;

    const double m = params.n_max;
    const double n0 = params.n0;
    const double gap = m - n0;
    if (gap == 0.0) return m;

    if (is_critical(params, tol_crit)) {
        return m - gap / (1.0 + params.b * gap * t / m);
    }

    // Increment form of (R0 E m - alpha) / (R0 E - b), R0 = (alpha - b n0)/(m - n0).
    // Scaled so that neither branch overflows for large t.
    const double lambda = convergence_exponent(params);
    const double drive = params.alpha - params.b * n0;
    double n;
    double limit;
    if (lambda > 0.0) {
        const double s = -std::expm1(-lambda * t) / lambda;
        n = n0 + gap * drive * s / (m + params.b * gap * s);
        limit = m;
    } else {
        const double e = std::exp(lambda * t);
        const double s = std::expm1(lambda * t) / lambda;
        n = n0 + gap * drive * s / (m * e + params.b * gap * s);
        limit = params.alpha / params.b;
    }
    // The exact solution is monotone between n0 and its limit.
    return std::clamp(n, std::min(n0, limit), std::max(n0, limit));
}

std::optional<double> settling_time(const ModelParams& params, double fraction, double tol_crit) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("fraction", "must lie in (0, 1)");
    const Regime regime = classify_regime(params, tol_crit);
    const double target = fraction * regime.limit;
    const double n0 = params.n0;
    if (n0 >= target) return 0.0;
    if (regime.stationary) return std::nullopt;

    const double m = params.n_max;
    const double gap = m - n0;
    double t;
    if (regime.kind == RegimeKind::Critical) {
        if (params.b == 0.0) return std::nullopt;
        t = (gap / (m - target) - 1.0) * m / (params.b * gap);
    } else {
        const double start_ratio = (params.alpha - params.b * n0) / gap;
        const double target_ratio = (params.alpha - params.b * target) / (m - target);
        t = std::log(target_ratio / start_ratio) / regime.lambda;
    }
    if (!std::isfinite(t) || t < 0.0 ||
        std::abs(closed_form(params, t, tol_crit) - target) > 1e-6 * regime.limit) {
        t = bisect_closed_form(params, target, tol_crit);
    }
    return t;
}

}  // namespace ipdyn
