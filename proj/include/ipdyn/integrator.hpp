#pragma once

#include <cstddef>
#include <string>

#include "ipdyn/errors.hpp"
#include "ipdyn/model.hpp"

namespace ipdyn {

struct IntegratorConfig {
    double step = 1e-3;      ///< fixed step, or the initial step in adaptive mode
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::size_t max_steps = 10'000'000;

    void validate() const;
};

/// Numerical failure raised mid-integration; carries the samples accepted so far.
class IntegrationFailure : public NumericalFailure {
public:
    IntegrationFailure(const std::string& what, Trajectory partial)
        : NumericalFailure(what), partial_(std::move(partial)) {}

    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// One classical Runge-Kutta step. Overshoot outside [0, max(n, n_max)] by at
/// most 1e-9 n_max is clamped; anything larger throws NumericalFailure.
double step_rk4(const ModelParams& params, double n, double h);

/// Fixed-step RK4 from t = 0 to t_end inclusive; the last step is shortened
/// to land on t_end.
Trajectory integrate(const ModelParams& params, double t_end, const IntegratorConfig& cfg = {});

/// Step-doubling RK4. A step is accepted when the Richardson error estimate
/// is at most rel_tol |N| + abs_tol; rejected steps halve, accepted steps grow
/// by at most 2x.
Trajectory integrate_adaptive(const ModelParams& params, double t_end, const IntegratorConfig& cfg = {});

enum class PassageStatus { Reached, BeyondLimit, HorizonTooShort };

struct PassageResult {
    PassageStatus status = PassageStatus::Reached;
    double time = 0.0;   ///< valid when status == Reached
    std::string reason;  ///< empty when reached

    bool reached() const noexcept { return status == PassageStatus::Reached; }
};

/// First time N(t) == level within [0, t_max], bracketed on fixed RK4 steps
/// and refined by bisection (re-integrating the bracketing step) to 1e-9.
PassageResult first_passage(const ModelParams& params, double level, const IntegratorConfig& cfg,
                            double t_max);

}  // namespace ipdyn
