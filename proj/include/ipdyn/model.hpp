#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipdyn {

/// Infringement dynamics dN/dt = (1 - N/n_max)(alpha - b N).
struct ModelParams {
    double alpha = 0.0;  ///< inflow rate before saturation damping
    double b = 0.0;      ///< protection intensity (removal rate per infringement)
    double n_max = 1.0;  ///< saturation count
    double n0 = 0.0;     ///< initial count; zero when the product enters the market

    /// Throws InvalidInput naming the first offending field.
    void validate() const;

    /// Copy with a different protection level.
    ModelParams with_b(double level) const {
        ModelParams p = *this;
        p.b = level;
        return p;
    }
    ModelParams with_n0(double start) const {
        ModelParams p = *this;
        p.n0 = start;
        return p;
    }

    std::string describe() const;
};

constexpr double kDefaultTolCrit = 1e-9;

enum class RegimeKind { Saturation, Controlled, Critical };

std::string_view to_string(RegimeKind kind);

struct Regime {
    RegimeKind kind = RegimeKind::Critical;
    double limit = 0.0;   ///< long-run infringement count
    double lambda = 0.0;  ///< (alpha - b n_max) / n_max; zero in the Critical band
    bool stationary = false;  ///< n0 is a fixed point, so N(t) == n0 for all t
};

enum class Stability { Stable, Unstable, SemiStable, Neutral, OutOfDomain };

std::string_view to_string(Stability s);

struct Equilibrium {
    double value = 0.0;
    Stability stability = Stability::Stable;
};

struct TrajectoryMeta {
    std::string producer;
    std::optional<ModelParams> params;
};

/// Time-ordered samples. Construction enforces strictly increasing times and
/// matching lengths.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<double> values, TrajectoryMeta meta = {});

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const TrajectoryMeta& meta() const noexcept { return meta_; }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double back_time() const { return times_.back(); }
    double back_value() const { return values_.back(); }

    /// Appends a sample; t must exceed the last time.
    void push_back(double t, double n);

private:
    std::vector<double> times_;
    std::vector<double> values_;
    TrajectoryMeta meta_;
};

/// Right-hand side exactly as written; no clamping. Throws on non-finite n.
double rhs(const ModelParams& params, double n);

/// Convergence exponent (alpha - b n_max) / n_max, unsnapped.
double convergence_exponent(const ModelParams& params);

/// True when |b n_max - alpha| <= tol_crit * max(alpha, b n_max).
bool is_critical(const ModelParams& params, double tol_crit = kDefaultTolCrit);

/// Fixed points in ascending order with stability labels.
std::vector<Equilibrium> equilibria(const ModelParams& params, double tol_crit = kDefaultTolCrit);

Regime classify_regime(const ModelParams& params, double tol_crit = kDefaultTolCrit);

/// Exact solution of the ODE from n0 at time 0. Uses the algebraic branch
/// inside the Critical band and the exponential branch elsewhere.
double closed_form(const ModelParams& params, double t, double tol_crit = kDefaultTolCrit);

/// Smallest t with closed_form(t) == fraction * limit. Returns 0 when n0 is
/// already at or past the target and nullopt when the target is never reached.
std::optional<double> settling_time(const ModelParams& params, double fraction,
                                    double tol_crit = kDefaultTolCrit);

}  // namespace ipdyn
