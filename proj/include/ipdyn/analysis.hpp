#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ipdyn/model.hpp"

namespace ipdyn {

/// N(t; b) for every (b, t) pair; rows follow b_values, columns follow t_grid.
struct ComparisonTable {
    std::vector<double> b_values;
    std::vector<double> t_grid;
    std::vector<std::vector<double>> values;
};

ComparisonTable compare_levels(const ModelParams& base, const std::vector<double>& b_values,
                               const std::vector<double>& t_grid);

enum class SensitivityTarget { Alpha, B, NMax };

SensitivityTarget parse_sensitivity_target(std::string_view name);

struct Sensitivity {
    double derivative = 0.0;
    double bump = 0.0;             ///< absolute step actually used
    bool one_sided = false;
    bool branch_crossing = false;  ///< a bump changed the regime kind
};

/// Central finite difference of closed_form(t) with respect to one parameter.
/// Falls back to a one-sided difference when a bump would cross a regime
/// boundary or leave the valid parameter domain.
Sensitivity sensitivity(const ModelParams& params, double t, SensitivityTarget target, double eps,
                        double tol_crit = kDefaultTolCrit);

struct RegimeMap {
    std::vector<double> alpha_grid;
    std::vector<double> b_grid;
    double n_max = 0.0;
    std::vector<std::vector<Regime>> cells;  ///< cells[i][j] for alpha_grid[i], b_grid[j]
};

RegimeMap regime_map(const std::vector<double>& alpha_grid, const std::vector<double>& b_grid, double n_max,
                     double tol_crit = kDefaultTolCrit);

struct StochasticSummary {
    std::vector<double> t_grid;
    std::vector<double> mean;
    std::vector<double> stderr_mean;
    std::size_t runs = 0;
};

/// Ensemble of exact (Gillespie) birth-death paths with birth rate
/// alpha (1 - N/n_max) and death rate b N (1 - N/n_max), whose mean-field
/// limit is the deterministic ODE. Each run draws from its own generator
/// seeded by (seed, run index), so results do not depend on thread count.
StochasticSummary simulate_stochastic(const ModelParams& params, const std::vector<double>& t_grid,
                                      std::size_t runs, std::uint64_t seed);

}  // namespace ipdyn
