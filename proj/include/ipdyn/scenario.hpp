#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipdyn/calibration.hpp"
#include "ipdyn/integrator.hpp"
#include "ipdyn/model.hpp"
#include "ipdyn/policy.hpp"

namespace ipdyn {

struct RunSection {
    double t_end = 10.0;
    std::string method = "rk4";  ///< "rk4" or "adaptive"
    IntegratorConfig integrator;
    double tol_crit = kDefaultTolCrit;
};

struct FitSection {
    std::filesystem::path data;  ///< relative paths resolve against the scenario file
    std::optional<Interval> alpha;
    std::optional<Interval> b;
    std::optional<Interval> n_max;
    std::optional<Interval> n0;
    FitOptions options;
};

struct PolicySection {
    CostSpec cost;
    std::size_t segments = 1;
    Interval b_range{0.0, 1.0};
    std::size_t grid_points = 41;
    std::uint64_t seed = 0;
};

struct SweepSection {
    std::vector<double> alpha;
    std::vector<double> b;
    std::vector<double> n_max;
    std::vector<double> t_grid;
};

struct StochasticSection {
    std::size_t runs = 1000;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;
};

/// A validated scenario file. Unknown keys and out-of-domain values are
/// rejected with InvalidInput naming the dotted field path.
struct Scenario {
    std::optional<ModelParams> model;
    RunSection run;
    std::optional<FitSection> fit;
    std::optional<PolicySection> policy;
    std::optional<SweepSection> sweep;
    std::optional<StochasticSection> stochastic;

    const ModelParams& require_model() const;
};

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Observation CSV: header exactly `t,N`, one sample per line, no blank lines.
Trajectory read_observations(const std::filesystem::path& path);

}  // namespace ipdyn
