#include "ipdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ipdyn/errors.hpp"
#include "ipdyn/random.hpp"

namespace ipdyn {

namespace {

void require_increasing(const char* field, const std::vector<double>& grid, bool strict) {
    if (grid.empty()) throw InvalidInput(field, "must be nonempty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0) throw InvalidInput(field, "entries must be finite and >= 0");
        if (i > 0 && (strict ? !(grid[i] > grid[i - 1]) : grid[i] < grid[i - 1])) {
            throw InvalidInput(field, "must be increasing");
        }
    }
}

double& target_field(ModelParams& p, SensitivityTarget target) {
    switch (target) {
        case SensitivityTarget::Alpha: return p.alpha;
        case SensitivityTarget::B: return p.b;
        case SensitivityTarget::NMax: return p.n_max;
    }
    throw std::logic_error("unknown sensitivity target");
}

bool admissible(const ModelParams& p) {
    try {
        p.validate();
        return true;
    } catch (const InvalidInput&) {
        return false;
    }
}

// Running mean and sum of squared deviations (Welford), mergeable in a fixed order.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0.0) return;
        const double total = count + o.count;
        const double d = o.mean - mean;
        mean += d * o.count / total;
        m2 += o.m2 + d * d * count * o.count / total;
        count = total;
    }
};

constexpr std::size_t kRunsPerBlock = 64;

// One exact birth-death path sampled on t_grid (right-continuous state).
void gillespie_path(const ModelParams& p, const std::vector<double>& t_grid, std::mt19937_64& rng,
                    std::vector<Moments>& acc) {
    const double m = p.n_max;
    double n = p.n0;
    double t = 0.0;
    std::size_t j = 0;
    while (j < t_grid.size()) {
        const double damping = 1.0 - n / m;
        const double birth = p.alpha * damping;
        const double death = p.b * n * damping;
        if (birth < 0.0 || death < 0.0) {
            throw std::logic_error("simulate_stochastic: negative event rate at N=" + std::to_string(n));
        }
        const double total = birth + death;
        const double t_next = total > 0.0 ? t + detail::standard_exponential(rng) / total
                                          : std::numeric_limits<double>::infinity();
        while (j < t_grid.size() && t_grid[j] < t_next) acc[j++].add(n);
        if (j == t_grid.size()) break;
        t = t_next;
        n += (detail::uniform01(rng) * total < birth) ? 1.0 : -1.0;
    }
}

}  // namespace

ComparisonTable compare_levels(const ModelParams& base, const std::vector<double>& b_values,
                               const std::vector<double>& t_grid) {
    base.validate();
    if (b_values.empty()) throw InvalidInput("b_values", "must be nonempty");
    for (double b : b_values) {
        if (!std::isfinite(b) || b < 0.0) throw InvalidInput("b_values", "entries must be finite and >= 0");
    }
    require_increasing("t_grid", t_grid, true);

    ComparisonTable table{b_values, t_grid, {}};
    table.values.reserve(b_values.size());
    for (double b : b_values) {
        const ModelParams p = base.with_b(b);
        std::vector<double> row;
        row.reserve(t_grid.size());
        for (double t : t_grid) row.push_back(closed_form(p, t));
        table.values.push_back(std::move(row));
    }
    return table;
}

SensitivityTarget parse_sensitivity_target(std::string_view name) {
    if (name == "alpha") return SensitivityTarget::Alpha;
    if (name == "b") return SensitivityTarget::B;
    if (name == "n_max") return SensitivityTarget::NMax;
    throw InvalidInput("target", "must be one of alpha, b, n_max");
}

Sensitivity sensitivity(const ModelParams& params, double t, SensitivityTarget target, double eps, double tol_crit) {
    params.validate();
    if (!(eps >= 1e-8 && eps <= 1e-2)) throw InvalidInput("eps", "must lie in [1e-8, 1e-2]");
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("t", "must be finite and >= 0");

    ModelParams plus = params;
    ModelParams minus = params;
    double& x = target_field(plus, target);
    const double h = x != 0.0 ? eps * std::abs(x) : eps;
    x += h;
    target_field(minus, target) -= h;

    const RegimeKind kind = classify_regime(params, tol_crit).kind;
    const bool plus_valid = admissible(plus);
    const bool minus_valid = admissible(minus);
    const bool plus_same = plus_valid && classify_regime(plus, tol_crit).kind == kind;
    const bool minus_same = minus_valid && classify_regime(minus, tol_crit).kind == kind;

    Sensitivity s;
    s.bump = h;
    s.branch_crossing = (plus_valid && !plus_same) || (minus_valid && !minus_same);

    const double centre = closed_form(params, t, tol_crit);
    if (plus_same && minus_same) {
        s.derivative = (closed_form(plus, t, tol_crit) - closed_form(minus, t, tol_crit)) / (2.0 * h);
    } else if (plus_same || (!minus_same && plus_valid)) {
        s.one_sided = true;
        s.derivative = (closed_form(plus, t, tol_crit) - centre) / h;
    } else if (minus_valid) {
        s.one_sided = true;
        s.derivative = (centre - closed_form(minus, t, tol_crit)) / h;
    } else {
        throw InvalidInput("eps", "no admissible bump around the given parameters");
    }
    return s;
}

RegimeMap regime_map(const std::vector<double>& alpha_grid, const std::vector<double>& b_grid, double n_max,
                     double tol_crit) {
    if (alpha_grid.empty()) throw InvalidInput("alpha_grid", "must be nonempty");
    if (b_grid.empty()) throw InvalidInput("b_grid", "must be nonempty");

    RegimeMap map{alpha_grid, b_grid, n_max, {}};
    for (double alpha : alpha_grid) {
        std::vector<Regime> row;
        row.reserve(b_grid.size());
        for (double b : b_grid) row.push_back(classify_regime({alpha, b, n_max, 0.0}, tol_crit));
        map.cells.push_back(std::move(row));
    }
    return map;
}

StochasticSummary simulate_stochastic(const ModelParams& params, const std::vector<double>& t_grid, std::size_t runs,
                                      std::uint64_t seed) {
    params.validate();
    if (std::floor(params.n_max) != params.n_max) throw InvalidInput("n_max", "must be integral for the stochastic model");
    if (std::floor(params.n0) != params.n0) throw InvalidInput("n0", "must be integral for the stochastic model");
    if (runs < 1) throw InvalidInput("runs", "must be >= 1");
    require_increasing("t_grid", t_grid, false);

    const std::size_t n_blocks = (runs + kRunsPerBlock - 1) / kRunsPerBlock;
    std::vector<std::vector<Moments>> blocks(n_blocks, std::vector<Moments>(t_grid.size()));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](std::size_t first_block, std::size_t stride) {
        try {
            for (std::size_t blk = first_block; blk < n_blocks; blk += stride) {
                const std::size_t end = std::min(runs, (blk + 1) * kRunsPerBlock);
                for (std::size_t run = blk * kRunsPerBlock; run < end; ++run) {
                    auto rng = detail::make_rng(seed, run);
                    gillespie_path(params, t_grid, rng, blocks[blk]);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(n_blocks, 16));
    if (n_threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(work, i, n_threads);
    }
    if (failure) std::rethrow_exception(failure);

    StochasticSummary out{t_grid, {}, {}, runs};
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        Moments total;
        for (const auto& blk : blocks) total.merge(blk[j]);
        out.mean.push_back(total.mean);
        const double var = runs > 1 ? total.m2 / static_cast<double>(runs - 1) : 0.0;
        out.stderr_mean.push_back(std::sqrt(var / static_cast<double>(runs)));
    }
    return out;
}

}  // namespace ipdyn
