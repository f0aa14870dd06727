#include "ipdyn/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ipdyn/analysis.hpp"
#include "ipdyn/calibration.hpp"
#include "ipdyn/errors.hpp"
#include "ipdyn/integrator.hpp"
#include "ipdyn/policy.hpp"
#include "ipdyn/scenario.hpp"

namespace ipdyn {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Invocation {
    std::string command;
    fs::path scenario;
    fs::path out_dir = ".";
    std::optional<std::uint64_t> seed;
};

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// JSON numbers carry the same 12 significant digits as the CSV files.
ojson num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(g12(v).c_str(), nullptr);
}

ojson num(const std::optional<double>& v) { return v ? num(*v) : ojson(nullptr); }

ojson num_array(const std::vector<double>& vs) {
    ojson a = ojson::array();
    for (double v : vs) a.push_back(num(v));
    return a;
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("out", "cannot write " + path.string());
    f << bytes;
}

void write_json(const fs::path& path, const ojson& j) { write_file(path, j.dump(2) + "\n"); }

ojson params_json(const ModelParams& p) {
    return {{"alpha", num(p.alpha)}, {"b", num(p.b)}, {"n_max", num(p.n_max)}, {"n0", num(p.n0)}};
}

void cmd_simulate(const Scenario& sc, const Invocation& inv) {
    const ModelParams& p = sc.require_model();
    const RunSection& run = sc.run;
    const Trajectory traj = run.method == "adaptive" ? integrate_adaptive(p, run.t_end, run.integrator)
                                                     : integrate(p, run.t_end, run.integrator);

    std::string csv = "t,N,dN_dt\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double n = traj.values()[i];
        csv += g12(traj.times()[i]) + "," + g12(n) + "," + g12(rhs(p, n)) + "\n";
    }
    write_file(inv.out_dir / "trajectory.csv", csv);

    const Regime regime = classify_regime(p, run.tol_crit);
    ojson eq = ojson::array();
    for (const Equilibrium& e : equilibria(p, run.tol_crit)) {
        eq.push_back({{"value", num(e.value)}, {"stability", std::string(to_string(e.stability))}});
    }
    const ojson summary = {
        {"regime", std::string(to_string(regime.kind))},
        {"limit", num(regime.limit)},
        {"lambda", num(regime.lambda)},
        {"settling_time_95", num(settling_time(p, 0.95, run.tol_crit))},
        {"stationary", regime.stationary},
        {"equilibria", eq},
        {"final_N", num(traj.back_value())},
    };
    write_json(inv.out_dir / "summary.json", summary);
}

const SweepSection& require_sweep(const Scenario& sc) {
    if (!sc.sweep) throw InvalidInput("sweep", "section is required for this subcommand");
    return *sc.sweep;
}

void cmd_analyze(const Scenario& sc, const Invocation& inv) {
    const ModelParams& p = sc.require_model();
    const SweepSection& sw = require_sweep(sc);
    const double tol = sc.run.tol_crit;

    const RegimeMap map = regime_map(sw.alpha, sw.b, p.n_max, tol);
    std::string csv = "alpha,b,n_max,regime,limit,lambda\n";
    for (std::size_t i = 0; i < map.alpha_grid.size(); ++i) {
        for (std::size_t j = 0; j < map.b_grid.size(); ++j) {
            const Regime& r = map.cells[i][j];
            csv += g12(map.alpha_grid[i]) + "," + g12(map.b_grid[j]) + "," + g12(p.n_max) + "," +
                   std::string(to_string(r.kind)) + "," + g12(r.limit) + "," + g12(r.lambda) + "\n";
        }
    }
    write_file(inv.out_dir / "regime_map.csv", csv);

    const std::vector<double> t_grid = sw.t_grid.empty() ? std::vector<double>{0.0, sc.run.t_end} : sw.t_grid;
    const ComparisonTable table = compare_levels(p, sw.b, t_grid);
    csv = "b,t,N\n";
    for (std::size_t i = 0; i < table.b_values.size(); ++i) {
        for (std::size_t j = 0; j < table.t_grid.size(); ++j) {
            csv += g12(table.b_values[i]) + "," + g12(table.t_grid[j]) + "," + g12(table.values[i][j]) + "\n";
        }
    }
    write_file(inv.out_dir / "compare.csv", csv);

    csv = "b,t,target,derivative,bump,one_sided,branch_crossing\n";
    for (double b : sw.b) {
        for (double t : t_grid) {
            for (const char* name : {"alpha", "b", "n_max"}) {
                const Sensitivity s = sensitivity(p.with_b(b), t, parse_sensitivity_target(name), 1e-5, tol);
                csv += g12(b) + "," + g12(t) + "," + name + "," + g12(s.derivative) + "," + g12(s.bump) + "," +
                       (s.one_sided ? "1" : "0") + "," + (s.branch_crossing ? "1" : "0") + "\n";
            }
        }
    }
    write_file(inv.out_dir / "sensitivity.csv", csv);
}

ojson interval_json(const Interval& iv) { return ojson::array({num(iv.lo), num(iv.hi)}); }

void cmd_fit(const Scenario& sc, const Invocation& inv) {
    if (!sc.fit) throw InvalidInput("fit", "section is required for this subcommand");
    const FitSection& fs = *sc.fit;
    const Trajectory obs = read_observations(fs.data);

    ParamBounds bounds = default_bounds(obs.values());
    if (fs.alpha) bounds.alpha = *fs.alpha;
    if (fs.b) bounds.b = *fs.b;
    if (fs.n_max) bounds.n_max = *fs.n_max;
    if (fs.n0) bounds.n0 = *fs.n0;
    FitOptions opts = fs.options;
    if (inv.seed) opts.seed = *inv.seed;

    FitResult r;
    try {
        r = fit(obs, bounds, opts);
    } catch (const InvalidInput& e) {
        throw InvalidInput("fit." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }

    ojson bj = {{"alpha", interval_json(r.bounds.alpha)}, {"b", interval_json(r.bounds.b)},
                {"n_max", interval_json(r.bounds.n_max)}};
    if (opts.fit_n0) bj["n0"] = interval_json(r.bounds.n0);
    const Regime regime = classify_regime(r.params);
    const ojson out = {
        {"params", params_json(r.params)},
        {"rss", num(r.rss)},
        {"n_evals", r.n_evals},
        {"converged", r.converged},
        {"low_confidence", r.low_confidence},
        {"degenerate", r.degenerate},
        {"regime", std::string(to_string(regime.kind))},
        {"limit", num(regime.limit)},
        {"bounds", bj},
    };
    write_json(inv.out_dir / "fit.json", out);
}

void cmd_optimize(const Scenario& sc, const Invocation& inv) {
    const ModelParams& p = sc.require_model();
    if (!sc.policy) throw InvalidInput("policy", "section is required for this subcommand");
    const PolicySection& pol = *sc.policy;
    ScheduleOptions opts;
    opts.grid_points = pol.grid_points;
    const ScheduleOptimum best =
        optimize_schedule(p, pol.cost, pol.segments, pol.b_range, inv.seed.value_or(pol.seed), opts);
    const ojson out = {
        {"breakpoints", num_array(best.schedule.breakpoints)},
        {"levels", num_array(best.schedule.levels)},
        {"cost", num(best.cost)},
    };
    write_json(inv.out_dir / "schedule.json", out);
}

void cmd_sweep(const Scenario& sc, const Invocation& inv) {
    const SweepSection& sw = require_sweep(sc);
    const double n0 = sc.model ? sc.model->n0 : 0.0;
    std::vector<double> n_max_grid = sw.n_max;
    if (n_max_grid.empty()) n_max_grid.push_back(sc.require_model().n_max);
    const double t_end = sc.run.t_end;
    const double tol = sc.run.tol_crit;

    std::string csv = "alpha,b,n_max,regime,limit,lambda,settling_time_95,N_t_end\n";
    for (double alpha : sw.alpha) {
        for (double b : sw.b) {
            for (double n_max : n_max_grid) {
                const ModelParams p{alpha, b, n_max, n0};
                try {
                    p.validate();
                } catch (const InvalidInput& e) {
                    throw InvalidInput("sweep." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
                }
                const Regime r = classify_regime(p, tol);
                const auto settle = settling_time(p, 0.95, tol);
                csv += g12(alpha) + "," + g12(b) + "," + g12(n_max) + "," + std::string(to_string(r.kind)) + "," +
                       g12(r.limit) + "," + g12(r.lambda) + "," + (settle ? g12(*settle) : std::string("inf")) +
                       "," + g12(closed_form(p, t_end, tol)) + "\n";
            }
        }
    }
    write_file(inv.out_dir / "sweep.csv", csv);
}

void cmd_stochastic(const Scenario& sc, const Invocation& inv) {
    const ModelParams& p = sc.require_model();
    if (!sc.stochastic) throw InvalidInput("stochastic", "section is required for this subcommand");
    const StochasticSection& st = *sc.stochastic;
    StochasticSummary s;
    try {
        s = simulate_stochastic(p, st.t_grid, st.runs, inv.seed.value_or(st.seed));
    } catch (const InvalidInput& e) {
        throw InvalidInput("model." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    std::string csv = "t,mean_N,stderr_N\n";
    for (std::size_t i = 0; i < s.t_grid.size(); ++i) {
        csv += g12(s.t_grid[i]) + "," + g12(s.mean[i]) + "," + g12(s.stderr_mean[i]) + "\n";
    }
    write_file(inv.out_dir / "stochastic.csv", csv);
}

void dispatch(const Invocation& inv) {
    const Scenario sc = load_scenario(inv.scenario);
    std::error_code ec;
    fs::create_directories(inv.out_dir, ec);
    if (ec) throw InvalidInput("out", "cannot create " + inv.out_dir.string());

    if (inv.command == "simulate") return cmd_simulate(sc, inv);
    if (inv.command == "analyze") return cmd_analyze(sc, inv);
    if (inv.command == "fit") return cmd_fit(sc, inv);
    if (inv.command == "optimize") return cmd_optimize(sc, inv);
    if (inv.command == "sweep") return cmd_sweep(sc, inv);
    if (inv.command == "stochastic") return cmd_stochastic(sc, inv);
    throw InvalidInput("subcommand", "unknown subcommand " + inv.command);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Infringement dynamics: simulation, analysis, calibration and policy optimization"};
    app.name("ipdyn");
    app.require_subcommand(1);

    Invocation inv;
    std::string scenario;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"simulate", "Integrate the model; write trajectory.csv and summary.json"},
        {"analyze", "Regime map, comparative statics and sensitivities as CSV"},
        {"fit", "Calibrate parameters from a t,N observation CSV; write fit.json"},
        {"optimize", "Optimize a piecewise-constant protection schedule; write schedule.json"},
        {"sweep", "One summary row per parameter-grid cell; write sweep.csv"},
        {"stochastic", "Birth-death ensemble mean and standard error; write stochastic.csv"},
    };
    std::vector<CLI::App*> subs;
    CLI::Option* seed_opt = nullptr;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", scenario, "Scenario JSON file")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Seed override for the scenario's random streams");
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    for (CLI::App* sub : subs) {
        if (sub->parsed()) {
            inv.command = sub->get_name();
            seed_opt = sub->get_option("--seed");
        }
    }
    inv.scenario = scenario;
    inv.out_dir = out_dir;
    if (seed_opt != nullptr && seed_opt->count() > 0) inv.seed = seed;

    try {
        dispatch(inv);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalFailure& e) {
        err << "numerical failure in " << inv.command << ": " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace ipdyn
