#include "ipdyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ipdyn/errors.hpp"

namespace ipdyn {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw InvalidInput(path.empty() ? "scenario" : path, "must be a JSON object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidInput(join(path, key), "unknown key");
        }
    }
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw InvalidInput(path, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InvalidInput(path, "must be finite");
    return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) throw InvalidInput(path, "must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw InvalidInput(path, "must be true or false");
    return j.get<bool>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw InvalidInput(path, "must be a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Interval interval(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw InvalidInput(path, "must be a [lo, hi] pair");
    Interval iv{number(j[0], path + "[0]"), number(j[1], path + "[1]")};
    if (iv.lo > iv.hi) throw InvalidInput(path, "lo must not exceed hi");
    return iv;
}

template <typename Fn>
void if_present(const json& obj, std::string_view key, Fn&& fn) {
    const auto it = obj.find(key);
    if (it != obj.end()) fn(*it);
}

// Re-raises a module-level validation error under the scenario path.
template <typename Fn>
void validated(const std::string& path, Fn&& fn) {
    try {
        fn();
    } catch (const InvalidInput& e) {
        const std::string what = e.what();
        throw InvalidInput(join(path, e.field()), what.substr(e.field().size() + 2));
    }
}

ModelParams parse_model(const json& j) {
    const std::string path = "model";
    require_object(j, path);
    reject_unknown(j, path, {"alpha", "b", "n_max", "n0"});
    ModelParams p;
    for (auto [key, field] : {std::pair{"alpha", &p.alpha}, {"b", &p.b}, {"n_max", &p.n_max}}) {
        if (!j.contains(key)) throw InvalidInput(join(path, key), "missing");
        *field = number(j.at(key), join(path, key));
    }
    if_present(j, "n0", [&](const json& v) { p.n0 = number(v, "model.n0"); });
    validated(path, [&] { p.validate(); });
    return p;
}

RunSection parse_run(const json& j) {
    const std::string path = "run";
    require_object(j, path);
    reject_unknown(j, path, {"t_end", "step", "method", "rel_tol", "abs_tol", "max_steps", "tol_crit"});
    RunSection r;
    if_present(j, "t_end", [&](const json& v) { r.t_end = number(v, "run.t_end"); });
    if_present(j, "step", [&](const json& v) { r.integrator.step = number(v, "run.step"); });
    if_present(j, "rel_tol", [&](const json& v) { r.integrator.rel_tol = number(v, "run.rel_tol"); });
    if_present(j, "abs_tol", [&](const json& v) { r.integrator.abs_tol = number(v, "run.abs_tol"); });
    if_present(j, "max_steps", [&](const json& v) { r.integrator.max_steps = unsigned_integer(v, "run.max_steps"); });
    if_present(j, "tol_crit", [&](const json& v) { r.tol_crit = number(v, "run.tol_crit"); });
    if_present(j, "method", [&](const json& v) {
        if (!v.is_string() || (v != "rk4" && v != "adaptive")) {
            throw InvalidInput("run.method", "must be \"rk4\" or \"adaptive\"");
        }
        r.method = v.get<std::string>();
    });
    if (!(r.t_end > 0.0)) throw InvalidInput("run.t_end", "must be > 0");
    if (!(r.tol_crit > 0.0 && r.tol_crit <= 0.1)) throw InvalidInput("run.tol_crit", "must lie in (0, 0.1]");
    validated(path, [&] { r.integrator.validate(); });
    return r;
}

FitSection parse_fit(const json& j, const std::filesystem::path& base_dir) {
    const std::string path = "fit";
    require_object(j, path);
    reject_unknown(j, path, {"data", "bounds", "fit_n0", "starts", "seed", "max_evaluations"});
    FitSection f;
    if (!j.contains("data") || !j.at("data").is_string()) throw InvalidInput("fit.data", "must be a path string");
    f.data = j.at("data").get<std::string>();
    if (f.data.is_relative()) f.data = base_dir / f.data;
    if_present(j, "bounds", [&](const json& b) {
        require_object(b, "fit.bounds");
        reject_unknown(b, "fit.bounds", {"alpha", "b", "n_max", "n0"});
        if_present(b, "alpha", [&](const json& v) { f.alpha = interval(v, "fit.bounds.alpha"); });
        if_present(b, "b", [&](const json& v) { f.b = interval(v, "fit.bounds.b"); });
        if_present(b, "n_max", [&](const json& v) { f.n_max = interval(v, "fit.bounds.n_max"); });
        if_present(b, "n0", [&](const json& v) { f.n0 = interval(v, "fit.bounds.n0"); });
    });
    if_present(j, "fit_n0", [&](const json& v) { f.options.fit_n0 = boolean(v, "fit.fit_n0"); });
    if_present(j, "starts", [&](const json& v) { f.options.starts = unsigned_integer(v, "fit.starts"); });
    if_present(j, "seed", [&](const json& v) { f.options.seed = unsigned_integer(v, "fit.seed"); });
    if_present(j, "max_evaluations",
               [&](const json& v) { f.options.max_evaluations_per_start = unsigned_integer(v, "fit.max_evaluations"); });
    if (f.options.starts < 1) throw InvalidInput("fit.starts", "must be >= 1");
    return f;
}

PolicySection parse_policy(const json& j) {
    const std::string path = "policy";
    require_object(j, path);
    reject_unknown(j, path, {"c_protect", "c_infringe", "horizon", "segments", "b_range", "grid_points", "seed"});
    PolicySection p;
    for (auto [key, field] : {std::pair{"c_protect", &p.cost.c_protect}, {"c_infringe", &p.cost.c_infringe},
                              {"horizon", &p.cost.horizon}}) {
        if (!j.contains(key)) throw InvalidInput(join(path, key), "missing");
        *field = number(j.at(key), join(path, key));
    }
    if (!j.contains("b_range")) throw InvalidInput("policy.b_range", "missing");
    p.b_range = interval(j.at("b_range"), "policy.b_range");
    if (p.b_range.lo < 0.0) throw InvalidInput("policy.b_range", "lower bound must be >= 0");
    if_present(j, "segments", [&](const json& v) { p.segments = unsigned_integer(v, "policy.segments"); });
    if_present(j, "grid_points", [&](const json& v) { p.grid_points = unsigned_integer(v, "policy.grid_points"); });
    if_present(j, "seed", [&](const json& v) { p.seed = unsigned_integer(v, "policy.seed"); });
    if (p.segments < 1) throw InvalidInput("policy.segments", "must be >= 1");
    if (p.grid_points < 3) throw InvalidInput("policy.grid_points", "must be >= 3");
    validated(path, [&] { p.cost.validate(); });
    return p;
}

void require_sorted(const std::vector<double>& v, const std::string& path) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) throw InvalidInput(path, "entries must be >= 0");
        if (i > 0 && !(v[i] > v[i - 1])) throw InvalidInput(path, "must be strictly increasing");
    }
}

SweepSection parse_sweep(const json& j) {
    const std::string path = "sweep";
    require_object(j, path);
    reject_unknown(j, path, {"alpha", "b", "n_max", "t_grid"});
    SweepSection s;
    for (auto [key, field] : {std::pair{"alpha", &s.alpha}, {"b", &s.b}}) {
        if (!j.contains(key)) throw InvalidInput(join(path, key), "missing");
        *field = number_list(j.at(key), join(path, key));
        require_sorted(*field, join(path, key));
    }
    if_present(j, "n_max", [&](const json& v) {
        s.n_max = number_list(v, "sweep.n_max");
        require_sorted(s.n_max, "sweep.n_max");
        if (s.n_max.front() <= 0.0) throw InvalidInput("sweep.n_max", "entries must be > 0");
    });
    if_present(j, "t_grid", [&](const json& v) {
        s.t_grid = number_list(v, "sweep.t_grid");
        require_sorted(s.t_grid, "sweep.t_grid");
    });
    return s;
}

StochasticSection parse_stochastic(const json& j) {
    const std::string path = "stochastic";
    require_object(j, path);
    reject_unknown(j, path, {"runs", "seed", "t_grid"});
    StochasticSection s;
    if_present(j, "runs", [&](const json& v) { s.runs = unsigned_integer(v, "stochastic.runs"); });
    if_present(j, "seed", [&](const json& v) { s.seed = unsigned_integer(v, "stochastic.seed"); });
    if (!j.contains("t_grid")) throw InvalidInput("stochastic.t_grid", "missing");
    s.t_grid = number_list(j.at("t_grid"), "stochastic.t_grid");
    require_sorted(s.t_grid, "stochastic.t_grid");
    if (s.runs < 1) throw InvalidInput("stochastic.runs", "must be >= 1");
    return s;
}

std::string position_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

const ModelParams& Scenario::require_model() const {
    if (!model) throw InvalidInput("model", "section is required for this subcommand");
    return *model;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InvalidInput("scenario", "malformed JSON at " + position_of(text, e.byte));
    }
    require_object(root, "");
    reject_unknown(root, "", {"model", "run", "fit", "policy", "sweep", "stochastic"});

    Scenario s;
    if_present(root, "model", [&](const json& v) { s.model = parse_model(v); });
    if_present(root, "run", [&](const json& v) { s.run = parse_run(v); });
    if_present(root, "fit", [&](const json& v) { s.fit = parse_fit(v, base_dir); });
    if_present(root, "policy", [&](const json& v) { s.policy = parse_policy(v); });
    if_present(root, "sweep", [&](const json& v) { s.sweep = parse_sweep(v); });
    if_present(root, "stochastic", [&](const json& v) { s.stochastic = parse_stochastic(v); });
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("scenario", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

Trajectory read_observations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("fit.data", "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != "t,N") throw InvalidInput("fit.data", "header must be exactly t,N");

    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = "line " + std::to_string(line_no);
        const auto comma = line.find(',');
        if (line.empty() || comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw InvalidInput("fit.data", where + ": expected two comma-separated numbers");
        }
        try {
            std::size_t used_t = 0;
            std::size_t used_n = 0;
            const std::string t_text = line.substr(0, comma);
            const std::string n_text = line.substr(comma + 1);
            const double t = std::stod(t_text, &used_t);
            const double n = std::stod(n_text, &used_n);
            if (used_t != t_text.size() || used_n != n_text.size()) throw std::invalid_argument("trailing characters");
            times.push_back(t);
            values.push_back(n);
        } catch (const std::logic_error&) {
            throw InvalidInput("fit.data", where + ": expected two comma-separated numbers");
        }
    }
    try {
        return Trajectory(std::move(times), std::move(values), {"observed", std::nullopt});
    } catch (const InvalidInput& e) {
        throw InvalidInput("fit.data", e.what());
    }
}

}  // namespace ipdyn
