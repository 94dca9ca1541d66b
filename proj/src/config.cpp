#include "coexist/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + section);
}

double require_number(const json& obj, const std::string& key, const std::string& section) {
    if (!obj.contains(key))
        throw ConfigError("config: missing key \"" + key + "\" in " + section);
    if (!obj[key].is_number())
        throw ConfigError("config: key \"" + key + "\" in " + section + " must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& section) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("config: key \"" + key + "\" in " + section + " must be a number");
    return obj[key].get<double>();
}

int int_or(const json& obj, const std::string& key, int fallback,
           const std::string& section) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config: key \"" + key + "\" in " + section + " must be an integer");
    return obj[key].get<int>();
}

std::string require_string(const json& obj, const std::string& key,
                           const std::string& section) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ConfigError("config: missing string key \"" + key + "\" in " + section);
    return obj[key].get<std::string>();
}

GridConfig parse_grid(const json& j) {
    GridConfig g;
    g.kind = require_string(j, "kind", "grid");
    if (g.kind == "interval") {
        reject_unknown_keys(j, {"kind", "n", "length"}, "grid");
        g.nx = int_or(j, "n", 0, "grid");
        g.length = require_number(j, "length", "grid");
        if (g.nx == 0) throw ConfigError("config: grid needs \"n\"");
    } else if (g.kind == "rectangle") {
        reject_unknown_keys(j, {"kind", "n", "nx", "ny", "lx", "ly"}, "grid");
        const int n = int_or(j, "n", 0, "grid");
        g.nx = int_or(j, "nx", n, "grid");
        g.ny = int_or(j, "ny", n, "grid");
        g.lx = require_number(j, "lx", "grid");
        g.ly = require_number(j, "ly", "grid");
        if (g.nx == 0 || g.ny == 0)
            throw ConfigError("config: rectangle grid needs \"n\" or \"nx\"/\"ny\"");
    } else {
        throw ConfigError("config: grid kind must be \"interval\" or \"rectangle\"");
    }
    return g;
}

ModelConfig parse_model(const json& j) {
    ModelConfig m;
    reject_unknown_keys(j, {"type", "a", "d", "params"}, "model");
    m.type = require_string(j, "type", "model");
    if (m.type != "classical_lv" && m.type != "nonlinear_demo")
        throw ConfigError("config: unknown model type \"" + m.type + "\"");
    m.a = require_number(j, "a", "model");
    m.d = require_number(j, "d", "model");
    if (!j.contains("params") || !j["params"].is_object())
        throw ConfigError("config: model needs a \"params\" object");

    const std::set<std::string> allowed = m.type == "classical_lv"
                                              ? std::set<std::string>{"b", "c", "e", "f"}
                                              : std::set<std::string>{"b", "c", "e", "f", "eps"};
    reject_unknown_keys(j["params"], allowed, "model.params");
    for (const auto& key : allowed) {
        if (key == "eps") continue; // optional
        m.params[key] = require_number(j["params"], key, "model.params");
    }
    if (m.type == "nonlinear_demo")
        m.params["eps"] = require_number(j["params"], "eps", "model.params");
    return m;
}

SolverConfig parse_solver(const json& j) {
    SolverConfig s;
    reject_unknown_keys(
        j, {"eig_tol", "log_tol", "sys_tol", "pos_tol", "eps_ratio", "max_outer"}, "solver");
    s.eig_tol = number_or(j, "eig_tol", s.eig_tol, "solver");
    s.log_tol = number_or(j, "log_tol", s.log_tol, "solver");
    s.sys_tol = number_or(j, "sys_tol", s.sys_tol, "solver");
    s.pos_tol = number_or(j, "pos_tol", s.pos_tol, "solver");
    s.eps_ratio = number_or(j, "eps_ratio", s.eps_ratio, "solver");
    s.max_outer = int_or(j, "max_outer", s.max_outer, "solver");
    if (!(s.eig_tol > 0) || !(s.log_tol > 0) || !(s.sys_tol > 0) || !(s.pos_tol > 0) ||
        !(s.eps_ratio > 0))
        throw ConfigError("config: solver tolerances must be positive");
    if (s.max_outer < 1) throw ConfigError("config: solver max_outer must be positive");
    return s;
}

RegionSpec parse_sweep(const json& j) {
    RegionSpec r;
    reject_unknown_keys(j, {"a_min", "a_max", "d_min", "d_max", "na", "nd"}, "sweep");
    r.a_min = require_number(j, "a_min", "sweep");
    r.a_max = require_number(j, "a_max", "sweep");
    r.d_min = require_number(j, "d_min", "sweep");
    r.d_max = require_number(j, "d_max", "sweep");
    r.na = int_or(j, "na", 2, "sweep");
    r.nd = int_or(j, "nd", 2, "sweep");
    validate(r);
    return r;
}

EvolveConfig parse_evolve(const json& j) {
    EvolveConfig e;
    reject_unknown_keys(j, {"dt", "t_final", "init", "amplitude", "seed"}, "evolve");
    e.dt = require_number(j, "dt", "evolve");
    e.t_end = require_number(j, "t_final", "evolve");
    if (j.contains("init")) e.init = require_string(j, "init", "evolve");
    if (e.init != "phi1" && e.init != "constant" && e.init != "random")
        throw ConfigError("config: evolve init must be phi1, constant or random");
    e.amplitude = number_or(j, "amplitude", e.amplitude, "evolve");
    if (!(e.amplitude > 0)) throw ConfigError("config: evolve amplitude must be positive");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw ConfigError("config: evolve seed must be a nonnegative integer");
        e.seed = j["seed"].get<unsigned long>();
    }
    return e;
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse failure in " + path + ": " + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    reject_unknown_keys(
        j, {"grid", "model", "solver", "sweep", "evolve", "eigen", "output", "threads"},
        "top level");

    RunConfig cfg;
    if (!j.contains("grid")) throw ConfigError("config: missing \"grid\" section");
    cfg.grid = parse_grid(j["grid"]);
    if (!j.contains("model")) throw ConfigError("config: missing \"model\" section");
    cfg.model = parse_model(j["model"]);
    if (j.contains("solver")) cfg.solver = parse_solver(j["solver"]);
    if (j.contains("sweep")) cfg.sweep = parse_sweep(j["sweep"]);
    if (j.contains("evolve")) cfg.evolve = parse_evolve(j["evolve"]);
    if (j.contains("eigen")) {
        reject_unknown_keys(j["eigen"], {"q_const"}, "eigen");
        cfg.eigen_q_const = number_or(j["eigen"], "q_const", 0.0, "eigen");
    }
    if (j.contains("output")) {
        reject_unknown_keys(j["output"], {"dir"}, "output");
        cfg.out_dir = require_string(j["output"], "dir", "output");
    }
    if (j.contains("threads")) {
        cfg.threads = int_or(j, "threads", 1, "top level");
        if (cfg.threads < 1) throw ConfigError("config: threads must be positive");
    }
    return cfg;
}

Grid RunConfig::build_grid() const {
    if (grid.kind == "interval") return Grid::interval(grid.length, grid.nx);
    return Grid::rectangle(grid.lx, grid.ly, grid.nx, grid.ny);
}

GrowthModel RunConfig::build_model() const {
    return build_model_family()(model.a, model.d);
}

ModelFamily RunConfig::build_model_family() const {
    const ModelConfig mc = model;
    if (mc.type == "classical_lv") {
        return [mc](double a, double d) {
            return classical_lv(a, mc.params.at("b"), mc.params.at("c"), d,
                                mc.params.at("e"), mc.params.at("f"));
        };
    }
    return [mc](double a, double d) {
        return nonlinear_demo(a, d, mc.params.at("b"), mc.params.at("c"),
                              mc.params.at("e"), mc.params.at("f"), mc.params.at("eps"));
    };
}

} // namespace coexist
