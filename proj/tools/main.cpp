#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coexist/conditions.hpp"
#include "coexist/config.hpp"
#include "coexist/errors.hpp"
#include "coexist/field_io.hpp"
#include "coexist/linops.hpp"
#include "coexist/logistic.hpp"
#include "coexist/parabolic.hpp"
#include "coexist/sweep.hpp"

namespace {

using coexist::RunConfig;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir_override;
    int threads_override = 0;
};

std::string resolve_out_dir(const RunConfig& cfg, const CommonArgs& args) {
    const std::string dir = args.out_dir_override.empty() ? cfg.out_dir : args.out_dir_override;
    std::filesystem::create_directories(dir);
    return dir;
}

int run_eigen(const RunConfig& cfg, const CommonArgs& args) {
    const coexist::Grid grid = cfg.build_grid();
    coexist::EigenOptions eo;
    eo.eig_tol = cfg.solver.eig_tol;
    const coexist::EigenResult eig =
        coexist::principal_eigenpair(grid, coexist::ScalarField(grid, cfg.eigen_q_const), eo);

    const std::string dir = resolve_out_dir(cfg, args);
    coexist::write_field_csv(dir + "/phi1.csv", eig.phi1);

    std::cout << "lambda1=" << coexist::format_full(eig.lambda1) << "\n";
    json j;
    j["command"] = "eigen";
    j["lambda1"] = eig.lambda1;
    j["iterations"] = eig.iterations;
    j["residual"] = eig.residual;
    j["phi1_csv"] = dir + "/phi1.csv";
    std::cout << j.dump() << "\n";
    return 0;
}

int run_logistic(const RunConfig& cfg, const CommonArgs& args) {
    const coexist::Grid grid = cfg.build_grid();
    const coexist::GrowthModel m = cfg.build_model();
    const coexist::Thresholds t = coexist::compute_thresholds(m);

    // The u-species logistic profile with no competitor present.
    coexist::ScalarGrowth fg;
    fg.f = [&m](double z) { return m.a - m.g(z, 0.0); };
    fg.f_prime = [&m](double z) { return -m.gu(z, 0.0); };
    fg.c0 = t.k1;

    coexist::LogisticOptions lo;
    lo.log_tol = cfg.solver.log_tol;
    lo.eig_tol = cfg.solver.eig_tol;
    const coexist::Theta theta = coexist::solve_logistic(grid, fg, lo);

    const std::string dir = resolve_out_dir(cfg, args);
    coexist::write_field_csv(dir + "/theta.csv", theta.field);

    json j;
    j["command"] = "logistic";
    j["is_zero"] = theta.is_zero;
    j["max_theta"] = coexist::max_value(theta.field);
    j["residual"] = theta.residual;
    j["iterations"] = theta.iterations;
    j["theta_csv"] = dir + "/theta.csv";
    std::cout << j.dump() << "\n";
    return 0;
}

int run_solve(const RunConfig& cfg, const CommonArgs& args) {
    const coexist::Grid grid = cfg.build_grid();
    const coexist::GrowthModel m = cfg.build_model();
    const coexist::Thresholds t = coexist::compute_thresholds(m);
    const coexist::Brackets br = coexist::super_sub_pair(m, t, grid, cfg.solver.log_tol);

    coexist::MonotoneOptions mo;
    mo.sys_tol = cfg.solver.sys_tol;
    mo.max_outer = cfg.solver.max_outer;
    const coexist::SteadyState up =
        coexist::monotone_solve(m, grid, br, coexist::StartCorner::FromUpper, mo);
    const coexist::SteadyState low =
        coexist::monotone_solve(m, grid, br, coexist::StartCorner::FromLower, mo);

    double gap = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        gap = std::max(gap, std::fabs(up.u[i] - low.u[i]));
        gap = std::max(gap, std::fabs(up.v[i] - low.v[i]));
    }

    const coexist::InvertibilityResult inv = coexist::invertibility_check(m, t, up);

    const std::string dir = resolve_out_dir(cfg, args);
    coexist::write_field_csv(dir + "/u.csv", up.u);
    coexist::write_field_csv(dir + "/v.csv", up.v);

    json j;
    j["command"] = "solve";
    j["residual_u"] = up.residual_u;
    j["residual_v"] = up.residual_v;
    j["iterations"] = up.iterations + low.iterations;
    j["corner_agreement"] = gap;
    j["condition_holds"] = inv.condition_holds;
    if (inv.sigma_min)
        j["sigma_min"] = *inv.sigma_min;
    else
        j["sigma_min"] = nullptr;
    std::cout << j.dump() << "\n";
    return 0;
}

int run_check(const RunConfig& cfg, const CommonArgs&) {
    const coexist::Grid grid = cfg.build_grid();
    const coexist::GrowthModel m = cfg.build_model();
    const coexist::Thresholds t = coexist::compute_thresholds(m);

    coexist::ConditionOptions co;
    co.log_tol = cfg.solver.log_tol;
    co.eig_tol = cfg.solver.eig_tol;
    co.eps_ratio = cfg.solver.eps_ratio;
    const coexist::ConditionReport report = coexist::condition_report(m, t, grid, co);

    std::cout << report.to_json() << "\n";
    if (report.find("nonexistence_C").holds) return 2;
    if (report.find("existence_A").holds) return 0;
    return 1;
}

int run_sweep(const RunConfig& cfg, const CommonArgs& args) {
    if (!cfg.sweep)
        throw coexist::ConfigError("config: sweep command needs a \"sweep\" section");
    const coexist::Grid grid = cfg.build_grid();

    coexist::SweepOptions so;
    so.sys_tol = cfg.solver.sys_tol;
    so.log_tol = cfg.solver.log_tol;
    so.pos_tol = cfg.solver.pos_tol;
    so.max_outer = cfg.solver.max_outer;
    so.threads = args.threads_override > 0 ? args.threads_override : cfg.threads;

    const coexist::RegionMap map =
        coexist::sweep_region(*cfg.sweep, cfg.build_model_family(), grid, so);

    const std::string dir = resolve_out_dir(cfg, args);
    const std::string csv_path = dir + "/region.csv";
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw coexist::ConfigError("cannot open output file: " + csv_path);
        os << map.to_csv();
    }

    int counts[5] = {0, 0, 0, 0, 0};
    for (const auto& p : map.points) counts[static_cast<int>(p.cls)]++;
    json j;
    j["command"] = "sweep";
    j["points"] = map.points.size();
    j["coexist"] = counts[0];
    j["extinct_u"] = counts[1];
    j["extinct_v"] = counts[2];
    j["extinct_both"] = counts[3];
    j["failed"] = counts[4];
    j["region_csv"] = csv_path;
    std::cout << j.dump() << "\n";
    return 0;
}

int run_evolve(const RunConfig& cfg, const CommonArgs& args) {
    if (!cfg.evolve)
        throw coexist::ConfigError("config: evolve command needs an \"evolve\" section");
    const coexist::Grid grid = cfg.build_grid();
    const coexist::GrowthModel m = cfg.build_model();
    const coexist::EvolveConfig& ec = *cfg.evolve;

    coexist::ScalarField u0(grid), v0(grid);
    if (ec.init == "phi1") {
        const coexist::EigenResult eig =
            coexist::principal_eigenpair(grid, coexist::ScalarField(grid, 0.0));
        for (int i = 0; i < grid.size(); ++i) u0[i] = v0[i] = ec.amplitude * eig.phi1[i];
    } else if (ec.init == "constant") {
        for (int i = 0; i < grid.size(); ++i) u0[i] = v0[i] = ec.amplitude;
    } else {
        std::mt19937_64 rng(ec.seed);
        std::uniform_real_distribution<double> dist(0.1 * ec.amplitude, ec.amplitude);
        for (int i = 0; i < grid.size(); ++i) u0[i] = dist(rng);
        for (int i = 0; i < grid.size(); ++i) v0[i] = dist(rng);
    }

    const coexist::EvolutionResult res = coexist::evolve(m, grid, u0, v0, ec.dt, ec.t_end);

    const std::string dir = resolve_out_dir(cfg, args);
    coexist::write_field_csv(dir + "/u_final.csv", res.u_final);
    coexist::write_field_csv(dir + "/v_final.csv", res.v_final);

    json j;
    j["command"] = "evolve";
    j["t_final"] = res.t_final;
    j["step_count"] = res.step_count;
    j["final_change_rate"] = res.final_change_rate;
    j["clip_count"] = res.clip_count;
    std::cout << j.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state laboratory for two-species reaction-diffusion competition"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string command;
    for (const auto& name : {"eigen", "logistic", "solve", "check", "sweep", "evolve"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "JSON run configuration")->required();
        sub->add_option("--out", args.out_dir_override, "Output directory override");
        if (std::string(name) == "sweep")
            sub->add_option("--threads", args.threads_override, "Row parallelism cap");
        sub->callback([&command, name]() { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    try {
        const RunConfig cfg = coexist::load_config(args.config_path);
        if (command == "eigen") return run_eigen(cfg, args);
        if (command == "logistic") return run_logistic(cfg, args);
        if (command == "solve") return run_solve(cfg, args);
        if (command == "check") return run_check(cfg, args);
        if (command == "sweep") return run_sweep(cfg, args);
        if (command == "evolve") return run_evolve(cfg, args);
        std::cerr << "unknown command\n";
        return 1;
    } catch (const coexist::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const coexist::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    } catch (const coexist::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
