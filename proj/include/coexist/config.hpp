#pragma once

#include <map>
#include <optional>
#include <string>

#include "coexist/grid.hpp"
#include "coexist/model.hpp"
#include "coexist/sweep.hpp"

namespace coexist {

struct GridConfig {
    std::string kind; ///< "interval" or "rectangle"
    int nx = 0, ny = 0;
    double length = 0.0; ///< interval
    double lx = 0.0, ly = 0.0;
};

struct ModelConfig {
    std::string type; ///< "classical_lv" or "nonlinear_demo"
    double a = 0.0, d = 0.0;
    std::map<std::string, double> params;
};

struct SolverConfig {
    double eig_tol = 1e-10;
    double log_tol = 1e-9;
    double sys_tol = 1e-8;
    double pos_tol = 1e-6;
    double eps_ratio = 1e-3;
    int max_outer = 60000;
};

struct EvolveConfig {
    double dt = 0.0;
    double t_end = 0.0;
    std::string init = "phi1"; ///< "phi1", "constant" or "random"
    double amplitude = 0.1;
    unsigned long seed = 42;
};

/// Parsed and validated run configuration. Unknown keys anywhere in the
/// file are rejected.
struct RunConfig {
    GridConfig grid;
    ModelConfig model;
    SolverConfig solver;
    std::optional<RegionSpec> sweep;
    std::optional<EvolveConfig> evolve;
    double eigen_q_const = 0.0;
    std::string out_dir = ".";
    int threads = 1;

    Grid build_grid() const;
    GrowthModel build_model() const;       ///< at (model.a, model.d)
    ModelFamily build_model_family() const; ///< same parameters, free (a, d)
};

RunConfig load_config(const std::string& path);

} // namespace coexist
