#pragma once

#include "nlk/fields.hpp"
#include "nlk/params.hpp"
#include "nlk/profiles.hpp"
#include "nlk/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlk {

/// Version string baked in at configure time.
std::string code_version();

/// Command-line entry point. Returns 0 on success, 2 on validation errors, 1 on runtime errors.
int run(int argc, const char* const* argv);

/// Writes (x..., v..., value) rows of a field, one per cell.
void write_field_csv(const std::filesystem::path& path, const Field& field);

struct ConvergeRow {
    double tau = 0.0;
    double t = 0.0;
    double l1_to_gstar = 0.0;
    double entropy = 0.0;
    double production = 0.0;
    /// ||rho_f||_(1+2/d) (1 + (1-A) t)^((3-d+dm)/((d+2)(m-m1))).
    double density_decay = 0.0;
    /// t^(d(p-1)(1+A)/(p(1-A))) ||f - f_star||_p with p = 2; NaN at t = 0.
    double weighted_lp = 0.0;
};

struct ConvergeReport {
    std::uint64_t seed = 0;
    std::vector<ConvergeRow> rows;
    /// Least-squares slope of log E over the second half of the run.
    double entropy_log_slope = 0.0;
    /// min(A, 1-A), printed next to the fitted slope.
    double reference_rate = 0.0;
    Trajectory trajectory;
};

/// Sandwiched datum between the profiles of mass 1/2 and 2, rescaled to mass 1, evolved with cfg.
ConvergeReport converge_experiment(const SolverConfig& cfg, std::uint64_t seed);

/// Exponent of the density-decay bound, (3 - d + dm)/((d+2)(m - m1)).
double density_decay_exponent(const ModelParams& p);

/// Weight exponent of the L^p intermediate asymptotics, d(p-1)(1+A)/(p(1-A)).
double lp_weight_exponent(const ModelParams& p, double lp);

} // namespace nlk
