#pragma once

#include "nlk/fields.hpp"
#include "nlk/params.hpp"

#include <vector>

namespace nlk {

/// Constants of the parabolic scaling and of its macroscopic limit d_tau rho = Lap rho^k.
struct MacroParams {
    ModelParams p;
    double alpha = 0.0;
    double eta = 0.0;
    double k = 0.0;
    double beta = 0.0;
    double c_star = 0.0;
    double mu1 = 0.0;
    double nu1 = 0.0;

    /// (1 + s/alpha)^alpha and (1 + s/alpha)^-1.
    double R(double s) const;
    double sigma(double s) const;
    /// tau(s) = (alpha nu1 / (2(1+alpha))) ((1 + s/alpha)^(2(1+alpha)) - 1) and its inverse.
    double tau_of_s(double s) const;
    double s_of_tau(double tau) const;
    /// R / (d tau/ds), the transport factor of the h equation in tau.
    double transport_rate(double tau) const;
};

/// Throws RangeError unless m > m_c and m > d/(d+1).
MacroParams macro_params(const ModelParams& p);

/// (c_star + ((1-k)/(2k)) |x|^2)_+^(1/(k-1)), unit mass.
double barenblatt_profile(double x, const MacroParams& mp);
/// (tau/beta)^(-d beta) rho_star((tau/beta)^(-beta) x). Throws DomainError for tau <= 0.
double barenblatt(double tau, double x, const MacroParams& mp);

/// Uniform cells on [-L, L].
struct Line {
    int N = 128;
    double L = 40.0;

    double dx() const { return 2.0 * L / N; }
    double x(int i) const { return -L + (i + 0.5) * dx(); }
};

std::vector<double> sample_barenblatt(double tau, const Line& line, const MacroParams& mp);
double l1_line(const std::vector<double>& a, const std::vector<double>& b, const Line& line);

struct PmeTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> rho;
};

/// Explicit conservative finite volumes for d_tau rho = (rho^k)_xx with zero-flux ends.
/// The step is cfl dx^2 / (2 D) with D the largest secant diffusivity across faces.
/// Output at every entry of times (all in (0, tau_end]) plus tau_end.
PmeTrajectory pme_solve(const std::vector<double>& rho0, double k, double tau_end, const Line& line,
                        std::vector<double> times = {}, double cfl = 0.4, std::int64_t max_steps = 50'000'000);

struct DiffLimitConfig {
    ModelParams p;
    Line x{128, 40.0};
    int Nv = 64;
    double Lv = 16.0;
    /// Seed time of the Barenblatt datum and the matched offsets after it.
    double tau0 = 1.0;
    std::vector<double> tau_star{0.25, 0.5, 1.0};
    /// Splitting step as a fraction of the relaxation time eps^2 / (a^2 nu1).
    double split_fraction = 0.1;
    double cfl = 0.45;
    double floor = 1e-10;
};

struct DiffLimitRow {
    double eps = 0.0;
    double tau = 0.0;
    /// ||rho_eps - rho_pme||_1.
    double error = 0.0;
    /// ||h_eps - H[rho_eps]||_1, distance to the local equilibrium.
    double local_eq_gap = 0.0;
};

struct DiffLimitReport {
    MacroParams mp;
    std::vector<DiffLimitRow> rows;
    /// max over matched times for each eps, in input order.
    std::vector<double> e;
    /// L1 error of pme_solve against the Barenblatt solution on the same run.
    double pme_oracle_error = 0.0;
};

/// Kinetic runs of d_tau h + (a/eps) v h_x = (a^2 nu1 / eps^2)(Lap_v h^m + div_v(v h)), a = transport_rate(tau),
/// seeded by the local equilibrium of the Barenblatt density at tau0 and compared to the Barenblatt density.
DiffLimitReport diffusion_limit_experiment(const std::vector<double>& eps_list, const DiffLimitConfig& cfg);

} // namespace nlk
