#pragma once

#include "nlk/params.hpp"
#include "nlk/profiles.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nlk {

/// Uniform tensor grid on [-Lx, Lx]^d x [-Lv, Lv]^d with cell-centred values.
class PhaseGrid {
public:
    PhaseGrid() = default;
    PhaseGrid(int d, int Nx, int Nv, double Lx, double Lv);

    int d() const { return d_; }
    int Nx() const { return Nx_; }
    int Nv() const { return Nv_; }
    double Lx() const { return Lx_; }
    double Lv() const { return Lv_; }
    double dx() const { return 2.0 * Lx_ / Nx_; }
    double dv() const { return 2.0 * Lv_ / Nv_; }

    double x_center(int i) const { return -Lx_ + (i + 0.5) * dx(); }
    double v_center(int j) const { return -Lv_ + (j + 0.5) * dv(); }

    /// Nx^d and Nv^d.
    std::size_t x_cells() const { return x_cells_; }
    std::size_t v_cells() const { return v_cells_; }
    std::size_t size() const { return x_cells_ * v_cells_; }

    double x_volume() const;
    double v_volume() const;
    double cell_volume() const { return x_volume() * v_volume(); }

    /// Coordinates of the flattened x-cell (row-major over the d axes).
    void x_of(std::size_t ix, double* out) const;
    void v_of(std::size_t iv, double* out) const;
    /// |v|^2 at the cell centre and its exact average over the cell.
    double v2_center(std::size_t iv) const;
    double v2_cell_average(std::size_t iv) const;
    double x2_center(std::size_t ix) const;

    /// Axis index of component a (0..d-1) in a flattened x- or v-index.
    int axis_index(std::size_t flat, int a, int n) const;

    bool operator==(const PhaseGrid& o) const
    {
        return d_ == o.d_ && Nx_ == o.Nx_ && Nv_ == o.Nv_ && Lx_ == o.Lx_ && Lv_ == o.Lv_;
    }

private:
    int d_ = 1;
    int Nx_ = 1;
    int Nv_ = 1;
    double Lx_ = 1.0;
    double Lv_ = 1.0;
    std::size_t x_cells_ = 1;
    std::size_t v_cells_ = 1;
};

enum class FieldFrame { f, g, G, h_linear };

std::string to_string(FieldFrame f);

/// Cell values on a PhaseGrid, stored x-major: index = ix * v_cells + iv.
struct Field {
    PhaseGrid grid;
    std::vector<double> values;
    FieldFrame frame = FieldFrame::g;

    Field() = default;
    Field(PhaseGrid g, FieldFrame fr) : grid(g), values(g.size(), 0.0), frame(fr) {}

    double& at(std::size_t ix, std::size_t iv) { return values[ix * grid.v_cells() + iv]; }
    double at(std::size_t ix, std::size_t iv) const { return values[ix * grid.v_cells() + iv]; }
};

/// Samples fn at cell centres.
Field sample(const PhaseGrid& grid, const PhaseFunction& fn, FieldFrame frame);

/// Multilinear interpolant through cell centres, zero outside the grid.
PhaseFunction interpolant(const Field& field);

/// Extents (Lx, Lv) placing the g-frame profile of offset gamma at normalised radius r on the box edges.
std::pair<double, double> profile_extents(const ModelParams& p, double gamma, double radius);

/// Normalised radius where the profile has decayed to tail * peak (m < 1), or 1.5 times the support (m > 1).
double truncation_radius(const ModelParams& p, double tail);

double mass(const Field& field);
std::vector<double> spatial_density(const Field& field);
/// (int |x|^2 g, int |v|^2 g) by the midpoint rule.
std::pair<double, double> second_moments(const Field& field);
double l1_distance(const Field& a, const Field& b);
double lp_distance(const Field& a, const Field& b, double p);
double lp_norm_density(const std::vector<double>& rho, const PhaseGrid& grid, double p);

/// Cached samples of g_star on a grid, shared by the entropy functionals.
class Equilibrium {
public:
    Equilibrium(const ModelParams& p, const PhaseGrid& grid);

    const ModelParams& params() const { return p_; }
    const PhaseGrid& grid() const { return grid_; }
    const Field& gstar() const { return gstar_; }
    /// g_star^m per cell.
    const std::vector<double>& gstar_m() const { return gstar_m_; }
    /// gamma_star + B(|v|^2 + A|x|^2) per cell.
    const std::vector<double>& qstar() const { return qstar_; }
    /// Discrete integral of g_star^m.
    double Z_discrete() const { return Z_discrete_; }
    /// Discrete H[g_star].
    double H_gstar() const { return H_gstar_; }

private:
    ModelParams p_;
    PhaseGrid grid_;
    Field gstar_;
    std::vector<double> gstar_m_;
    std::vector<double> qstar_;
    double Z_discrete_ = 0.0;
    double H_gstar_ = 0.0;
};

/// H[g] = int g^m/(m-1) + B(|v|^2 + A|x|^2) g.
double absolute_entropy(const Field& g, const ModelParams& p);

/// Relative entropy in relative form, pointwise nonnegative:
/// (1/(m-1)) int (g^m - g_star^m) + int Q_star (g - g_star), Q_star = gamma_star + B(|v|^2 + A|x|^2).
double relative_entropy(const Field& g, const Equilibrium& eq);

/// Production int g |grad_v Q - (1+A) v|^2 in flux form, face by face.
double entropy_production(const Field& g, const ModelParams& p);
/// Same quantity with a cellwise centred gradient of Q = (m/(1-m)) g^(m-1).
double entropy_production_pointwise(const Field& g, const ModelParams& p);
/// Flux-form production restricted to each x-cell.
std::vector<double> production_slices(const Field& g, const ModelParams& p);

/// mu1 rho^(k-1) per entry.
std::vector<double> mu_of_rho(const std::vector<double>& rho, const ModelParams& p);

/// Local equilibrium with the same discrete spatial density as g.
/// Throws IntegralDivergence for m <= d/(d+1).
Field local_equilibrium(const Field& g, const ModelParams& p);
/// (mu + c|v|^2)_+^(1/(m-1)) per x-cell, mu chosen so the discrete v-integral equals rho.
Field local_equilibrium(const std::vector<double>& rho, const PhaseGrid& grid, double c, const ModelParams& p,
                        FieldFrame frame);

/// 2^(d/(d+2)) (d+2)/(2d) |S^(d-1)|^(2/(d+2)).
double interpolation_constant(int d);

/// RHS - LHS of the kinetic interpolation inequality, with exact cell averages of |v|^2.
double interpolation_slack(const Field& g, const ModelParams& p);

/// phi(s) = (1/(Z (m-1))) (s^m - 1 - m(s - 1)) and its inverse on [1, inf).
class JensenPhi {
public:
    JensenPhi(double m, double Z) : m_(m), Z_(Z) {}
    double phi(double s) const;
    /// Safeguarded Newton with bisection fallback; throws InversionError on failure.
    double psi(double y) const;

private:
    double m_;
    double Z_;
};

/// (lhs, rhs) of the Jensen moment bound, m in (d/(d+1), 1).
std::pair<double, double> jensen_bound(const Field& g, const Equilibrium& eq);
/// (lhs, rhs) of the moment bound for m > 1.
std::pair<double, double> moment_bound_m_gt_1(const Field& g, const Equilibrium& eq);

/// Per-x-cell production * rho^(2-k) / ||g - g_loc||_1^2; NaN marks cells without a ratio.
std::vector<double> ck_ratio(const Field& g, const ModelParams& p);

struct DiagnosticsReport {
    double time = 0.0;
    double mass = 0.0;
    double x2 = 0.0;
    double v2 = 0.0;
    double entropy = 0.0;
    double production = 0.0;
    double l1_to_gstar = 0.0;
    double l1_to_local_eq = 0.0;
    std::map<std::string, double> slacks;

    static std::vector<std::string> header(const std::vector<std::string>& slack_names);
    std::vector<double> row(const std::vector<std::string>& slack_names) const;
};

/// All scalar diagnostics of a g-frame field at one time.
DiagnosticsReport diagnose(const Field& g, const Equilibrium& eq, double time);

} // namespace nlk
