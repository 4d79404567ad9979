#pragma once

#include "nlk/fields.hpp"
#include "nlk/params.hpp"
#include "nlk/profiles.hpp"

#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace nlk {

enum class DomainShape { rectangle, ellipse };
enum class EigenBackend { automatic, dense, arnoldi };

std::string to_string(DomainShape s);
std::string to_string(EigenBackend b);
DomainShape parse_domain(const std::string& s);
EigenBackend parse_backend(const std::string& s);

/// Rectangle [-ax, ax] x [-av, av] or the ellipse with semi-axes (ax, av).
/// The grid always covers the bounding box.
struct SpectralDomain {
    DomainShape shape = DomainShape::rectangle;
    double ax = 18.0;
    double av = 28.0;
};

/// Rectangle [-18,18] x [-28,28] and the ellipse of the same area.
SpectralDomain fig2_rectangle();
SpectralDomain fig2_ellipse();

struct AssemblyOptions {
    /// Second-order upwinding of v d/dx; centred differences otherwise.
    bool upwind = true;
    /// Drops -v d/dx + A x d/dv.
    bool kinetic = true;
    /// Replaces g_star by 1 inside the symmetrised diffusion (pure m Lap_v).
    bool frozen_weight = false;
};

/// Matrix of L f = g_star^((m-2)/2) Lop(g_star^((2-m)/2) f) on the active cells, zero Dirichlet exterior, where
/// Lop h = m Lap_v(g_star^(m-1) h) + (1+A) div_v(v h) - v.grad_x h + A x.grad_v h.
struct LinearOperatorAssembly {
    ModelParams p;
    SpectralDomain domain;
    int Nx = 0;
    int Nv = 0;
    AssemblyOptions options;
    double dx = 0.0;
    double dv = 0.0;
    /// Grid index ix * Nv + iv of each active cell.
    std::vector<int> active;
    /// Active position of each grid cell, -1 outside.
    std::vector<int> position;
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

    int dim() const { return static_cast<int>(active.size()); }
    double x_center(int ix) const { return -domain.ax + (ix + 0.5) * dx; }
    double v_center(int iv) const { return -domain.av + (iv + 0.5) * dv; }
};

/// d = 1 and m in (m1, 1) are required.
LinearOperatorAssembly assemble(const ModelParams& p, const SpectralDomain& domain, int Nx, int Nv,
                                const AssemblyOptions& options = {});

/// h(x, v) in the original (unsymmetrised) variables.
using ModeFunction = std::function<double(double x, double v)>;

struct AnalyticMode {
    std::string name;
    double lambda = 0.0;
    ModeFunction h;
};

/// Kernel g_star^(2-m) and the modes with eigenvalues -(1-A), -A, -1 of Lop (d = 1).
std::vector<AnalyticMode> analytic_eigenpairs(const ModelParams& p);

/// Lop h at (x, v) by central differences of step delta (d = 1).
double apply_operator(const ModelParams& p, const ModeFunction& h, double x, double v, double delta);

struct ModeResidual {
    std::string name;
    double lambda = 0.0;
    /// ||L P(h) - lambda P(h)|| / ||P(h)|| on the interior window.
    double residual = 0.0;
};

/// P(h) = g_star^((m-2)/2) h sampled on the active cells; residuals over cells with
/// |x| <= window ax and |v| <= window av.
std::vector<ModeResidual> analytic_residuals(const LinearOperatorAssembly& a, double window = 0.5);

struct SpectrumResult {
    std::vector<std::complex<double>> eigenvalues;
    /// Backward error ||L u - lambda u|| / ||u|| of each eigenvalue.
    std::vector<double> residuals;
    int count = 0;
    EigenBackend backend = EigenBackend::dense;
    double shift = 0.0;
    std::vector<ModeResidual> analytic;
    SpectralDomain domain;
    int Nx = 0;
    int Nv = 0;

    /// Drops the eigenvalue closest to 0 and returns the largest real part among the rest.
    double largest_nonzero_real() const;
    /// Eigenvalue closest to target.
    std::complex<double> nearest(std::complex<double> target) const;
};

/// count eigenvalues of largest real part. automatic picks dense up to 6000 unknowns.
/// The Arnoldi backend is shift-invert about 0, retried at 1e-3 when the shift is singular.
SpectrumResult eigensolve(const LinearOperatorAssembly& a, int count, EigenBackend backend = EigenBackend::automatic);

/// (2 Re <Lop h, h>_w, -2m int g_star |grad_v(g_star^(m-2) h)|^2) with weight w = g_star^(m-2),
/// by midpoint quadrature on grid (d = 1) and central differences of step delta.
std::pair<double, double> dissipation_check(const ModelParams& p, const ModeFunction& h, const PhaseGrid& grid,
                                            double delta = 1e-3);

} // namespace nlk
