#include "nlk/spectrum.hpp"

#include "nlk/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <lapacke.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <arpackdef.h>

extern "C" {
void dnaupd_c(a_int* ido, char const* bmat, a_int n, char const* which, a_int nev, double tol, double* resid,
              a_int ncv, double* v, a_int ldv, a_int* iparam, a_int* ipntr, double* workd, double* workl,
              a_int lworkl, a_int* info);
void dneupd_c(a_int rvec, char const* howmny, a_int const* select, double* dr, double* di, double* z, a_int ldz,
              double sigmar, double sigmai, double* workev, char const* bmat, a_int n, char const* which, a_int nev,
              double tol, double* resid, a_int ncv, double* v, a_int ldv, a_int* iparam, a_int* ipntr, double* workd,
              double* workl, a_int lworkl, a_int* info);
}

namespace nlk {

std::string to_string(DomainShape s)
{
    return s == DomainShape::rectangle ? "rectangle" : "ellipse";
}

std::string to_string(EigenBackend b)
{
    switch (b) {
    case EigenBackend::automatic:
        return "auto";
    case EigenBackend::dense:
        return "dense";
    case EigenBackend::arnoldi:
        return "arnoldi";
    }
    return "?";
}

DomainShape parse_domain(const std::string& s)
{
    if (s == "rectangle")
        return DomainShape::rectangle;
    if (s == "ellipse")
        return DomainShape::ellipse;
    throw ValueError("unknown domain '" + s + "' (expected rectangle or ellipse)");
}

EigenBackend parse_backend(const std::string& s)
{
    if (s == "auto")
        return EigenBackend::automatic;
    if (s == "dense")
        return EigenBackend::dense;
    if (s == "arnoldi")
        return EigenBackend::arnoldi;
    throw ValueError("unknown eigen backend '" + s + "' (expected auto, dense or arnoldi)");
}

SpectralDomain fig2_rectangle()
{
    return {DomainShape::rectangle, 18.0, 28.0};
}

SpectralDomain fig2_ellipse()
{
    const double s = 2.0 / std::sqrt(std::numbers::pi);
    return {DomainShape::ellipse, 18.0 * s, 28.0 * s};
}

namespace {

using Complex = std::complex<double>;
using SparseCol = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

void check_setting(const ModelParams& p)
{
    if (p.d != 1)
        throw ValueError("the linearised operator is implemented for d = 1 only");
    if (!(p.m > p.m1 && p.m < 1.0))
        throw RangeError("the linearised operator needs m in (m1, 1)");
}

/// g_star for d = 1.
double gstar(const ModelParams& p, double x, double v)
{
    return std::pow(p.q() * (p.gamma_star + p.B() * (v * v + p.A * x * x)), 1.0 / (p.m - 1.0));
}

} // namespace

LinearOperatorAssembly assemble(const ModelParams& p, const SpectralDomain& domain, int Nx, int Nv,
                                const AssemblyOptions& options)
{
    check_setting(p);
    if (Nx < 3 || Nv < 3)
        throw ValueError("spectral grid needs at least 3 cells per axis");
    if (!(domain.ax > 0.0 && domain.av > 0.0))
        throw ValueError("domain extents must be positive");

    LinearOperatorAssembly a;
    a.p = p;
    a.domain = domain;
    a.Nx = Nx;
    a.Nv = Nv;
    a.options = options;
    a.dx = 2.0 * domain.ax / Nx;
    a.dv = 2.0 * domain.av / Nv;
    a.position.assign(static_cast<std::size_t>(Nx) * Nv, -1);
    for (int ix = 0; ix < Nx; ++ix) {
        for (int iv = 0; iv < Nv; ++iv) {
            const double x = a.x_center(ix) / domain.ax, v = a.v_center(iv) / domain.av;
            if (domain.shape == DomainShape::ellipse && x * x + v * v > 1.0)
                continue;
            a.position[ix * Nv + iv] = static_cast<int>(a.active.size());
            a.active.push_back(ix * Nv + iv);
        }
    }

    const double m = p.m, A = p.A;
    auto g = [&](double x, double v) { return options.frozen_weight ? 1.0 : gstar(p, x, v); };
    // f -> s f with s = g_star^((m-2)/2); its inverse w turns f back into h
    auto s_of = [&](double x, double v) { return options.frozen_weight ? 1.0 : std::pow(gstar(p, x, v), 0.5 * (m - 2.0)); };
    auto pos = [&](int ix, int iv) {
        if (ix < 0 || ix >= Nx || iv < 0 || iv >= Nv)
            return -1;
        return a.position[ix * Nv + iv];
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.active.size() * 9);
    const double hv2 = a.dv * a.dv;
    for (int r = 0; r < a.dim(); ++r) {
        const int ix = a.active[r] / Nv, iv = a.active[r] % Nv;
        const double x = a.x_center(ix), v = a.v_center(iv);
        const double s0 = s_of(x, v);
        const double gp = g(x, v + 0.5 * a.dv), gm = g(x, v - 0.5 * a.dv);
        // m s_j [g+ (s_{j+1} f_{j+1} - s_j f_j) - g- (s_j f_j - s_{j-1} f_{j-1})] / dv^2
        trip.emplace_back(r, r, -m * s0 * (gp + gm) * s0 / hv2);
        if (const int c = pos(ix, iv + 1); c >= 0)
            trip.emplace_back(r, c, m * s0 * gp * s_of(x, v + a.dv) / hv2);
        if (const int c = pos(ix, iv - 1); c >= 0)
            trip.emplace_back(r, c, m * s0 * gm * s_of(x, v - a.dv) / hv2);
        if (!options.kinetic)
            continue;
        auto add_h = [&](int jx, int jv, double coef) {
            const int c = pos(jx, jv);
            if (c < 0 || coef == 0.0)
                return;
            const double w = options.frozen_weight ? 1.0 : 1.0 / s_of(a.x_center(jx), a.v_center(jv));
            trip.emplace_back(r, c, s0 * coef * w);
        };
        // -v dh/dx
        if (options.upwind) {
            const int dir = v > 0.0 ? 1 : -1;
            const double c = -v * dir / a.dx;
            add_h(ix, iv, 1.5 * c);
            add_h(ix - dir, iv, -2.0 * c);
            add_h(ix - 2 * dir, iv, 0.5 * c);
        } else {
            add_h(ix + 1, iv, -v / (2.0 * a.dx));
            add_h(ix - 1, iv, v / (2.0 * a.dx));
        }
        // A x dh/dv
        add_h(ix, iv + 1, A * x / (2.0 * a.dv));
        add_h(ix, iv - 1, -A * x / (2.0 * a.dv));
    }
    a.matrix.resize(a.dim(), a.dim());
    a.matrix.setFromTriplets(trip.begin(), trip.end());
    a.matrix.makeCompressed();
    return a;
}

std::vector<AnalyticMode> analytic_eigenpairs(const ModelParams& p)
{
    check_setting(p);
    const double A = p.A, B = p.B(), m = p.m, gs = p.gamma_star;
    const double C = 1.0 / (p.d * (1.0 - m));
    auto h0 = [p](double x, double v) { return std::pow(gstar(p, x, v), 2.0 - p.m); };
    std::vector<AnalyticMode> out;
    out.push_back({"h0", 0.0, h0});
    out.push_back({"h1", -(1.0 - A), [=](double x, double v) {
                       return (gs + (B - A * C) * v * v + (1.0 - A) * C * x * v + A * (B - C) * x * x) * h0(x, v);
                   }});
    out.push_back({"h2", -A, [=](double x, double v) { return (v - x) * h0(x, v); }});
    out.push_back({"h3", -1.0, [=](double x, double v) { return (v - A * x) * h0(x, v); }});
    return out;
}

double apply_operator(const ModelParams& p, const ModeFunction& h, double x, double v, double delta)
{
    check_setting(p);
    const double m = p.m, A = p.A;
    auto F = [&](double vv) { return std::pow(gstar(p, x, vv), m - 1.0) * h(x, vv); };
    const double diff = m * (F(v + delta) - 2.0 * F(v) + F(v - delta)) / (delta * delta);
    const double hv = h(x, v);
    const double dhv = (h(x, v + delta) - h(x, v - delta)) / (2.0 * delta);
    const double dhx = (h(x + delta, v) - h(x - delta, v)) / (2.0 * delta);
    // (1+A) d/dv (v h) = (1+A)(h + v dh/dv)
    return diff + (1.0 + A) * (hv + v * dhv) - v * dhx + A * x * dhv;
}

std::vector<ModeResidual> analytic_residuals(const LinearOperatorAssembly& a, double window)
{
    const ModelParams& p = a.p;
    std::vector<ModeResidual> out;
    for (const AnalyticMode& mode : analytic_eigenpairs(p)) {
        Eigen::VectorXd P(a.dim());
        for (int r = 0; r < a.dim(); ++r) {
            const double x = a.x_center(a.active[r] / a.Nv), v = a.v_center(a.active[r] % a.Nv);
            P[r] = std::pow(gstar(p, x, v), 0.5 * (p.m - 2.0)) * mode.h(x, v);
        }
        const Eigen::VectorXd R = a.matrix * P - mode.lambda * P;
        double num = 0.0, den = 0.0;
        for (int r = 0; r < a.dim(); ++r) {
            const double x = a.x_center(a.active[r] / a.Nv), v = a.v_center(a.active[r] % a.Nv);
            if (std::abs(x) > window * a.domain.ax || std::abs(v) > window * a.domain.av)
                continue;
            num += R[r] * R[r];
            den += P[r] * P[r];
        }
        out.push_back({mode.name, mode.lambda, den > 0.0 ? std::sqrt(num / den) : 0.0});
    }
    return out;
}

double SpectrumResult::largest_nonzero_real() const
{
    if (eigenvalues.size() < 2)
        throw ValueError("need at least two eigenvalues to drop the kernel mode");
    std::size_t k0 = 0;
    for (std::size_t i = 1; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i]) < std::abs(eigenvalues[k0]))
            k0 = i;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        if (i != k0)
            best = std::max(best, eigenvalues[i].real());
    return best;
}

std::complex<double> SpectrumResult::nearest(std::complex<double> target) const
{
    if (eigenvalues.empty())
        throw ValueError("empty spectrum");
    return *std::min_element(eigenvalues.begin(), eigenvalues.end(),
                             [&](auto a, auto b) { return std::abs(a - target) < std::abs(b - target); });
}

namespace {

double backward_error(const SparseCol& M, const Eigen::VectorXcd& u, Complex lambda)
{
    const Eigen::VectorXcd r = M.cast<Complex>() * u - lambda * u;
    return r.norm() / u.norm();
}

/// Eigenvector of an isolated eigenvalue by a few steps of inverse iteration.
Eigen::VectorXcd inverse_iteration(const SparseCol& M, Complex lambda)
{
    const int n = static_cast<int>(M.rows());
    ComplexSparse S = M.cast<Complex>();
    ComplexSparse I(n, n);
    I.setIdentity();
    const Complex shift = lambda + 1e-10 * (1.0 + std::abs(lambda));
    S -= shift * I;
    Eigen::SparseLU<ComplexSparse> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success)
        throw ConvergenceError("sparse LU failed during inverse iteration");
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
    for (int it = 0; it < 4; ++it) {
        x = lu.solve(x);
        x /= x.norm();
    }
    return x;
}

void sort_by_real(std::vector<Complex>& ev, std::vector<Eigen::VectorXcd>* vecs = nullptr)
{
    std::vector<std::size_t> idx(ev.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (ev[a].real() != ev[b].real())
            return ev[a].real() > ev[b].real();
        return ev[a].imag() > ev[b].imag();
    });
    std::vector<Complex> e2;
    std::vector<Eigen::VectorXcd> v2;
    for (std::size_t i : idx) {
        e2.push_back(ev[i]);
        if (vecs)
            v2.push_back((*vecs)[i]);
    }
    ev = std::move(e2);
    if (vecs)
        *vecs = std::move(v2);
}

SpectrumResult dense_solve(const SparseCol& M, int count)
{
    const int n = static_cast<int>(M.rows());
    Eigen::MatrixXd D = Eigen::MatrixXd(M);
    std::vector<double> wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, D.data(), n, wr.data(), wi.data(), nullptr,
                                          1, nullptr, 1);
    if (info != 0)
        throw ConvergenceError("dense QR iteration did not converge (info " + std::to_string(info) + ")");
    std::vector<Complex> all(n);
    for (int i = 0; i < n; ++i)
        all[i] = {wr[i], wi[i]};
    sort_by_real(all);
    all.resize(std::min(count, n));
    SpectrumResult res;
    res.eigenvalues = all;
    for (Complex l : all)
        res.residuals.push_back(backward_error(M, inverse_iteration(M, l), l));
    res.backend = EigenBackend::dense;
    return res;
}

SpectrumResult arnoldi_solve(const SparseCol& M, int count, double sigma)
{
    const a_int n = static_cast<a_int>(M.rows());
    SparseCol S = M;
    SparseCol I(n, n);
    I.setIdentity();
    S -= sigma * I;
    Eigen::SparseLU<SparseCol> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success)
        throw SingularShift("shift " + std::to_string(sigma) + " is numerically an eigenvalue");
    const Eigen::VectorXd probe = lu.solve(Eigen::VectorXd::Ones(n));
    if (!probe.allFinite() || probe.norm() > 1e14 * std::sqrt(static_cast<double>(n)))
        throw SingularShift("shift " + std::to_string(sigma) + " is numerically an eigenvalue");

    const a_int nev = std::min<a_int>(count, n - 2);
    const a_int ncv = std::min<a_int>(n, std::max<a_int>(2 * nev + 1, nev + 20));
    const a_int lworkl = 3 * ncv * ncv + 6 * ncv;
    std::vector<double> resid(n), V(static_cast<std::size_t>(n) * ncv), workd(3 * n), workl(lworkl);
    a_int iparam[11] = {}, ipntr[14] = {};
    iparam[0] = 1;
    iparam[2] = 10000;
    iparam[6] = 3;
    a_int ido = 0, info = 0;
    const double tol = 1e-13;
    for (;;) {
        dnaupd_c(&ido, "I", n, "LM", nev, tol, resid.data(), ncv, V.data(), n, iparam, ipntr, workd.data(),
                 workl.data(), lworkl, &info);
        if (ido == -1 || ido == 1) {
            Eigen::Map<const Eigen::VectorXd> x(workd.data() + ipntr[0] - 1, n);
            Eigen::Map<Eigen::VectorXd> y(workd.data() + ipntr[1] - 1, n);
            y = lu.solve(x);
            continue;
        }
        break;
    }
    if (info < 0 || info == 1)
        throw ConvergenceError("Arnoldi iteration failed (info " + std::to_string(info) + ")");

    std::vector<a_int> select(ncv, 1);
    std::vector<double> dr(nev + 1), di(nev + 1), Z(static_cast<std::size_t>(n) * (nev + 1)), workev(3 * ncv);
    dneupd_c(1, "A", select.data(), dr.data(), di.data(), Z.data(), n, sigma, 0.0, workev.data(), "I", n, "LM", nev,
             tol, resid.data(), ncv, V.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, &info);
    if (info != 0)
        throw ConvergenceError("Arnoldi eigenvector extraction failed (info " + std::to_string(info) + ")");
    const a_int nconv = iparam[4];

    std::vector<Complex> ev;
    std::vector<Eigen::VectorXcd> vecs;
    for (a_int j = 0; j < nconv; ++j) {
        Eigen::Map<const Eigen::VectorXd> re(Z.data() + static_cast<std::size_t>(j) * n, n);
        if (di[j] == 0.0) {
            ev.emplace_back(dr[j], 0.0);
            vecs.push_back(re.cast<Complex>());
        } else if (j + 1 <= nev) {
            // conjugate pair stored as (Re, Im) columns
            Eigen::Map<const Eigen::VectorXd> im(Z.data() + static_cast<std::size_t>(j + 1) * n, n);
            const Eigen::VectorXcd u = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
            ev.emplace_back(dr[j], di[j]);
            vecs.push_back(u);
            ev.emplace_back(dr[j], -di[j]);
            vecs.push_back(u.conjugate());
            ++j;
        }
    }
    sort_by_real(ev, &vecs);
    SpectrumResult res;
    res.backend = EigenBackend::arnoldi;
    res.shift = sigma;
    res.eigenvalues = ev;
    for (std::size_t i = 0; i < ev.size(); ++i)
        res.residuals.push_back(backward_error(M, vecs[i], ev[i]));
    return res;
}

} // namespace

SpectrumResult eigensolve(const LinearOperatorAssembly& a, int count, EigenBackend backend)
{
    if (count < 1)
        throw ValueError("eigenvalue count must be >= 1");
    if (a.dim() < 3)
        throw ValueError("operator is too small");
    const SparseCol M = a.matrix;
    if (backend == EigenBackend::automatic)
        backend = a.dim() <= 6000 ? EigenBackend::dense : EigenBackend::arnoldi;
    SpectrumResult res;
    if (backend == EigenBackend::dense) {
        res = dense_solve(M, count);
    } else {
        try {
            res = arnoldi_solve(M, count, 0.0);
        } catch (const SingularShift& e) {
            spdlog::info("{}; retrying with shift 1e-3", e.what());
            res = arnoldi_solve(M, count, 1e-3);
        }
    }
    res.count = count;
    res.domain = a.domain;
    res.Nx = a.Nx;
    res.Nv = a.Nv;
    res.analytic = analytic_residuals(a);
    return res;
}

std::pair<double, double> dissipation_check(const ModelParams& p, const ModeFunction& h, const PhaseGrid& grid,
                                            double delta)
{
    check_setting(p);
    if (grid.d() != 1)
        throw ValueError("dissipation_check needs a d = 1 grid");
    const double m = p.m;
    auto u = [&](double x, double v) { return std::pow(gstar(p, x, v), m - 2.0) * h(x, v); };
    double lhs = 0.0, rhs = 0.0;
    for (int ix = 0; ix < grid.Nx(); ++ix) {
        const double x = grid.x_center(ix);
        for (int iv = 0; iv < grid.Nv(); ++iv) {
            const double v = grid.v_center(iv);
            const double g = gstar(p, x, v);
            lhs += apply_operator(p, h, x, v, delta) * h(x, v) * std::pow(g, m - 2.0);
            const double du = (u(x, v + delta) - u(x, v - delta)) / (2.0 * delta);
            rhs += g * du * du;
        }
    }
    const double vol = grid.cell_volume();
    return {2.0 * lhs * vol, -2.0 * m * rhs * vol};
}

} // namespace nlk
