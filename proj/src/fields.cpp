#include "nlk/fields.hpp"

#include "nlk/errors.hpp"
#include "nlk/io.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace nlk {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_grid(const Field& a, const Field& b)
{
    if (!(a.grid == b.grid))
        throw ValueError("fields live on different grids");
}

} // namespace

PhaseGrid::PhaseGrid(int d, int Nx, int Nv, double Lx, double Lv) : d_(d), Nx_(Nx), Nv_(Nv), Lx_(Lx), Lv_(Lv)
{
    if (d != 1 && d != 2)
        throw ValueError("PhaseGrid supports d = 1 or 2, got " + std::to_string(d));
    if (Nx < 2 || Nv < 2)
        throw ValueError("PhaseGrid needs at least 2 cells per axis");
    if (!(Lx > 0.0) || !(Lv > 0.0) || !std::isfinite(Lx) || !std::isfinite(Lv))
        throw ValueError("PhaseGrid extents must be positive and finite");
    x_cells_ = d == 1 ? Nx : static_cast<std::size_t>(Nx) * Nx;
    v_cells_ = d == 1 ? Nv : static_cast<std::size_t>(Nv) * Nv;
}

double PhaseGrid::x_volume() const
{
    return d_ == 1 ? dx() : dx() * dx();
}

double PhaseGrid::v_volume() const
{
    return d_ == 1 ? dv() : dv() * dv();
}

int PhaseGrid::axis_index(std::size_t flat, int a, int n) const
{
    if (d_ == 1)
        return static_cast<int>(flat);
    return a == 0 ? static_cast<int>(flat / n) : static_cast<int>(flat % n);
}

void PhaseGrid::x_of(std::size_t ix, double* out) const
{
    for (int a = 0; a < d_; ++a)
        out[a] = x_center(axis_index(ix, a, Nx_));
}

void PhaseGrid::v_of(std::size_t iv, double* out) const
{
    for (int a = 0; a < d_; ++a)
        out[a] = v_center(axis_index(iv, a, Nv_));
}

double PhaseGrid::v2_center(std::size_t iv) const
{
    double s = 0.0;
    for (int a = 0; a < d_; ++a) {
        const double v = v_center(axis_index(iv, a, Nv_));
        s += v * v;
    }
    return s;
}

double PhaseGrid::v2_cell_average(std::size_t iv) const
{
    return v2_center(iv) + d_ * dv() * dv() / 12.0;
}

double PhaseGrid::x2_center(std::size_t ix) const
{
    double s = 0.0;
    for (int a = 0; a < d_; ++a) {
        const double x = x_center(axis_index(ix, a, Nx_));
        s += x * x;
    }
    return s;
}

std::string to_string(FieldFrame f)
{
    switch (f) {
    case FieldFrame::f:
        return "f";
    case FieldFrame::g:
        return "g";
    case FieldFrame::G:
        return "G";
    case FieldFrame::h_linear:
        return "h";
    }
    return "?";
}

Field sample(const PhaseGrid& grid, const PhaseFunction& fn, FieldFrame frame)
{
    Field out(grid, frame);
    const int d = grid.d();
    std::array<double, 2> x{}, v{};
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        grid.x_of(ix, x.data());
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            grid.v_of(iv, v.data());
            out.at(ix, iv) = fn(Point(x.data(), d), Point(v.data(), d));
        }
    }
    return out;
}

PhaseFunction interpolant(const Field& field)
{
    return [field](Point x, Point v) {
        const PhaseGrid& g = field.grid;
        const int d = g.d();
        const int D = 2 * d;
        std::array<int, 4> i0{};
        std::array<double, 4> w{};
        std::array<int, 4> n{};
        for (int a = 0; a < D; ++a) {
            const bool is_x = a < d;
            const double L = is_x ? g.Lx() : g.Lv();
            const double h = is_x ? g.dx() : g.dv();
            n[a] = is_x ? g.Nx() : g.Nv();
            const double c = is_x ? x[a] : v[a - d];
            const double u = (c + L) / h - 0.5;
            const double fl = std::floor(u);
            if (fl < -1.0 || fl > n[a] - 1.0)
                return 0.0;
            i0[a] = static_cast<int>(fl);
            w[a] = u - fl;
        }
        double acc = 0.0;
        for (int corner = 0; corner < (1 << D); ++corner) {
            double weight = 1.0;
            std::size_t ix = 0, iv = 0;
            bool inside = true;
            for (int a = 0; a < D; ++a) {
                const int bit = (corner >> a) & 1;
                const int idx = i0[a] + bit;
                if (idx < 0 || idx >= n[a]) {
                    inside = false;
                    break;
                }
                weight *= bit ? w[a] : 1.0 - w[a];
                if (a < d)
                    ix = ix * n[a] + idx;
                else
                    iv = iv * n[a] + idx;
            }
            if (inside && weight != 0.0)
                acc += weight * field.at(ix, iv);
        }
        return acc;
    };
}

std::pair<double, double> profile_extents(const ModelParams& p, double gamma, double radius)
{
    const double g = std::abs(gamma);
    return {radius * std::sqrt(g / (p.B() * p.A)), radius * std::sqrt(g / p.B())};
}

double truncation_radius(const ModelParams& p, double tail)
{
    if (p.m > 1.0)
        return 1.5;
    return std::sqrt(std::pow(tail, p.m - 1.0) - 1.0);
}

double mass(const Field& field)
{
    double s = 0.0;
    for (double x : field.values)
        s += x;
    return s * field.grid.cell_volume();
}

std::vector<double> spatial_density(const Field& field)
{
    const PhaseGrid& g = field.grid;
    std::vector<double> rho(g.x_cells(), 0.0);
    for (std::size_t ix = 0; ix < g.x_cells(); ++ix) {
        double s = 0.0;
        for (std::size_t iv = 0; iv < g.v_cells(); ++iv)
            s += field.at(ix, iv);
        rho[ix] = s * g.v_volume();
    }
    return rho;
}

std::pair<double, double> second_moments(const Field& field)
{
    const PhaseGrid& g = field.grid;
    double sx = 0.0, sv = 0.0;
    for (std::size_t ix = 0; ix < g.x_cells(); ++ix) {
        const double x2 = g.x2_center(ix);
        for (std::size_t iv = 0; iv < g.v_cells(); ++iv) {
            const double f = field.at(ix, iv);
            sx += x2 * f;
            sv += g.v2_center(iv) * f;
        }
    }
    return {sx * g.cell_volume(), sv * g.cell_volume()};
}

double l1_distance(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += std::abs(a.values[i] - b.values[i]);
    return s * a.grid.cell_volume();
}

double lp_distance(const Field& a, const Field& b, double p)
{
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += std::pow(std::abs(a.values[i] - b.values[i]), p);
    return std::pow(s * a.grid.cell_volume(), 1.0 / p);
}

double lp_norm_density(const std::vector<double>& rho, const PhaseGrid& grid, double p)
{
    double s = 0.0;
    for (double r : rho)
        s += std::pow(std::abs(r), p);
    return std::pow(s * grid.x_volume(), 1.0 / p);
}

Equilibrium::Equilibrium(const ModelParams& p, const PhaseGrid& grid)
    : p_(p), grid_(grid), gstar_(sample(grid, profile_function({p, p.gamma_star, Frame::g}), FieldFrame::g))
{
    const std::size_t n = grid.size();
    gstar_m_.resize(n);
    qstar_.resize(n);
    const double vol = grid.cell_volume();
    const double B = p.B();
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        const double x2 = grid.x2_center(ix);
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            const std::size_t i = ix * grid.v_cells() + iv;
            const double gs = gstar_.values[i];
            gstar_m_[i] = std::pow(gs, p.m);
            qstar_[i] = p.gamma_star + B * (grid.v2_center(iv) + p.A * x2);
            Z_discrete_ += gstar_m_[i];
            H_gstar_ += gstar_m_[i] / (p.m - 1.0) + B * (grid.v2_center(iv) + p.A * x2) * gs;
        }
    }
    Z_discrete_ *= vol;
    H_gstar_ *= vol;
}

double absolute_entropy(const Field& g, const ModelParams& p)
{
    const PhaseGrid& grid = g.grid;
    const double B = p.B();
    double s = 0.0;
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        const double x2 = grid.x2_center(ix);
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            const double f = g.at(ix, iv);
            s += std::pow(f, p.m) / (p.m - 1.0) + B * (grid.v2_center(iv) + p.A * x2) * f;
        }
    }
    return s * grid.cell_volume();
}

double relative_entropy(const Field& g, const Equilibrium& eq)
{
    require_same_grid(g, eq.gstar());
    const ModelParams& p = eq.params();
    const double m = p.m;
    const auto& gs = eq.gstar().values;
    const auto& gsm = eq.gstar_m();
    const auto& qs = eq.qstar();
    double s = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const double f = g.values[i];
        if (gs[i] > 0.0) {
            const double w = f / gs[i];
            double phi;
            if (w > 0.0) {
                const double dw = w - 1.0;
                phi = std::expm1(m * std::log1p(dw)) - m * dw;
            } else {
                phi = -1.0 + m;
            }
            s += gsm[i] * phi / (m - 1.0);
        } else {
            s += std::pow(f, m) / (m - 1.0) + qs[i] * f;
        }
    }
    return s * g.grid.cell_volume();
}

namespace {

/// Visits every interior v-face: callback(ix, iv_minus, iv_plus, axis, v_face).
template <class F>
void for_each_v_face(const PhaseGrid& grid, F&& fn)
{
    const int d = grid.d();
    const int Nv = grid.Nv();
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            for (int a = 0; a < d; ++a) {
                const int j = grid.axis_index(iv, a, Nv);
                if (j + 1 >= Nv)
                    continue;
                const std::size_t stride = (d == 2 && a == 0) ? static_cast<std::size_t>(Nv) : 1;
                const double vf = -grid.Lv() + (j + 1) * grid.dv();
                fn(ix, iv, iv + stride, a, vf);
            }
        }
    }
}

std::vector<double> powm(const Field& g, double m)
{
    std::vector<double> out(g.values.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::pow(g.values[i], m);
    return out;
}

} // namespace

std::vector<double> production_slices(const Field& g, const ModelParams& p)
{
    const PhaseGrid& grid = g.grid;
    const auto gm = powm(g, p.m);
    const std::size_t nv = grid.v_cells();
    const double dv = grid.dv();
    std::vector<double> out(grid.x_cells(), 0.0);
    for_each_v_face(grid, [&](std::size_t ix, std::size_t a, std::size_t b, int, double vf) {
        const std::size_t ia = ix * nv + a, ib = ix * nv + b;
        const double gf = 0.5 * (g.values[ia] + g.values[ib]);
        if (gf < kTiny)
            return;
        const double F = (gm[ib] - gm[ia]) / dv + (1.0 + p.A) * vf * gf;
        out[ix] += F * F / gf;
    });
    for (double& x : out)
        x *= grid.v_volume();
    return out;
}

double entropy_production(const Field& g, const ModelParams& p)
{
    const auto slices = production_slices(g, p);
    double s = 0.0;
    for (double x : slices)
        s += x;
    return s * g.grid.x_volume();
}

double entropy_production_pointwise(const Field& g, const ModelParams& p)
{
    const PhaseGrid& grid = g.grid;
    const int d = grid.d();
    const int Nv = grid.Nv();
    const std::size_t nv = grid.v_cells();
    const double dv = grid.dv();
    const double cq = p.m / (1.0 - p.m);
    std::vector<double> Q(g.values.size(), 0.0);
    for (std::size_t i = 0; i < Q.size(); ++i)
        Q[i] = g.values[i] > 0.0 ? cq * std::pow(g.values[i], p.m - 1.0) : 0.0;
    double s = 0.0;
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const std::size_t i = ix * nv + iv;
            const double f = g.values[i];
            if (!(f > 0.0))
                continue;
            for (int a = 0; a < d; ++a) {
                const int j = grid.axis_index(iv, a, Nv);
                const std::size_t stride = (d == 2 && a == 0) ? static_cast<std::size_t>(Nv) : 1;
                const bool has_lo = j > 0 && g.values[i - stride] > 0.0;
                const bool has_hi = j + 1 < Nv && g.values[i + stride] > 0.0;
                double dQ;
                if (has_lo && has_hi)
                    dQ = (Q[i + stride] - Q[i - stride]) / (2.0 * dv);
                else if (has_hi)
                    dQ = (Q[i + stride] - Q[i]) / dv;
                else if (has_lo)
                    dQ = (Q[i] - Q[i - stride]) / dv;
                else
                    continue;
                const double r = dQ - (1.0 + p.A) * grid.v_center(j);
                s += f * r * r;
            }
        }
    }
    return s * grid.cell_volume();
}

std::vector<double> mu_of_rho(const std::vector<double>& rho, const ModelParams& p)
{
    const ClosureConstants cc = equilibrium_normalization(p.q() * p.B(), p);
    std::vector<double> mu(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] > 0.0)
            mu[i] = cc.mu1 * std::pow(rho[i], p.k - 1.0);
        else
            mu[i] = p.m < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return mu;
}

Field local_equilibrium(const std::vector<double>& rho, const PhaseGrid& grid, double c, const ModelParams& p,
                        FieldFrame frame)
{
    if (rho.size() != grid.x_cells())
        throw ValueError("density size does not match the grid");
    const ClosureConstants cc = equilibrium_normalization(c, p);
    const double e = 1.0 / (p.m - 1.0);
    const std::size_t nv = grid.v_cells();
    std::vector<double> v2(nv);
    for (std::size_t iv = 0; iv < nv; ++iv)
        v2[iv] = grid.v2_center(iv);
    const double vvol = grid.v_volume();

    auto discrete_rho = [&](double mu) {
        double s = 0.0;
        for (std::size_t iv = 0; iv < nv; ++iv)
            s += positive_power(mu + c * v2[iv], e);
        return s * vvol;
    };

    Field out(grid, frame);
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        if (!(rho[ix] > 0.0))
            continue;
        const double mu0 = cc.mu1 * std::pow(rho[ix], p.k - 1.0);
        double mu = mu0;
        try {
            boost::uintmax_t iters = 200;
            const auto r = boost::math::tools::bracket_and_solve_root(
                [&](double m_) { return discrete_rho(m_) - rho[ix]; }, mu0, 2.0, p.m > 1.0,
                boost::math::tools::eps_tolerance<double>(50), iters);
            mu = 0.5 * (r.first + r.second);
        } catch (const std::exception&) {
            // no discrete root in range: keep the continuum value
        }
        for (std::size_t iv = 0; iv < nv; ++iv)
            out.at(ix, iv) = positive_power(mu + c * v2[iv], e);
    }
    return out;
}

Field local_equilibrium(const Field& g, const ModelParams& p)
{
    return local_equilibrium(spatial_density(g), g.grid, p.q() * p.B(), p, g.frame);
}

double interpolation_constant(int d)
{
    return std::pow(2.0, d / (d + 2.0)) * (d + 2.0) / (2.0 * d) *
           std::pow(radial::sphere_area(d), 2.0 / (d + 2.0));
}

double interpolation_slack(const Field& g, const ModelParams& p)
{
    const PhaseGrid& grid = g.grid;
    const int d = grid.d();
    (void)p;
    const auto rho = spatial_density(g);
    const double lhs = lp_norm_density(rho, grid, 1.0 + 2.0 / d);
    double gmax = 0.0, v2 = 0.0;
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            const double f = g.at(ix, iv);
            gmax = std::max(gmax, f);
            v2 += grid.v2_cell_average(iv) * f;
        }
    }
    v2 *= grid.cell_volume();
    const double rhs = interpolation_constant(d) * std::pow(gmax, 2.0 / (d + 2.0)) * std::pow(v2, d / (d + 2.0));
    return rhs - lhs;
}

double JensenPhi::phi(double s) const
{
    return (std::pow(s, m_) - 1.0 - m_ * (s - 1.0)) / (Z_ * (m_ - 1.0));
}

double JensenPhi::psi(double y) const
{
    if (!(y >= 0.0) || !std::isfinite(y))
        throw InversionError("psi needs a finite nonnegative argument");
    if (y == 0.0)
        return 1.0;
    double hi = 2.0;
    int grow = 0;
    while (phi(hi) < y) {
        hi *= 2.0;
        if (++grow > 2000)
            throw InversionError("could not bracket psi(" + format_double(y) + ")");
    }
    const double lo = 1.0;
    auto fdf = [&](double s) {
        const double f = phi(s) - y;
        const double df = m_ * (std::pow(s, m_ - 1.0) - 1.0) / (Z_ * (m_ - 1.0));
        return std::make_pair(f, df);
    };
    boost::uintmax_t iters = 200;
    double s = boost::math::tools::newton_raphson_iterate(fdf, 0.5 * (lo + hi), lo, hi, 45, iters);
    if (std::abs(phi(s) - y) <= 1e-12 * std::max(1.0, y))
        return s;
    // bisection fallback
    double a = lo, b = hi;
    for (int it = 0; it < 400; ++it) {
        s = 0.5 * (a + b);
        if (phi(s) < y)
            a = s;
        else
            b = s;
        if (b - a <= 1e-15 * b)
            break;
    }
    if (!(std::abs(phi(s) - y) <= 1e-10 * std::max(1.0, y)))
        throw InversionError("psi(" + format_double(y) + ") did not converge");
    return s;
}

std::pair<double, double> jensen_bound(const Field& g, const Equilibrium& eq)
{
    const ModelParams& p = eq.params();
    if (!(p.m > p.m_tilde1 && p.m < 1.0))
        throw ValueError("jensen_bound needs d/(d+1) < m < 1");
    const PhaseGrid& grid = g.grid;
    double v2 = 0.0;
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix)
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv)
            v2 += grid.v2_center(iv) * g.at(ix, iv);
    v2 *= grid.cell_volume();
    const double lhs = p.q() * p.B() * v2;
    const double Z = eq.Z_discrete();
    const JensenPhi jp(p.m, Z);
    const double rhs = Z * jp.psi(std::max(0.0, relative_entropy(g, eq)) / Z);
    return {lhs, rhs};
}

std::pair<double, double> moment_bound_m_gt_1(const Field& g, const Equilibrium& eq)
{
    const ModelParams& p = eq.params();
    if (!(p.m > 1.0))
        throw ValueError("moment_bound_m_gt_1 needs m > 1");
    const auto [x2, v2] = second_moments(g);
    (void)x2;
    return {p.B() * v2, relative_entropy(g, eq) + eq.H_gstar()};
}

std::vector<double> ck_ratio(const Field& g, const ModelParams& p)
{
    const PhaseGrid& grid = g.grid;
    const auto slices = production_slices(g, p);
    const auto rho = spatial_density(g);
    const Field loc = local_equilibrium(g, p);
    std::vector<double> out(grid.x_cells(), kNaN);
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        if (!(rho[ix] > kTiny))
            continue;
        double l1 = 0.0;
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            const double diff = std::abs(g.at(ix, iv) - loc.at(ix, iv));
            l1 += p.m < 1.0 ? diff : diff * std::pow(loc.at(ix, iv), p.m - 1.0);
        }
        l1 *= grid.v_volume();
        if (!(l1 > 1e-10 * rho[ix]))
            continue;
        out[ix] = slices[ix] * std::pow(rho[ix], 2.0 - p.k) / (l1 * l1);
    }
    return out;
}

std::vector<std::string> DiagnosticsReport::header(const std::vector<std::string>& slack_names)
{
    std::vector<std::string> h{"time", "mass", "x2", "v2", "entropy", "production", "l1_to_gstar", "l1_to_local_eq"};
    for (const auto& s : slack_names)
        h.push_back("slack_" + s);
    return h;
}

std::vector<double> DiagnosticsReport::row(const std::vector<std::string>& slack_names) const
{
    std::vector<double> r{time, mass, x2, v2, entropy, production, l1_to_gstar, l1_to_local_eq};
    for (const auto& s : slack_names) {
        const auto it = slacks.find(s);
        r.push_back(it == slacks.end() ? kNaN : it->second);
    }
    return r;
}

DiagnosticsReport diagnose(const Field& g, const Equilibrium& eq, double time)
{
    const ModelParams& p = eq.params();
    DiagnosticsReport r;
    r.time = time;
    r.mass = mass(g);
    std::tie(r.x2, r.v2) = second_moments(g);
    r.entropy = relative_entropy(g, eq);
    r.production = entropy_production(g, p);
    r.l1_to_gstar = l1_distance(g, eq.gstar());
    if (p.m > p.m_tilde1)
        r.l1_to_local_eq = l1_distance(g, local_equilibrium(g, p));
    else
        r.l1_to_local_eq = kNaN;
    r.slacks["interpolation"] = interpolation_slack(g, p);
    if (p.m > p.m_tilde1 && p.m < 1.0) {
        const auto [lhs, rhs] = jensen_bound(g, eq);
        r.slacks["jensen"] = rhs - lhs;
    } else if (p.m > 1.0) {
        const auto [lhs, rhs] = moment_bound_m_gt_1(g, eq);
        r.slacks["moment"] = rhs - lhs;
    }
    return r;
}

} // namespace nlk
