#include "nlk/solver.hpp"

#include "nlk/errors.hpp"
#include "nlk/io.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nlk {

std::string to_string(Flavor f)
{
    return f == Flavor::lie ? "lie" : "strang";
}

std::string to_string(TransportScheme s)
{
    return s == TransportScheme::spectral ? "spectral" : "bilinear";
}

Flavor parse_flavor(const std::string& s)
{
    if (s == "lie")
        return Flavor::lie;
    if (s == "strang")
        return Flavor::strang;
    throw ValueError("unknown splitting flavor '" + s + "' (expected lie or strang)");
}

TransportScheme parse_transport(const std::string& s)
{
    if (s == "spectral")
        return TransportScheme::spectral;
    if (s == "bilinear")
        return TransportScheme::bilinear;
    throw ValueError("unknown transport scheme '" + s + "' (expected spectral or bilinear)");
}

DiffusionStats step_drift_diffusion(Field& G, double dt, const DriftDiffusion& coef, const DiffusionControl& ctl)
{
    if (!(dt > 0.0))
        throw ValueError("diffusion step needs dt > 0");
    const PhaseGrid& grid = G.grid;
    const int d = grid.d();
    const int Nv = grid.Nv();
    const std::size_t nv = grid.v_cells();
    const double dv = grid.dv();
    const double m = coef.m;
    const double kappa = coef.kappa;
    const double cm = m / (m - 1.0);
    const bool fast = m < 1.0;

    std::vector<double> half_v2(nv), vabs(nv);
    for (std::size_t iv = 0; iv < nv; ++iv) {
        half_v2[iv] = 0.5 * coef.b * grid.v2_center(iv);
        double s = 0.0;
        for (int a = 0; a < d; ++a)
            s += std::abs(grid.v_center(grid.axis_index(iv, a, Nv)));
        vabs[iv] = s;
    }
    std::array<std::size_t, 2> stride{1, 1};
    if (d == 2)
        stride = {static_cast<std::size_t>(Nv), 1};

    std::vector<double> phi(nv), gp(nv), div(nv), rate(nv);
    DiffusionStats stats;

    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        double* u = G.values.data() + ix * nv;
        const double* floor_row = ctl.floor_field ? ctl.floor_field->data() + ix * nv : nullptr;
        double remaining = dt;
        std::int64_t sub = 0;
        while (remaining > 1e-14 * dt) {
            double lin = 0.0;
            for (std::size_t iv = 0; iv < nv; ++iv) {
                double gv = u[iv];
                if (fast)
                    gv = std::max(gv, floor_row ? floor_row[iv] : ctl.floor);
                gp[iv] = gv > 0.0 ? std::pow(gv, m - 1.0) : 0.0;
                phi[iv] = cm * gp[iv] + half_v2[iv];
                div[iv] = 0.0;
                rate[iv] = 0.0;
                const double D = kappa * m * gp[iv];
                lin = std::max(lin, 2.0 * d * D / (dv * dv) + kappa * coef.b * vabs[iv] / dv);
            }
            for (int a = 0; a < d; ++a) {
                const std::size_t s = stride[a];
                for (std::size_t iv = 0; iv < nv; ++iv) {
                    if (grid.axis_index(iv, a, Nv) + 1 >= Nv)
                        continue;
                    const std::size_t jv = iv + s;
                    const double dphi = phi[jv] - phi[iv];
                    const bool from_lo = dphi < 0.0;
                    const double up = from_lo ? u[iv] : u[jv];
                    const double F = -kappa * up * dphi / dv;
                    div[iv] += F;
                    div[jv] -= F;
                    rate[from_lo ? iv : jv] += kappa * std::abs(dphi) / (dv * dv);
                }
            }
            double rmax = lin;
            for (std::size_t iv = 0; iv < nv; ++iv)
                rmax = std::max(rmax, rate[iv]);
            const double h = std::min(remaining, ctl.cfl / rmax);
            for (std::size_t iv = 0; iv < nv; ++iv)
                u[iv] -= h / dv * div[iv];
            remaining -= h;
            if (++sub > ctl.max_substeps)
                throw CFLError("diffusion substeps exceed the cap of " + std::to_string(ctl.max_substeps));
        }
        stats.max_substeps = std::max(stats.max_substeps, sub);
        stats.total_substeps += sub;
    }
    for (double& x : G.values) {
        if (x < 0.0) {
            stats.clipped_mass -= x;
            x = 0.0;
        }
    }
    stats.clipped_mass *= grid.cell_volume();
    return stats;
}

Field step_diffusion(const Field& G, double dt, const ModelParams& p, const DiffusionControl& ctl)
{
    Field out = G;
    const DriftDiffusion coef{p.m, 2.0 / p.A, (1.0 + p.A) * std::sqrt(p.A)};
    step_drift_diffusion(out, dt, coef, ctl);
    return out;
}

PhaseGrid to_G_grid(const PhaseGrid& g, const ModelParams& p)
{
    const double s = std::pow(p.A, 0.25);
    return PhaseGrid(g.d(), g.Nx(), g.Nv(), g.Lx() * s, g.Lv() / s);
}

PhaseGrid to_g_grid(const PhaseGrid& G, const ModelParams& p)
{
    const double s = std::pow(p.A, 0.25);
    return PhaseGrid(G.d(), G.Nx(), G.Nv(), G.Lx() / s, G.Lv() * s);
}

Field to_G_frame(const Field& g, const ModelParams& p)
{
    Field out = g;
    out.grid = to_G_grid(g.grid, p);
    out.frame = FieldFrame::G;
    return out;
}

Field to_g_frame(const Field& G, const ModelParams& p)
{
    Field out = G;
    out.grid = to_g_grid(G.grid, p);
    out.frame = FieldFrame::g;
    return out;
}

namespace {

void check_finite(const Field& F)
{
    for (double x : F.values)
        if (!std::isfinite(x))
            throw NonFiniteError("non-finite cell value in the solution");
}

} // namespace

Trajectory evolve(const Field& g0, const SolverConfig& cfg, const std::string& descriptor)
{
    const ModelParams& p = cfg.p;
    if (!(g0.grid == cfg.grid))
        throw ValueError("initial datum grid does not match the solver grid");
    if (cfg.n < 1)
        throw ValueError("n must be >= 1");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
        throw ValueError("CFL factor must lie in (0, 1]");
    if (!(cfg.T > 0.0))
        throw ValueError("end time T must be positive");
    for (double x : g0.values)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ValueError("initial datum must be finite and nonnegative");

    Trajectory traj;
    traj.config = cfg;
    traj.initial_datum = descriptor;

    Field G = to_G_frame(g0, p);
    std::vector<double> floor_field;
    DiffusionControl ctl;
    ctl.cfl = cfg.cfl;
    ctl.floor = cfg.floor;
    ctl.max_substeps = cfg.max_substeps;
    if (cfg.sandwich_gamma_lower) {
        const Field low = sample(G.grid, profile_function({p, *cfg.sandwich_gamma_lower, Frame::G}), FieldFrame::G);
        floor_field = low.values;
        ctl.floor_field = &floor_field;
    }
    const DriftDiffusion coef{p.m, 2.0 / p.A, (1.0 + p.A) * std::sqrt(p.A)};

    std::optional<Equilibrium> eq;
    if (cfg.diagnostics)
        eq.emplace(p, cfg.grid);

    const double sqrtA = std::sqrt(p.A);
    const double total = sqrtA * cfg.T;
    const std::int64_t steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(total * cfg.n - 1e-9)));
    const double h = total / static_cast<double>(steps);
    if (!(cfg.snapshot_every > 0.0))
        throw ValueError("snapshot cadence must be positive");
    // snapshot k is taken at the step closest to k * snapshot_every
    std::int64_t next_k = 1;
    auto snapshot_step = [&](std::int64_t k) {
        return std::max<std::int64_t>(1, std::llround(static_cast<double>(k) * cfg.snapshot_every * sqrtA / h));
    };

    auto record = [&](std::int64_t step) {
        Snapshot s;
        s.time = static_cast<double>(step) * h / sqrtA;
        s.field = to_g_frame(G, p);
        if (eq)
            s.report = diagnose(s.field, *eq, s.time);
        traj.snapshots.push_back(std::move(s));
    };

    const double mass0 = mass(G);
    record(0);
    for (std::int64_t step = 1; step <= steps; ++step) {
        DiffusionStats st;
        if (cfg.flavor == Flavor::lie) {
            st = step_drift_diffusion(G, 0.5 * h, coef, ctl);
            rotate(G, h, cfg.transport);
        } else {
            st = step_drift_diffusion(G, 0.25 * h, coef, ctl);
            rotate(G, h, cfg.transport);
            const DiffusionStats st2 = step_drift_diffusion(G, 0.25 * h, coef, ctl);
            st.max_substeps = std::max(st.max_substeps, st2.max_substeps);
            st.clipped_mass += st2.clipped_mass;
        }
        traj.clipped_mass += st.clipped_mass + clip_and_rescale(G, mass0);
        traj.max_substeps = std::max(traj.max_substeps, st.max_substeps);
        check_finite(G);
        if (step >= snapshot_step(next_k) || step == steps) {
            record(step);
            while (snapshot_step(next_k) <= step)
                ++next_k;
        }
    }
    traj.steps = steps;
    if (traj.clipped_mass > 1e-12 * mass0)
        spdlog::warn("clipped mass {} exceeds 1e-12 of the total", traj.clipped_mass);
    else
        spdlog::debug("clipped mass {}", traj.clipped_mass);
    return traj;
}

Field FTrajectory::f_on(std::size_t k, const PhaseGrid& grid) const
{
    const Snapshot& s = g.snapshots.at(k);
    const PhysicalSample ps = from_self_similar(interpolant(s.field), map, s.time);
    return sample(grid, ps.f, FieldFrame::f);
}

FTrajectory evolve_f(const PhaseFunction& f0, const SolverConfig& cfg, double R0)
{
    if (!(R0 > 0.0))
        throw DomainError("evolve_f needs R0 > 0");
    FTrajectory out;
    out.map = SelfSimilarMap{cfg.p, R0};
    const SelfSimilarSample s = to_self_similar(f0, out.map, 0.0);
    const Field g0 = sample(cfg.grid, s.g, FieldFrame::g);
    out.g = evolve(g0, cfg, "f-frame datum");
    // g-frame time starts at log R0
    for (Snapshot& snap : out.g.snapshots) {
        snap.time += s.tau;
        snap.report.time = snap.time;
    }
    return out;
}

FTrajectory evolve_f(const Field& f0, const SolverConfig& cfg, double R0)
{
    return evolve_f(interpolant(f0), cfg, R0);
}

Field pullback(const Evolution& f, const SelfSimilarMap& map, double t, const PhaseGrid& grid)
{
    PhaseFunction ft = [f, t](Point x, Point v) { return f(t, x, v); };
    return sample(grid, to_self_similar(std::move(ft), map, t).g, FieldFrame::g);
}

std::vector<double> check_contraction(const Trajectory& a, const Trajectory& b)
{
    if (a.snapshots.size() != b.snapshots.size())
        throw ValueError("trajectories have different snapshot counts");
    std::vector<double> out;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const Field& fa = a.snapshots[k].field;
        const Field& fb = b.snapshots[k].field;
        if (!(fa.grid == fb.grid))
            throw ValueError("trajectories live on different grids");
        double s = 0.0;
        for (std::size_t i = 0; i < fa.values.size(); ++i)
            s += std::max(0.0, fb.values[i] - fa.values[i]);
        out.push_back(s * fa.grid.cell_volume());
    }
    return out;
}

std::vector<bool> check_comparison(const Trajectory& a, const Trajectory& b, double tol)
{
    if (a.snapshots.size() != b.snapshots.size())
        throw ValueError("trajectories have different snapshot counts");
    auto below = [tol](const Field& x, const Field& y) {
        for (std::size_t i = 0; i < x.values.size(); ++i)
            if (x.values[i] > y.values[i] + tol)
                return false;
        return true;
    };
    std::vector<bool> out;
    const bool initially = below(a.snapshots.front().field, b.snapshots.front().field);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        out.push_back(!initially || below(a.snapshots[k].field, b.snapshots[k].field));
    return out;
}

Field sandwiched_datum(const ModelParams& p, const PhaseGrid& grid, double gamma1, double gamma2, std::uint64_t seed,
                       std::optional<double> target_mass)
{
    const Field lo = sample(grid, profile_function({p, gamma1, Frame::g}), FieldFrame::g);
    const Field hi = sample(grid, profile_function({p, gamma2, Frame::g}), FieldFrame::g);
    for (std::size_t i = 0; i < lo.values.size(); ++i)
        if (lo.values[i] > hi.values[i])
            throw ValueError("sandwich profiles are not ordered: need (1-m) gamma2 < (1-m) gamma1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> wave(1, 3);
    struct Mode {
        double a, kx, kv, ph;
    };
    std::vector<Mode> modes;
    double norm = 0.0;
    for (int i = 0; i < 4; ++i) {
        Mode md{amp(rng), static_cast<double>(wave(rng)), static_cast<double>(wave(rng)), phase(rng)};
        norm += std::abs(md.a);
        modes.push_back(md);
    }
    // smooth logit field: theta = sigmoid(z + shift) stays strictly inside (0, 1)
    Field z(grid, FieldFrame::g);
    std::array<double, 2> x{}, v{};
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        grid.x_of(ix, x.data());
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            grid.v_of(iv, v.data());
            double s = 0.0;
            for (const Mode& md : modes) {
                double arg = md.ph;
                for (int a = 0; a < grid.d(); ++a)
                    arg += std::numbers::pi * (md.kx * x[a] / grid.Lx() + md.kv * v[a] / grid.Lv());
                s += md.a * std::sin(arg);
            }
            z.at(ix, iv) = 2.0 * s / norm;
        }
    }
    auto build = [&](double shift) {
        Field out(grid, FieldFrame::g);
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            const double th = 1.0 / (1.0 + std::exp(-(z.values[i] + shift)));
            out.values[i] = lo.values[i] + th * (hi.values[i] - lo.values[i]);
        }
        return out;
    };
    if (!target_mass)
        return build(0.0);
    double a = -40.0, b = 40.0;
    if (mass(build(a)) > *target_mass || mass(build(b)) < *target_mass)
        throw ValueError("target mass is outside the sandwich");
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        const double c = 0.5 * (a + b);
        if (mass(build(c)) < *target_mass)
            a = c;
        else
            b = c;
    }
    return build(0.5 * (a + b));
}

double log_slope(const std::vector<double>& times, const std::vector<double>& values)
{
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
        if (!(values[i] > 0.0))
            continue;
        const double y = std::log(values[i]);
        n += 1;
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
    }
    const double den = n * stt - st * st;
    if (n < 2 || den == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return (n * sty - st * sy) / den;
}

} // namespace nlk
