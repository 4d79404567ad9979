#include "nlk/difflimit.hpp"

#include "nlk/errors.hpp"
#include "nlk/solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace nlk {

double MacroParams::R(double s) const
{
    return std::pow(1.0 + s / alpha, alpha);
}

double MacroParams::sigma(double s) const
{
    return 1.0 / (1.0 + s / alpha);
}

double MacroParams::tau_of_s(double s) const
{
    return alpha * nu1 / (2.0 * (1.0 + alpha)) * (std::pow(1.0 + s / alpha, 2.0 * (1.0 + alpha)) - 1.0);
}

double MacroParams::s_of_tau(double tau) const
{
    if (tau < 0.0)
        throw DomainError("tau must be nonnegative");
    return alpha * (std::pow(1.0 + 2.0 * (1.0 + alpha) * tau / (alpha * nu1), 1.0 / (2.0 * (1.0 + alpha))) - 1.0);
}

double MacroParams::transport_rate(double tau) const
{
    const double s = s_of_tau(tau);
    // R / (nu1 R^2 / sigma)
    return sigma(s) / (nu1 * R(s));
}

MacroParams macro_params(const ModelParams& p)
{
    if (!(p.m > p.m_c))
        throw RangeError("the parabolic scaling needs m > m_c (alpha > 0)");
    if (!(p.m > p.m_tilde1))
        throw RangeError("the diffusion limit needs a finite second moment: m > d/(d+1)");
    const int d = p.d;
    MacroParams mp;
    mp.p = p;
    mp.alpha = 1.0 / (d * p.m - d + 2.0);
    mp.eta = 3.0 / (2.0 * (d * p.m - d + 1.0));
    mp.k = 1.0 + 2.0 * mp.alpha * (p.m - 1.0);
    if (std::abs(mp.k - p.k) > 1e-12)
        throw Error("the two expressions for k disagree");
    mp.beta = 1.0 / (d * (mp.k - 1.0) + 2.0);
    const ClosureConstants cc = equilibrium_normalization((1.0 - p.m) / (2.0 * p.m), p);
    mp.mu1 = cc.mu1;
    mp.nu1 = cc.nu1;
    // int (c + K|x|^2)_+^e = c^(e + d/2) |K|^(-d/2) I
    const double e = 1.0 / (mp.k - 1.0);
    const double K = (1.0 - mp.k) / (2.0 * mp.k);
    const double I = radial::moment(d, 0, e, mp.k < 1.0 ? 1 : -1);
    mp.c_star = std::pow(std::pow(std::abs(K), 0.5 * d) / I, 1.0 / (e + 0.5 * d));
    return mp;
}

double barenblatt_profile(double x, const MacroParams& mp)
{
    const double base = mp.c_star + (1.0 - mp.k) / (2.0 * mp.k) * x * x;
    return base > 0.0 ? std::pow(base, 1.0 / (mp.k - 1.0)) : 0.0;
}

double barenblatt(double tau, double x, const MacroParams& mp)
{
    if (!(tau > 0.0))
        throw DomainError("Barenblatt solution needs tau > 0");
    const double r = tau / mp.beta;
    return std::pow(r, -mp.p.d * mp.beta) * barenblatt_profile(std::pow(r, -mp.beta) * x, mp);
}

std::vector<double> sample_barenblatt(double tau, const Line& line, const MacroParams& mp)
{
    std::vector<double> out(line.N);
    for (int i = 0; i < line.N; ++i)
        out[i] = barenblatt(tau, line.x(i), mp);
    return out;
}

double l1_line(const std::vector<double>& a, const std::vector<double>& b, const Line& line)
{
    if (a.size() != b.size())
        throw ValueError("density sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(a[i] - b[i]);
    return s * line.dx();
}

PmeTrajectory pme_solve(const std::vector<double>& rho0, double k, double tau_end, const Line& line,
                        std::vector<double> times, double cfl, std::int64_t max_steps)
{
    if (static_cast<int>(rho0.size()) != line.N)
        throw ValueError("initial density does not match the line");
    if (!(k > 1.0 / 3.0))
        throw RangeError("pme_solve needs k > d/(d+2) = 1/3");
    if (!(tau_end > 0.0))
        throw ValueError("tau_end must be positive");
    for (double r : rho0)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ValueError("initial density must be finite and nonnegative");
    times.push_back(tau_end);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.front() <= 0.0 || times.back() > tau_end)
        throw ValueError("output times must lie in (0, tau_end]");

    const int N = line.N;
    const double dx = line.dx();
    std::vector<double> rho = rho0, P(N), flux(N + 1, 0.0);
    PmeTrajectory out;
    double tau = 0.0;
    std::int64_t steps = 0;
    for (double target : times) {
        while (tau < target * (1.0 - 1e-15)) {
            for (int i = 0; i < N; ++i)
                P[i] = rho[i] > 0.0 ? std::pow(rho[i], k) : 0.0;
            double D = 0.0;
            for (int i = 0; i + 1 < N; ++i) {
                const double dr = rho[i + 1] - rho[i];
                double Di;
                if (std::abs(dr) > 1e-14 * std::max(rho[i], rho[i + 1]))
                    Di = (P[i + 1] - P[i]) / dr;
                else
                    Di = rho[i] > 0.0 ? k * std::pow(rho[i], k - 1.0) : 0.0;
                D = std::max(D, Di);
                flux[i + 1] = -(P[i + 1] - P[i]) / dx;
            }
            const double h = std::min(target - tau, D > 0.0 ? cfl * dx * dx / (2.0 * D) : target - tau);
            for (int i = 0; i < N; ++i)
                rho[i] -= h / dx * (flux[i + 1] - flux[i]);
            tau += h;
            if (++steps > max_steps)
                throw CFLError("porous-medium solver exceeded " + std::to_string(max_steps) + " steps");
        }
        out.times.push_back(target);
        out.rho.push_back(rho);
    }
    return out;
}

DiffLimitReport diffusion_limit_experiment(const std::vector<double>& eps_list, const DiffLimitConfig& cfg)
{
    const ModelParams& p = cfg.p;
    if (p.d != 1)
        throw ValueError("the diffusion-limit experiment is implemented for d = 1");
    if (eps_list.empty())
        throw ValueError("empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0))
            throw ValueError("eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ValueError("eps values must be decreasing");
    }
    if (cfg.tau_star.empty() || !(cfg.tau0 > 0.0))
        throw ValueError("need tau0 > 0 and at least one matched time");
    std::vector<double> offsets = cfg.tau_star;
    std::sort(offsets.begin(), offsets.end());
    if (!(offsets.front() > 0.0))
        throw ValueError("matched times must be positive");

    DiffLimitReport rep;
    rep.mp = macro_params(p);
    const MacroParams& mp = rep.mp;
    const PhaseGrid grid(1, cfg.x.N, cfg.Nv, cfg.x.L, cfg.Lv);
    const double c = (1.0 - p.m) / (2.0 * p.m);

    const std::vector<double> rho0 = sample_barenblatt(cfg.tau0, cfg.x, mp);
    {
        const PmeTrajectory pme = pme_solve(rho0, mp.k, offsets.back(), cfg.x, offsets);
        double err = 0.0;
        for (std::size_t i = 0; i < pme.times.size(); ++i)
            err = std::max(err, l1_line(pme.rho[i], sample_barenblatt(cfg.tau0 + pme.times[i], cfg.x, mp), cfg.x));
        rep.pme_oracle_error = err;
    }

    DiffusionControl ctl;
    ctl.cfl = cfg.cfl;
    ctl.floor = cfg.floor;
    for (double eps : eps_list) {
        Field h = local_equilibrium(rho0, grid, c, p, FieldFrame::g);
        const double mass0 = mass(h);
        double tau = 0.0;
        double worst = 0.0;
        for (double target : offsets) {
            while (tau < target * (1.0 - 1e-14)) {
                const double a = mp.transport_rate(cfg.tau0 + tau);
                const double relax = eps * eps / (a * a * mp.nu1);
                double dt = std::min(cfg.split_fraction * relax, target - tau);
                // coefficients frozen at the midpoint of the step
                const double am = mp.transport_rate(cfg.tau0 + tau + 0.5 * dt);
                const DriftDiffusion coef{p.m, am * am * mp.nu1 / (eps * eps), 1.0};
                step_drift_diffusion(h, 0.5 * dt, coef, ctl);
                shear_x(h, am / eps * dt);
                step_drift_diffusion(h, 0.5 * dt, coef, ctl);
                clip_and_rescale(h, mass0);
                tau += dt;
            }
            const std::vector<double> rho = spatial_density(h);
            DiffLimitRow row;
            row.eps = eps;
            row.tau = cfg.tau0 + target;
            row.error = l1_line(rho, sample_barenblatt(row.tau, cfg.x, mp), cfg.x);
            row.local_eq_gap = l1_distance(h, local_equilibrium(rho, grid, c, p, FieldFrame::g));
            worst = std::max(worst, row.error);
            spdlog::debug("eps {} tau {} error {}", eps, row.tau, row.error);
            rep.rows.push_back(row);
        }
        rep.e.push_back(worst);
    }
    return rep;
}

} // namespace nlk
