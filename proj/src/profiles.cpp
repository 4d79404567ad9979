#include "nlk/profiles.hpp"

#include "nlk/errors.hpp"
#include "nlk/io.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>

namespace nlk {

namespace {

constexpr std::size_t kMaxDim = 8;
using Buffer = std::array<double, kMaxDim>;

double norm2(Point a)
{
    double s = 0.0;
    for (double x : a)
        s += x * x;
    return s;
}

void check_point(Point x, Point v, const ModelParams& p)
{
    if (x.size() != static_cast<std::size_t>(p.d) || v.size() != static_cast<std::size_t>(p.d))
        throw ValueError("point dimension does not match d=" + std::to_string(p.d));
}

void check_dim(int d)
{
    if (d > static_cast<int>(kMaxDim))
        throw ValueError("dimension too large for pointwise evaluators");
}

} // namespace

double positive_power(double base, double e)
{
    if (!(base > 0.0))
        return 0.0;
    return std::pow(base, e);
}

double pressure_star(double t, Point x, Point v, const ModelParams& p)
{
    if (!(t > 0.0))
        throw DomainError("pressure_star requires t > 0, got t=" + format_double(t));
    check_point(x, v, p);
    const double s = (1.0 - p.A) * t;
    const double beta = std::exp(std::log(s) * 2.0 * (1.0 - p.m) / (p.m - p.m1)) * p.gamma_star;
    double rel = 0.0;
    double xs2 = 0.0;
    for (int i = 0; i < p.d; ++i) {
        const double xs = x[i] / s;
        rel += (v[i] - xs) * (v[i] - xs);
        xs2 += xs * xs;
    }
    return beta + (1.0 + p.A) / (2.0 * s) * (rel + p.A * xs2);
}

double fundamental_solution(double t, Point x, Point v, const ModelParams& p)
{
    const double P = pressure_star(t, x, v, p);
    return positive_power(p.q() * P, 1.0 / (p.m - 1.0));
}

double profile_pressure(const ModelParams& p, double gamma, Point x, Point v)
{
    return gamma + p.B() * (norm2(v) + p.A * norm2(x));
}

double profile(const ProfileSpec& spec, Point x, Point v)
{
    const ModelParams& p = spec.p;
    check_point(x, v, p);
    double P;
    if (spec.frame == Frame::g)
        P = profile_pressure(p, spec.gamma, x, v);
    else
        P = spec.gamma + p.B() * std::sqrt(p.A) * (norm2(v) + norm2(x));
    return positive_power(p.q() * P, 1.0 / (p.m - 1.0));
}

double gamma_for_mass(const ModelParams& p, double M)
{
    if (!(M > 0.0))
        throw ValueError("mass must be positive");
    // mass(gamma) = K |gamma|^E with E = 1/(m-1) + d
    const double E = 1.0 / (p.m - 1.0) + p.d;
    return p.gamma_star * std::pow(M, 1.0 / E);
}

PhaseFunction profile_function(const ProfileSpec& spec)
{
    return [spec](Point x, Point v) { return profile(spec, x, v); };
}

Evolution fundamental_evolution(const ModelParams& p)
{
    return [p](double t, Point x, Point v) { return fundamental_solution(t, x, v, p); };
}

double SelfSimilarMap::R(double t) const
{
    const double base = std::pow(R0, 1.0 - p.A) + (1.0 - p.A) * t;
    if (!(base > 0.0))
        throw DomainError("self-similar scale R(t) is not positive at t=" + format_double(t));
    return std::pow(base, 1.0 / (1.0 - p.A));
}

double SelfSimilarMap::tau(double t) const
{
    return std::log(R(t));
}

double SelfSimilarMap::t_of_tau(double tau) const
{
    return (std::exp((1.0 - p.A) * tau) - std::pow(R0, 1.0 - p.A)) / (1.0 - p.A);
}

SelfSimilarSample to_self_similar(PhaseFunction f_t, const SelfSimilarMap& map, double t)
{
    const ModelParams& p = map.p;
    check_dim(p.d);
    const double R = map.R(t);
    const double RA = std::pow(R, p.A);
    const double jac = std::pow(R, p.d * (1.0 + p.A));
    const int d = p.d;
    SelfSimilarSample out;
    out.tau = std::log(R);
    out.g = [f_t = std::move(f_t), R, RA, jac, d](Point y, Point w) {
        Buffer x{}, v{};
        for (int i = 0; i < d; ++i) {
            x[i] = R * y[i];
            v[i] = RA * (w[i] + y[i]);
        }
        return jac * f_t(Point(x.data(), d), Point(v.data(), d));
    };
    return out;
}

PhysicalSample from_self_similar(PhaseFunction g_tau, const SelfSimilarMap& map, double tau)
{
    const ModelParams& p = map.p;
    check_dim(p.d);
    const double R = std::exp(tau);
    if (!(R > 0.0) || !std::isfinite(R))
        throw DomainError("self-similar scale exp(tau) is not a positive finite number");
    const double RA = std::pow(R, p.A);
    const double jac = std::pow(R, -p.d * (1.0 + p.A));
    const int d = p.d;
    PhysicalSample out;
    out.t = map.t_of_tau(tau);
    out.f = [g_tau = std::move(g_tau), R, RA, jac, d](Point x, Point v) {
        Buffer y{}, w{};
        for (int i = 0; i < d; ++i) {
            y[i] = x[i] / R;
            w[i] = v[i] / RA - x[i] / R;
        }
        return jac * g_tau(Point(y.data(), d), Point(w.data(), d));
    };
    return out;
}

Evolution mass_rescale(Evolution f, double M, const ModelParams& p)
{
    if (!(M > 0.0))
        throw ValueError("mass factor must be positive");
    check_dim(p.d);
    const double st = std::pow(M, 2.0 * p.zeta);
    const double sx = std::pow(M, p.zeta);
    const double sv = std::pow(M, -p.zeta);
    const int d = p.d;
    return [f = std::move(f), M, st, sx, sv, d](double t, Point x, Point v) {
        Buffer xs{}, vs{};
        for (int i = 0; i < d; ++i) {
            xs[i] = sx * x[i];
            vs[i] = sv * v[i];
        }
        return M * f(st * t, Point(xs.data(), d), Point(vs.data(), d));
    };
}

Evolution scale_orbit(Evolution f, double lambda, const ModelParams& p)
{
    if (!(lambda > 0.0))
        throw ValueError("scale factor must be positive");
    check_dim(p.d);
    const double amp = std::pow(lambda, 4.0);
    const double st = std::pow(lambda, 2.0 * (p.m - p.m1));
    const double sx = std::pow(lambda, p.m - p.m3);
    const double sv = std::pow(lambda, p.m2 - p.m);
    const int d = p.d;
    return [f = std::move(f), amp, st, sx, sv, d](double t, Point x, Point v) {
        Buffer xs{}, vs{};
        for (int i = 0; i < d; ++i) {
            xs[i] = sx * x[i];
            vs[i] = sv * v[i];
        }
        return amp * f(st * t, Point(xs.data(), d), Point(vs.data(), d));
    };
}

double translated_solution(double t, Point x, Point v, Point x0, Point v0, const ModelParams& p)
{
    check_point(x, v, p);
    check_point(x0, v0, p);
    check_dim(p.d);
    Buffer xs{}, vs{};
    for (int i = 0; i < p.d; ++i) {
        xs[i] = x[i] - x0[i] - t * v0[i];
        vs[i] = v[i] - v0[i];
    }
    return fundamental_solution(t, Point(xs.data(), p.d), Point(vs.data(), p.d), p);
}

namespace {

/// R(t)^(3A-1) for the scale with R0 = 0: pressure = amplitude * (gamma_star + |gamma_star| r^2).
double pressure_amplitude(double t, const ModelParams& p)
{
    const double logR = std::log((1.0 - p.A) * t) / (1.0 - p.A);
    return std::exp((3.0 * p.A - 1.0) * logR);
}

} // namespace

double mass_below_level(double t, double level, const ModelParams& p)
{
    if (!(t > 0.0))
        throw DomainError("mass_below_level requires t > 0");
    const double r2 = (level / pressure_amplitude(t, p) - p.gamma_star) / std::abs(p.gamma_star);
    if (r2 <= 0.0)
        return 0.0;
    return radial::mass_fraction(2 * p.d, 1.0 / (p.m - 1.0), p.sign(), std::sqrt(r2));
}

Ellipse half_mass_ellipse(double t, const ModelParams& p)
{
    if (p.d != 1)
        throw ValueError("half_mass_ellipse is defined for d = 1");
    if (!(t > 0.0))
        throw DomainError("half_mass_ellipse requires t > 0");

    const double amp = pressure_amplitude(t, p);
    const double beta = amp * p.gamma_star;
    double lo = beta;
    double hi;
    if (p.m > 1.0) {
        hi = 0.0;
    } else {
        hi = 2.0 * beta;
        int grow = 0;
        while (mass_below_level(t, hi, p) < 0.5) {
            hi = beta + 2.0 * (hi - beta);
            if (++grow > 200)
                throw ConvergenceError("could not bracket the half-mass level");
        }
    }
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass_below_level(t, mid, p) < 0.5)
            lo = mid;
        else
            hi = mid;
        if (std::abs(hi - lo) <= 1e-15 * std::max(std::abs(hi), std::abs(beta))) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("half-mass level bisection did not converge in 200 iterations");

    Ellipse e;
    e.level = 0.5 * (lo + hi);
    e.enclosed_mass = mass_below_level(t, e.level, p);
    e.r_half = std::sqrt((e.level / amp - p.gamma_star) / std::abs(p.gamma_star));

    const double s = (1.0 - p.A) * t;
    const double a = (1.0 + p.A) / (2.0 * s);
    const double b = 1.0 / s;
    Eigen::Matrix2d M;
    M << a * b * b * (1.0 + p.A), -a * b, -a * b, a;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    const double rhs = e.level - beta;
    // eigenvalues are ascending: the smallest one gives the major axis
    e.semi_major = std::sqrt(rhs / es.eigenvalues()(0));
    e.semi_minor = std::sqrt(rhs / es.eigenvalues()(1));
    const Eigen::Vector2d major = es.eigenvectors().col(0);
    e.angle = std::atan2(major(1), major(0));
    if (e.angle > std::numbers::pi / 2)
        e.angle -= std::numbers::pi;
    if (e.angle <= -std::numbers::pi / 2)
        e.angle += std::numbers::pi;
    return e;
}

std::vector<std::pair<double, double>> Ellipse::points(int count) const
{
    std::vector<std::pair<double, double>> out;
    out.reserve(count);
    const double c = std::cos(angle), s = std::sin(angle);
    for (int i = 0; i < count; ++i) {
        const double th = 2.0 * std::numbers::pi * i / count;
        const double u = semi_major * std::cos(th);
        const double w = semi_minor * std::sin(th);
        out.emplace_back(center_x + c * u - s * w, center_v + s * u + c * w);
    }
    return out;
}

double barenblatt_phase(double r, const ModelParams& p)
{
    return positive_power(1.0 + p.sign() * r * r, 1.0 / (p.m - 1.0));
}

} // namespace nlk
