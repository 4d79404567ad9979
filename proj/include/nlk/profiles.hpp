#pragma once

#include "nlk/params.hpp"

#include <functional>
#include <span>
#include <vector>

namespace nlk {

using Point = std::span<const double>;

/// Time-independent function of (x, v).
using PhaseFunction = std::function<double(Point x, Point v)>;
/// Function of (t, x, v).
using Evolution = std::function<double(double t, Point x, Point v)>;

/// Coefficient layout of the stationary profile.
enum class Frame { g, G };

struct ProfileSpec {
    ModelParams p;
    double gamma = 0.0;
    Frame frame = Frame::g;
};

/// (base)_+^e, with exact zero for base <= 0.
double positive_power(double base, double e);

/// Pressure of the fundamental solution. Throws DomainError for t <= 0.
double pressure_star(double t, Point x, Point v, const ModelParams& p);

/// Explicit self-similar solution with a Dirac initial datum of mass 1.
double fundamental_solution(double t, Point x, Point v, const ModelParams& p);

/// Stationary profile g_gamma (g-frame) or G_gamma (G-frame).
double profile(const ProfileSpec& spec, Point x, Point v);

/// Pressure-like quadratic gamma + B(|v|^2 + A|x|^2) of the g-frame profile.
double profile_pressure(const ModelParams& p, double gamma, Point x, Point v);

/// Offset gamma whose stationary profile has mass M.
double gamma_for_mass(const ModelParams& p, double M);

PhaseFunction profile_function(const ProfileSpec& spec);
Evolution fundamental_evolution(const ModelParams& p);

/// Time-dependent scale R(t) = (R0^(1-A) + (1-A) t)^(1/(1-A)).
struct SelfSimilarMap {
    ModelParams p;
    double R0 = 1.0;

    double R(double t) const;
    double tau(double t) const;
    double t_of_tau(double tau) const;
};

struct SelfSimilarSample {
    double tau = 0.0;
    PhaseFunction g;
};

struct PhysicalSample {
    double t = 0.0;
    PhaseFunction f;
};

/// g(tau, y, w) = R^(d(1+A)) f(t, R y, R^A (w + y)) with tau = log R(t).
SelfSimilarSample to_self_similar(PhaseFunction f_t, const SelfSimilarMap& map, double t);

/// f(t, x, v) = R^(-d(1+A)) g(tau, x/R, v/R^A - x/R) with R = exp(tau).
PhysicalSample from_self_similar(PhaseFunction g_tau, const SelfSimilarMap& map, double tau);

/// f_M(t,x,v) = M f(M^(2 zeta) t, M^zeta x, M^(-zeta) v).
Evolution mass_rescale(Evolution f, double M, const ModelParams& p);

/// f_lambda(t,x,v) = lambda^4 f(lambda^(2(m-m1)) t, lambda^(m-m3) x, lambda^(m2-m) v).
Evolution scale_orbit(Evolution f, double lambda, const ModelParams& p);

/// f_star(t, x - x0 - t v0, v - v0).
double translated_solution(double t, Point x, Point v, Point x0, Point v0, const ModelParams& p);

/// Level set of the pressure enclosing half of the mass, as an ellipse in the (x, v) plane.
struct Ellipse {
    double center_x = 0.0;
    double center_v = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle = 0.0;   ///< rotation of the major axis from the x axis, radians
    double level = 0.0;   ///< pressure value on the ellipse
    double r_half = 0.0;  ///< half-mass radius of the normalised Barenblatt variable
    double enclosed_mass = 0.0;

    /// count points (x, v) on the ellipse.
    std::vector<std::pair<double, double>> points(int count) const;
};

/// d = 1 only. Throws ConvergenceError if the bisection does not converge.
Ellipse half_mass_ellipse(double t, const ModelParams& p);

/// Mass of the fundamental solution inside {P_star <= level} (d = 1).
double mass_below_level(double t, double level, const ModelParams& p);

/// Normalised phase-space Barenblatt profile (1 +- r^2)_+^(1/(m-1)).
double barenblatt_phase(double r, const ModelParams& p);

} // namespace nlk
