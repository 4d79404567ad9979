#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nlk {

/// Exact ratio num/den used to validate exponents without rounding at the interval ends.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Every scalar constant of the model, derived from the dimension d and the exponent m.
struct ModelParams {
    int d = 1;
    double m = 0.0;
    double A = 0.0;
    double m1 = 0.0;       ///< 1 - 1/d, lower end of the admissible range
    double m2 = 0.0;       ///< 1 + 1/d, upper end of the admissible range
    double m3 = 0.0;       ///< 1 - 3/d, scale-invariance exponent
    double m_tilde1 = 0.0; ///< d/(d+1), threshold for finite second moments
    double m_c = 0.0;      ///< (d-2)/d, position-space Herrero-Pierre exponent
    double zeta = 0.0;     ///< mass-scaling exponent -(1-m)/4
    double k = 0.0;        ///< macroscopic diffusion exponent
    double alpha = 0.0;    ///< 1/(d(m - m_c))
    double gamma_star = 0.0;
    double Z_m = 0.0;      ///< integral of g_star^m, +inf when it diverges
    bool strict_theorem_range = true;

    /// Coefficient (1+A)/2 of the quadratic part of the pressure.
    double B() const { return 0.5 * (1.0 + A); }
    /// (1-m)/m, the factor relating pressure and g^(m-1).
    double q() const { return (1.0 - m) / m; }
    /// +1 in the fast-diffusion regime (m < 1), -1 in the porous-medium regime.
    int sign() const { return m < 1.0 ? 1 : -1; }

    /// key=value lines with shortest round-trip formatting.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Builds and validates the model constants.
/// Throws ValueError for m = 1 and RangeError outside (m1, 1) u (1, m2),
/// or outside (1/2, 3/2) when strict and d = 1.
ModelParams model_params(int d, double m, bool strict = true);
ModelParams model_params(int d, Rational m, bool strict = true);

/// A as an exact ratio.
Rational exact_A(int d, Rational m);

/// Normalisation offset making the stationary profile a probability density.
double gamma_star(const ModelParams& p);

/// Mass of the stationary profile with offset gamma (closed form of the radial integral).
double profile_mass(const ModelParams& p, double gamma);

/// Integral over R^d x R^d of |v|^(2 jv) (q (gamma + B(|v|^2 + A|x|^2)))_+^e.
double profile_moment(const ModelParams& p, double gamma, double e, int jv);

struct ClosureConstants {
    double mu1 = 0.0;
    double nu1 = 0.0;
};

/// Constants of the v-profile (mu + c|v|^2)_+^(1/(m-1)):
/// rho = (mu/mu1)^(1/(k-1)) and (1/d) int |v|^2 profile dv = nu1 rho^k.
/// The sign of c must be the sign of 1 - m.
/// Throws IntegralDivergence for m <= d/(d+1).
ClosureConstants equilibrium_normalization(double c, const ModelParams& p);

/// v-integral of (mu + c|v|^2)_+^(1/(m-1)) for mu > 0.
double equilibrium_density(double mu, double c, const ModelParams& p);

/// Radial integrals over R^n.
namespace radial {

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

/// Integral over R^n of |w|^(2j) (1 + s|w|^2)_+^e with s = +1 or -1, by 1-D quadrature.
double moment_quadrature(int n, int j, double e, int s);

/// Same integral through the Gamma-function closed form.
double moment_closed_form(int n, int j, double e, int s);

/// Closed form checked against quadrature for |e| <= 200; throws ConvergenceError if they disagree by more than 1e-8.
double moment(int n, int j, double e, int s);

/// Fraction of the total integral of (1 + s r^2)_+^e r^(n-1) carried by [0, r].
double mass_fraction(int n, double e, int s, double r);

} // namespace radial

} // namespace nlk
