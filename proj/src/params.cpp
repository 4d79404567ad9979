#include "nlk/params.hpp"

#include "nlk/errors.hpp"
#include "nlk/io.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace nlk {

namespace {

Rational normalized(long long num, long long den)
{
    if (den == 0)
        throw ValueError("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

/// sign of a/b - c/d for positive denominators
int compare(Rational a, Rational b)
{
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string describe(int d, double m)
{
    std::ostringstream os;
    os << "m=" << format_double(m) << " (d=" << d << ")";
    return os.str();
}

void check_dimension(int d)
{
    if (d < 1)
        throw RangeError("dimension d must be >= 1, got " + std::to_string(d));
}

void fill_derived(ModelParams& p)
{
    const double d = p.d;
    const double m = p.m;
    p.m1 = 1.0 - 1.0 / d;
    p.m2 = 1.0 + 1.0 / d;
    p.m3 = 1.0 - 3.0 / d;
    p.m_tilde1 = d / (d + 1.0);
    p.m_c = (d - 2.0) / d;
    p.zeta = -(1.0 - m) / 4.0;
    p.alpha = 1.0 / (d * m - d + 2.0);

    const double k_route1 = 1.0 + 1.0 / (0.5 * d + 1.0 / (m - 1.0));
    const double k_route2 = 1.0 + 2.0 * p.alpha * (m - 1.0);
    if (std::abs(k_route1 - k_route2) > 1e-12 * std::abs(k_route2))
        throw Error("inconsistent diffusion exponent k: " + format_double(k_route1) + " vs " + format_double(k_route2));
    p.k = k_route2;

    p.gamma_star = gamma_star(p);
    try {
        p.Z_m = profile_moment(p, p.gamma_star, m / (m - 1.0), 0);
    } catch (const IntegralDivergence&) {
        p.Z_m = std::numeric_limits<double>::infinity();
    }
}

} // namespace

std::vector<std::pair<std::string, std::string>> ModelParams::entries() const
{
    return {
        {"d", std::to_string(d)},
        {"m", format_double(m)},
        {"A", format_double(A)},
        {"m1", format_double(m1)},
        {"m2", format_double(m2)},
        {"m3", format_double(m3)},
        {"m_tilde1", format_double(m_tilde1)},
        {"m_c", format_double(m_c)},
        {"zeta", format_double(zeta)},
        {"k", format_double(k)},
        {"alpha", format_double(alpha)},
        {"gamma_star", format_double(gamma_star)},
        {"Z_m", format_double(Z_m)},
        {"strict_theorem_range", strict_theorem_range ? "true" : "false"},
    };
}

Rational exact_A(int d, Rational m)
{
    m = normalized(m.num, m.den);
    const long long num = m.den + d * m.den - d * m.num;
    const long long den = 3 * m.den - d * m.den + d * m.num;
    return normalized(num, den);
}

ModelParams model_params(int d, Rational m, bool strict)
{
    check_dimension(d);
    m = normalized(m.num, m.den);
    if (m.num == m.den)
        throw ValueError("m = 1 is excluded: the self-similar change of variables degenerates");

    const Rational m1{d - 1LL, d};
    const Rational m2{d + 1LL, d};
    const bool in_range = compare(m, m1) > 0 && compare(m, m2) < 0;

    const Rational A = exact_A(d, m);
    const bool A_in_unit = A.num > 0 && A.num < A.den;
    if (in_range != A_in_unit)
        throw Error("range test and A test disagree for " + describe(d, m.value()));
    if (!in_range)
        throw RangeError(describe(d, m.value()) + " outside (m1, 1) u (1, m2)");
    if (strict && d == 1 && !(compare(m, {1, 2}) > 0 && compare(m, {3, 2}) < 0))
        throw RangeError(describe(d, m.value()) + " outside the strict range (1/2, 3/2)");

    ModelParams p;
    p.d = d;
    p.m = m.value();
    p.A = A.value();
    p.strict_theorem_range = strict;
    fill_derived(p);
    return p;
}

ModelParams model_params(int d, double m, bool strict)
{
    check_dimension(d);
    if (!std::isfinite(m))
        throw ValueError("m must be finite");
    if (m == 1.0)
        throw ValueError("m = 1 is excluded: the self-similar change of variables degenerates");

    const double dd = d;
    const bool in_range = m > 1.0 - 1.0 / dd && m < 1.0 + 1.0 / dd;
    const double A = (1.0 + dd - dd * m) / (3.0 - dd + dd * m);
    const bool A_in_unit = A > 0.0 && A < 1.0;
    if (in_range != A_in_unit)
        throw Error("range test and A test disagree for " + describe(d, m));
    if (!in_range)
        throw RangeError(describe(d, m) + " outside (m1, 1) u (1, m2)");
    if (strict && d == 1 && !(m > 0.5 && m < 1.5))
        throw RangeError(describe(d, m) + " outside the strict range (1/2, 3/2)");

    ModelParams p;
    p.d = d;
    p.m = m;
    p.A = A;
    p.strict_theorem_range = strict;
    fill_derived(p);
    return p;
}

namespace radial {

double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace {

/// exponents P, Q of (1/2) int_0^1 t^P (1-t)^Q dt representing the radial integral
std::pair<double, double> beta_exponents(int n, int j, double e, int s)
{
    const double a = n - 1.0 + 2.0 * j;
    if (s > 0)
        return {0.5 * (a - 1.0), -0.5 * a - e - 1.5};
    return {0.5 * (a - 1.0), e};
}

void check_convergence(int n, int j, double e, int s)
{
    if (s > 0 && !(-e > 0.5 * n + j))
        throw IntegralDivergence("radial moment diverges: need -e > n/2 + j (n=" + std::to_string(n) +
                                 ", j=" + std::to_string(j) + ", e=" + format_double(e) + ")");
    if (s < 0 && !(e > -1.0))
        throw IntegralDivergence("radial moment diverges at the support boundary: e=" + format_double(e));
}

} // namespace

double moment_quadrature(int n, int j, double e, int s)
{
    check_convergence(n, j, e, s);
    const auto [P, Q] = beta_exponents(n, j, e, s);
    boost::math::quadrature::tanh_sinh<double> integrator(20);
    const double tol = 1e-14;
    // int_0^(1/2) t^a (1-t)^b dt: the t^a singularity is integrated exactly and only the smooth remainder
    // t^a ((1-t)^b - 1) = O(t^(a+1)) goes through the quadrature, so exponents close to -1 stay accurate
    auto half = [&](double a, double b) {
        const double rest = integrator.integrate(
            [a, b](double t) { return t > 0.0 ? std::pow(t, a) * std::expm1(b * std::log1p(-t)) : 0.0; }, 0.0, 0.5,
            tol);
        return rest + std::pow(0.5, a + 1.0) / (a + 1.0);
    };
    return 0.5 * sphere_area(n) * (half(P, Q) + half(Q, P));
}

double moment_closed_form(int n, int j, double e, int s)
{
    check_convergence(n, j, e, s);
    const double half_n = 0.5 * n;
    const double angular = std::pow(std::numbers::pi, half_n) *
                           std::exp(std::lgamma(half_n + j) - std::lgamma(half_n));
    if (s > 0) {
        const double p = -e;
        return angular * std::exp(std::lgamma(p - half_n - j) - std::lgamma(p));
    }
    return angular * std::exp(std::lgamma(e + 1.0) - std::lgamma(e + 1.0 + half_n + j));
}

double moment(int n, int j, double e, int s)
{
    const double exact = moment_closed_form(n, j, e, s);
    // near m = 1 the integrand is a spike of width |e|^(-1/2) that double-precision quadrature cannot resolve
    if (std::abs(e) > 200.0)
        return exact;
    const double quad = moment_quadrature(n, j, e, s);
    if (!(std::abs(exact - quad) <= 1e-8 * std::abs(exact)))
        throw ConvergenceError("radial quadrature " + format_double(quad) + " disagrees with closed form " +
                               format_double(exact));
    return exact;
}

double mass_fraction(int n, double e, int s, double r)
{
    check_convergence(n, 0, e, s);
    if (r <= 0.0)
        return 0.0;
    const auto [P, Q] = beta_exponents(n, 0, e, s);
    double t;
    if (s > 0) {
        t = r * r / (1.0 + r * r);
    } else {
        if (r >= 1.0)
            return 1.0;
        t = r * r;
    }
    return boost::math::ibeta(P + 1.0, Q + 1.0, t);
}

} // namespace radial

namespace {

/// log of profile_moment; evaluated in log space because |q|^e over- or underflows near m = 1
double log_profile_moment(const ModelParams& p, double gamma, double e, int jv)
{
    if (!((1.0 - p.m) * gamma > 0.0))
        throw ValueError("profile offset must satisfy (1-m) gamma > 0, got " + format_double(gamma));
    if (jv != 0 && jv != 1)
        throw ValueError("only zeroth and second v-moments are supported");
    const int d = p.d;
    const double g = std::abs(gamma);
    const double B = p.B();
    const double log_scale = e * std::log(std::abs(p.q()) * g) + d * std::log(g / B) - 0.5 * d * std::log(p.A);
    const double w = radial::moment(2 * d, jv, e, p.sign());
    // the |v|^2 part carries half of |w|^2 by symmetry of the 2d-dimensional radial integrand
    const double vfac = jv == 1 ? 0.5 * g / B : 1.0;
    return log_scale + std::log(vfac * w);
}

} // namespace

double profile_moment(const ModelParams& p, double gamma, double e, int jv)
{
    return std::exp(log_profile_moment(p, gamma, e, jv));
}

double profile_mass(const ModelParams& p, double gamma)
{
    return profile_moment(p, gamma, 1.0 / (p.m - 1.0), 0);
}

double gamma_star(const ModelParams& p)
{
    const double s = p.sign();
    const double logK = log_profile_moment(p, s, 1.0 / (p.m - 1.0), 0);
    const double E = 1.0 / (p.m - 1.0) + p.d;
    return s * std::exp(-logK / E);
}

double equilibrium_density(double mu, double c, const ModelParams& p)
{
    if ((1.0 - p.m) * c <= 0.0)
        throw ValueError("coefficient c must carry the sign of 1 - m");
    if (mu <= 0.0) {
        if (p.m < 1.0)
            throw DomainError("mu must be positive in the fast-diffusion regime");
        return 0.0;
    }
    const double e = 1.0 / (p.m - 1.0);
    const double J = radial::moment(p.d, 0, e, p.sign());
    return std::pow(mu, e + 0.5 * p.d) * std::pow(std::abs(c), -0.5 * p.d) * J;
}

ClosureConstants equilibrium_normalization(double c, const ModelParams& p)
{
    if ((1.0 - p.m) * c <= 0.0)
        throw ValueError("coefficient c must carry the sign of 1 - m");
    if (p.m <= p.m_tilde1)
        throw IntegralDivergence("second moment of the equilibrium diverges for m <= d/(d+1)");
    const int d = p.d;
    const double e = 1.0 / (p.m - 1.0);
    const double J = radial::moment(d, 0, e, p.sign());
    const double J2 = radial::moment(d, 1, e, p.sign());
    const double ac = std::abs(c);
    ClosureConstants out;
    out.mu1 = std::pow(std::pow(ac, -0.5 * d) * J, -(p.k - 1.0));
    out.nu1 = std::pow(ac, -0.5 * d - 1.0) * J2 * std::pow(out.mu1, p.k / (p.k - 1.0)) / d;
    return out;
}

} // namespace nlk
