#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlk/difflimit.hpp"
#include "nlk/errors.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace nlk;

namespace {

const MacroParams MP = macro_params(model_params(1, 0.8));

double line_mass(const std::vector<double>& rho, const Line& line)
{
    return std::accumulate(rho.begin(), rho.end(), 0.0) * line.dx();
}

} // namespace

TEST_CASE("macroscopic constants at d = 1, m = 0.8")
{
    CHECK(MP.alpha == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
    CHECK(MP.eta == doctest::Approx(1.875).epsilon(1e-14));
    CHECK(MP.k == doctest::Approx(7.0 / 9.0).epsilon(1e-14));
    CHECK(MP.beta == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
    CHECK(MP.c_star > 0.0);
    CHECK(MP.mu1 > 0.0);
    CHECK(MP.nu1 > 0.0);
}

TEST_CASE("admissible range")
{
    CHECK_THROWS_AS(macro_params(model_params(1, 0.45, false)), RangeError);
    CHECK_THROWS_AS(macro_params(model_params(1, 0.5, false)), RangeError);
    CHECK_THROWS_AS(macro_params(model_params(2, 0.6)), RangeError);
    CHECK_NOTHROW(macro_params(model_params(1, 0.55)));
    CHECK_NOTHROW(macro_params(model_params(1, 1.3)));
}

TEST_CASE("algebraic identities for random exponents")
{
    std::mt19937_64 rng(17);
    for (int d : {1, 2}) {
        const double lo = d / (d + 1.0) + 1e-3, hi = d == 1 ? 1.499 : 0.999;
        std::uniform_real_distribution<double> U(lo, hi);
        for (int i = 0; i < 500; ++i) {
            double m = U(rng);
            if (std::abs(m - 1.0) < 1e-3)
                m += 2e-3;
            const ModelParams p = model_params(d, m);
            const MacroParams mp = macro_params(p);
            const double mc = (d - 2.0) / d;
            CHECK(1.0 / mp.alpha == doctest::Approx(d * (m - mc)).epsilon(1e-12));
            CHECK(2.0 * (d * m - d + 1.0) * mp.eta == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(mp.k == doctest::Approx(1.0 + 2.0 * mp.alpha * (m - 1.0)).epsilon(1e-12));
            CHECK(std::abs(mp.k - p.k) <= 1e-12);
            CHECK(1.0 / mp.beta == doctest::Approx(d * (mp.k - 1.0) + 2.0).epsilon(1e-12));
            CHECK(mp.k > d / (d + 2.0));
            CHECK(mp.tau_of_s(0.0) == 0.0);
        }
    }
}

TEST_CASE("time change")
{
    for (const MacroParams& mp : {MP, macro_params(model_params(1, 1.3))}) {
        CHECK(mp.tau_of_s(0.0) == 0.0);
        CHECK(mp.s_of_tau(0.0) == doctest::Approx(0.0));
        for (double s : {0.0, 1.0, 5.0}) {
            const double h = 1e-5;
            const double s0 = std::max(s, h);
            const double fd = (mp.tau_of_s(s0 + h) - mp.tau_of_s(s0 - h)) / (2.0 * h);
            const double R = std::pow(1.0 + s0 / mp.alpha, mp.alpha), sigma = 1.0 / (1.0 + s0 / mp.alpha);
            CHECK(mp.R(s0) == doctest::Approx(R).epsilon(1e-14));
            CHECK(mp.sigma(s0) == doctest::Approx(sigma).epsilon(1e-14));
            CHECK(fd == doctest::Approx(mp.nu1 * R * R / sigma).epsilon(1e-8));
            CHECK(mp.s_of_tau(mp.tau_of_s(s)) == doctest::Approx(s).epsilon(1e-12));
            const double tau = mp.tau_of_s(s0);
            CHECK(mp.transport_rate(tau) == doctest::Approx(R / (mp.nu1 * R * R / sigma)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(MP.s_of_tau(-1.0), DomainError);
}

TEST_CASE("Barenblatt solution")
{
    SUBCASE("unit mass")
    {
        for (const MacroParams& mp : {MP, macro_params(model_params(1, 0.6)), macro_params(model_params(1, 1.3))})
            for (double tau : {0.1, 1.0, 10.0}) {
                double M;
                if (mp.k < 1.0) {
                    M = 2.0 * oracle::half_line([&](double x) { return barenblatt(tau, x, mp); });
                } else {
                    // support edge from c_star + ((1-k)/(2k)) y^2 = 0, y = (tau/beta)^-beta x
                    const double y = std::sqrt(mp.c_star * 2.0 * mp.k / (mp.k - 1.0));
                    const double edge = y * std::pow(tau / mp.beta, mp.beta);
                    M = oracle::interval([&](double x) { return barenblatt(tau, x, mp); }, -edge, edge);
                }
                INFO("k=", mp.k, " tau=", tau);
                CHECK(M == doctest::Approx(1.0).epsilon(1e-8));
            }
    }

    SUBCASE("self-similar form")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> T(0.05, 20.0), X(-10.0, 10.0);
        for (int i = 0; i < 200; ++i) {
            const double tau = T(rng), x = X(rng);
            const double lam = std::pow(tau / MP.beta, -MP.beta);
            CHECK(barenblatt(tau, x, MP) == doctest::Approx(lam * barenblatt(MP.beta, lam * x, MP)).epsilon(1e-12));
        }
        CHECK(barenblatt(MP.beta, 0.0, MP) == doctest::Approx(std::pow(MP.c_star, 1.0 / (MP.k - 1.0))).epsilon(1e-14));
        CHECK_THROWS_AS(barenblatt(0.0, 1.0, MP), DomainError);
        CHECK_THROWS_AS(barenblatt(-1.0, 1.0, MP), DomainError);
    }

    SUBCASE("solves the porous-medium equation")
    {
        for (const MacroParams& mp : {MP, macro_params(model_params(1, 1.3))}) {
            auto residual = [&](double tau, double x, double h) {
                auto P = [&](double y) { return std::pow(barenblatt(tau, y, mp), mp.k); };
                const double dt = (barenblatt(tau + h, x, mp) - barenblatt(tau - h, x, mp)) / (2.0 * h);
                return dt - (P(x + h) - 2.0 * P(x) + P(x - h)) / (h * h);
            };
            std::mt19937_64 rng(9);
            std::uniform_real_distribution<double> T(0.5, 3.0), X(-1.0, 1.0);
            for (int i = 0; i < 20; ++i) {
                const double tau = T(rng), x = X(rng);
                const double r1 = std::abs(residual(tau, x, 2e-3)), r2 = std::abs(residual(tau, x, 1e-3));
                CHECK(r2 < 1e-4);
                CHECK(r2 <= 0.3 * r1 + 1e-9);
            }
        }
    }
}

TEST_CASE("porous-medium solver")
{
    const Line line{128, 40.0};

    SUBCASE("mass is conserved")
    {
        const auto rho0 = sample_barenblatt(0.5, line, MP);
        const auto tr = pme_solve(rho0, MP.k, 1.0, line, {0.25, 0.5});
        REQUIRE(tr.times.size() == 3);
        CHECK(tr.times.back() == 1.0);
        const double M0 = line_mass(rho0, line);
        for (const auto& r : tr.rho) {
            CHECK(std::abs(line_mass(r, line) - M0) <= 1e-12 * M0);
            for (double v : r)
                CHECK(v >= 0.0);
        }
    }

    SUBCASE("a constant stays constant")
    {
        const std::vector<double> rho0(line.N, 0.3);
        const auto tr = pme_solve(rho0, MP.k, 2.0, line);
        for (double v : tr.rho.back())
            CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
    }

    SUBCASE("tracks the Barenblatt solution with decreasing error")
    {
        double prev = 1.0;
        for (int N : {64, 128, 256}) {
            const Line l{N, 40.0};
            const auto tr = pme_solve(sample_barenblatt(1.0, l, MP), MP.k, 1.0, l);
            const double err = l1_line(tr.rho.back(), sample_barenblatt(2.0, l, MP), l);
            INFO("N=", N, " err=", err);
            CHECK(err < prev);
            CHECK(err < 2e-2);
            prev = err;
        }
        CHECK(prev < 5e-3);
    }

    SUBCASE("input validation")
    {
        const std::vector<double> ok(line.N, 1.0);
        CHECK_THROWS_AS(pme_solve(std::vector<double>(10, 1.0), MP.k, 1.0, line), ValueError);
        CHECK_THROWS_AS(pme_solve(ok, 0.3, 1.0, line), RangeError);
        CHECK_THROWS_AS(pme_solve(ok, MP.k, 0.0, line), ValueError);
        CHECK_THROWS_AS(pme_solve(ok, MP.k, 1.0, line, {2.0}), ValueError);
        auto bad = ok;
        bad[3] = -1.0;
        CHECK_THROWS_AS(pme_solve(bad, MP.k, 1.0, line), ValueError);
        CHECK_THROWS_AS(pme_solve(sample_barenblatt(1.0, line, MP), MP.k, 1.0, line, {}, 0.4, 10), CFLError);
    }
}

TEST_CASE("l1_line")
{
    const Line line{4, 2.0};
    CHECK(l1_line({1, 2, 3, 4}, {1, 1, 1, 1}, line) == doctest::Approx(6.0));
    CHECK_THROWS_AS(l1_line({1.0}, {1.0, 2.0}, line), ValueError);
}

TEST_CASE("small diffusion-limit sweep")
{
    DiffLimitConfig cfg;
    cfg.p = model_params(1, 0.8);
    cfg.x = {128, 40.0};
    cfg.Nv = 32;
    cfg.tau_star = {0.25};
    const auto rep = diffusion_limit_experiment({0.4, 0.2}, cfg);
    REQUIRE(rep.e.size() == 2);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.e[1] < rep.e[0]);
    // the gap to the local equilibrium is the O(eps) Hilbert corrector, odd in v
    for (const auto& r : rep.rows)
        CHECK(r.local_eq_gap < 1.5 * r.eps + 0.05);
    CHECK(rep.pme_oracle_error < 1e-2);
    CHECK(rep.rows[0].tau == doctest::Approx(1.25));

    CHECK_THROWS_AS(diffusion_limit_experiment({0.2, 0.4}, cfg), ValueError);
    CHECK_THROWS_AS(diffusion_limit_experiment({}, cfg), ValueError);
    CHECK_THROWS_AS(diffusion_limit_experiment({-0.1}, cfg), ValueError);
    DiffLimitConfig d2 = cfg;
    d2.p = model_params(2, 0.8);
    CHECK_THROWS_AS(diffusion_limit_experiment({0.4}, d2), ValueError);
}
