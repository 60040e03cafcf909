#include <doctest.h>

#include <numbers>

#include "loopcmc/mesh.hpp"
#include "loopcmc/nnoid.hpp"
#include "testutil.hpp"

using namespace loopcmc;

namespace {

BalanceConfig small_config() {
    BalanceConfig cfg;
    cfg.tau = {1.0, 1.0};
    cfg.p = {0.5, 2.0};
    cfg.degree = 4;
    cfg.sample_pairs = 6;
    cfg.ode.tol = 1e-10;
    cfg.newton_tol = 5e-9;
    return cfg;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("balance_residual") {
    SUBCASE("antipodal pair balances") {
        const auto r = balance_residual(std::vector<double>{1.0, 1.0},
                                        std::vector<cplx>{0.5, 2.0});
        CHECK(std::abs(r[0]) < 1e-14);
        CHECK(std::abs(r[1]) < 1e-14);
        CHECK(std::abs(r[2]) < 1e-14);
    }
    SUBCASE("three-point configuration balances") {
        const auto r = balance_residual(std::vector<double>{21.0, 3.0, 32.0},
                                        std::vector<cplx>{0.5, -0.5, 3.0});
        CHECK(std::abs(r[0]) < 1e-12);
        CHECK(std::abs(r[1]) < 1e-12);
        CHECK(std::abs(r[2]) < 1e-12);
    }
    SUBCASE("all-inside configuration violates the middle sum") {
        const cplx w = std::polar(0.5, 2.0 * std::numbers::pi / 3.0);
        const auto r = balance_residual(std::vector<double>{1.0, 1.0, 1.0},
                                        std::vector<cplx>{0.5, w, std::conj(w)});
        CHECK(std::abs(r[0]) < 1e-14);  // the complex sums cancel by symmetry
        CHECK(std::abs(r[1]) > 1.0);    // but the real sum cannot
    }
}

TEST_CASE("unitarity_residual") {
    BalanceConfig cfg = small_config();
    SUBCASE("vanishes at t = 0") {
        NnoidParams prm = NnoidParams::initial(cfg.tau, cfg.p, cfg.degree);
        prm.t = 0.0;
        CHECK(inf_norm(unitarity_residual(prm, cfg)) < 1e-9);
    }
    SUBCASE("second order in t at the balanced initialization") {
        NnoidParams prm = NnoidParams::initial(cfg.tau, cfg.p, cfg.degree);
        prm.t = 1e-3;
        const double r1 = inf_norm(unitarity_residual(prm, cfg));
        prm.t = 1e-4;
        const double r2 = inf_norm(unitarity_residual(prm, cfg));
        CHECK(r1 < 1e-3);
        // O(t^2): shrinking t by 10 shrinks the residual by ~100
        CHECK(r2 < r1 / 30.0);
    }
}

TEST_CASE("solve_nnoid") {
    BalanceConfig cfg = small_config();
    SUBCASE("t = 0 returns the initialization unchanged") {
        const auto sol = solve_nnoid(cfg, 0.0);
        CHECK(sol.trace.converged);
        const NnoidParams init = NnoidParams::initial(cfg.tau, cfg.p, cfg.degree);
        CHECK(std::abs(sol.params.b[0][0] - init.b[0][0]) < 1e-15);
        CHECK(std::abs(sol.params.z[1][0] - init.z[1][0]) < 1e-15);
    }
    SUBCASE("unbalanced configuration rejected") {
        BalanceConfig bad = cfg;
        bad.tau = {1.0, 2.0};
        CHECK_THROWS_AS(solve_nnoid(bad, 1e-3), std::invalid_argument);
    }
    SUBCASE("antipodal two-ender converges and matches a rotational cylinder") {
        cfg.t_start = 2.5e-4;
        const double t = 1e-3;
        const auto sol = solve_nnoid(cfg, t);
        REQUIRE(sol.trace.converged);
        CHECK(inf_norm(unitarity_residual(sol.params, cfg)) < 5e-9);
        // tau stays real by construction; the solved coefficients stay close to
        // the t = 0 limits for small t
        const NnoidParams init = NnoidParams::initial(cfg.tau, cfg.p, cfg.degree);
        CHECK(std::abs(sol.params.b[0][0] - init.b[0][0]) < 0.05);
        CHECK(std::abs(sol.params.z[0][0] - init.z[0][0]) < 1e-12);  // pinned
        CHECK(std::abs(sol.params.z[1][0] - init.z[1][0]) < 0.05);

        // each end has rotational-cylinder (Delaunay) eigenvalues for a fitted weight
        const Potential pot = nnoid_potential(sol.params);
        const std::vector<cplx> lams = nnoid_sample_lambdas(cfg);
        OdeOptions ode = cfg.ode;
        const auto vals =
            monodromy_values(pot, sol.params.z[0][0], nnoid_loop_radius(cfg), 0.0, lams, ode);
        std::vector<cplx> traces(vals.size());
        for (size_t i = 0; i < vals.size(); ++i) traces[i] = vals[i].trace() * 0.5;
        // ends of the (i, -i) family fit the rotated exponent profile
        const DelaunayFit fit = fit_delaunay_weight(lams, traces, cplx(0, 1));
        CHECK(fit.deviation < 1e-7);
        CHECK(std::abs(fit.q) > 1.0);
    }
}

TEST_CASE("open_nnoid_domain") {
    NnoidParams prm = NnoidParams::initial({21.0, 3.0, 32.0}, {0.5, -0.5, 3.0}, 4);
    SUBCASE("out-of-disk punctures are handled by the cap") {
        const auto d = open_nnoid_domain(prm, 0.1);
        CHECK(d.exclusions.size() == 2);  // p3 = 3 lies outside the unit disk
        CHECK(d.disk_radius == doctest::Approx(0.9));
    }
    SUBCASE("oversized delta rejected") {
        CHECK_THROWS_AS(open_nnoid_domain(prm, 0.6), std::invalid_argument);
    }
    SUBCASE("small delta approaches the punctured disk") {
        const auto d = open_nnoid_domain(prm, 1e-3);
        CHECK(d.disk_radius == doctest::Approx(0.999));
        CHECK(d.exclusions[0].radius == doctest::Approx(1e-3));
    }
}
