#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stochlp/regularize.hpp"
#include "stochlp/sa.hpp"

using namespace stochlp;
using namespace stochlp::regularize;

namespace {

Vec random_in_ball(Rng& rng, const pgeom::PBall& ball) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec x(static_cast<size_t>(ball.d));
    for (auto& v : x) v = u(rng);
    double nx = pgeom::norm(x, ball.p);
    if (nx > 0) for (auto& v : x) v *= 0.9 * ball.R / nx;
    return x;
}

}  // namespace

TEST_CASE("mu_for_eps values") {
    CHECK(mu_for_eps(0.1, 2.0, 1000, 1.0) == doctest::Approx(0.05));
    // p=1: kappa = 2 ln d
    CHECK(mu_for_eps(0.1, 1.0, 20, 1.0) == doctest::Approx(0.1 / (4.0 * std::log(20.0))));
    CHECK(mu_for_eps(0.1, 1.0, 20, 1.0) == doctest::Approx(0.008345203).epsilon(1e-6));
    // R doubled -> mu quartered
    CHECK(mu_for_eps(0.1, 1.0, 20, 1.0) / mu_for_eps(0.1, 1.0, 20, 2.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(mu_for_eps(0.0, 2.0, 5, 1.0), std::invalid_argument);
}

TEST_CASE("regularized wrapper adds mu*V exactly") {
    auto inner = problems::abs_regression(6, 3, 0.4, 1.0);
    auto prox = pgeom::make_prox(1.0, 6);
    double mu = 0.05;
    Vec x0 = zeros(6);
    auto reg = make_regularized(*inner, mu, x0, prox);

    CHECK(reg->meta().mu == doctest::Approx(mu));
    CHECK(reg->meta().M > inner->meta().M);

    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        Vec x = random_in_ball(rng, inner->meta().domain);
        Xi xi = inner->sample(rng);
        double v = pgeom::prox_value(prox, x, x0);
        CHECK(reg->loss(x, xi) == doctest::Approx(inner->loss(x, xi) + mu * v).epsilon(1e-12));
        CHECK(reg->true_value(x) ==
              doctest::Approx(inner->true_value(x) + mu * v).epsilon(1e-12));
    }

    // at x0 the penalty vanishes
    Xi xi = inner->sample(rng);
    CHECK(reg->loss(x0, xi) == doctest::Approx(inner->loss(x0, xi)));
    // x* = 0 = x0 here, so the optimal value is unchanged
    CHECK(reg->true_opt().second == doctest::Approx(inner->true_opt().second));
}

TEST_CASE("mu -> 0 recovers the inner problem") {
    auto inner = problems::gauss_power(4, 2.0, 0.2);
    auto prox = pgeom::make_prox(2.0, 4);
    auto reg = make_regularized(*inner, 1e-14, zeros(4), prox);
    Rng rng(2);
    Vec x = random_in_ball(rng, inner->meta().domain);
    Xi xi = inner->sample(rng);
    CHECK(reg->loss(x, xi) == doctest::Approx(inner->loss(x, xi)).epsilon(1e-10));
    Vec g1 = reg->subgrad(x, xi), g2 = inner->subgrad(x, xi);
    for (size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-8));
}

TEST_CASE("regularized subgradient finite differences") {
    auto inner = problems::gauss_power(5, 2.0, 0.2);
    auto prox = pgeom::make_prox(1.3, 5);  // non-trivial prox geometry
    auto inner13 = problems::abs_regression(5, 2, 0.3, 1.3);
    auto reg = make_regularized(*inner13, 0.1, zeros(5), prox);
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        Vec x = random_in_ball(rng, inner13->meta().domain);
        bool smooth = true;  // keep away from the |.| kinks
        for (double v : x) smooth = smooth && std::abs(v) > 1e-3;
        if (!smooth) continue;
        Xi xi = inner13->sample(rng);
        Vec g = reg->subgrad(x, xi);
        double h = 1e-6;
        for (size_t i = 0; i < x.size(); ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (reg->loss(xp, xi) - reg->loss(xm, xi)) / (2 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("regularized objective is mu-strongly convex in the p-norm") {
    auto inner = problems::abs_regression(8, 4, 0.5, 1.0);
    auto prox = pgeom::make_prox(1.0, 8);
    double mu = 0.2;
    auto reg = make_regularized(*inner, mu, zeros(8), prox);
    Rng rng(4);
    for (int t = 0; t < 500; ++t) {
        Vec x1 = random_in_ball(rng, inner->meta().domain);
        Vec x2 = random_in_ball(rng, inner->meta().domain);
        Vec xm = scaled(add(x1, x2), 0.5);
        double np = pgeom::norm(sub(x1, x2), 1.0);
        CHECK(reg->true_value(xm) <=
              0.5 * (reg->true_value(x1) + reg->true_value(x2)) - mu / 8.0 * np * np + 1e-9);
    }
}

TEST_CASE("transfer_guarantee logic") {
    CHECK(transfer_guarantee(0.2, 0.1, 0.05, 1.0));
    CHECK_FALSE(transfer_guarantee(0.2, 0.11, 0.05, 1.0));   // solved too loosely
    CHECK_FALSE(transfer_guarantee(0.2, 0.05, 0.05, 10.0));  // bias too large
    CHECK(transfer_guarantee(0.2, 0.1, 0.0, 1e9));           // no regularization, no bias
}

TEST_CASE("solving the regularized problem to eps/2 solves the original to eps") {
    auto inner = problems::abs_regression(6, 3, 0.4, 1.0);
    double eps = 0.3;
    const auto& dom = inner->meta().domain;
    double mu = mu_for_eps(eps, dom.p, dom.d, dom.R);
    auto prox = pgeom::make_prox(dom.p, dom.d);
    auto reg = make_regularized(*inner, mu, zeros(dom.d), prox);

    sa::SAConfig cfg;
    cfg.n_steps = 4000;
    Rng rng(5);
    auto r = sa::mirror_descent(*reg, cfg, rng);
    double reg_gap = reg->true_value(r.point) - reg->true_opt().second;
    double inner_gap = inner->true_value(r.point) - inner->true_opt().second;
    CHECK(reg_gap <= eps / 2.0);
    CHECK(inner_gap <= eps);
    // the analytic bias at the nearest solution is zero here
    CHECK(transfer_guarantee(eps, reg_gap, mu, 0.0));
}

TEST_CASE("construction validation") {
    auto inner = problems::abs_regression(6, 3, 0.4, 1.0);
    auto prox = pgeom::make_prox(1.0, 6);
    CHECK_THROWS_AS(make_regularized(*inner, -0.1, zeros(6), prox), std::invalid_argument);
    CHECK_THROWS_AS(make_regularized(*inner, 0.1, zeros(5), prox), std::invalid_argument);
    Vec far(6, 1.0);  // ||far||_1 = 6 > R
    CHECK_THROWS_AS(make_regularized(*inner, 0.1, far, prox), std::invalid_argument);
}
