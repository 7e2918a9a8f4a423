#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stochlp/saa.hpp"

using namespace stochlp;
using namespace stochlp::saa;

TEST_CASE("empirical objective: N=1 equals the pointwise loss") {
    auto pb = problems::strongly_convex_quad(4, 1.0, 0.2);
    Rng rng(1);
    Xi xi = pb->sample(rng);
    EmpiricalObjective emp(*pb, {xi});
    Vec x = {0.1, -0.2, 0.05, 0.3};
    CHECK(emp.loss(x) == pb->loss(x, xi));
    CHECK(emp.subgrad(x) == pb->subgrad(x, xi));
    CHECK(emp.lip_bound() == pb->lip_bound(xi));
}

TEST_CASE("empirical mean is permutation-stable to high precision") {
    auto pb = problems::gauss_power(6, 2.0, 0.3);
    Rng rng(2);
    std::vector<Xi> sample;
    for (int i = 0; i < 257; ++i) sample.push_back(pb->sample(rng));
    EmpiricalObjective a(*pb, sample);

    std::vector<Xi> shuffled = sample;
    std::mt19937 mix(7);
    std::shuffle(shuffled.begin(), shuffled.end(), mix);
    EmpiricalObjective b(*pb, shuffled);

    Vec x = {0.2, -0.1, 0.3, 0.0, -0.25, 0.15};
    CHECK(a.loss(x) == doctest::Approx(b.loss(x)).epsilon(1e-12));
    CHECK(a.lip_bound() == doctest::Approx(b.lip_bound()).epsilon(1e-12));
}

TEST_CASE("empirical loss is linear in the sample mean for linear losses") {
    // gauss-power at fixed x: loss = c - gamma*s*<xi, x>, so the empirical
    // mean must equal plugging in the averaged xi
    auto pb = problems::gauss_power(4, 2.0, 0.5);
    Rng rng(3);
    std::vector<Xi> sample;
    for (int i = 0; i < 64; ++i) sample.push_back(pb->sample(rng));
    EmpiricalObjective emp(*pb, sample);
    Vec x = {0.3, 0.1, -0.2, 0.4};
    Xi mean = zeros(4);
    for (const auto& xi : sample) axpy(1.0 / 64.0, xi, mean);
    CHECK(emp.loss(x) == doctest::Approx(pb->loss(x, mean)).epsilon(1e-12));
}

TEST_CASE("solve_empirical meets its delta target on a quadratic") {
    auto pb = problems::strongly_convex_quad(4, 1.0, 0.1);
    Rng rng(4);
    auto emp = build_empirical(*pb, 50, rng);
    auto prox = pgeom::make_prox(2.0, 4);

    // empirical optimum of the quadratic is the projected empirical center
    Vec c_hat = zeros(4);
    for (const auto& xi : emp.sample()) axpy(0.1 / 50.0, xi, c_hat);
    for (int i = 0; i < 4; ++i) c_hat[static_cast<size_t>(i)] += 0.25 / 2.0;
    c_hat = pgeom::project(c_hat, pb->meta().domain);
    double f_star = emp.loss(c_hat);

    for (double delta : {0.1, 0.05}) {
        auto res = solve_empirical(emp, delta, prox);
        CHECK(res.certificate == "iteration-bound");
        CHECK(emp.loss(res.point) - f_star <= delta);
    }

    // vacuous regime: delta above the trivial bound returns the center
    auto res = solve_empirical(emp, 10.0 * emp.lip_bound(), prox);
    CHECK(res.certificate == "vacuous");
    CHECK(res.inner_iterations == 0);
}

TEST_CASE("solve_empirical iteration count scales as 1/delta^2") {
    auto pb = problems::abs_regression(6, 3, 0.4, 1.0);
    Rng rng(5);
    auto emp = build_empirical(*pb, 40, rng);
    auto prox = pgeom::make_prox(1.0, 6);
    auto r1 = solve_empirical(emp, 0.2, prox);
    auto r2 = solve_empirical(emp, 0.1, prox);
    CHECK(r2.inner_iterations == doctest::Approx(4.0 * r1.inner_iterations).epsilon(0.01));
    // realized empirical gap roughly halves with the sqrt of the work
    CHECK_THROWS_AS(solve_empirical(emp, 1e-9, prox), std::runtime_error);
    CHECK_THROWS_AS(solve_empirical(emp, 0.0, prox), std::invalid_argument);
}

TEST_CASE("solve_empirical_sc restarts reach mu*eps^2 accuracy") {
    auto pb = problems::strongly_convex_quad(5, 1.0, 0.1);
    Rng rng(6);
    auto emp = build_empirical(*pb, 60, rng);
    auto prox = pgeom::make_prox(2.0, 5);

    Vec c_hat = zeros(5);
    for (const auto& xi : emp.sample()) axpy(0.1 / 60.0, xi, c_hat);
    for (int i = 0; i < 5; ++i) c_hat[static_cast<size_t>(i)] += 0.25 / std::sqrt(5.0);
    c_hat = pgeom::project(c_hat, pb->meta().domain);
    double f_star = emp.loss(c_hat);

    double eps = 0.15;
    auto res = solve_empirical_sc(emp, 1.0, eps, prox);
    CHECK(res.delta_target == doctest::Approx(1.0 * eps * eps));
    CHECK(emp.loss(res.point) - f_star <= res.delta_target);
    CHECK(res.certificate == "iteration-bound");
}

TEST_CASE("saa_pipeline determinism") {
    auto pb = problems::gauss_power(5, 2.0, 0.2);
    auto prox = pgeom::make_prox(2.0, 5);
    Rng r1(77), r2(77);
    auto a = saa_pipeline(*pb, 30, 0.1, prox, r1);
    auto b = saa_pipeline(*pb, 30, 0.1, prox, r2);
    CHECK(a.point == b.point);
    CHECK(a.inner_iterations == b.inner_iterations);
}

TEST_CASE("saa_saddle certifies eps/4 empirical best-response gaps") {
    auto pb = problems::sharp_saddle(4, 4, 1.0, 1.0, 0.1);
    Rng rng(8);
    long n = 200;
    double eps = 0.2;
    auto [x, y] = saa_saddle(*pb, n, eps, rng);
    CHECK(pb->meta_x().domain.contains(x));
    CHECK(pb->meta_y().domain.contains(y));

    // recompute the certificate independently on the same frozen sample
    Rng rng2(8);
    std::vector<Xi> sample;
    for (long i = 0; i < n; ++i) sample.push_back(pb->sample(rng2));
    auto emp_loss = [&](const Vec& xx, const Vec& yy) {
        double acc = 0.0;
        for (const auto& xi : sample) acc += pb->loss(xx, yy, xi);
        return acc / static_cast<double>(n);
    };
    double f = emp_loss(x, y);
    double gap_x = f - emp_loss(pb->empirical_best_x(sample, y), y);
    double gap_y = emp_loss(x, pb->empirical_best_y(sample, x)) - f;
    CHECK(gap_x <= eps / 4.0 + 1e-9);
    CHECK(gap_y <= eps / 4.0 + 1e-9);
}

TEST_CASE("saa_saddle determinism and input validation") {
    auto pb = problems::sharp_saddle(3, 3, 1.0, 1.0, 0.1);
    Rng r1(9), r2(9);
    auto a = saa_saddle(*pb, 100, 0.3, r1);
    auto b = saa_saddle(*pb, 100, 0.3, r2);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    Rng r3(9);
    CHECK_THROWS_AS(saa_saddle(*pb, 0, 0.3, r3), std::invalid_argument);
    CHECK_THROWS_AS(saa_saddle(*pb, 10, -1.0, r3), std::invalid_argument);
}
