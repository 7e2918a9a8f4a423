#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stochlp/sa.hpp"

using namespace stochlp;
using namespace stochlp::sa;
using problems::StochasticProblem;

namespace {

// delegating wrapper that counts oracle calls
class Counting final : public StochasticProblem {
public:
    explicit Counting(const StochasticProblem& inner) : inner_(&inner) {}
    const problems::OracleMeta& meta() const override { return inner_->meta(); }
    Xi sample(Rng& rng) const override {
        ++calls;
        return inner_->sample(rng);
    }
    double loss(const Vec& x, const Xi& xi) const override { return inner_->loss(x, xi); }
    Vec subgrad(const Vec& x, const Xi& xi) const override { return inner_->subgrad(x, xi); }
    double true_value(const Vec& x) const override { return inner_->true_value(x); }
    std::pair<Vec, double> true_opt() const override { return inner_->true_opt(); }
    double lip_bound(const Xi& xi) const override { return inner_->lip_bound(xi); }
    mutable long calls = 0;

private:
    const StochasticProblem* inner_;
};

class BadGradient final : public StochasticProblem {
public:
    BadGradient() { meta_.domain = pgeom::PBall{2.0, 1.0, 2}; meta_.M = 1.0; }
    const problems::OracleMeta& meta() const override { return meta_; }
    Xi sample(Rng&) const override { return Xi{0.0}; }
    double loss(const Vec&, const Xi&) const override { return 0.0; }
    Vec subgrad(const Vec&, const Xi&) const override {
        return Vec{std::nan(""), 0.0};
    }
    double true_value(const Vec&) const override { return 0.0; }
    std::pair<Vec, double> true_opt() const override { return {zeros(2), 0.0}; }

private:
    problems::OracleMeta meta_;
};

double gap(const StochasticProblem& pb, const Vec& x) {
    return pb.true_value(x) - pb.true_opt().second;
}

}  // namespace

TEST_CASE("sample budgets are exact") {
    auto inner = problems::strongly_convex_quad(4, 1.0, 0.1);
    Counting pb(*inner);
    Rng rng(1);
    SAConfig cfg;
    cfg.n_steps = 777;
    auto r = sgd_projected(pb, cfg, rng);
    CHECK(r.samples_used == 777);
    CHECK(pb.calls == 777);

    pb.calls = 0;
    auto r2 = mirror_descent(pb, cfg, rng);
    CHECK(r2.samples_used == 777);
    CHECK(pb.calls == 777);

    pb.calls = 0;
    auto r3 = restarted_sa_budget(pb, 5000, 2.0, 0.5, rng);
    CHECK(r3.samples_used == 5000);
    CHECK(pb.calls == 5000);

    pb.calls = 0;
    auto r4 = restarted_sa(pb, 0.2, 0.1, 2.0, 0.5, rng);
    CHECK(pb.calls == r4.samples_used);
    CHECK(r4.samples_used > 0);
}

TEST_CASE("determinism and the p=2 collapse of mirror descent") {
    auto pb = problems::gauss_power(6, 2.0, 0.2);
    SAConfig cfg;
    cfg.n_steps = 400;
    Rng r1(42), r2(42), r3(42);
    auto a = sgd_projected(*pb, cfg, r1);
    auto b = sgd_projected(*pb, cfg, r2);
    CHECK(a.point == b.point);  // bitwise determinism
    auto c = mirror_descent(*pb, cfg, r3);
    CHECK(a.point == c.point);  // exact collapse at p = 2
}

TEST_CASE("iterates stay feasible") {
    Rng rng(7);
    for (double p : {1.0, 1.3, 2.0}) {
        auto pb = problems::abs_regression(6, 3, 0.4, p);
        const auto& ball = pb->meta().domain;
        SAConfig cfg;
        cfg.n_steps = 250;
        CHECK(ball.contains(sgd_projected(*pb, cfg, rng).point));
        CHECK(ball.contains(mirror_descent(*pb, cfg, rng).point));
        CHECK(ball.contains(restarted_sa_budget(*pb, 600, 1.0, 0.5, rng).point));
    }
}

TEST_CASE("zero-noise quadratic is solved exactly with h = 1/mu") {
    auto pb = problems::strongly_convex_quad(5, 2.0, 0.0);
    SAConfig cfg;
    cfg.n_steps = 3;
    cfg.step = {StepRule::Kind::Constant, 1.0 / 2.0};
    cfg.average = false;
    Rng rng(3);
    auto r = sgd_projected(*pb, cfg, rng);
    CHECK(gap(*pb, r.point) <= 1e-12);
}

TEST_CASE("averaged sgd reaches the MR/sqrt(N) rate on sc-quad") {
    auto pb = problems::strongly_convex_quad(5, 1.0, 0.1);
    SAConfig cfg;
    cfg.n_steps = 4000;
    Rng rng(5);
    double g = gap(*pb, sgd_projected(*pb, cfg, rng).point);
    double rate = pb->meta().M * pb->meta().domain.R / std::sqrt(4000.0);
    CHECK(g <= 3.0 * rate);
}

TEST_CASE("mirror descent on the l1 ball converges") {
    auto pb = problems::abs_regression(20, 4, 0.5, 1.0);
    SAConfig cfg;
    cfg.n_steps = 3000;
    Rng rng(9);
    double g = gap(*pb, mirror_descent(*pb, cfg, rng).point);
    CHECK(g <= 0.12);
}

TEST_CASE("restarted_sa: radii halve and sharp problems converge") {
    auto pb = problems::gauss_power(5, 1.0, 0.05);
    Rng rng(21);
    auto r = restarted_sa(*pb, 0.05, 0.1, 1.0, 1.0, rng);
    REQUIRE(r.stage_radii.size() >= 2);
    for (size_t j = 1; j < r.stage_radii.size(); ++j)
        CHECK(r.stage_radii[j] <= r.stage_radii[j - 1] + 1e-15);
    CHECK(gap(*pb, r.point) <= 0.05 * 2.0);

    // eps above the trivial gap bound: no work needed
    auto r0 = restarted_sa(*pb, 10.0 * pb->meta().M, 0.1, 1.0, 1.0, rng);
    CHECK(r0.samples_used == 0);
    CHECK(gap(*pb, r0.point) == 0.0);
}

TEST_CASE("restarted_sa noise-free run converges geometrically in stages") {
    // gamma = 1 keeps per-stage budgets constant, so tiny eps stays cheap
    auto pb = problems::gauss_power(4, 1.0, 1e-9);
    Rng rng(22);
    auto r = restarted_sa(*pb, 1e-6, 0.1, 1.0, 1.0, rng);
    CHECK(gap(*pb, r.point) <= 1e-6);
    CHECK(r.samples_used < 2000000);
}

TEST_CASE("restarted_sa_budget stage structure") {
    auto pb = problems::strongly_convex_quad(4, 1.0, 0.1);
    Rng rng(23);
    long n = 1 << 13;
    auto r = restarted_sa_budget(*pb, n, 2.0, 0.5, rng);
    CHECK(r.samples_used == n);
    CHECK(static_cast<int>(r.stage_radii.size()) == 13);
    for (size_t j = 1; j < r.stage_radii.size(); ++j)
        CHECK(r.stage_radii[j] <= r.stage_radii[j - 1] + 1e-15);
    // more budget, better answer (fixed seed, qualitative)
    Rng ra(24), rb(24);
    double g_small = gap(*pb, restarted_sa_budget(*pb, 200, 2.0, 0.5, ra).point);
    double g_large = gap(*pb, restarted_sa_budget(*pb, 20000, 2.0, 0.5, rb).point);
    CHECK(g_large < g_small);
}

TEST_CASE("sa_saddle basics") {
    auto pb = problems::sharp_saddle(4, 4, 1.0, 1.0, 0.1);
    SAConfig cfg;
    cfg.n_steps = 2000;
    Rng r1(31), r2(31);
    auto [x1, y1] = sa_saddle(*pb, cfg, r1);
    auto [x2, y2] = sa_saddle(*pb, cfg, r2);
    CHECK(x1 == x2);
    CHECK(y1 == y2);
    CHECK(pb->meta_x().domain.contains(x1));
    CHECK(pb->meta_y().domain.contains(y1));
    // duality gap via analytic best responses
    double up = pb->true_value(x1, pb->best_response_y(x1));
    double lo = pb->true_value(pb->best_response_x(y1), y1);
    CHECK(up - lo >= -1e-12);
    CHECK(up - lo <= 0.25);
}

TEST_CASE("non-finite gradients abort with step context") {
    BadGradient pb;
    SAConfig cfg;
    cfg.n_steps = 5;
    Rng rng(1);
    CHECK_THROWS_AS(sgd_projected(pb, cfg, rng), std::runtime_error);
    CHECK_THROWS_AS(mirror_descent(pb, cfg, rng), std::runtime_error);
}

TEST_CASE("config validation") {
    auto pb = problems::gauss_power(3, 2.0, 0.1);
    SAConfig cfg;
    cfg.n_steps = 0;
    Rng rng(1);
    CHECK_THROWS_AS(sgd_projected(*pb, cfg, rng), std::invalid_argument);
    CHECK_THROWS_AS(restarted_sa(*pb, 0.1, 0.1, 0.5, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(restarted_sa_budget(*pb, 100, 2.0, 0.0, rng), std::invalid_argument);
}
