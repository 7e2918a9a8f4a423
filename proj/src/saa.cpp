#include "stochlp/saa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stochlp::saa {

namespace {

using pgeom::bregman_step;
using pgeom::kappa_p;
using pgeom::make_prox;
using pgeom::project;

constexpr long kIterCap = 1000000000L;

template <class F>
double pairwise_sum(const F& f, long lo, long hi) {
    if (hi - lo <= 16) {
        double s = 0.0;
        for (long i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    long mid = lo + (hi - lo) / 2;
    return pairwise_sum(f, lo, mid) + pairwise_sum(f, mid, hi);
}

// deterministic MD stage over ball(center, radius) with averaging
Vec md_stage(const EmpiricalObjective& emp, const Vec& center, double radius, long T, double h,
             const ProxSetup& prox) {
    const PBall& dom = emp.base().meta().domain;
    PBall stage_ball{dom.p, radius, dom.d};
    Vec u = zeros(dom.d);
    Vec acc = zeros(dom.d);
    Vec x_abs(u.size());
    for (long t = 0; t < T; ++t) {
        for (size_t i = 0; i < u.size(); ++i) x_abs[i] = center[i] + u[i];
        Vec g = emp.subgrad(x_abs);
        u = bregman_step(prox, u, g, h, stage_ball);
        axpy(1.0, u, acc);
    }
    return add(center, scaled(acc, 1.0 / static_cast<double>(T)));
}

}  // namespace

EmpiricalObjective::EmpiricalObjective(const StochasticProblem& base, std::vector<Xi> sample)
    : base_(&base), sample_(std::move(sample)) {
    if (sample_.empty()) throw std::invalid_argument("EmpiricalObjective: empty sample");
    long n = static_cast<long>(sample_.size());
    m_hat_ = pairwise_sum([&](long i) { return base_->lip_bound(sample_[static_cast<size_t>(i)]); },
                          0, n) /
             static_cast<double>(n);
}

double EmpiricalObjective::loss(const Vec& x) const {
    long n = size();
    return pairwise_sum([&](long i) { return base_->loss(x, sample_[static_cast<size_t>(i)]); }, 0,
                        n) /
           static_cast<double>(n);
}

Vec EmpiricalObjective::subgrad(const Vec& x) const {
    Vec g = zeros(static_cast<int>(x.size()));
    for (const Xi& xi : sample_) axpy(1.0, base_->subgrad(x, xi), g);
    return scaled(g, 1.0 / static_cast<double>(size()));
}

EmpiricalObjective build_empirical(const StochasticProblem& problem, long n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("build_empirical: n must be >= 1");
    std::vector<Xi> sample;
    sample.reserve(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) sample.push_back(problem.sample(rng));
    return EmpiricalObjective(problem, std::move(sample));
}

SAAResult solve_empirical(const EmpiricalObjective& emp, double delta, const ProxSetup& prox) {
    if (delta <= 0.0) throw std::invalid_argument("solve_empirical: delta must be positive");
    const PBall& ball = emp.base().meta().domain;
    const double M = emp.lip_bound();
    const double kap = kappa_p(prox.p, ball.d);
    SAAResult res;
    res.delta_target = delta;
    res.point = zeros(ball.d);
    if (delta >= M * ball.R) {
        res.certificate = "vacuous";
        return res;
    }
    double traw = std::ceil(kap * M * M * ball.R * ball.R / (delta * delta));
    if (traw > static_cast<double>(kIterCap))
        throw std::runtime_error("solve_empirical: iteration bound exceeds cap, delta too small");
    long T = static_cast<long>(traw);
    double h = 2.0 * std::sqrt(2.0 * kap) * ball.R / (M * std::sqrt(static_cast<double>(T)));
    res.point = md_stage(emp, zeros(ball.d), ball.R, T, h, prox);
    res.inner_iterations = T;
    res.certificate = "iteration-bound";
    return res;
}

SAAResult solve_empirical_sc(const EmpiricalObjective& emp, double mu, double eps,
                             const ProxSetup& prox) {
    if (mu <= 0.0) throw std::invalid_argument("solve_empirical_sc: mu must be positive");
    if (eps <= 0.0) throw std::invalid_argument("solve_empirical_sc: eps must be positive");
    const PBall& ball = emp.base().meta().domain;
    const double M = emp.lip_bound();
    const double kap = kappa_p(prox.p, ball.d);
    const double delta = mu * eps * eps;

    SAAResult res;
    res.delta_target = delta;
    res.point = zeros(ball.d);
    const double gap0 = 2.0 * M * ball.R;
    if (delta >= gap0) {
        res.certificate = "vacuous";
        return res;
    }
    int J = static_cast<int>(std::ceil(std::log2(gap0 / delta)));
    Vec center = zeros(ball.d);
    double radius = ball.R;
    for (int j = 1; j <= J; ++j) {
        double delta_j = std::max(gap0 * std::pow(0.5, j), delta);
        double traw = std::ceil(kap * M * M * radius * radius / (delta_j * delta_j));
        long T = std::max<long>(1, static_cast<long>(traw));
        if (res.inner_iterations + T > kIterCap)
            throw std::runtime_error("solve_empirical_sc: iteration bound exceeds cap");
        double h = 2.0 * std::sqrt(2.0 * kap) * radius / (M * std::sqrt(static_cast<double>(T)));
        center = project(md_stage(emp, center, radius, T, h, prox), ball);
        res.inner_iterations += T;
        radius = std::min(radius, std::sqrt(2.0 * delta_j / mu));
    }
    res.point = center;
    res.certificate = "iteration-bound";
    return res;
}

SAAResult saa_pipeline(const StochasticProblem& problem, long n, double delta,
                       const ProxSetup& prox, Rng& rng) {
    EmpiricalObjective emp = build_empirical(problem, n, rng);
    return solve_empirical(emp, delta, prox);
}

std::pair<Vec, Vec> saa_saddle(const SaddleProblem& problem, long n, double eps, Rng& rng) {
    if (n < 1) throw std::invalid_argument("saa_saddle: n must be >= 1");
    if (eps <= 0.0) throw std::invalid_argument("saa_saddle: eps must be positive");
    const PBall& bx = problem.meta_x().domain;
    const PBall& by = problem.meta_y().domain;
    std::vector<Xi> sample;
    sample.reserve(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) sample.push_back(problem.sample(rng));

    auto emp_loss = [&](const Vec& x, const Vec& y) {
        return pairwise_sum([&](long i) { return problem.loss(x, y, sample[static_cast<size_t>(i)]); },
                            0, n) /
               static_cast<double>(n);
    };
    auto gaps = [&](const Vec& x, const Vec& y) {
        Vec bx_pt = problem.empirical_best_x(sample, y);
        Vec by_pt = problem.empirical_best_y(sample, x);
        double f = emp_loss(x, y);
        return std::pair<double, double>{f - emp_loss(bx_pt, y), emp_loss(x, by_pt) - f};
    };

    Vec x = zeros(bx.d), y = zeros(by.d);
    auto [gx0, gy0] = gaps(x, y);
    if (gx0 <= eps / 4.0 && gy0 <= eps / 4.0) return {x, y};

    const double Mmax = std::max(problem.meta_x().M, problem.meta_y().M);
    const double h0 = std::min(bx.R, by.R) / Mmax;
    Vec ax = zeros(bx.d), ay = zeros(by.d);
    const long check_every = 64;
    const long cap = 1L << 22;
    for (long k = 1; k <= cap; ++k) {
        double h = h0 / std::sqrt(static_cast<double>(k));
        Vec gx = zeros(bx.d), gy = zeros(by.d);
        for (const Xi& xi : sample) {
            axpy(1.0, problem.subgrad_x(x, y, xi), gx);
            axpy(1.0, problem.supergrad_y(x, y, xi), gy);
        }
        double inv = 1.0 / static_cast<double>(n);
        Vec xl = x, yl = y;
        axpy(-h * inv, gx, xl);
        axpy(+h * inv, gy, yl);
        xl = project(xl, bx);
        yl = project(yl, by);
        Vec gxl = zeros(bx.d), gyl = zeros(by.d);
        for (const Xi& xi : sample) {
            axpy(1.0, problem.subgrad_x(xl, yl, xi), gxl);
            axpy(1.0, problem.supergrad_y(xl, yl, xi), gyl);
        }
        axpy(-h * inv, gxl, x);
        axpy(+h * inv, gyl, y);
        x = project(x, bx);
        y = project(y, by);
        axpy(1.0, xl, ax);
        axpy(1.0, yl, ay);
        if (k % check_every == 0) {
            Vec xa = scaled(ax, 1.0 / static_cast<double>(k));
            Vec ya = scaled(ay, 1.0 / static_cast<double>(k));
            auto [gxk, gyk] = gaps(xa, ya);
            if (gxk <= eps / 4.0 && gyk <= eps / 4.0) return {xa, ya};
        }
    }
    Vec xa = scaled(ax, 1.0 / static_cast<double>(cap));
    Vec ya = scaled(ay, 1.0 / static_cast<double>(cap));
    auto [gxk, gyk] = gaps(xa, ya);
    std::ostringstream msg;
    msg << "saa_saddle: iteration cap reached before eps/4 certification"
        << " (achieved gaps " << gxk << ", " << gyk << ", target " << eps / 4.0 << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace stochlp::saa
