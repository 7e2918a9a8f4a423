#include "stochlp/sa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stochlp::sa {

namespace {

using pgeom::bregman_step;
using pgeom::kappa_p;
using pgeom::make_prox;
using pgeom::project;

void check_finite(const Vec& g, long step) {
    for (double v : g)
        if (!std::isfinite(v))
            throw std::runtime_error("non-finite subgradient at step " + std::to_string(step));
}

double step_size(const StepRule& rule, double fallback, long k) {
    double h = (rule.h > 0.0) ? rule.h : fallback;
    if (rule.kind == StepRule::Kind::InvSqrt) return h / std::sqrt(static_cast<double>(k));
    return h;
}

Vec start_point(const SAConfig& cfg, const PBall& ball) {
    if (cfg.start.empty()) return zeros(ball.d);
    return project(cfg.start, ball);
}

// stochastic MD over ball(center, radius); subgradients taken at the absolute
// point, iterates kept in centered coordinates. mu_step > 0 switches to the
// strongly convex schedule h_k = 1 / (mu_step * (t0 + k)).
Vec md_stage(const StochasticProblem& pb, const Vec& center, double radius, long n_steps, double h,
             const ProxSetup& prox, bool average, Rng& rng, long& samples, double mu_step = 0.0,
             long t0 = 0) {
    PBall stage_ball{pb.meta().domain.p, radius, pb.meta().domain.d};
    Vec u = zeros(stage_ball.d);
    Vec acc = zeros(stage_ball.d);
    Vec x_abs(u.size());
    for (long k = 1; k <= n_steps; ++k) {
        Xi xi = pb.sample(rng);
        ++samples;
        for (size_t i = 0; i < u.size(); ++i) x_abs[i] = center[i] + u[i];
        Vec g = pb.subgrad(x_abs, xi);
        check_finite(g, k);
        double hk = (mu_step > 0.0) ? 1.0 / (mu_step * static_cast<double>(t0 + k)) : h;
        if (hk > 0.0) u = bregman_step(prox, u, g, hk, stage_ball);
        axpy(1.0, u, acc);
    }
    Vec out = average ? scaled(acc, 1.0 / static_cast<double>(n_steps)) : u;
    return add(center, out);
}

}  // namespace

SAResult sgd_projected(const StochasticProblem& problem, const SAConfig& cfg, Rng& rng) {
    const PBall& ball = problem.meta().domain;
    if (cfg.n_steps < 1) throw std::invalid_argument("sgd_projected: n_steps must be >= 1");
    const double M = problem.meta().M;
    const double fallback = ball.R / (M * std::sqrt(static_cast<double>(cfg.n_steps)));
    Vec x = start_point(cfg, ball);
    Vec acc = zeros(ball.d);
    Vec y(x.size());
    SAResult res;
    for (long k = 1; k <= cfg.n_steps; ++k) {
        Xi xi = problem.sample(rng);
        ++res.samples_used;
        Vec g = problem.subgrad(x, xi);
        check_finite(g, k);
        double h = step_size(cfg.step, fallback, k);
        if (h != 0.0) {
            for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] - h * g[i];
            x = project(y, ball);
        }
        axpy(1.0, x, acc);
    }
    res.point = cfg.average ? scaled(acc, 1.0 / static_cast<double>(cfg.n_steps)) : x;
    return res;
}

SAResult mirror_descent(const StochasticProblem& problem, const SAConfig& cfg, Rng& rng) {
    const PBall& ball = problem.meta().domain;
    if (ball.p > 2.0) return sgd_projected(problem, cfg, rng);
    if (cfg.n_steps < 1) throw std::invalid_argument("mirror_descent: n_steps must be >= 1");
    ProxSetup prox = cfg.prox ? *cfg.prox : make_prox(ball.p, ball.d);
    const double M = problem.meta().M;
    const double kap = kappa_p(ball.p, ball.d);
    const double fallback = ball.R / (M * std::sqrt(kap * static_cast<double>(cfg.n_steps)));

    Vec x = start_point(cfg, ball);
    Vec acc = zeros(ball.d);
    SAResult res;
    for (long k = 1; k <= cfg.n_steps; ++k) {
        Xi xi = problem.sample(rng);
        ++res.samples_used;
        Vec g = problem.subgrad(x, xi);
        check_finite(g, k);
        double h = step_size(cfg.step, fallback, k);
        if (h != 0.0) x = bregman_step(prox, x, g, h, ball);
        axpy(1.0, x, acc);
    }
    res.point = cfg.average ? scaled(acc, 1.0 / static_cast<double>(cfg.n_steps)) : x;
    return res;
}

SAResult restarted_sa(const StochasticProblem& problem, double eps, double sigma, double gamma,
                      double mu_gamma, Rng& rng) {
    (void)sigma;  // schedule is confidence-free; sigma splits are sigma/J across stages
    if (gamma < 1.0) throw std::invalid_argument("restarted_sa: gamma must be >= 1");
    if (mu_gamma <= 0.0) throw std::invalid_argument("restarted_sa: mu_gamma must be positive");
    const PBall& ball = problem.meta().domain;
    const double M = problem.meta().M;
    const double kap = kappa_p(std::min(ball.p, 2.0), ball.d);
    ProxSetup prox = make_prox(std::min(ball.p, 2.0), ball.d);

    SAResult res;
    res.point = zeros(ball.d);
    const double gap0 = 2.0 * M * ball.R;
    if (eps >= gap0) return res;

    const int J = static_cast<int>(std::ceil(std::log2(gap0 / eps)));
    Vec center = zeros(ball.d);
    double radius = ball.R;
    for (int j = 1; j <= J; ++j) {
        double eps_j = eps * std::pow(2.0, static_cast<double>(J - j));
        double m_j = std::min(M, problem.lip_radius(radius));
        long n_j =
            static_cast<long>(std::ceil(kap * m_j * m_j * radius * radius * 4.0 / (eps_j * eps_j)));
        n_j = std::max<long>(n_j, 1);
        double h_j = radius / (m_j * std::sqrt(kap * static_cast<double>(n_j)));
        center = project(md_stage(problem, center, radius, n_j, h_j, prox, true, rng, res.samples_used),
                         ball);
        res.stage_radii.push_back(radius);
        radius = std::min(radius, std::pow(2.0 * eps_j / mu_gamma, 1.0 / gamma));
    }
    res.point = center;
    return res;
}

SAResult restarted_sa_budget(const StochasticProblem& problem, long n_total, double gamma,
                             double mu_gamma, Rng& rng) {
    if (gamma < 1.0) throw std::invalid_argument("restarted_sa_budget: gamma must be >= 1");
    if (mu_gamma <= 0.0) throw std::invalid_argument("restarted_sa_budget: mu_gamma must be positive");
    if (n_total < 1) throw std::invalid_argument("restarted_sa_budget: n_total must be >= 1");
    const PBall& ball = problem.meta().domain;
    const double M = problem.meta().M;
    const double kap = kappa_p(std::min(ball.p, 2.0), ball.d);
    ProxSetup prox = make_prox(std::min(ball.p, 2.0), ball.d);

    int J = std::max(1, static_cast<int>(std::llround(std::log2(static_cast<double>(n_total)))));
    long base = n_total / J;
    long rem = n_total % J;
    SAResult res;
    Vec center = zeros(ball.d);
    double radius = ball.R;
    // gamma = 2 is plain strong convexity (mu = 2 mu_gamma): run the 1/(mu k)
    // schedule across stages, averaging within the final window
    const double mu_step = (gamma == 2.0) ? 2.0 * mu_gamma : 0.0;
    for (int j = 0; j < J; ++j) {
        long n_j = base + (j < rem ? 1 : 0);
        if (n_j < 1) continue;
        double m_j = std::min(M, problem.lip_radius(radius));
        double h_j = radius / (m_j * std::sqrt(kap * static_cast<double>(n_j)));
        long t0 = res.samples_used;
        center = project(md_stage(problem, center, radius, n_j, h_j, prox, true, rng,
                                  res.samples_used, mu_step, t0),
                         ball);
        res.stage_radii.push_back(radius);
        // realized stage accuracy estimate from the averaging bound; shrink
        // against a slacked estimate — realized error fluctuates above the
        // bound and clipping the optimum out of a stage ball is unrecoverable
        double eps_hat = 3.0 * 2.0 * m_j * radius * std::sqrt(kap / static_cast<double>(n_j));
        radius = std::min(radius, std::pow(2.0 * eps_hat / mu_gamma, 1.0 / gamma));
    }
    res.point = center;
    return res;
}

std::pair<Vec, Vec> sa_saddle(const SaddleProblem& problem, const SAConfig& cfg, Rng& rng) {
    const PBall& bx = problem.meta_x().domain;
    const PBall& by = problem.meta_y().domain;
    if (cfg.n_steps < 1) throw std::invalid_argument("sa_saddle: n_steps must be >= 1");
    const double Mmax = std::max(problem.meta_x().M, problem.meta_y().M);
    const double fallback =
        std::min(bx.R, by.R) / (Mmax * std::sqrt(static_cast<double>(cfg.n_steps)));

    Vec x = zeros(bx.d), y = zeros(by.d);
    if (!cfg.start.empty()) {
        if (static_cast<int>(cfg.start.size()) != bx.d + by.d)
            throw std::invalid_argument("sa_saddle: start must have dimension d_x + d_y");
        x = project(Vec(cfg.start.begin(), cfg.start.begin() + bx.d), bx);
        y = project(Vec(cfg.start.begin() + bx.d, cfg.start.end()), by);
    }
    Vec ax = zeros(bx.d), ay = zeros(by.d);
    for (long k = 1; k <= cfg.n_steps; ++k) {
        Xi xi = problem.sample(rng);
        double h = step_size(cfg.step, fallback, k);
        // extragradient: leading point from the same realization
        Vec gx = problem.subgrad_x(x, y, xi);
        Vec gy = problem.supergrad_y(x, y, xi);
        check_finite(gx, k);
        check_finite(gy, k);
        Vec xl = x, yl = y;
        axpy(-h, gx, xl);
        axpy(+h, gy, yl);
        xl = project(xl, bx);
        yl = project(yl, by);
        Vec gxl = problem.subgrad_x(xl, yl, xi);
        Vec gyl = problem.supergrad_y(xl, yl, xi);
        axpy(-h, gxl, x);
        axpy(+h, gyl, y);
        x = project(x, bx);
        y = project(y, by);
        axpy(1.0, xl, ax);
        axpy(1.0, yl, ay);
    }
    double inv = 1.0 / static_cast<double>(cfg.n_steps);
    if (!cfg.average) return {x, y};
    return {scaled(ax, inv), scaled(ay, inv)};
}

}  // namespace stochlp::sa
