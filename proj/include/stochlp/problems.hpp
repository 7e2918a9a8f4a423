#pragma once

#include <memory>
#include <span>
#include <utility>

#include "stochlp/pgeom.hpp"
#include "stochlp/vec.hpp"

namespace stochlp::problems {

using pgeom::PBall;

struct OracleMeta {
    double M = 0.0;         // Lipschitz constant in the dual norm (mean sense when random)
    double mu = 0.0;        // strong convexity / quadratic growth modulus, 0 if absent
    double gamma = 0.0;     // growth exponent, 0 if absent
    double mu_gamma = 0.0;  // growth constant
    double lambda = 0.0;    // subgaussian variance parameter, 0 if unknown
    PBall domain;
};

// Oracle bundle of Eq-style stochastic problems: one fresh realization per
// sample() call, loss/subgrad per realization, analytic F and (x*, F*).
class StochasticProblem {
public:
    virtual ~StochasticProblem() = default;
    virtual const OracleMeta& meta() const = 0;
    virtual Xi sample(Rng& rng) const = 0;
    virtual double loss(const Vec& x, const Xi& xi) const = 0;
    virtual Vec subgrad(const Vec& x, const Xi& xi) const = 0;
    virtual double true_value(const Vec& x) const = 0;
    virtual std::pair<Vec, double> true_opt() const = 0;
    // per-realization Lipschitz bound M(xi) in the dual norm
    virtual double lip_bound(const Xi& xi) const { return meta().M; }
    // bound on E||subgrad||_* over a radius-r neighborhood of the optimum;
    // restart schedules use it to keep stage budgets from stalling on the
    // global constant. Defaults to the global M.
    virtual double lip_radius(double r) const {
        (void)r;
        return meta().M;
    }
};

class SaddleProblem {
public:
    virtual ~SaddleProblem() = default;
    virtual const OracleMeta& meta_x() const = 0;
    virtual const OracleMeta& meta_y() const = 0;
    virtual Xi sample(Rng& rng) const = 0;
    virtual double loss(const Vec& x, const Vec& y, const Xi& xi) const = 0;
    virtual Vec subgrad_x(const Vec& x, const Vec& y, const Xi& xi) const = 0;
    virtual Vec supergrad_y(const Vec& x, const Vec& y, const Xi& xi) const = 0;
    virtual double true_value(const Vec& x, const Vec& y) const = 0;
    virtual Vec best_response_x(const Vec& y) const = 0;  // argmin_x F(x, y)
    virtual Vec best_response_y(const Vec& x) const = 0;  // argmax_y F(x, y)
    // best responses of the empirical average over a frozen sample
    virtual Vec empirical_best_x(std::span<const Xi> sample, const Vec& y) const = 0;
    virtual Vec empirical_best_y(std::span<const Xi> sample, const Vec& x) const = 0;
};

// f(x, xi) = ||x||_2^gamma - gamma * s * <xi, x>, xi ~ N(0, I_d), X = B_2^d(1).
// F(x) = ||x||_2^gamma, x* = 0, F* = 0; gamma-growth with mu_gamma = 1.
std::unique_ptr<StochasticProblem> gauss_power(int d, double gamma, double s);

// f(x, xi) = (mu/2) ||x - c - s*xi||_2^2 with interior center c, xi ~ N(0, I_d).
std::unique_ptr<StochasticProblem> strongly_convex_quad(int d, double mu, double s);

// f(x, xi) = |x_j - b|, j uniform over the first n_directions basis vectors,
// b ~ U[-noise, noise]. Merely convex with a flat solution set containing 0.
std::unique_ptr<StochasticProblem> abs_regression(int d, int n_directions, double noise, double p);

// f(x,y,xi) = mu_x ||x||_2 - mu_y ||y||_2 + s<xi_x, x> + s<xi_y, y> on
// B_2^{d_x}(1) x B_2^{d_y}(1); sharp saddle at (0, 0).
std::unique_ptr<SaddleProblem> sharp_saddle(int d_x, int d_y, double mu_x, double mu_y, double s);

}  // namespace stochlp::problems
