#pragma once

#include <memory>

#include "stochlp/problems.hpp"

namespace stochlp::regularize {

using pgeom::ProxSetup;
using problems::StochasticProblem;

// Wraps a merely-convex problem into f + mu V(., x0): strong convexity with
// modulus mu in the p-norm transfers from the 1-strong convexity of V.
// true_opt assumes the inner optimum nearest to x0 has V(x*, x0) = 0 (true for
// the suite problems with x0 at the ball center), so it stays the optimum of
// the regularized objective.
std::unique_ptr<StochasticProblem> make_regularized(const StochasticProblem& inner, double mu,
                                                    Vec x0, ProxSetup prox);

// the largest modulus that keeps the added bias below eps/2:
// mu = eps / (2 kappa_p(d) R^2)
double mu_for_eps(double eps, double p, int d, double R);

// success label through the regularization path: gap on the regularized
// problem <= eps/2 together with mu * V(x*, x0) <= eps/2 certifies eps on the
// original problem
bool transfer_guarantee(double eps, double reg_result_gap, double mu, double v_star);

}  // namespace stochlp::regularize
