#pragma once

#include <optional>

#include "stochlp/problems.hpp"

namespace stochlp::sa {

using pgeom::PBall;
using pgeom::ProxSetup;
using problems::SaddleProblem;
using problems::StochasticProblem;

struct StepRule {
    enum class Kind { Constant, InvSqrt };
    Kind kind = Kind::Constant;
    double h = 0.0;  // <= 0 means method default
};

struct SAConfig {
    long n_steps = 1;  // sample budget N, one fresh sample per step
    StepRule step;
    bool average = true;                // uniform trajectory average vs last iterate
    std::optional<ProxSetup> prox;      // mirror_descent default: make_prox(domain.p, d)
    Vec start;                          // empty -> ball center
};

struct SAResult {
    Vec point;
    long samples_used = 0;
    std::vector<double> stage_radii;  // populated by restarted schemes
};

// projected SGD with trajectory averaging
SAResult sgd_projected(const StochasticProblem& problem, const SAConfig& cfg, Rng& rng);

// stochastic mirror descent with the ProxSetup geometry; p = 2 collapses to
// sgd_projected iterate for iterate
SAResult mirror_descent(const StochasticProblem& problem, const SAConfig& cfg, Rng& rng);

// restarted mirror descent under gamma-growth: stage j targets eps_j = eps 2^{J-j}
// on a ball of radius R_j around the previous output, R_{j+1} = (2 eps_j / mu_gamma)^{1/gamma}
SAResult restarted_sa(const StochasticProblem& problem, double eps, double sigma, double gamma,
                      double mu_gamma, Rng& rng);

// restart schedule driven by a fixed total sample budget (equal-budget stages);
// used when the harness searches over N
SAResult restarted_sa_budget(const StochasticProblem& problem, long n_total, double gamma,
                             double mu_gamma, Rng& rng);

// stochastic mirror-prox (extragradient) with averaging on the product space
std::pair<Vec, Vec> sa_saddle(const SaddleProblem& problem, const SAConfig& cfg, Rng& rng);

}  // namespace stochlp::sa
