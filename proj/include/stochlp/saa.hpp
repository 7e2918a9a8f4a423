#pragma once

#include <string>
#include <vector>

#include "stochlp/problems.hpp"

namespace stochlp::saa {

using pgeom::PBall;
using pgeom::ProxSetup;
using problems::SaddleProblem;
using problems::StochasticProblem;

// Frozen sample with averaged loss/subgradient. Immutable after build;
// scalar means use pairwise (tree) summation, vector means a fixed order.
class EmpiricalObjective {
public:
    EmpiricalObjective(const StochasticProblem& base, std::vector<Xi> sample);

    double loss(const Vec& x) const;
    Vec subgrad(const Vec& x) const;
    long size() const { return static_cast<long>(sample_.size()); }
    const StochasticProblem& base() const { return *base_; }
    const std::vector<Xi>& sample() const { return sample_; }
    double lip_bound() const { return m_hat_; }  // mean of M(xi) over the frozen sample

private:
    const StochasticProblem* base_;
    std::vector<Xi> sample_;
    double m_hat_;
};

struct SAAResult {
    Vec point;
    long inner_iterations = 0;
    double delta_target = 0.0;
    std::string certificate;  // "iteration-bound" | "vacuous"
};

EmpiricalObjective build_empirical(const StochasticProblem& problem, long n, Rng& rng);

// deterministic mirror descent for T = ceil(kappa_p(d) M^2 R^2 / delta^2)
// iterations with averaging
SAAResult solve_empirical(const EmpiricalObjective& emp, double delta, const ProxSetup& prox);

// strongly convex / quadratic growth regime: delta = mu eps^2, restarted
// deterministic mirror descent with stage radii R_{j+1} = sqrt(2 delta_j / mu)
SAAResult solve_empirical_sc(const EmpiricalObjective& emp, double mu, double eps,
                             const ProxSetup& prox);

SAAResult saa_pipeline(const StochasticProblem& problem, long n, double delta,
                       const ProxSetup& prox, Rng& rng);

// empirical saddle: deterministic mirror-prox until both empirical
// best-response gaps are <= eps/4
std::pair<Vec, Vec> saa_saddle(const SaddleProblem& problem, long n, double eps, Rng& rng);

}  // namespace stochlp::saa
