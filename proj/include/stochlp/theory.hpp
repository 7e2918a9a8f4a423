#pragma once

#include <cstdint>

namespace stochlp::theory {

// Closed-form sample size predictors under an explicit O(1) = 1 convention;
// ceil applied last, floor of 1. const_mult rescales the whole expression.
struct RegimeSpec {
    double M = 1.0;
    double R = 1.0;
    double mu = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double mu_gamma = 0.0;
    double eps = 0.1;
    double sigma = 0.1;
    double delta = 0.0;
    int d = 1;
    double p = 2.0;
    double const_mult = 1.0;
};

// Eq-(4)/(5) pair for the convex online regime; the consistent branch is
// returned, ties by the minimum
long long n_online_convex(const RegimeSpec& spec);

// convex offline: M^2 R^2/(eps-delta)^2 (d ln(MR/(eps-delta)) + ln(1/sigma))
long long n_offline_convex(const RegimeSpec& spec);

// strongly convex online: kappa M^2/(mu eps) ln(ln(M^2/(mu eps))/sigma)
long long n_online_sc(const RegimeSpec& spec);

// strongly convex offline: M^2/(mu eps)(ln(M^2/(mu eps)) + ln ln(1/sigma)) ln(1/sigma)
long long n_offline_sc(const RegimeSpec& spec);

// gamma-growth offline: lambda^2/(mu_gamma^{2/gamma} eps^{2(gamma-1)/gamma}) *
// (d ln(M R_eps/eps) + ln(1/sigma)); R_eps = 4 eps/mu_1 at gamma = 1, domain
// diameter otherwise
long long n_growth(const RegimeSpec& spec);

// saddle: N_x + N_y, each side an n_growth over its own constants; a side with
// d = 0 contributes nothing
long long n_saddle(const RegimeSpec& spec_x, const RegimeSpec& spec_y);

}  // namespace stochlp::theory
