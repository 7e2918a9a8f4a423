#include "stochlp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochlp/pgeom.hpp"

namespace stochlp::theory {

namespace {

long long finish(double v, double const_mult) {
    double r = std::ceil(const_mult * v);
    if (r < 1.0) return 1;
    return static_cast<long long>(r);
}

double ln_conf(double sigma) { return (sigma < 1.0) ? std::log(1.0 / sigma) : 0.0; }

double growth_raw(const RegimeSpec& s) {
    if (s.gamma < 1.0) throw std::invalid_argument("n_growth: gamma must be >= 1");
    if (s.lambda <= 0.0 || s.mu_gamma <= 0.0)
        throw std::invalid_argument("n_growth: lambda and mu_gamma must be positive");
    double r_eps = (s.gamma == 1.0) ? 4.0 * s.eps / s.mu_gamma : 2.0 * s.R;
    double power = 2.0 * (s.gamma - 1.0) / s.gamma;
    double lead = s.lambda * s.lambda /
                  (std::pow(s.mu_gamma, 2.0 / s.gamma) * std::pow(s.eps, power));
    return lead * (s.d * std::log(s.M * r_eps / s.eps) + ln_conf(s.sigma));
}

}  // namespace

long long n_online_convex(const RegimeSpec& s) {
    if (s.eps >= s.M * s.R) return 1;
    double e = std::max(2.0, s.p);
    double base = s.M * s.M * s.R * s.R * ln_conf(s.sigma);
    double b5 = std::pow(s.d, 1.0 - 2.0 / e) * base / (s.eps * s.eps);
    if (std::isinf(s.p)) return finish(b5, s.const_mult);
    double b4 = pgeom::kappa_p(s.p, s.d) * base / std::pow(s.eps, e);
    double v;
    if (b4 <= s.d) v = b4;                // small-sample branch consistent
    else if (b5 >= s.d) v = b5;           // large-sample branch consistent
    else v = std::min(b4, b5);            // tie rule: the smaller upper bound
    return finish(v, s.const_mult);
}

long long n_offline_convex(const RegimeSpec& s) {
    if (s.delta >= s.eps) throw std::invalid_argument("n_offline_convex: requires delta < eps");
    double gap = s.eps - s.delta;
    double v = s.M * s.M * s.R * s.R / (gap * gap) *
               (s.d * std::log(s.M * s.R / gap) + ln_conf(s.sigma));
    return finish(v, s.const_mult);
}

long long n_online_sc(const RegimeSpec& s) {
    if (s.mu <= 0.0) throw std::invalid_argument("n_online_sc: mu must be positive");
    double L = s.M * s.M / (s.mu * s.eps);
    if (L <= 1.0) return 1;
    double arg = std::max(std::log(L) / s.sigma, std::exp(1.0));
    double v = pgeom::kappa_p(s.p, s.d) * L * std::log(arg);
    return finish(v, s.const_mult);
}

long long n_offline_sc(const RegimeSpec& s) {
    if (s.mu <= 0.0) throw std::invalid_argument("n_offline_sc: mu must be positive");
    double L = s.M * s.M / (s.mu * s.eps);
    if (L <= 1.0) return 1;
    double lnln = (s.sigma < std::exp(-1.0)) ? std::log(std::log(1.0 / s.sigma)) : 0.0;
    double v = L * (std::log(L) + lnln) * ln_conf(s.sigma);
    return finish(v, s.const_mult);
}

long long n_growth(const RegimeSpec& s) { return finish(growth_raw(s), s.const_mult); }

long long n_saddle(const RegimeSpec& spec_x, const RegimeSpec& spec_y) {
    double v = 0.0;
    if (spec_x.d > 0) v += spec_x.const_mult * growth_raw(spec_x);
    if (spec_y.d > 0) v += spec_y.const_mult * growth_raw(spec_y);
    return finish(v, 1.0);
}

}  // namespace stochlp::theory
