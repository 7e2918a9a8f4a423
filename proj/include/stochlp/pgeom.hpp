#pragma once

#include <limits>

#include "stochlp/vec.hpp"

namespace stochlp::pgeom {

constexpr double kInf = std::numeric_limits<double>::infinity();

// feasibility tolerance (relative) used by membership checks
constexpr double kFeasTol = 1e-9;

// ||x||_p for p in [1, inf]; throws std::invalid_argument for p < 1
double norm(const Vec& x, double p);

// q with 1/p + 1/q = 1 (1 <-> inf, 2 <-> 2)
double dual_exponent(double p);

// geometry factor: 1 for p >= 2, min(1/(p-1), 2 ln(max(d,2))) for p in [1,2)
double kappa_p(double p, int d);

struct PBall {
    double p = 2.0;
    double R = 1.0;
    int d = 1;

    bool contains(const Vec& x, double tol = kFeasTol) const {
        return norm(x, p) <= R * (1.0 + tol);
    }
};

// Euclidean projection onto the ball. Closed form for p in {1, 2, inf},
// KKT bisection on the single dual variable otherwise.
Vec project(const Vec& x, const PBall& ball);

// Distance-generating setup for p in [1,2]:
//   V(x,z) = scale * ||x-z||_a^2 / (2(a-1)),
//   a = max(p, 1 + 1/ln(max(d,3))), scale = d^{2(1/p - 1/a)}.
// 1-strongly convex w.r.t. ||.||_p and bounded by kappa_p(d) e^2 ||x-z||_p^2.
struct ProxSetup {
    double p = 2.0;
    int d = 1;
    double a = 2.0;
    double scale = 1.0;
};

ProxSetup make_prox(double p, int d);  // rejects p > 2

double prox_value(const ProxSetup& s, const Vec& x, const Vec& z);

// gradient of V(.,z) at x (zero at x == z)
Vec prox_grad(const ProxSetup& s, const Vec& x, const Vec& z);

// argmin_{x in ball} { <h g, x> + V(x, z) }; with p = 2 this is exactly
// project(z - h g, ball)
Vec bregman_step(const ProxSetup& s, const Vec& z, const Vec& g, double h, const PBall& ball);

}  // namespace stochlp::pgeom
