#include "stochlp/pgeom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochlp::pgeom {

namespace {

constexpr double kBisectTol = 1e-12;  // tolerance on scalar dual variables
constexpr int kBisectCap = 200;

// |u|^{r-1} sgn(u)
double phi(double u, double r) {
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(u), r - 1.0), u);
}

// inverse of phi(., a): v -> sgn(v) |v|^{1/(a-1)}
double inv_phi(double v, double a) {
    if (v == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(v), 1.0 / (a - 1.0)), v);
}

// Root of a decreasing function on [lo, hi] with f(lo) >= 0 >= f(hi).
// Illinois-type regula falsi with a bisection fallback.
template <class F>
double solve_decreasing(F&& f, double lo, double hi, double flo, double fhi, const char* what) {
    if (flo < 0.0 || fhi > 0.0) throw std::runtime_error(std::string(what) + ": lost root bracket");
    int side = 0;
    for (int it = 0; it < kBisectCap; ++it) {
        if (hi - lo <= kBisectTol * (1.0 + std::abs(lo) + std::abs(hi))) return 0.5 * (lo + hi);
        double x;
        double denom = flo - fhi;
        if (denom > 0.0) {
            x = lo + flo * (hi - lo) / denom;
            double pad = 1e-3 * (hi - lo);
            if (!(x > lo + pad && x < hi - pad)) x = 0.5 * (lo + hi);
        } else {
            x = 0.5 * (lo + hi);
        }
        double fx = f(x);
        if (fx >= 0.0) {
            lo = x;
            flo = fx;
            if (side == 1) fhi *= 0.5;
            side = 1;
        } else {
            hi = x;
            fhi = fx;
            if (side == -1) flo *= 0.5;
            side = -1;
        }
    }
    if (hi - lo <= kBisectTol * (1.0 + std::abs(lo) + std::abs(hi))) return 0.5 * (lo + hi);
    throw std::runtime_error(std::string(what) + ": bisection did not converge within iteration cap");
}

Vec project_l1(const Vec& x, double R) {
    // sorted-threshold algorithm on |x|
    Vec u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = std::abs(x[i]);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0;
    double theta = 0.0;
    for (size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        double cand = (cum - R) / static_cast<double>(k + 1);
        if (cand < u[k]) theta = cand;
    }
    theta = std::max(theta, 0.0);
    Vec y(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        y[i] = std::copysign(std::max(std::abs(x[i]) - theta, 0.0), x[i]);
    return y;
}

// magnitude u >= 0 with u + nu * p * u^{p-1} = b, b >= 0
double project_coord(double nu, double p, double b) {
    if (b == 0.0) return 0.0;
    auto f = [&](double u) { return b - u - nu * p * std::pow(u, p - 1.0); };  // decreasing in u
    return solve_decreasing(f, 0.0, b, f(0.0) >= 0.0 ? f(0.0) : 0.0, f(b), "project");
}

}  // namespace

double norm(const Vec& x, double p) {
    if (p < 1.0) throw std::invalid_argument("norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double v : x) s += std::abs(v);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

double dual_exponent(double p) {
    if (p < 1.0) throw std::invalid_argument("dual_exponent: p must be >= 1");
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double kappa_p(double p, int d) {
    if (p < 1.0) throw std::invalid_argument("kappa_p: p must be >= 1");
    if (p >= 2.0) return 1.0;
    double lg = 2.0 * std::log(static_cast<double>(std::max(d, 2)));
    double inv = (p > 1.0) ? 1.0 / (p - 1.0) : kInf;
    return std::min(inv, lg);
}

Vec project(const Vec& x, const PBall& ball) {
    if (static_cast<int>(x.size()) != ball.d) throw std::invalid_argument("project: dimension mismatch");
    double nx = norm(x, ball.p);
    if (nx <= ball.R) return x;
    if (ball.p == 2.0) return scaled(x, ball.R / nx);
    if (std::isinf(ball.p)) {
        Vec y(x.size());
        for (size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], -ball.R, ball.R);
        return y;
    }
    if (ball.p == 1.0) return project_l1(x, ball.R);

    // general p: per-coordinate magnitudes for a multiplier nu, outer root on nu
    const double p = ball.p;
    Vec y(x.size());
    auto residual = [&](double nu) {
        for (size_t i = 0; i < x.size(); ++i)
            y[i] = std::copysign(project_coord(nu, p, std::abs(x[i])), x[i]);
        return norm(y, p) - ball.R;
    };
    double hi = 1.0;
    double rhi = residual(hi);
    int guard = 0;
    while (rhi > 0.0) {
        hi *= 2.0;
        rhi = residual(hi);
        if (++guard > 200) throw std::runtime_error("project: failed to bracket dual variable");
    }
    double nu = solve_decreasing(residual, 0.0, hi, nx - ball.R, rhi, "project");
    residual(nu);
    double ny = norm(y, p);
    if (ny > ball.R) for (double& v : y) v *= ball.R / ny;
    return y;
}

ProxSetup make_prox(double p, int d) {
    if (p < 1.0 || p > 2.0) throw std::invalid_argument("make_prox: p must lie in [1,2]");
    if (d < 1) throw std::invalid_argument("make_prox: d must be positive");
    ProxSetup s;
    s.p = p;
    s.d = d;
    s.a = std::max(p, 1.0 + 1.0 / std::log(static_cast<double>(std::max(d, 3))));
    s.scale = std::pow(static_cast<double>(d), 2.0 * (1.0 / p - 1.0 / s.a));
    return s;
}

double prox_value(const ProxSetup& s, const Vec& x, const Vec& z) {
    if (x.size() != z.size()) throw std::invalid_argument("prox_value: dimension mismatch");
    double t = norm(sub(x, z), s.a);
    return s.scale * t * t / (2.0 * (s.a - 1.0));
}

Vec prox_grad(const ProxSetup& s, const Vec& x, const Vec& z) {
    Vec w = sub(x, z);
    double t = norm(w, s.a);
    Vec g(w.size(), 0.0);
    if (t == 0.0) return g;
    double c = s.scale / (s.a - 1.0) * std::pow(t, 2.0 - s.a);
    for (size_t i = 0; i < w.size(); ++i) g[i] = c * phi(w[i], s.a);
    return g;
}

namespace {

// Boundary case of bregman_step: KKT system with multiplier nu for the ball
// and the a-norm radius t = ||x - z||_a as the second scalar unknown.
// Coordinate equation: alpha*phi_a(w_i) + nu*phi_p(z_i + w_i) = rhs_i.
double coord_solve(double alpha, double nu, double z, double rhs, double a, double p) {
    if (p == 1.0) {
        double wp = inv_phi((rhs - nu) / alpha, a);
        if (z + wp > 0.0) return wp;
        double wm = inv_phi((rhs + nu) / alpha, a);
        if (z + wm < 0.0) return wm;
        return -z;  // coordinate pinned at x_i = 0
    }
    auto f = [&](double w) { return rhs - alpha * phi(w, a) - nu * phi(z + w, p); };  // decreasing
    double W = std::abs(z) + std::abs(inv_phi(rhs / alpha, a)) + 1.0;
    int guard = 0;
    while (f(-W) < 0.0 || f(W) > 0.0) {
        W *= 2.0;
        if (++guard > 100) throw std::runtime_error("bregman_step: coordinate bracket failure");
    }
    return solve_decreasing(f, -W, W, f(-W), f(W), "bregman_step");
}

}  // namespace

Vec bregman_step(const ProxSetup& s, const Vec& z, const Vec& g, double h, const PBall& ball) {
    if (z.size() != g.size() || static_cast<int>(z.size()) != ball.d)
        throw std::invalid_argument("bregman_step: dimension mismatch");
    if (h <= 0.0) throw std::invalid_argument("bregman_step: step must be positive");
    for (double v : g)
        if (!std::isfinite(v)) throw std::runtime_error("bregman_step: non-finite gradient");

    const double a = s.a;
    const size_t d = z.size();
    Vec hg(d);
    double S = 0.0;
    const double ad = a / (a - 1.0);
    bool zero = true;
    for (size_t i = 0; i < d; ++i) {
        hg[i] = h * g[i];
        if (hg[i] != 0.0) zero = false;
        S += std::pow(std::abs(hg[i]), ad);
    }
    if (zero) return z;

    if (a == 2.0 && s.scale == 1.0) {
        Vec y(d);
        for (size_t i = 0; i < d; ++i) y[i] = z[i] - hg[i];
        return project(y, ball);
    }

    // unconstrained stationarity map has a closed form
    double tu = (a - 1.0) / s.scale * std::pow(S, (a - 1.0) / a);
    Vec x(d);
    {
        double alpha = s.scale / (a - 1.0) * std::pow(tu, 2.0 - a);
        for (size_t i = 0; i < d; ++i) x[i] = z[i] + inv_phi(-hg[i] / alpha, a);
    }
    if (norm(x, ball.p) <= ball.R * (1.0 + 1e-12)) return x;

    // ball constraint active: solve for (nu, t)
    Vec w(d);
    auto eval_for_nu = [&](double nu) {
        auto wnorm = [&](double t) {
            double alpha = s.scale / (a - 1.0) * std::pow(t, 2.0 - a);
            for (size_t i = 0; i < d; ++i) w[i] = coord_solve(alpha, nu, z[i], -hg[i], a, ball.p);
            return norm(w, a);
        };
        double tlo = 1e-300;
        double thi = std::max(tu, norm(z, a)) + 1.0;
        int guard = 0;
        while (wnorm(thi) - thi > 0.0) {
            thi *= 2.0;
            if (++guard > 200) throw std::runtime_error("bregman_step: failed to bracket t");
        }
        double t = solve_decreasing([&](double tt) { return wnorm(tt) - tt; }, tlo, thi,
                                    1.0, wnorm(thi) - thi, "bregman_step(t)");
        wnorm(t);
        for (size_t i = 0; i < d; ++i) x[i] = z[i] + w[i];
        return norm(x, ball.p) - ball.R;
    };

    double nu_hi = 1.0;
    double r_hi = eval_for_nu(nu_hi);
    int guard = 0;
    while (r_hi > 0.0) {
        nu_hi *= 2.0;
        r_hi = eval_for_nu(nu_hi);
        if (++guard > 200) throw std::runtime_error("bregman_step: failed to bracket dual variable");
    }
    double nu = solve_decreasing(eval_for_nu, 0.0, nu_hi, 1.0, r_hi, "bregman_step(nu)");
    eval_for_nu(nu);
    double nx = norm(x, ball.p);
    if (nx > ball.R * (1.0 + kFeasTol)) throw std::runtime_error("bregman_step: infeasible result");
    if (nx > ball.R) for (double& v : x) v *= ball.R / nx;
    return x;
}

}  // namespace stochlp::pgeom
