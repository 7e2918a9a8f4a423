#include "stochlp/regularize.hpp"

#include <cmath>
#include <stdexcept>

namespace stochlp::regularize {

namespace {

using problems::OracleMeta;

class Regularized final : public StochasticProblem {
public:
    Regularized(const StochasticProblem& inner, double mu, Vec x0, ProxSetup prox)
        : inner_(&inner), mu_(mu), x0_(std::move(x0)), prox_(prox) {
        if (mu < 0.0) throw std::invalid_argument("regularize: mu must be nonnegative");
        const auto& dom = inner.meta().domain;
        if (dom.p > 2.0) throw std::invalid_argument("regularize: no prox setup for p > 2");
        if (static_cast<int>(x0_.size()) != dom.d)
            throw std::invalid_argument("regularize: x0 dimension mismatch");
        if (!dom.contains(x0_)) throw std::invalid_argument("regularize: x0 must be feasible");
        meta_ = inner.meta();
        meta_.mu = mu;
        // ||grad V(x, x0)||_* = scale * ||x - x0||_a / (a - 1) <= 2 R scale / (a - 1)
        mv_ = 2.0 * dom.R * prox_.scale / (prox_.a - 1.0);
        meta_.M = inner.meta().M + mu * mv_;
    }
    const OracleMeta& meta() const override { return meta_; }
    Xi sample(Rng& rng) const override { return inner_->sample(rng); }
    double loss(const Vec& x, const Xi& xi) const override {
        return inner_->loss(x, xi) + mu_ * pgeom::prox_value(prox_, x, x0_);
    }
    Vec subgrad(const Vec& x, const Xi& xi) const override {
        Vec g = inner_->subgrad(x, xi);
        axpy(mu_, pgeom::prox_grad(prox_, x, x0_), g);
        return g;
    }
    double true_value(const Vec& x) const override {
        return inner_->true_value(x) + mu_ * pgeom::prox_value(prox_, x, x0_);
    }
    std::pair<Vec, double> true_opt() const override {
        auto [xs, fs] = inner_->true_opt();
        return {xs, fs + mu_ * pgeom::prox_value(prox_, xs, x0_)};
    }
    double lip_bound(const Xi& xi) const override { return inner_->lip_bound(xi) + mu_ * mv_; }

private:
    const StochasticProblem* inner_;
    double mu_;
    Vec x0_;
    ProxSetup prox_;
    OracleMeta meta_;
    double mv_;
};

}  // namespace

std::unique_ptr<StochasticProblem> make_regularized(const StochasticProblem& inner, double mu,
                                                    Vec x0, ProxSetup prox) {
    return std::make_unique<Regularized>(inner, mu, std::move(x0), prox);
}

double mu_for_eps(double eps, double p, int d, double R) {
    if (eps <= 0.0 || R <= 0.0) throw std::invalid_argument("mu_for_eps: eps and R must be positive");
    return eps / (2.0 * pgeom::kappa_p(p, d) * R * R);
}

bool transfer_guarantee(double eps, double reg_result_gap, double mu, double v_star) {
    return reg_result_gap <= eps / 2.0 && mu * v_star <= eps / 2.0;
}

}  // namespace stochlp::regularize
