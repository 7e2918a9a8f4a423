#include "stochlp/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace stochlp::problems {

namespace {

Vec gauss_vec(int d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(static_cast<size_t>(d));
    for (double& x : v) x = gauss(rng);
    return v;
}

double norm2(const Vec& x) { return pgeom::norm(x, 2.0); }

class GaussPower final : public StochasticProblem {
public:
    GaussPower(int d, double gamma, double s) : d_(d), gamma_(gamma), s_(s) {
        if (d < 1 || gamma < 1.0 || s <= 0.0) throw std::invalid_argument("gauss_power: bad parameters");
        meta_.domain = PBall{2.0, 1.0, d};
        meta_.M = gamma * 1.0 + gamma * s * std::sqrt(static_cast<double>(d));
        meta_.gamma = gamma;
        meta_.mu_gamma = 1.0;
        meta_.lambda = gamma * gamma * s * s;
        meta_.mu = (gamma == 2.0) ? 2.0 : 0.0;
    }
    const OracleMeta& meta() const override { return meta_; }
    Xi sample(Rng& rng) const override { return gauss_vec(d_, rng); }
    double loss(const Vec& x, const Xi& xi) const override {
        return std::pow(norm2(x), gamma_) - gamma_ * s_ * dot(xi, x);
    }
    Vec subgrad(const Vec& x, const Xi& xi) const override {
        double r = norm2(x);
        Vec g(x.size());
        double c = (r > 0.0) ? gamma_ * std::pow(r, gamma_ - 2.0) : 0.0;
        for (size_t i = 0; i < x.size(); ++i) g[i] = c * x[i] - gamma_ * s_ * xi[i];
        return g;
    }
    double true_value(const Vec& x) const override { return std::pow(norm2(x), gamma_); }
    std::pair<Vec, double> true_opt() const override { return {zeros(d_), 0.0}; }
    double lip_bound(const Xi& xi) const override { return gamma_ * 1.0 + gamma_ * s_ * norm2(xi); }
    double lip_radius(double r) const override {
        double rr = std::min(2.0 * r, 1.0);
        return gamma_ * std::pow(rr, gamma_ - 1.0) + gamma_ * s_ * std::sqrt(static_cast<double>(d_));
    }

private:
    int d_;
    double gamma_, s_;
    OracleMeta meta_;
};

class ScQuad final : public StochasticProblem {
public:
    ScQuad(int d, double mu, double s) : d_(d), mu_(mu), s_(s), c_(static_cast<size_t>(d)) {
        if (d < 1 || mu <= 0.0 || s < 0.0) throw std::invalid_argument("strongly_convex_quad: bad parameters");
        meta_.domain = PBall{2.0, 1.0, d};
        for (double& v : c_) v = 0.25 / std::sqrt(static_cast<double>(d));  // ||c|| = R/4
        meta_.M = mu * (2.0 + s * std::sqrt(static_cast<double>(d)));
        meta_.mu = mu;
        meta_.gamma = 2.0;
        meta_.mu_gamma = mu / 2.0;
        meta_.lambda = mu * s;
    }
    const OracleMeta& meta() const override { return meta_; }
    Xi sample(Rng& rng) const override { return gauss_vec(d_, rng); }
    double loss(const Vec& x, const Xi& xi) const override {
        double s2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double u = x[i] - c_[i] - s_ * xi[i];
            s2 += u * u;
        }
        return 0.5 * mu_ * s2;
    }
    Vec subgrad(const Vec& x, const Xi& xi) const override {
        Vec g(x.size());
        for (size_t i = 0; i < x.size(); ++i) g[i] = mu_ * (x[i] - c_[i] - s_ * xi[i]);
        return g;
    }
    double true_value(const Vec& x) const override {
        double s2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double u = x[i] - c_[i];
            s2 += u * u;
        }
        return 0.5 * mu_ * (s2 + s_ * s_ * static_cast<double>(d_));
    }
    std::pair<Vec, double> true_opt() const override {
        return {c_, 0.5 * mu_ * s_ * s_ * static_cast<double>(d_)};
    }
    double lip_bound(const Xi& xi) const override { return mu_ * (2.0 + s_ * norm2(xi)); }
    double lip_radius(double r) const override {
        return mu_ * (std::min(2.0 * r, 2.0) + s_ * std::sqrt(static_cast<double>(d_)));
    }

private:
    int d_;
    double mu_, s_;
    Vec c_;
    OracleMeta meta_;
};

class AbsRegression final : public StochasticProblem {
public:
    AbsRegression(int d, int m, double noise, double p) : d_(d), m_(m), noise_(noise) {
        if (d < 2 || m < 1 || m >= d || noise < 0.0)
            throw std::invalid_argument("abs_regression: need 1 <= n_directions < d, noise >= 0");
        meta_.domain = PBall{p, 1.0, d};
        meta_.M = 1.0;  // directions are basis vectors, ||e_j||_q = 1
        meta_.lambda = std::sqrt(2.0);
    }
    const OracleMeta& meta() const override { return meta_; }
    Xi sample(Rng& rng) const override {
        std::uniform_int_distribution<int> pick(0, m_ - 1);
        std::uniform_real_distribution<double> unif(-noise_, noise_);
        int j = pick(rng);
        double b = (noise_ > 0.0) ? unif(rng) : 0.0;
        return Xi{static_cast<double>(j), b};
    }
    double loss(const Vec& x, const Xi& xi) const override {
        return std::abs(x[static_cast<size_t>(xi[0])] - xi[1]);
    }
    Vec subgrad(const Vec& x, const Xi& xi) const override {
        Vec g(x.size(), 0.0);
        size_t j = static_cast<size_t>(xi[0]);
        double r = x[j] - xi[1];
        g[j] = (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        return g;
    }
    double true_value(const Vec& x) const override {
        // E|u - b| with b ~ U[-noise, noise], averaged over the direction mixture
        double sum = 0.0;
        for (int j = 0; j < m_; ++j) {
            double u = std::abs(x[static_cast<size_t>(j)]);
            if (noise_ == 0.0 || u >= noise_) sum += u;
            else sum += (u * u + noise_ * noise_) / (2.0 * noise_);
        }
        return sum / static_cast<double>(m_);
    }
    std::pair<Vec, double> true_opt() const override { return {zeros(d_), noise_ / 2.0}; }

private:
    int d_, m_;
    double noise_;
    OracleMeta meta_;
};

class SharpSaddle final : public SaddleProblem {
public:
    SharpSaddle(int dx, int dy, double mux, double muy, double s)
        : dx_(dx), dy_(dy), mux_(mux), muy_(muy), s_(s) {
        if (dx < 1 || dy < 1 || mux <= 0.0 || muy <= 0.0 || s < 0.0)
            throw std::invalid_argument("sharp_saddle: bad parameters");
        mx_.domain = PBall{2.0, 1.0, dx};
        mx_.M = mux + s * std::sqrt(static_cast<double>(dx));
        mx_.gamma = 1.0;
        mx_.mu_gamma = mux;
        mx_.lambda = s;
        my_.domain = PBall{2.0, 1.0, dy};
        my_.M = muy + s * std::sqrt(static_cast<double>(dy));
        my_.gamma = 1.0;
        my_.mu_gamma = muy;
        my_.lambda = s;
    }
    const OracleMeta& meta_x() const override { return mx_; }
    const OracleMeta& meta_y() const override { return my_; }
    Xi sample(Rng& rng) const override { return gauss_vec(dx_ + dy_, rng); }
    double loss(const Vec& x, const Vec& y, const Xi& xi) const override {
        double lin = 0.0;
        for (int i = 0; i < dx_; ++i) lin += xi[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        for (int i = 0; i < dy_; ++i) lin += xi[static_cast<size_t>(dx_ + i)] * y[static_cast<size_t>(i)];
        return mux_ * norm2(x) - muy_ * norm2(y) + s_ * lin;
    }
    Vec subgrad_x(const Vec& x, const Vec& y, const Xi& xi) const override {
        (void)y;
        double r = norm2(x);
        Vec g(x.size());
        for (size_t i = 0; i < x.size(); ++i)
            g[i] = (r > 0.0 ? mux_ * x[i] / r : 0.0) + s_ * xi[i];
        return g;
    }
    Vec supergrad_y(const Vec& x, const Vec& y, const Xi& xi) const override {
        (void)x;
        double r = norm2(y);
        Vec g(y.size());
        for (size_t i = 0; i < y.size(); ++i)
            g[i] = (r > 0.0 ? -muy_ * y[i] / r : 0.0) + s_ * xi[static_cast<size_t>(dx_) + i];
        return g;
    }
    double true_value(const Vec& x, const Vec& y) const override {
        return mux_ * norm2(x) - muy_ * norm2(y);
    }
    Vec best_response_x(const Vec&) const override { return zeros(dx_); }
    Vec best_response_y(const Vec&) const override { return zeros(dy_); }
    Vec empirical_best_x(std::span<const Xi> sample, const Vec&) const override {
        return radial_argopt(sample, 0, dx_, mux_, -1.0);
    }
    Vec empirical_best_y(std::span<const Xi> sample, const Vec&) const override {
        return radial_argopt(sample, dx_, dy_, muy_, +1.0);
    }

private:
    // minimize mu*||u|| + sign * s<xi_bar, u> over B_2(1): radial, closed form
    Vec radial_argopt(std::span<const Xi> sample, int off, int dim, double mu, double sign) const {
        Vec c(static_cast<size_t>(dim), 0.0);
        for (const Xi& xi : sample)
            for (int i = 0; i < dim; ++i) c[static_cast<size_t>(i)] += xi[static_cast<size_t>(off + i)];
        double inv = s_ / static_cast<double>(sample.size());
        for (double& v : c) v *= inv;
        double nc = norm2(c);
        Vec u(static_cast<size_t>(dim), 0.0);
        if (nc > mu)
            for (int i = 0; i < dim; ++i) u[static_cast<size_t>(i)] = sign * c[static_cast<size_t>(i)] / nc;
        return u;
    }

    int dx_, dy_;
    double mux_, muy_, s_;
    OracleMeta mx_, my_;
};

}  // namespace

std::unique_ptr<StochasticProblem> gauss_power(int d, double gamma, double s) {
    return std::make_unique<GaussPower>(d, gamma, s);
}

std::unique_ptr<StochasticProblem> strongly_convex_quad(int d, double mu, double s) {
    return std::make_unique<ScQuad>(d, mu, s);
}

std::unique_ptr<StochasticProblem> abs_regression(int d, int n_directions, double noise, double p) {
    return std::make_unique<AbsRegression>(d, n_directions, noise, p);
}

std::unique_ptr<SaddleProblem> sharp_saddle(int d_x, int d_y, double mu_x, double mu_y, double s) {
    return std::make_unique<SharpSaddle>(d_x, d_y, mu_x, mu_y, s);
}

}  // namespace stochlp::problems
