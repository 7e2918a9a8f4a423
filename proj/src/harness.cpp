#include "stochlp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "stochlp/regularize.hpp"
#include "stochlp/sa.hpp"
#include "stochlp/saa.hpp"

namespace stochlp::harness {

namespace {

using problems::SaddleProblem;
using problems::StochasticProblem;

int default_threads() {
    if (const char* env = std::getenv("STOCHLP_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

std::unique_ptr<StochasticProblem> make_problem(const TrialSpec& spec) {
    if (spec.problem == "gauss-power") return problems::gauss_power(spec.d, spec.gamma, spec.s);
    if (spec.problem == "sc-quad") return problems::strongly_convex_quad(spec.d, spec.mu, spec.s);
    if (spec.problem == "abs-reg")
        return problems::abs_regression(spec.d, spec.ndir, spec.noise, spec.p);
    throw std::invalid_argument("unknown problem id: " + spec.problem);
}

std::unique_ptr<SaddleProblem> make_saddle(const TrialSpec& spec) {
    int dy = spec.d_y > 0 ? spec.d_y : spec.d;
    return problems::sharp_saddle(spec.d, dy, spec.mu_x, spec.mu_y, spec.s);
}

TrialOutcome run_saddle_trial(const TrialSpec& spec, Rng& rng) {
    auto prob = make_saddle(spec);
    Vec x, y;
    if (spec.method == "sa-saddle") {
        sa::SAConfig cfg;
        cfg.n_steps = spec.n;
        std::tie(x, y) = sa::sa_saddle(*prob, cfg, rng);
    } else if (spec.method == "saa-saddle") {
        std::tie(x, y) = saa::saa_saddle(*prob, spec.n, spec.eps, rng);
    } else {
        throw std::invalid_argument("method " + spec.method + " does not apply to " + spec.problem);
    }
    TrialOutcome out;
    out.samples_used = spec.n;
    // duality gap through the analytic best responses
    double up = prob->true_value(x, prob->best_response_y(x));
    double lo = prob->true_value(prob->best_response_x(y), y);
    out.gap = up - lo;
    out.success = out.gap <= spec.eps;
    return out;
}

TrialOutcome run_convex_trial(const TrialSpec& spec, Rng& rng) {
    auto inner = make_problem(spec);
    const StochasticProblem* target = inner.get();
    std::unique_ptr<StochasticProblem> reg;
    double eps_solve = spec.eps;
    const auto& dom = inner->meta().domain;
    if (spec.regularize) {
        double mu = spec.mu_override > 0.0
                        ? spec.mu_override
                        : regularize::mu_for_eps(spec.eps, dom.p, dom.d, dom.R);
        reg = regularize::make_regularized(*inner, mu, zeros(dom.d), pgeom::make_prox(dom.p, dom.d));
        target = reg.get();
        eps_solve = spec.eps / 2.0;  // transfer rule: eps/2 on the regularized problem
    }
    Vec x;
    long used = spec.n;
    const auto& meta = target->meta();
    if (spec.method == "sa-sgd" || spec.method == "sa-md") {
        sa::SAConfig cfg;
        cfg.n_steps = spec.n;
        // start at a ball corner: single-run methods are measured on the
        // transient from distance-R initial error, not the stationary wander
        cfg.start = zeros(dom.d);
        cfg.start[0] = dom.R;
        auto r = (spec.method == "sa-sgd") ? sa::sgd_projected(*target, cfg, rng)
                                           : sa::mirror_descent(*target, cfg, rng);
        x = std::move(r.point);
        used = r.samples_used;
    } else if (spec.method == "sa-restart") {
        double g, mg;
        if (meta.gamma > 0.0) {
            g = meta.gamma;
            mg = meta.mu_gamma;
        } else if (meta.mu > 0.0) {
            g = 2.0;
            mg = meta.mu / 2.0;
        } else {
            throw std::invalid_argument("sa-restart needs a growth regime");
        }
        auto r = sa::restarted_sa_budget(*target, spec.n, g, mg, rng);
        x = std::move(r.point);
        used = r.samples_used;
    } else if (spec.method == "saa") {
        double delta = spec.delta > 0.0 ? spec.delta : eps_solve / 2.0;
        auto prox = pgeom::make_prox(std::min(dom.p, 2.0), dom.d);
        auto r = saa::saa_pipeline(*target, spec.n, delta, prox, rng);
        x = std::move(r.point);
    } else if (spec.method == "saa-sc") {
        double mu_eff = meta.mu;
        if (mu_eff <= 0.0) throw std::invalid_argument("saa-sc needs a strongly convex target");
        auto prox = pgeom::make_prox(std::min(dom.p, 2.0), dom.d);
        auto emp = saa::build_empirical(*target, spec.n, rng);
        auto r = saa::solve_empirical_sc(emp, mu_eff, eps_solve, prox);
        x = std::move(r.point);
    } else {
        throw std::invalid_argument("unknown method id: " + spec.method);
    }
    TrialOutcome out;
    out.samples_used = used;
    // success is judged on the original objective even through regularization
    out.gap = inner->true_value(x) - inner->true_opt().second;
    out.success = out.gap <= spec.eps;
    return out;
}

void clopper_pearson(int successes, int trials, double& lo, double& hi) {
    const double alpha = 0.05;
    double s = successes, n = trials;
    lo = (successes == 0) ? 0.0 : boost::math::ibeta_inv(s, n - s + 1.0, alpha / 2.0);
    hi = (successes == trials) ? 1.0 : boost::math::ibeta_inv(s + 1.0, n - s, 1.0 - alpha / 2.0);
}

}  // namespace

TrialOutcome run_trial(const TrialSpec& spec) {
    std::uint64_t seed = mix_seed(spec.master_seed, static_cast<std::uint64_t>(spec.trial_index),
                                  static_cast<std::uint64_t>(spec.grid_index));
    Rng rng(seed);
    try {
        if (spec.problem == "sharp-saddle") return run_saddle_trial(spec, rng);
        return run_convex_trial(spec, rng);
    } catch (const std::runtime_error& e) {
        std::ostringstream os;
        os << e.what() << " [trial: problem=" << spec.problem << " method=" << spec.method
           << " n=" << spec.n << " seed=" << seed << "]";
        throw std::runtime_error(os.str());
    }
}

SuccessEstimate estimate_success(const TrialFn& fn, long n, int trials, int threads) {
    if (trials < 1) throw std::invalid_argument("estimate_success: trials must be >= 1");
    std::vector<TrialOutcome> out(static_cast<size_t>(trials));
    std::vector<std::exception_ptr> errs(static_cast<size_t>(trials));
    int nt = std::min(threads > 0 ? threads : default_threads(), trials);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= trials) return;
            try {
                out[static_cast<size_t>(i)] = fn(n, i);
            } catch (...) {
                errs[static_cast<size_t>(i)] = std::current_exception();
            }
        }
    };
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nt));
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    // aggregation in trial-index order: independent of scheduling
    SuccessEstimate est;
    est.trials = trials;
    std::vector<double> gaps;
    gaps.reserve(out.size());
    double gap_sum = 0.0, used_sum = 0.0;
    for (const auto& o : out) {
        if (o.success) ++est.successes;
        gaps.push_back(o.gap);
        gap_sum += o.gap;
        used_sum += static_cast<double>(o.samples_used);
    }
    est.p_hat = static_cast<double>(est.successes) / trials;
    clopper_pearson(est.successes, trials, est.ci_low, est.ci_high);
    est.gap_mean = gap_sum / trials;
    est.samples_used_mean = used_sum / trials;
    std::sort(gaps.begin(), gaps.end());
    size_t q = static_cast<size_t>(std::ceil(0.9 * trials));
    est.gap_q90 = gaps[std::min(gaps.size() - 1, q == 0 ? 0 : q - 1)];
    return est;
}

SuccessEstimate estimate_success(const TrialSpec& base, int trials, int threads) {
    // per-call copy: the function object is shared across worker threads
    return estimate_success(
        [base](long n, long trial) {
            TrialSpec spec = base;
            spec.n = n;
            spec.trial_index = trial;
            return run_trial(spec);
        },
        base.n, trials, threads);
}

NSearchResult find_min_n(const TrialFn& fn, double sigma, int trials, long n_lo, long n_hi_cap,
                         int threads) {
    if (n_lo < 1 || n_hi_cap < n_lo)
        throw std::invalid_argument("find_min_n: need 1 <= n_lo <= n_hi_cap");
    NSearchResult res;
    res.trials_per_point = trials;
    res.decision_rule = "point estimate p_hat >= 1 - sigma";
    auto eval = [&](long n) {
        auto e = estimate_success(fn, n, trials, threads);
        res.evaluations.emplace_back(n, e);
        return e.p_hat >= 1.0 - sigma;
    };

    long n = n_lo;
    long last_fail = 0;
    bool passed = eval(n);
    while (!passed) {
        last_fail = n;
        if (n >= n_hi_cap) break;
        n = std::min(2 * n, n_hi_cap);
        passed = eval(n);
    }
    if (passed) {
        long lo = last_fail == 0 ? n_lo - 1 : last_fail;  // invariant bracket: (fail, pass]
        long hi = n;
        while (hi - lo > 1) {
            long mid = lo + (hi - lo) / 2;
            if (eval(mid)) hi = mid;
            else lo = mid;
        }
        res.found = true;
        res.n_min = hi;
        res.n_pass = hi;
        res.n_fail = lo;
        // the bracketing sequence alone is always order-consistent, so probe
        // one point above n_min to give non-monotone methods a chance to show
        long probe = std::min(2 * res.n_min, n_hi_cap);
        bool seen = false;
        for (const auto& [pn, pe] : res.evaluations) seen = seen || pn == probe;
        if (probe > res.n_min && !seen) eval(probe);
    }

    // pass/fail should be monotone in N under the search assumption
    auto evs = res.evaluations;
    std::sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 0; i + 1 < evs.size(); ++i) {
        bool pi = evs[i].second.p_hat >= 1.0 - sigma;
        bool pj = evs[i + 1].second.p_hat >= 1.0 - sigma;
        if (pi && !pj) res.monotonicity_violation = true;
    }
    return res;
}

NSearchResult find_min_n(const TrialSpec& base, double sigma, int trials, long n_lo, long n_hi_cap,
                         int threads) {
    return find_min_n(
        [base](long n, long trial) {
            TrialSpec spec = base;
            spec.n = n;
            spec.trial_index = trial;
            return run_trial(spec);
        },
        sigma, trials, n_lo, n_hi_cap, threads);
}

void loglog_fit(const std::vector<std::pair<double, double>>& pts, double& slope,
                double& intercept, double& r2) {
    if (pts.size() < 2) throw std::invalid_argument("loglog_fit: need >= 2 points");
    double sx = 0, sy = 0;
    for (auto [x, y] : pts) {
        if (x <= 0.0 || y <= 0.0) throw std::invalid_argument("loglog_fit: positive data required");
        sx += std::log(x);
        sy += std::log(y);
    }
    double n = static_cast<double>(pts.size());
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_fit: degenerate abscissa");
    slope = sxy / sxx;
    intercept = my - slope * mx;
    r2 = (syy == 0.0) ? 1.0 : std::min(1.0, (sxy * sxy) / (sxx * syy));
}

ScalingFit scaling_run(const std::string& axis, const std::vector<double>& grid,
                       const TrialSpec& base, double sigma, int trials, long n_lo, long n_hi_cap,
                       int threads) {
    if (grid.size() < 3) throw std::invalid_argument("scaling_run: need a grid of >= 3 points");
    ScalingFit fit;
    fit.axis = axis;
    for (size_t i = 0; i < grid.size(); ++i) {
        TrialSpec spec = base;
        spec.grid_index = static_cast<long>(i);
        if (axis == "eps") spec.eps = grid[i];
        else if (axis == "d") spec.d = static_cast<int>(std::lround(grid[i]));
        else if (axis == "p") spec.p = grid[i];
        else throw std::invalid_argument("scaling_run: axis must be eps, d or p");
        auto search = find_min_n(spec, sigma, trials, n_lo, n_hi_cap, threads);
        ScalingPoint pt;
        pt.abscissa = grid[i];
        pt.found = search.found;
        pt.n_min = search.n_min;
        if (search.found) {
            for (const auto& [n, e] : search.evaluations)
                if (n == search.n_min) pt.est = e;
        }
        fit.points.push_back(std::move(pt));
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& pt : fit.points) {
        if (pt.found) pts.emplace_back(pt.abscissa, static_cast<double>(pt.n_min));
        else ++fit.excluded;
    }
    if (pts.size() >= 2) loglog_fit(pts, fit.slope, fit.intercept, fit.r_squared);
    return fit;
}

const char* kCsvHeader =
    "run_id,problem,method,p,d,gamma,eps,sigma,n,trials,successes,p_hat,ci_low,ci_high,"
    "gap_mean,gap_q90,samples_used_mean,seed";

CsvRow make_row(const std::string& run_id, const TrialSpec& spec, long n,
                const SuccessEstimate& est) {
    CsvRow row;
    row.run_id = run_id;
    row.problem = spec.problem;
    row.method = spec.method;
    row.p = spec.p;
    row.d = spec.d;
    row.gamma = spec.gamma;
    row.eps = spec.eps;
    row.sigma = spec.sigma;
    row.n = n;
    row.trials = est.trials;
    row.successes = est.successes;
    row.p_hat = est.p_hat;
    row.ci_low = est.ci_low;
    row.ci_high = est.ci_high;
    row.gap_mean = est.gap_mean;
    row.gap_q90 = est.gap_q90;
    row.samples_used_mean = est.samples_used_mean;
    row.seed = spec.master_seed;
    return row;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void emit_csv(const std::vector<CsvRow>& rows, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        os << r.run_id << ',' << r.problem << ',' << r.method << ',' << fmt(r.p) << ',' << r.d
           << ',' << fmt(r.gamma) << ',' << fmt(r.eps) << ',' << fmt(r.sigma) << ',' << r.n << ','
           << r.trials << ',' << r.successes << ',' << fmt(r.p_hat) << ',' << fmt(r.ci_low) << ','
           << fmt(r.ci_high) << ',' << fmt(r.gap_mean) << ',' << fmt(r.gap_q90) << ','
           << fmt(r.samples_used_mean) << ',' << r.seed << "\n";
    }
}

std::vector<CsvRow> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("parse_csv: empty input");
    if (line != kCsvHeader) throw std::invalid_argument("parse_csv: unexpected header");
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 18) throw std::invalid_argument("parse_csv: malformed row: " + line);
        CsvRow r;
        r.run_id = f[0];
        r.problem = f[1];
        r.method = f[2];
        r.p = std::stod(f[3]);
        r.d = std::stoi(f[4]);
        r.gamma = std::stod(f[5]);
        r.eps = std::stod(f[6]);
        r.sigma = std::stod(f[7]);
        r.n = std::stol(f[8]);
        r.trials = std::stoi(f[9]);
        r.successes = std::stoi(f[10]);
        r.p_hat = std::stod(f[11]);
        r.ci_low = std::stod(f[12]);
        r.ci_high = std::stod(f[13]);
        r.gap_mean = std::stod(f[14]);
        r.gap_q90 = std::stod(f[15]);
        r.samples_used_mean = std::stod(f[16]);
        r.seed = std::stoull(f[17]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace stochlp::harness
