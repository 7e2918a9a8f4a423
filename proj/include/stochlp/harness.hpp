#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "stochlp/problems.hpp"

namespace stochlp::harness {

// Full reproducibility key of one trial: the per-trial RNG seed is a
// splitmix-style mix of (master_seed, trial_index, grid_index).
struct TrialSpec {
    std::string problem = "gauss-power";  // gauss-power | sc-quad | abs-reg | sharp-saddle
    std::string method = "sa-sgd";
    double p = 2.0;
    int d = 5;
    double gamma = 2.0;   // gauss-power growth exponent
    double s = 0.1;       // noise scale
    double mu = 1.0;      // sc-quad modulus
    int ndir = 3;         // abs-reg direction count
    double noise = 0.5;   // abs-reg noise amplitude
    int d_y = 0;          // saddle y-dimension (0: same as d)
    double mu_x = 1.0;
    double mu_y = 1.0;
    long n = 100;
    double eps = 0.1;
    double sigma = 0.1;
    double delta = 0.0;  // saa inner accuracy, 0 -> eps/2
    bool regularize = false;
    double mu_override = 0.0;  // 0 -> mu_for_eps
    std::uint64_t master_seed = 0;
    long trial_index = 0;
    long grid_index = 0;
};

struct TrialOutcome {
    double gap = 0.0;
    bool success = false;
    long samples_used = 0;
};

// One trial per the success criterion: gap = F(x_hat) - F*; saddle methods
// use the duality gap through the analytic best responses.
TrialOutcome run_trial(const TrialSpec& spec);

struct SuccessEstimate {
    int successes = 0;
    int trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;   // Clopper-Pearson 95% two-sided
    double ci_high = 0.0;
    double gap_mean = 0.0;
    double gap_q90 = 0.0;
    double samples_used_mean = 0.0;
};

// test seam: a method under search is any (n, trial_index) -> outcome map
using TrialFn = std::function<TrialOutcome(long n, long trial_index)>;

// trials run independently (parallelized over a fixed thread count);
// aggregation is order-independent. threads = 0 picks a default.
SuccessEstimate estimate_success(const TrialFn& fn, long n, int trials, int threads = 0);
SuccessEstimate estimate_success(const TrialSpec& base, int trials, int threads = 0);

struct NSearchResult {
    bool found = false;
    long n_min = -1;
    long n_fail = 0;   // largest evaluated failing N below n_min (0 if none)
    long n_pass = -1;
    int trials_per_point = 0;
    bool monotonicity_violation = false;
    std::string decision_rule;
    std::vector<std::pair<long, SuccessEstimate>> evaluations;
};

// doubling from n_lo until p_hat >= 1 - sigma, then bisection to the smallest
// passing N; per-trial seeds are shared across N (common random numbers)
NSearchResult find_min_n(const TrialFn& fn, double sigma, int trials, long n_lo, long n_hi_cap,
                         int threads = 0);
NSearchResult find_min_n(const TrialSpec& base, double sigma, int trials, long n_lo, long n_hi_cap,
                         int threads = 0);

struct ScalingPoint {
    double abscissa = 0.0;
    bool found = false;
    long n_min = -1;
    SuccessEstimate est;
};

struct ScalingFit {
    std::string axis;  // eps | d | p
    std::vector<ScalingPoint> points;
    double slope = 0.0;      // least squares of log n_min on log abscissa
    double intercept = 0.0;
    double r_squared = 0.0;
    int excluded = 0;  // NotFound points dropped from the fit
};

ScalingFit scaling_run(const std::string& axis, const std::vector<double>& grid,
                       const TrialSpec& base, double sigma, int trials, long n_lo, long n_hi_cap,
                       int threads = 0);

void loglog_fit(const std::vector<std::pair<double, double>>& pts, double& slope,
                double& intercept, double& r2);

struct CsvRow {
    std::string run_id;
    std::string problem;
    std::string method;
    double p = 2.0;
    int d = 0;
    double gamma = 0.0;
    double eps = 0.0;
    double sigma = 0.0;
    long n = 0;
    int trials = 0;
    int successes = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double gap_mean = 0.0;
    double gap_q90 = 0.0;
    double samples_used_mean = 0.0;
    std::uint64_t seed = 0;
};

extern const char* kCsvHeader;

CsvRow make_row(const std::string& run_id, const TrialSpec& spec, long n,
                const SuccessEstimate& est);
void emit_csv(const std::vector<CsvRow>& rows, std::ostream& os);
std::vector<CsvRow> parse_csv(std::istream& is);

int cli_main(int argc, const char* const* argv);

}  // namespace stochlp::harness
