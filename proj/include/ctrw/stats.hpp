#pragma once

// Statistical arbiters for the verification harness: two-sample
// Kolmogorov-Smirnov with the asymptotic p-value, log-log power-law fits with
// replicate bootstrap, and the report record every experiment emits.

#include <string>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

struct StatReport {
    std::string name;
    double value = 0.0;          // observed statistic
    double null_reference = 0.0; // reference value under the null / target
    double p_value = -1.0;       // in [0,1] when applicable, else -1
    double z_score = 0.0;        // when applicable
    double threshold = 0.0;      // configured pass threshold
    bool pass = false;
    std::string detail;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    size_t n_a = 0, n_b = 0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0; // log-space intercept
    double ci_lo = 0.0, ci_hi = 0.0;
    bool degenerate = false; // fewer than 2 distinct points after cleaning
};

// Least squares of log y on log x; CI by resampling the points (1000 draws).
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          int bootstrap_rounds = 1000, uint64_t boot_seed = 1234);

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);
double percentile_of(std::vector<double> v, double p); // p in [0,1]

} // namespace ctrw
