#include "ctrw/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ctrw/rng.hpp"

namespace ctrw {

namespace {

// Kolmogorov Q-function: P(sqrt(n) D > lambda) asymptotically.
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    double q = 2.0 * sum;
    return std::min(1.0, std::max(0.0, q));
}

} // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptySample("ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(ia / na - ib / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    double lambda = (ne + 0.12 + 0.11 / ne) * d;
    return {d, kolmogorov_q(lambda), a.size(), b.size()};
}

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          int bootstrap_rounds, uint64_t boot_seed) {
    if (xs.size() != ys.size() || xs.size() < 4)
        throw NonPositiveData("fit_power_law needs >= 4 (x, y) pairs");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw NonPositiveData("x values must be positive");
        if (!(ys[i] > 0.0)) throw NonPositiveData("y values must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    auto least_squares = [](const std::vector<double>& u, const std::vector<double>& w,
                            double& slope, double& icept) {
        double n = static_cast<double>(u.size());
        double su = 0, sw = 0, suu = 0, suw = 0;
        for (size_t i = 0; i < u.size(); ++i) {
            su += u[i];
            sw += w[i];
            suu += u[i] * u[i];
            suw += u[i] * w[i];
        }
        double det = n * suu - su * su;
        if (std::abs(det) < 1e-14 * std::max(1.0, suu)) {
            slope = 0.0;
            icept = sw / n;
            return false;
        }
        slope = (n * suw - su * sw) / det;
        icept = (sw - slope * su) / n;
        return true;
    };
    PowerLawFit fit;
    fit.degenerate = !least_squares(lx, ly, fit.exponent, fit.intercept);
    std::vector<double> boots;
    boots.reserve(bootstrap_rounds);
    RngStream rng(boot_seed, 0);
    std::vector<double> bu(lx.size()), bw(lx.size());
    for (int r = 0; r < bootstrap_rounds; ++r) {
        for (size_t i = 0; i < lx.size(); ++i) {
            size_t k = static_cast<size_t>(rng.uniform_co() * lx.size());
            if (k >= lx.size()) k = lx.size() - 1;
            bu[i] = lx[k];
            bw[i] = ly[k];
        }
        double s, c;
        if (least_squares(bu, bw, s, c)) boots.push_back(s);
    }
    if (!boots.empty()) {
        fit.ci_lo = percentile_of(boots, 0.025);
        fit.ci_hi = percentile_of(boots, 0.975);
    } else {
        fit.ci_lo = fit.ci_hi = fit.exponent;
    }
    return fit;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double percentile_of(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    double idx = p * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(idx);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace ctrw
