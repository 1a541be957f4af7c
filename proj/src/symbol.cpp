#include "ctrw/symbol.hpp"

#include <algorithm>
#include <cmath>

#include "ctrw/distributions.hpp"
#include "ctrw/quadrature.hpp"

namespace ctrw {

namespace {
double gamma_one_minus(double alpha) { return std::tgamma(1.0 - alpha); }
} // namespace

LevyMeasure LevyMeasure::stable_power(double alpha, double scale) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw NonIntegrableMeasure("stable exponent must lie in (0,1)");
    if (scale <= 0.0) throw InvariantViolation("stable scale must be positive");
    LevyMeasure m;
    m.kind = MeasureKind::StablePower;
    m.alpha = alpha;
    m.scale = scale;
    return m;
}

LevyMeasure LevyMeasure::scaled_distribution(std::shared_ptr<const DistributionSpec> base,
                                             double rate, double jump_scale) {
    if (rate <= 0.0) throw InvariantViolation("rate must be positive");
    if (jump_scale <= 0.0) throw InvariantViolation("jump scale must be positive");
    LevyMeasure m;
    m.kind = MeasureKind::ScaledDistribution;
    m.base = std::move(base);
    m.rate = rate;
    m.jump_scale = jump_scale;
    return m;
}

LevyMeasure LevyMeasure::atomic(std::vector<std::pair<double, double>> atoms) {
    for (auto& [loc, mass] : atoms)
        if (loc <= 0.0 || mass <= 0.0)
            throw InvariantViolation("atoms need positive location and mass");
    LevyMeasure m;
    m.kind = MeasureKind::Atomic;
    m.atoms = std::move(atoms);
    return m;
}

double LevyMeasure::tail(double x) const {
    switch (kind) {
        case MeasureKind::StablePower:
            return scale * std::pow(x, -alpha) / gamma_one_minus(alpha);
        case MeasureKind::ScaledDistribution:
            return rate * base->tail(x / jump_scale);
        case MeasureKind::Atomic: {
            double t = 0.0;
            for (const auto& [loc, mass] : atoms)
                if (loc > x) t += mass;
            return t;
        }
    }
    return 0.0;
}

double LevyMeasure::total_mass() const {
    switch (kind) {
        case MeasureKind::StablePower:
            return std::numeric_limits<double>::infinity();
        case MeasureKind::ScaledDistribution:
            return rate;
        case MeasureKind::Atomic: {
            double sum = 0.0;
            for (const auto& [loc, mass] : atoms) sum += mass;
            return sum;
        }
    }
    return 0.0;
}

double LevyMeasure::integrate_one_minus_exp(double s) const {
    switch (kind) {
        case MeasureKind::StablePower:
            // int (1-e^{-sy}) (a/Gamma(1-a)) y^{-a-1} dy = s^a, times scale
            return scale * std::pow(s, alpha);
        case MeasureKind::ScaledDistribution:
            return rate * base->one_minus_lt(s * jump_scale);
        case MeasureKind::Atomic: {
            double t = 0.0;
            for (const auto& [loc, mass] : atoms) t += mass * (-std::expm1(-s * loc));
            return t;
        }
    }
    return 0.0;
}

BernsteinSymbol BernsteinSymbol::pure_drift(double b) {
    BernsteinSymbol psi;
    psi.drift = b;
    psi.measure = LevyMeasure::null_measure();
    psi.certify_unbounded();
    return psi;
}

BernsteinSymbol BernsteinSymbol::stable(double alpha, double scale) {
    BernsteinSymbol psi;
    psi.drift = 0.0;
    psi.measure = LevyMeasure::stable_power(alpha, scale);
    psi.certify_unbounded();
    return psi;
}

double BernsteinSymbol::eval(double s) const {
    if (s <= 0.0) throw InvariantViolation("symbol defined for s > 0");
    return drift * s + measure.integrate_one_minus_exp(s);
}

bool BernsteinSymbol::certify_unbounded() {
    unbounded_certified = drift > 0.0 || measure.kind == MeasureKind::StablePower;
    return unbounded_certified;
}

double eval_symbol(const BernsteinSymbol& psi, double s) { return psi.eval(s); }

CmReport check_complete_monotone(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, int order,
                                 double tol_scale) {
    if (static_cast<int>(grid.size()) < order + 2)
        throw InsufficientGrid("need at least order+2 grid points");
    size_t n = grid.size();
    std::vector<double> dd(n);
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i) {
        dd[i] = f(grid[i]);
        scale = std::max(scale, std::abs(dd[i]));
    }
    CmReport report;
    report.tolerance = tol_scale * std::max(scale, 1e-300);
    report.pass = true;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            for (size_t i = 0; i + k < n; ++i)
                dd[i] = (dd[i + 1] - dd[i]) / (grid[i + k] - grid[i]);
        }
        double worst = std::numeric_limits<double>::infinity();
        double worst_at = grid.front();
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (size_t i = 0; i + k < n; ++i) {
            if (sign * dd[i] < worst) {
                worst = sign * dd[i];
                worst_at = grid[i];
            }
        }
        bool ok = worst >= -report.tolerance;
        report.per_order.push_back({k, worst, worst_at, ok});
        report.pass = report.pass && ok;
    }
    return report;
}

PhiHatResult apply_phi_hat(const std::function<double(double)>& f_hat,
                           const BernsteinSymbol& psi,
                           const std::vector<double>& cert_grid, int cert_order) {
    PhiHatResult out;
    out.lt = [f_hat, psi](double s) { return f_hat(eval_symbol(psi, s)); };
    std::vector<double> grid = cert_grid;
    if (grid.empty()) {
        for (int i = 0; i < 25; ++i) grid.push_back(std::pow(10.0, -3.0 + 5.0 * i / 24.0));
    }
    out.certificate = check_complete_monotone(out.lt, grid, cert_order);
    return out;
}

std::pair<BernsteinSymbol, double> build_truncation_symbol(
    const TailFunction& w_tail, double m, TruncationForm form,
    std::shared_ptr<const DistributionSpec> w_spec) {
    if (m <= 0.0) throw DegenerateTruncation("truncation level must be positive");
    // mu_1^m = E(W 1_{W<=m}) = int_0^m T(y) dy - m T(m); tolerance scales with
    // the integral's magnitude so huge truncation levels stay feasible
    double tm = w_tail(m);
    double tol = 1e-12 * std::max(1.0, m);
    double mu1 = integrate([&](double y) { return w_tail(y); }, 0.0, m, tol, 20000) - m * tm;
    if (mu1 <= 0.0) throw DegenerateTruncation("truncated first moment vanished");
    BernsteinSymbol psi;
    psi.drift = 1.0;
    if (form == TruncationForm::Stable) {
        psi.measure = LevyMeasure::stable_power(w_tail.alpha, 1.0 / mu1);
    } else {
        if (!w_spec) throw InvariantViolation("general truncation form needs the W spec");
        psi.measure = LevyMeasure::scaled_distribution(w_spec, 1.0 / mu1);
    }
    psi.certify_unbounded();
    return {psi, mu1};
}

BernsteinSymbol rescale_symbol(const BernsteinSymbol& psi, uint64_t n, double a_n) {
    if (!psi.unbounded_certified)
        throw UnboundedSymbolRequired("rescale requires a certified unbounded symbol");
    BernsteinSymbol out;
    double dn = static_cast<double>(n);
    out.drift = dn * a_n * psi.drift;
    switch (psi.measure.kind) {
        case MeasureKind::StablePower:
            out.measure = LevyMeasure::stable_power(
                psi.measure.alpha, dn * std::pow(a_n, psi.measure.alpha) * psi.measure.scale);
            break;
        case MeasureKind::ScaledDistribution:
            out.measure = LevyMeasure::scaled_distribution(
                psi.measure.base, dn * psi.measure.rate, psi.measure.jump_scale * a_n);
            break;
        case MeasureKind::Atomic: {
            std::vector<std::pair<double, double>> atoms;
            for (const auto& [loc, mass] : psi.measure.atoms)
                atoms.emplace_back(loc * a_n, mass * dn);
            out.measure = atoms.empty() ? LevyMeasure::null_measure()
                                        : LevyMeasure::atomic(std::move(atoms));
            break;
        }
    }
    out.certify_unbounded();
    return out;
}

ScalingSchedule compute_a_n(const std::function<double(double)>& one_minus_lt, uint64_t n) {
    if (n == 1) return {1, 1.0, "a_1 = 1 (convention)"};
    double target = 1.0 / static_cast<double>(n);
    double hi = 1.0;
    int guard = 0;
    while (one_minus_lt(hi) < target) {
        hi *= 4.0;
        if (++guard > 600) throw RootNotBracketed("no upper bracket for 1 - f_hat = 1/n");
    }
    double lo = hi;
    guard = 0;
    while (one_minus_lt(lo) > target) {
        lo /= 4.0;
        if (++guard > 600) throw RootNotBracketed("no lower bracket for 1 - f_hat = 1/n");
    }
    for (int it = 0; it < 300; ++it) {
        double mid = std::sqrt(lo * hi); // geometric bisection on a positive root
        if (one_minus_lt(mid) > target)
            hi = mid;
        else
            lo = mid;
        if ((hi - lo) <= 1e-10 * hi) break;
    }
    return {n, 0.5 * (lo + hi), "root of 1 - f_hat(a_n) = 1/n"};
}

double integrated_tail(const LevyMeasure& mu, double s) {
    if (s <= 0.0) return 0.0;
    switch (mu.kind) {
        case MeasureKind::StablePower:
            return mu.scale * std::pow(s, 1.0 - mu.alpha) /
                   ((1.0 - mu.alpha) * gamma_one_minus(mu.alpha));
        case MeasureKind::ScaledDistribution:
            return mu.rate * mu.jump_scale *
                   integrate([&](double y) { return mu.base->tail(y); }, 0.0,
                             s / mu.jump_scale, 1e-11);
        case MeasureKind::Atomic: {
            double t = 0.0;
            for (const auto& [loc, mass] : mu.atoms) t += mass * std::min(s, loc);
            return t;
        }
    }
    return 0.0;
}

InjectionBoundReport certify_injection_bound(const BernsteinSymbol& psi, double lambda,
                                             const std::vector<double>& s_grid) {
    if (psi.drift != 0.0)
        throw InvariantViolation("two-sided injection bound needs representation (0,0,mu)");
    InjectionBoundReport rep;
    rep.pass = true;
    const double e = std::exp(1.0);
    for (double s : s_grid) {
        double iratio = lambda * integrated_tail(psi.measure, s) /
                        integrated_tail(psi.measure, lambda * s);
        double ratio = psi.eval(1.0 / s) / psi.eval(1.0 / (lambda * s));
        double lower = (e - 1.0) / e * iratio;
        double upper = e / (e - 1.0) * iratio;
        rep.points.push_back({s, lower, ratio, upper});
        double viol = std::max(lower - ratio, ratio - upper);
        rep.max_violation = std::max(rep.max_violation, viol);
        if (viol > 1e-12 * std::max(1.0, ratio)) rep.pass = false;
    }
    return rep;
}

bool check_regularity(const BernsteinSymbol& psi, const std::vector<double>& s_decreasing,
                      double tol_reg) {
    if (s_decreasing.size() < 5)
        throw InsufficientGrid("regularity check needs at least 5 points");
    double prev = std::numeric_limits<double>::infinity();
    for (double s : s_decreasing) {
        double r = s / psi.eval(s);
        if (r > prev * (1.0 + 1e-12)) return false;
        prev = r;
    }
    return prev < tol_reg;
}

Homogeneity check_homogeneity(const LevyMeasure& mu, const std::vector<double>& lambdas,
                              const std::vector<double>& xs,
                              const std::vector<double>& c_grid) {
    auto has_witness = [&](double lambda, bool sub) {
        for (double c : c_grid) {
            bool ok = true;
            for (double x : xs) {
                double lhs = mu.tail(c * x), rhs = lambda * mu.tail(x);
                if (sub ? (lhs > rhs * (1.0 + 1e-9)) : (lhs < rhs * (1.0 - 1e-9))) {
                    ok = false;
                    break;
                }
            }
            if (ok) return true;
        }
        return false;
    };
    bool sub = true, super = true;
    for (double l : lambdas) {
        sub = sub && has_witness(l, true);
        super = super && has_witness(l, false);
    }
    if (sub) return Homogeneity::Sub;
    if (super) return Homogeneity::Super;
    return Homogeneity::Neither;
}

} // namespace ctrw
