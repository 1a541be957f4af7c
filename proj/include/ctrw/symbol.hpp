#pragma once

// Bernstein-function algebra: Levy measures with closed evaluation, symbols
// psi(s) = b*s + int(1-e^{-sy}) mu(dy), the Laplace-transform map
// f_hat -> f_hat(psi(s)), numerical complete-monotonicity certificates, and
// the truncation / rescaling constructions used by the CTRW representations.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

struct DistributionSpec; // defined in distributions.hpp

enum class MeasureKind { StablePower, ScaledDistribution, Atomic };

// Levy measure on (0,inf) with int (1 ^ y) mu(dy) < inf. Closed sum type:
//   StablePower(alpha, scale):  scale * alpha/Gamma(1-alpha) * y^(-alpha-1) dy
//   ScaledDistribution(f, rate, jump_scale): rate * f(dy / jump_scale)
//   Atomic({(loc, mass)})
struct LevyMeasure {
    MeasureKind kind = MeasureKind::Atomic;
    double alpha = 0.0;      // StablePower
    double scale = 0.0;      // StablePower
    std::shared_ptr<const DistributionSpec> base; // ScaledDistribution
    double rate = 0.0;       // ScaledDistribution: total mass
    double jump_scale = 1.0; // ScaledDistribution: jump sizes multiplied by this
    std::vector<std::pair<double, double>> atoms; // (location, mass)

    static LevyMeasure stable_power(double alpha, double scale);
    static LevyMeasure scaled_distribution(std::shared_ptr<const DistributionSpec> base,
                                           double rate, double jump_scale = 1.0);
    static LevyMeasure atomic(std::vector<std::pair<double, double>> atoms);
    static LevyMeasure null_measure() { return atomic({}); }

    bool is_null() const { return kind == MeasureKind::Atomic && atoms.empty(); }

    // mu(x, inf)
    double tail(double x) const;
    // total mass mu(0,inf); infinity for StablePower
    double total_mass() const;
    // int (1 - e^{-s y}) mu(dy)
    double integrate_one_minus_exp(double s) const;
};

struct TailFunction {
    std::function<double(double)> survival; // t -> P(X > t), t >= 0
    // known asymptotic P(X>t) ~ c * L(t) * t^{-alpha}; beta = second-order
    // exponent (infinity when none), residual(t) = P(X>t) - c t^{-alpha}.
    double c = 0.0;
    double alpha = 0.0;
    double beta = std::numeric_limits<double>::infinity();
    std::function<double(double)> slowly_varying; // L(t); defaults to 1
    std::function<double(double)> residual;       // g(t); optional

    double operator()(double t) const { return survival(t); }
    double L(double t) const { return slowly_varying ? slowly_varying(t) : 1.0; }
};

struct BernsteinSymbol {
    double drift = 0.0;
    LevyMeasure measure = LevyMeasure::null_measure();
    bool unbounded_certified = false;

    double eval(double s) const;

    // Unboundedness is certified only for the closed shapes: positive drift,
    // or a stable-power measure. Bounded otherwise (finite-mass measures give
    // bounded psi).
    bool certify_unbounded();

    static BernsteinSymbol pure_drift(double b);
    static BernsteinSymbol stable(double alpha, double scale = 1.0);
};

struct ScalingSchedule {
    uint64_t n = 1;
    double a_n = 1.0;
    std::string rule;
};

// --- operations ---

double eval_symbol(const BernsteinSymbol& psi, double s);

struct CmPointReport {
    int order;
    double worst_value; // most negative (-1)^k * divided difference seen
    double worst_at;    // left grid point of the worst difference
    bool pass;
};
struct CmReport {
    bool pass = false;
    double tolerance = 0.0;
    std::vector<CmPointReport> per_order;
};

// Certify complete monotonicity numerically: k-th divided differences on the
// grid must satisfy (-1)^k dd >= -tol for all k <= order. The certificate is
// grid-relative, as reported.
CmReport check_complete_monotone(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, int order,
                                 double tol_scale = 1e-7);

struct PhiHatResult {
    std::function<double(double)> lt; // s -> f_hat(psi(s))
    CmReport certificate;
};

PhiHatResult apply_phi_hat(const std::function<double(double)>& f_hat,
                           const BernsteinSymbol& psi,
                           const std::vector<double>& cert_grid = {},
                           int cert_order = 4);

// Truncation construction: given the tail of W and a level m, returns the
// symbol s + (mu_1^m)^{-1} * (measure) with measure either the stable Levy
// measure of index alpha (stable form) or the distribution of W itself
// (general form), together with mu_1^m = E(W 1_{W<=m}).
enum class TruncationForm { Stable, General };
std::pair<BernsteinSymbol, double> build_truncation_symbol(
    const TailFunction& w_tail, double m,
    TruncationForm form = TruncationForm::Stable,
    std::shared_ptr<const DistributionSpec> w_spec = nullptr);

// psi_n(s) = s*n*a_n*b + int (1 - e^{-sy}) n mu(a_n^{-1} dy)
BernsteinSymbol rescale_symbol(const BernsteinSymbol& psi, uint64_t n, double a_n);

// Solve 1 - f_hat(a_n) = 1/n by bracketed bisection to relative tol 1e-10.
// one_minus_lt evaluates s -> 1 - f_hat(s) without cancellation.
ScalingSchedule compute_a_n(const std::function<double(double)>& one_minus_lt,
                            uint64_t n);

// I_mu(s) = int_0^s mu(y,inf) dy
double integrated_tail(const LevyMeasure& mu, double s);

struct InjectionBoundReport {
    bool pass = false;
    double max_violation = 0.0; // max over grid of bound violation (<=0 means pass)
    struct Point {
        double s, lower, ratio, upper;
    };
    std::vector<Point> points;
};

// Verify ((e-1)/e) l I(s)/I(ls) <= psi(1/s)/psi(1/(ls)) <= (e/(e-1)) l I(s)/I(ls)
// on a grid; requires zero drift.
InjectionBoundReport certify_injection_bound(const BernsteinSymbol& psi,
                                             double lambda,
                                             const std::vector<double>& s_grid);

// True iff s/psi(s) decreases along the sequence and is below tol_reg at the end.
bool check_regularity(const BernsteinSymbol& psi,
                      const std::vector<double>& s_decreasing,
                      double tol_reg = 1e-2);

enum class Homogeneity { Sub, Super, Neither };

// Grid-relative classification: searches C(lambda) on c_grid such that
// mu(Cx,inf) <= lambda mu(x,inf) for all x in xs (sub), or >= (super).
Homogeneity check_homogeneity(const LevyMeasure& mu,
                              const std::vector<double>& lambdas,
                              const std::vector<double>& xs,
                              const std::vector<double>& c_grid);

} // namespace ctrw
