#pragma once

// Distribution specifications for every law the toolkit samples or
// transforms: Pareto with the Gamma(1-alpha)-skewed tail, positive stable
// under the LT convention E e^{-sX} = e^{-t s^alpha}, exponential,
// truncation W 1_{W<=m} (atom at zero), Phi_psi images realized as D_U, and
// a generic finite-mean law given by its tail.

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "ctrw/rng.hpp"
#include "ctrw/symbol.hpp"

namespace ctrw {

enum class DistKind {
    Pareto,
    PositiveStable,
    Exponential,
    Truncated,
    PhiMapped,
    FiniteMeanGeneric,
    Dirac,
};

struct DistributionSpec {
    DistKind kind = DistKind::Exponential;

    double alpha = 0.5;   // Pareto / PositiveStable
    double x_m = 1.0;     // Pareto support start
    double t_scale = 1.0; // PositiveStable time parameter
    double rate = 1.0;    // Exponential
    double m = 0.0;       // Truncated level
    double atom = 1.0;    // Dirac location
    std::shared_ptr<const DistributionSpec> base; // Truncated / PhiMapped
    std::shared_ptr<const BernsteinSymbol> psi;   // PhiMapped
    TailFunction generic_tail;                    // FiniteMeanGeneric

    static DistributionSpec pareto(double alpha, double x_m);
    // Pareto with tail t^{-alpha}/Gamma(1-alpha) above Gamma(1-alpha)^{-1/alpha}
    static DistributionSpec pareto_gamma_skew(double alpha);
    static DistributionSpec positive_stable(double alpha, double t = 1.0);
    static DistributionSpec exponential(double rate);
    static DistributionSpec truncated(std::shared_ptr<const DistributionSpec> base, double m);
    static DistributionSpec phi_mapped(std::shared_ptr<const DistributionSpec> base,
                                       std::shared_ptr<const BernsteinSymbol> psi);
    static DistributionSpec finite_mean_generic(TailFunction tail);
    static DistributionSpec dirac(double location);

    double tail(double x) const;        // P(X > x)
    double one_minus_lt(double s) const; // 1 - E e^{-sX}, cancellation-free
    double lt(double s) const { return 1.0 - one_minus_lt(s); }
    // E(X 1_{X<=m}); quadrature against the tail
    double truncated_mean(double m) const;
    std::optional<double> mean() const;
    // Tail quantile: smallest x with P(X > x) <= p (bisection on the tail
    // when no closed form exists).
    double tail_quantile(double p) const;
};

// --- samplers (exact; see samplers.cpp for the transforms used) ---

// E e^{-sX} = e^{-t s^alpha}; two-uniform (Kanter) transform.
double sample_positive_stable(double alpha, double t, RngStream& rng);

// Pareto of the section-4.1 form; inverse CDF. u_override pins the uniform
// (used by tests for the endpoint case).
double sample_pareto(double alpha, RngStream& rng);
double sample_pareto_from_uniform(double alpha, double u);

// Increment of the subordinator with symbol psi over dt. Exact for
// drift + StablePower; compound Poisson for finite-activity measures.
double sample_subordinator_increment(const BernsteinSymbol& psi, double dt, RngStream& rng);

// D_U with U ~ u_spec: sample U, then one increment over elapsed time U.
double sample_phi_mapped(const DistributionSpec& u_spec, const BernsteinSymbol& psi, RngStream& rng);

// Mittag-Leffler waiting time: Phi_{s^alpha}(Exp(lambda)).
double sample_mittag_leffler_wait(double alpha, double lambda, RngStream& rng);

// Generic draw from a DistributionSpec.
double sample_distribution(const DistributionSpec& spec, RngStream& rng);

// P(D_t > x) for the standard stable subordinator, by the alternating-type
// series sum_{n>=1} (-1)^{n-1} x^{-alpha n} t^n / (Gamma(1-alpha n) n!).
// Throws SeriesDivergence outside the region where the truncation error is
// certifiable below tol.
double stable_tail_series(double alpha, double t, double x, double tol = 1e-12);

// Same quantity via closed form for alpha = 1/2 (erf identity); used as an
// oracle and as the evaluation path for half-index tails.
double stable_tail_half(double t, double x);

// P(D_t > x) choosing series when certifiable, erf at alpha == 0.5 otherwise.
double stable_tail(double alpha, double t, double x, double tol = 1e-12);

// Monte Carlo fallback for the region the series cannot certify; exact Kanter
// draws, so the only error is the binomial one.
double stable_tail_mc(double alpha, double t, double x, size_t n, RngStream& rng);

} // namespace ctrw
