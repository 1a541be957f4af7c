#pragma once

// The explicit coupling constructions: unit-interval discretization of two
// tails, the within-interval + dyadic customer/server queue coupling, exact
// tail queries and paired sampling under the plan, and the quantitative
// path-coupling pipeline with the Prohorov-distance estimate and rate scans.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ctrw/rng.hpp"
#include "ctrw/stats.hpp"
#include "ctrw/symbol.hpp"

namespace ctrw {

struct DiscretizedTail {
    size_t j_max = 0;
    std::vector<double> masses; // masses[j] = F(j) - F(j+1)
    double residual = 0.0;      // F(j_max)
    TailFunction source;        // evaluator for conditional placement
    bool uniform_conditional = false;

    double block_mass(size_t lo, size_t hi) const; // sum over [lo, hi)
};

DiscretizedTail interval_masses(const TailFunction& tail, size_t j_max);
DiscretizedTail tail_from_masses(const std::vector<std::pair<size_t, double>>& masses,
                                 size_t j_max);

struct CrossPair {
    uint32_t j; // customer interval: X-side (F2) surplus
    uint32_t k; // server interval: Y-side (F1) surplus
    double mass;
};

struct BlockResidual {
    int64_t block;  // dyadic index n for [2^n, 2^{n+1}); -1 for I_0
    double amount;  // |g(2^n) - g(2^{n+1})|
    int sign;       // +1: Y-side (F1) surplus left, -1: X-side (F2) surplus left
};

// Joint mass assignment between two DiscretizedTails. Marginals reproduce
// both inputs to 1e-12. The queue stage pairs surplus within each dyadic
// block; the completion stage pairs the per-block leftovers across blocks in
// index order and against the beyond-horizon tails, so the plan is a full
// coupling.
struct CouplingPlan {
    std::shared_ptr<const DiscretizedTail> f1; // Y side (approximant)
    std::shared_ptr<const DiscretizedTail> f2; // X side (original)
    std::vector<double> within;       // per-interval coupled mass
    std::vector<CrossPair> cross;     // within-block queue assignments
    std::vector<BlockResidual> block_residuals;
    std::vector<CrossPair> completion; // cross-block pairing of leftovers
    std::vector<std::pair<uint32_t, double>> x_far; // X in I_j, Y beyond horizon
    std::vector<std::pair<uint32_t, double>> y_far; // Y in I_k, X beyond horizon
    double far_both = 0.0; // comonotone mass with both beyond the horizon

    void validate() const; // throws MarginalMismatch
};

CouplingPlan dyadic_coupling(const DiscretizedTail& f1, const DiscretizedTail& f2);

// Customer intervals whose last in-block server sits more than i intervals
// away (plan inspection, the operational definition).
std::vector<uint32_t> find_i_bad(const CouplingPlan& plan, uint32_t i);

// The analytic conditions of the lemma, evaluated from block-cumulative
// masses; agrees with find_i_bad when within-interval coupled mass vanishes
// on the touched range.
std::vector<uint32_t> i_bad_condition_flags(const CouplingPlan& plan, uint32_t i);

// Exact P(|X - Y| > i) under the plan's placement conventions (deterministic;
// i >= 1). Throws HorizonTooSmall when i is too close to j_max.
double coupled_tail(const CouplingPlan& plan, double i);

// Sampler with exact plan marginals: within-interval pairs are comonotone in
// the interval-conditional laws, cross pairs independent in theirs, far tails
// comonotone by relative depth.
class PlanSampler {
public:
    explicit PlanSampler(std::shared_ptr<const CouplingPlan> plan);
    std::pair<double, double> sample(RngStream& rng) const; // (x, y)
    // conditional offset quantile (position inside I_j), side 1 = f1
    double offset_quantile(int side, uint32_t j, double u) const;

private:
    struct Atom {
        int type; // 0 within, 1 cross, 2 x_far, 3 y_far, 4 far_both
        uint32_t j, k;
        double mass;
    };
    std::shared_ptr<const CouplingPlan> plan_;
    std::vector<Atom> atoms_;
    std::vector<double> cum_;
    mutable std::vector<std::vector<double>> q1_, q2_; // lazy 65-node tables
    double far_quantile(int side, double u) const;
    friend double coupled_tail_sampled_convention(const CouplingPlan&, double);
};

std::pair<double, double> sample_pair_from_plan(const PlanSampler& sampler, RngStream& rng);

// ---- quantitative theorem pipeline ----

struct RateScanPlan {
    double alpha = 0.5;
    double beta = std::numeric_limits<double>::infinity();
    std::vector<uint64_t> n_grid;
    double c = 0.0; // chosen exponent target, < xi0_statement

    double gamma() const { return std::min(2.0 * alpha, beta); }
    // theorem statement: xi0 = min{ a/(7a+4), (b-a)/(3b+a+4) }
    double xi0_statement() const;
    // proof-internal variant: xi0 = a(gamma+1)/(a+1), with c(xi) = (xi-a)/(3xi+a)
    double xi0_proof() const { return alpha * (gamma() + 1.0) / (alpha + 1.0); }
    double c_of_xi(double xi) const { return (xi - alpha) / (3.0 * xi + alpha); }
    double c_prime() const { return 3.0 * c / alpha; }
    double M1(uint64_t n) const;
    double M2(uint64_t n) const;
};

struct PathCouplingReplica {
    double witness;   // cost of the explicit matching lambda (>= d_J1)
    double l1_bound;  // sum a_n |W_i - U_i| over matched jumps
    double tail_osc;  // oscillation of the unmatched end window
};

struct PathCouplingReport {
    double eps_hat = 0.0; // smallest grid eps with P(witness > eps) < eps
    std::vector<PathCouplingReplica> replicas;
    double mean_l1 = 0.0, mean_tail = 0.0;
    bool exact_coupling = false; // all witnesses exactly zero
};

// One replica from raw coupled waits (also the hand-example entry point).
PathCouplingReplica path_coupling_replica(const std::vector<double>& waits_y,
                                          const std::vector<double>& waits_x,
                                          const std::vector<double>& shared_jumps,
                                          double horizon);

// Builds Y^n (waits a_n W) and X^n (waits a_n U) from plan-coupled pairs with
// shared spatial jumps n^{-1/2}(+-1), and reports the Prohorov estimate.
PathCouplingReport path_coupling_distance(const PlanSampler& sampler, uint64_t n,
                                          double alpha, double horizon, size_t reps,
                                          RngStream rng,
                                          const std::vector<double>& eps_grid = {});

struct RateScanReport {
    std::vector<uint64_t> n_grid;
    std::vector<double> eps_hat;
    double c_hat = 0.0; // fitted decay exponent (eps_hat ~ C n^{-c_hat})
    double ci_lo = 0.0, ci_hi = 0.0;
    double xi0_statement = 0.0, xi0_proof = 0.0;
    bool exact_coupling = false;
    bool monotone_nonincreasing = false;
};

RateScanReport rate_scan(const RateScanPlan& plan, const PlanSampler& sampler,
                         double horizon, size_t reps, RngStream rng);

} // namespace ctrw
