#pragma once

// CTRW construction and the constructive time-changed representation: the
// coupled (Y, X, E) scenario generator behind Y_t = (X_{E_t-})^+, scaled
// sequences, the type I / type II random-environment simulators, and the
// quenched variance statistics.

#include <functional>
#include <optional>
#include <vector>

#include "ctrw/distributions.hpp"
#include "ctrw/paths.hpp"
#include "ctrw/rng.hpp"
#include "ctrw/stats.hpp"

namespace ctrw {

// Space-time jump model: waiting-time law plus a conditional spatial sampler
// J | W = w (centered, bounded second moment). Default spatial model is the
// centered lattice step, uniform over the 2d unit directions. Spatial laws
// that depend on the realized environment beyond the own wait are not
// supported; the conditioning interface is spatial_conditional(w) only.
struct SpaceTimeJumpModel {
    DistributionSpec waiting;
    size_t dim = 1;
    bool coupled = false;
    // draws J | W = w into out[0..dim)
    std::function<void(double w, RngStream&, double* out)> spatial_conditional;

    static SpaceTimeJumpModel lattice(DistributionSpec waiting, size_t dim = 1);
};

// Statistical registration of the model invariants E(J|W=w) = 0 and bounded
// conditional second moment, on a w-grid. Throws InvariantViolation.
void register_space_time_model(const SpaceTimeJumpModel& model, RngStream rng,
                               const std::vector<double>& w_grid,
                               size_t samples_per_w = 4000);

// Direct CTRW simulation: X_t = sum J_i 1{T_i <= t}. Waits and jumps can be
// scaled (a_n W_i, n^{-1/2} J_i) without touching the model.
StepPath simulate_ctrw(const SpaceTimeJumpModel& model, double horizon, RngStream& rng,
                       double wait_scale = 1.0, double jump_scale = 1.0);

// One coupled realization of the representation: the finite-mean clock
// T_k = wait_scale * sum U_i, the subordinator values D(T_k) (Y's epochs), the
// shared spatial jumps, and a skeleton for D that reproduces D(T_k) exactly
// (the within-interval jump mass is placed at a sampled time inside each
// interval, which is a valid coupling of the same subordinator).
struct TimeChangedScenario {
    std::vector<double> u;        // scaled waits of X
    std::vector<double> epochs_x; // T_k
    std::vector<double> w_psi;    // W'_k = D(T_k) - D(T_{k-1})
    std::vector<double> epochs_y; // D(T_k)
    std::vector<double> spatial;  // shared partial sums S_k (dim 1)
    SubordinatorSkeleton d_skeleton;
    double horizon_y = 0.0;

    StepPath x_path() const;
    StepPath y_path() const;
    TimeChange environment() const; // E = generalized inverse of the skeleton
};

struct TimeChangedRepresentation {
    DistributionSpec u_spec;  // finite-mean waits
    BernsteinSymbol psi;      // certified unbounded
    double wait_scale = 1.0;  // X waits are wait_scale * U
    double horizon = 1.0;     // for Y's clock
    std::function<double(RngStream&)> spatial; // shared jumps; default ±1

    TimeChangedScenario sample_scenario(RngStream& rng) const;
};

TimeChangedRepresentation build_time_changed_representation(
    DistributionSpec u_spec, BernsteinSymbol psi, double horizon);

// Level-n scaled pair: X^n waits n^{-1} U, E^n from the rescaled symbol, so
// Y^n's waits are distributed as a_n * W.
TimeChangedRepresentation scaled_ctrw_pair(const DistributionSpec& u_spec,
                                           const BernsteinSymbol& psi, uint64_t n,
                                           double a_n, double horizon);

// Quenched type-I process: X^I_t = X°_{xi(t)} for a realized continuous
// environment xi. X° is simulated over [0, xi(horizon)].
StepPath quenched_type1(const TimeChange& xi, const SpaceTimeJumpModel& u_model,
                        double horizon, RngStream& rng,
                        double wait_scale = 1.0, double jump_scale = 1.0);

// Temporal landscape for type-II RWRE: i.i.d. traps tau_n modulating
// finite-mean waits; epochs are sum tau_i * U'_i.
struct TemporalLandscape {
    std::function<double(RngStream&)> tau;
    std::function<double(RngStream&)> wait_raw; // before normalization
    double wait_norm = 1.0;                     // divide waits by this
    bool normalize = true;
};

StepPath quenched_type2(const TemporalLandscape& landscape,
                        const SpaceTimeJumpModel& j_model, double horizon,
                        RngStream& rng,
                        const std::vector<double>* tau_realization = nullptr,
                        double jump_scale = 1.0);

// Renewal read-out of a joint increasing pair: space-time jumps are the
// increments of (A, D) at the epochs T_i = a_n sum U_j.
StepPath general_scheme_ctrw(const StepPath& a_path, const SubordinatorSkeleton& d_path,
                             const DistributionSpec& u_spec, double a_n,
                             double horizon, RngStream& rng);

// sigma^2_mu = int sigma^2(w) mu(dw) for scalar profiles.
double sigma_sq_mu(const std::function<double(double)>& sigma_sq,
                   const DistributionSpec& mu);

struct QuenchedVarianceReport {
    struct Point {
        double t, empirical, predicted, z;
    };
    std::vector<Point> points;
    bool pass = true; // all |z| < 3
};

// Quenched quadratic-variation check: empirical Var(X°_{xi(t)}) over replicas
// against sigma^2_mu accumulated along xi. X° has waits n^{-1} Exp(1) and
// jumps n^{-1/2} (+-1).
QuenchedVarianceReport quenched_variance_check(const TimeChange& xi,
                                               const std::function<double(double)>& sigma_sq,
                                               const DistributionSpec& wait_law,
                                               const std::vector<double>& t_grid,
                                               size_t reps, uint64_t n, RngStream rng);

// inf{ t : xi(t) >= level } for a continuous non-decreasing xi.
double time_change_left_inverse(const TimeChange& xi, double level);

} // namespace ctrw
