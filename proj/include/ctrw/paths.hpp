#pragma once

// Cadlag step paths and the Skorohod-space machinery: generalized inverses,
// the composition map H(f,d) = (f_{d^{-1}-})^+, J1 distances (exact for small
// jump counts, explicit lambda upper bound otherwise), the modulus of
// continuity for step paths, and the renewal-gap event A_delta.

#include <cstddef>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

// Piecewise-constant cadlag path on [0, horizon], vector-valued. `values`
// stores the post-jump cumulative value per epoch, flattened row-major;
// `initial` is the value on [0, first epoch).
struct StepPath {
    double horizon = 1.0;
    size_t dim = 1;
    std::vector<double> epochs;  // strictly increasing, in (0, horizon]
    std::vector<double> values;  // epochs.size() * dim
    std::vector<double> initial; // dim

    static StepPath scalar(double horizon, std::vector<double> epochs,
                           std::vector<double> values, double initial = 0.0);

    size_t jump_count() const { return epochs.size(); }
    // index of the last epoch <= t, or -1
    ptrdiff_t segment_index(double t) const;
    double value1(double t) const;                 // dim == 1 convenience
    std::vector<double> value(double t) const;     // cadlag evaluation
    double value1_left(double t) const;            // left limit, dim == 1
    void validate() const;
};

// Continuous monotone piecewise-linear function given by breakpoints
// (t_k, v_k); evaluation interpolates, is right-continuous at duplicated
// breakpoints (which encode jumps of a generalized inverse).
struct TimeChange {
    std::vector<double> t; // non-decreasing
    std::vector<double> v; // non-decreasing

    double operator()(double x) const;
    bool flat_right_of(double x) const; // locally constant on [x, x+eps)
    double last_value() const { return v.empty() ? 0.0 : v.back(); }
    static TimeChange identity(double horizon);
};

// Non-decreasing drift + jumps skeleton: D(t) = slope * t + sum of jumps at
// epochs <= t. Strictly increasing when slope > 0. Call finalize() after
// bulk-building to enable O(log) evaluation via prefix sums.
struct SubordinatorSkeleton {
    double slope = 0.0;
    double horizon = 1.0;
    std::vector<double> jump_epochs; // strictly increasing, in (0, horizon]
    std::vector<double> jump_sizes;  // positive
    std::vector<double> jump_prefix; // running sums; populated by finalize()

    void finalize();
    double eval(double t) const;      // cadlag
    double eval_left(double t) const; // left limit
    double total() const { return eval(horizon); }
};

// Right-continuous generalized inverse d^{-1}(x) = inf{ s : d(s) > x } on
// [0, d(horizon)], returned as breakpoints. Continuous iff d is strictly
// increasing; jumps of d become flat pieces, flat pieces of d become jumps
// (duplicated breakpoints).
TimeChange generalized_inverse(const SubordinatorSkeleton& d);
TimeChange generalized_inverse(const TimeChange& d);

// H(f, d) = (f_{d^{-1}-})^+ as a path: f's k-th jump is relocated to d(e_k).
// Simultaneous relocations (d flat across several epochs) collapse to the
// final value, which is what the right-limit convention dictates.
StepPath apply_H(const StepPath& f, const SubordinatorSkeleton& d);

// Pointwise evaluation of (f_{xi(t)-})^+ for a continuous time change xi;
// exact for the plateau cases (dim 1).
double evaluate_time_changed(const StepPath& f, const TimeChange& xi, double t);

// Upper bound on d_J1 via the explicit piecewise-linear lambda matching the
// i-th jump of f to the i-th jump of g. Requires equal jump counts.
double j1_upper(const StepPath& f, const StepPath& g);

// Exact J1 distance for step paths with at most max_jumps jumps each, by
// enumerating monotone lattice paths (unmatched f-jump / unmatched g-jump /
// matched pair). Dim 1.
double j1_exact_small(const StepPath& f, const StepPath& g, size_t max_jumps = 8);

// omega_f^T(delta): min over partitions with cell lengths > delta of the max
// cell oscillation; exact for step paths via epoch-aligned cuts.
double modulus_of_continuity(const StepPath& path, double delta);

// True iff no gap between consecutive renewal epochs (T_0 = 0, up to the last
// epoch <= horizon) is >= delta.
bool check_A_delta(const std::vector<double>& epochs, double delta, double horizon);

} // namespace ctrw
