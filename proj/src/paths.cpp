#include "ctrw/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctrw {

StepPath StepPath::scalar(double horizon, std::vector<double> epochs,
                          std::vector<double> values, double initial) {
    StepPath p;
    p.horizon = horizon;
    p.dim = 1;
    p.epochs = std::move(epochs);
    p.values = std::move(values);
    p.initial = {initial};
    p.validate();
    return p;
}

void StepPath::validate() const {
    if (initial.size() != dim) throw InvariantViolation("initial value dimension mismatch");
    if (values.size() != epochs.size() * dim)
        throw InvariantViolation("values size mismatch");
    double prev = 0.0;
    for (double e : epochs) {
        if (!(e > prev) || e > horizon * (1.0 + 1e-12))
            throw InvariantViolation("epochs must be strictly increasing in (0, horizon]");
        prev = e;
    }
}

ptrdiff_t StepPath::segment_index(double t) const {
    auto it = std::upper_bound(epochs.begin(), epochs.end(), t);
    return static_cast<ptrdiff_t>(it - epochs.begin()) - 1;
}

double StepPath::value1(double t) const {
    ptrdiff_t i = segment_index(t);
    return i < 0 ? initial[0] : values[static_cast<size_t>(i)];
}

double StepPath::value1_left(double t) const {
    auto it = std::lower_bound(epochs.begin(), epochs.end(), t);
    ptrdiff_t i = static_cast<ptrdiff_t>(it - epochs.begin()) - 1;
    return i < 0 ? initial[0] : values[static_cast<size_t>(i)];
}

std::vector<double> StepPath::value(double t) const {
    ptrdiff_t i = segment_index(t);
    std::vector<double> out(dim);
    for (size_t k = 0; k < dim; ++k)
        out[k] = i < 0 ? initial[k] : values[static_cast<size_t>(i) * dim + k];
    return out;
}

double TimeChange::operator()(double x) const {
    if (t.empty()) return 0.0;
    if (x < t.front()) return v.front();
    if (x >= t.back()) return v.back();
    // last breakpoint with t[i] <= x (takes the later of duplicates:
    // right-continuity at jumps)
    auto it = std::upper_bound(t.begin(), t.end(), x);
    size_t i = static_cast<size_t>(it - t.begin()) - 1;
    if (i + 1 >= t.size()) return v.back();
    double dt = t[i + 1] - t[i];
    if (dt <= 0.0) return v[i + 1];
    return v[i] + (v[i + 1] - v[i]) * (x - t[i]) / dt;
}

bool TimeChange::flat_right_of(double x) const {
    if (t.empty() || x >= t.back()) return true;
    auto it = std::upper_bound(t.begin(), t.end(), x);
    size_t i = static_cast<size_t>(it - t.begin());
    if (i == 0) i = 1;
    // segment [t[i-1], t[i]] covers x on the right
    return v[i] == v[i - 1];
}

TimeChange TimeChange::identity(double horizon) {
    return TimeChange{{0.0, horizon}, {0.0, horizon}};
}

void SubordinatorSkeleton::finalize() {
    jump_prefix.resize(jump_sizes.size());
    double acc = 0.0;
    for (size_t i = 0; i < jump_sizes.size(); ++i) jump_prefix[i] = acc += jump_sizes[i];
}

double SubordinatorSkeleton::eval(double t) const {
    double acc = slope * t;
    size_t n = static_cast<size_t>(
        std::upper_bound(jump_epochs.begin(), jump_epochs.end(), t) - jump_epochs.begin());
    if (jump_prefix.size() == jump_sizes.size() && !jump_prefix.empty()) {
        if (n > 0) acc += jump_prefix[n - 1];
        return acc;
    }
    for (size_t i = 0; i < n; ++i) acc += jump_sizes[i];
    return acc;
}

double SubordinatorSkeleton::eval_left(double t) const {
    double acc = slope * t;
    size_t n = static_cast<size_t>(
        std::lower_bound(jump_epochs.begin(), jump_epochs.end(), t) - jump_epochs.begin());
    if (jump_prefix.size() == jump_sizes.size() && !jump_prefix.empty()) {
        if (n > 0) acc += jump_prefix[n - 1];
        return acc;
    }
    for (size_t i = 0; i < n; ++i) acc += jump_sizes[i];
    return acc;
}

TimeChange generalized_inverse(const SubordinatorSkeleton& d) {
    TimeChange inv;
    inv.t.push_back(0.0);
    inv.v.push_back(0.0);
    double acc = 0.0;
    for (size_t k = 0; k < d.jump_epochs.size(); ++k) {
        double u = d.jump_epochs[k];
        double before = d.slope * u + acc;
        inv.t.push_back(before);
        inv.v.push_back(u);
        acc += d.jump_sizes[k];
        inv.t.push_back(d.slope * u + acc); // plateau across the jump gap
        inv.v.push_back(u);
    }
    inv.t.push_back(d.slope * d.horizon + acc);
    inv.v.push_back(d.horizon);
    return inv;
}

TimeChange generalized_inverse(const TimeChange& d) {
    // for monotone piecewise-linear input, the inverse swaps the axes; flats
    // become jumps (duplicated breakpoints) and vice versa
    TimeChange inv;
    inv.t = d.v;
    inv.v = d.t;
    return inv;
}

StepPath apply_H(const StepPath& f, const SubordinatorSkeleton& d) {
    StepPath out;
    out.dim = f.dim;
    out.initial = f.initial;
    out.horizon = d.total();
    for (size_t k = 0; k < f.epochs.size(); ++k) {
        if (f.epochs[k] > d.horizon) break;
        double e = d.eval(f.epochs[k]);
        if (!out.epochs.empty() && e <= out.epochs.back()) {
            // d flat across consecutive epochs: the right-limit convention
            // keeps the final value at the collapsed epoch
            for (size_t c = 0; c < f.dim; ++c)
                out.values[(out.epochs.size() - 1) * f.dim + c] = f.values[k * f.dim + c];
            continue;
        }
        if (e > out.horizon) break;
        out.epochs.push_back(e);
        for (size_t c = 0; c < f.dim; ++c) out.values.push_back(f.values[k * f.dim + c]);
    }
    // epochs exactly at 0 cannot be represented; fold into the initial value
    while (!out.epochs.empty() && out.epochs.front() <= 0.0) {
        for (size_t c = 0; c < f.dim; ++c) out.initial[c] = out.values[c];
        out.epochs.erase(out.epochs.begin());
        out.values.erase(out.values.begin(), out.values.begin() + static_cast<ptrdiff_t>(f.dim));
    }
    return out;
}

double evaluate_time_changed(const StepPath& f, const TimeChange& xi, double t) {
    double e = xi(t);
    if (xi.flat_right_of(t)) return f.value1_left(e);
    return f.value1(e);
}

double j1_upper(const StepPath& f, const StepPath& g) {
    if (f.dim != 1 || g.dim != 1) throw InvariantViolation("j1_upper is scalar");
    if (f.jump_count() != g.jump_count())
        throw JumpCountMismatch("lambda construction needs equal jump counts");
    double value_part = std::abs(f.initial[0] - g.initial[0]);
    double time_part = 0.0;
    for (size_t k = 0; k < f.jump_count(); ++k) {
        value_part = std::max(value_part, std::abs(f.values[k] - g.values[k]));
        time_part = std::max(time_part, std::abs(f.epochs[k] - g.epochs[k]));
    }
    return std::max(value_part, time_part);
}

double j1_exact_small(const StepPath& f, const StepPath& g, size_t max_jumps) {
    if (f.dim != 1 || g.dim != 1) throw InvariantViolation("j1_exact_small is scalar");
    if (f.jump_count() > max_jumps || g.jump_count() > max_jumps)
        throw TooManyJumps("path exceeds the exact-J1 jump budget");
    if (std::abs(f.horizon - g.horizon) > 1e-12)
        throw InvariantViolation("paths must share a horizon");
    const double T = f.horizon;
    size_t p = f.jump_count(), q = g.jump_count();

    auto flevel = [&](size_t i) { return i == 0 ? f.initial[0] : f.values[i - 1]; };
    auto glevel = [&](size_t j) { return j == 0 ? g.initial[0] : g.values[j - 1]; };
    auto cell = [&](size_t i, size_t j) { return std::abs(flevel(i) - glevel(j)); };

    // Bottleneck shortest path over monotone lattice moves:
    //   right  = f-jump unmatched (no displacement),
    //   up     = g-jump pulled into the window between surrounding f-events,
    //   diag   = matched pair (displacement |s_i - t_j|, skips corner cells).
    // Every visited cell contributes its level mismatch: a cadlag path attains
    // its post-jump value at the jump time even when intervals collapse.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp((p + 1) * (q + 1), inf);
    auto at = [&](size_t i, size_t j) -> double& { return dp[i * (q + 1) + j]; };
    auto window_dist = [&](size_t i, double tj) {
        double a = i == 0 ? 0.0 : f.epochs[i - 1];
        double b = i < p ? f.epochs[i] : T;
        if (tj < a) return a - tj;
        if (tj > b) return tj - b;
        return 0.0;
    };
    at(0, 0) = cell(0, 0);
    for (size_t i = 0; i <= p; ++i) {
        for (size_t j = 0; j <= q; ++j) {
            if (i == 0 && j == 0) continue;
            double best = inf;
            if (i > 0) best = std::min(best, at(i - 1, j));
            if (j > 0) best = std::min(best, std::max(at(i, j - 1), window_dist(i, g.epochs[j - 1])));
            if (i > 0 && j > 0)
                best = std::min(best,
                                std::max(at(i - 1, j - 1),
                                         std::abs(f.epochs[i - 1] - g.epochs[j - 1])));
            at(i, j) = std::max(best, cell(i, j));
        }
    }
    return at(p, q);
}

double modulus_of_continuity(const StepPath& path, double delta) {
    const double T = path.horizon;
    if (!(delta > 0.0 && delta < T))
        throw InvariantViolation("need 0 < delta < horizon");
    // candidate cut points: 0 and the jump epochs strictly inside (0, T)
    std::vector<double> cuts{0.0};
    for (double e : path.epochs)
        if (e < T) cuts.push_back(e);
    size_t n = cuts.size();

    // oscillation of the half-open cell [a, b): L-inf norm across dimensions
    auto osc = [&](double a, double b) {
        double worst = 0.0;
        for (size_t c = 0; c < path.dim; ++c) {
            ptrdiff_t ia = path.segment_index(a);
            double lo = ia < 0 ? path.initial[c] : path.values[static_cast<size_t>(ia) * path.dim + c];
            double hi = lo;
            for (size_t k = static_cast<size_t>(ia + 1); k < path.epochs.size(); ++k) {
                if (!(path.epochs[k] > a) || !(path.epochs[k] < b)) {
                    if (path.epochs[k] >= b) break;
                    continue;
                }
                double v = path.values[k * path.dim + c];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            worst = std::max(worst, hi - lo);
        }
        return worst;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(n, inf);
    dp[0] = 0.0; // cost of the partition of [0, cuts[i]) so far
    double best = inf;
    for (size_t i = 0; i < n; ++i) {
        if (dp[i] == inf) continue;
        // close the partition with the final cell [cuts[i], T)
        if (T - cuts[i] > delta) best = std::min(best, std::max(dp[i], osc(cuts[i], T)));
        for (size_t j = i + 1; j < n; ++j) {
            if (cuts[j] - cuts[i] > delta)
                dp[j] = std::min(dp[j], std::max(dp[i], osc(cuts[i], cuts[j])));
        }
    }
    return best;
}

bool check_A_delta(const std::vector<double>& epochs, double delta, double horizon) {
    double prev = 0.0;
    for (double e : epochs) {
        if (e > horizon) break;
        if (e - prev >= delta) return false;
        prev = e;
    }
    return true;
}

} // namespace ctrw
