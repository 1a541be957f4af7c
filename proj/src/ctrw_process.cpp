#include "ctrw/ctrw_process.hpp"

#include <algorithm>
#include <cmath>

#include "ctrw/quadrature.hpp"

namespace ctrw {

namespace {
constexpr size_t kMaxJumps = 10'000'000;
} // namespace

SpaceTimeJumpModel SpaceTimeJumpModel::lattice(DistributionSpec waiting, size_t dim) {
    SpaceTimeJumpModel m;
    m.waiting = std::move(waiting);
    m.dim = dim;
    m.coupled = false;
    m.spatial_conditional = [dim](double, RngStream& rng, double* out) {
        for (size_t k = 0; k < dim; ++k) out[k] = 0.0;
        uint64_t r = rng.next_u64();
        size_t axis = static_cast<size_t>(r % dim);
        out[axis] = (r >> 32) & 1 ? 1.0 : -1.0;
    };
    return m;
}

void register_space_time_model(const SpaceTimeJumpModel& model, RngStream rng,
                               const std::vector<double>& w_grid, size_t samples_per_w) {
    std::vector<double> buf(model.dim);
    for (double w : w_grid) {
        std::vector<double> mean(model.dim, 0.0);
        double second = 0.0;
        for (size_t s = 0; s < samples_per_w; ++s) {
            model.spatial_conditional(w, rng, buf.data());
            double norm2 = 0.0;
            for (size_t k = 0; k < model.dim; ++k) {
                mean[k] += buf[k];
                norm2 += buf[k] * buf[k];
            }
            second += norm2;
        }
        second /= static_cast<double>(samples_per_w);
        if (second > 1e6)
            throw InvariantViolation("conditional second moment unbounded at w-grid point");
        double se = std::sqrt(std::max(second, 1e-12) / static_cast<double>(samples_per_w));
        for (size_t k = 0; k < model.dim; ++k) {
            double m = mean[k] / static_cast<double>(samples_per_w);
            if (std::abs(m) > 6.0 * se + 1e-9)
                throw InvariantViolation("E(J | W = w) deviates from zero at a w-grid point");
        }
    }
}

StepPath simulate_ctrw(const SpaceTimeJumpModel& model, double horizon, RngStream& rng,
                       double wait_scale, double jump_scale) {
    if (!(horizon > 0.0)) throw InvariantViolation("horizon must be positive");
    StepPath out;
    out.dim = model.dim;
    out.horizon = horizon;
    out.initial.assign(model.dim, 0.0);
    std::vector<double> level(model.dim, 0.0), jump(model.dim);
    double t = 0.0;
    size_t count = 0;
    while (true) {
        double w = wait_scale * sample_distribution(model.waiting, rng);
        t += w;
        if (t > horizon) break;
        model.spatial_conditional(w / wait_scale, rng, jump.data());
        for (size_t k = 0; k < model.dim; ++k) level[k] += jump_scale * jump[k];
        if (t > (out.epochs.empty() ? 0.0 : out.epochs.back())) {
            out.epochs.push_back(t);
            out.values.insert(out.values.end(), level.begin(), level.end());
        } else {
            // zero wait: jumps merge at one epoch
            for (size_t k = 0; k < model.dim; ++k)
                out.values[(out.epochs.size() - 1) * model.dim + k] = level[k];
        }
        if (++count > kMaxJumps)
            throw ZeroProgress("10^7 jumps without reaching the horizon");
    }
    return out;
}

StepPath TimeChangedScenario::x_path() const {
    StepPath p;
    p.dim = 1;
    p.horizon = epochs_x.empty() ? 1.0 : epochs_x.back();
    p.initial = {0.0};
    p.epochs = epochs_x;
    p.values = spatial;
    return p;
}

StepPath TimeChangedScenario::y_path() const {
    StepPath p;
    p.dim = 1;
    p.horizon = horizon_y;
    p.initial = {0.0};
    for (size_t k = 0; k < epochs_y.size(); ++k) {
        if (epochs_y[k] > horizon_y) break;
        p.epochs.push_back(epochs_y[k]);
        p.values.push_back(spatial[k]);
    }
    return p;
}

TimeChange TimeChangedScenario::environment() const {
    return generalized_inverse(d_skeleton);
}

TimeChangedScenario TimeChangedRepresentation::sample_scenario(RngStream& rng) const {
    TimeChangedScenario sc;
    sc.horizon_y = horizon;
    double t = 0.0;
    double y = 0.0;
    while (y <= horizon) {
        double uk = wait_scale * sample_distribution(u_spec, rng);
        double t_next = t + uk;
        // non-drift part of the increment, placed uniformly inside the interval
        double jump_part = sample_subordinator_increment(psi, uk, rng) - psi.drift * uk;
        if (jump_part > 0.0) {
            double at = t + rng.uniform01() * uk;
            sc.d_skeleton.jump_epochs.push_back(at);
            sc.d_skeleton.jump_sizes.push_back(jump_part);
        }
        sc.u.push_back(uk);
        sc.epochs_x.push_back(t_next);
        double s = spatial ? spatial(rng) : (rng.next_u64() >> 63 ? 1.0 : -1.0);
        sc.spatial.push_back((sc.spatial.empty() ? 0.0 : sc.spatial.back()) + s);
        t = t_next;
        sc.d_skeleton.slope = psi.drift;
        sc.d_skeleton.horizon = t_next;
        y = sc.d_skeleton.eval(t_next);
        if (sc.u.size() > kMaxJumps) throw ZeroProgress("time-changed scenario stalled");
    }
    // Y's epochs evaluated through the same skeleton arithmetic, so both
    // routes to the identity see bit-identical jump times.
    sc.epochs_y.resize(sc.epochs_x.size());
    for (size_t k = 0; k < sc.epochs_x.size(); ++k)
        sc.epochs_y[k] = sc.d_skeleton.eval(sc.epochs_x[k]);
    sc.w_psi.resize(sc.epochs_y.size());
    for (size_t k = 0; k < sc.epochs_y.size(); ++k)
        sc.w_psi[k] = sc.epochs_y[k] - (k == 0 ? 0.0 : sc.epochs_y[k - 1]);
    return sc;
}

TimeChangedRepresentation build_time_changed_representation(DistributionSpec u_spec,
                                                            BernsteinSymbol psi,
                                                            double horizon) {
    if (!psi.unbounded_certified)
        throw UnboundedSymbolRequired("representation needs a certified unbounded symbol");
    TimeChangedRepresentation rep;
    rep.u_spec = std::move(u_spec);
    rep.psi = std::move(psi);
    rep.horizon = horizon;
    rep.wait_scale = 1.0;
    return rep;
}

TimeChangedRepresentation scaled_ctrw_pair(const DistributionSpec& u_spec,
                                           const BernsteinSymbol& psi, uint64_t n,
                                           double a_n, double horizon) {
    TimeChangedRepresentation rep =
        build_time_changed_representation(u_spec, rescale_symbol(psi, n, a_n), horizon);
    rep.wait_scale = 1.0 / static_cast<double>(n);
    return rep;
}

double time_change_left_inverse(const TimeChange& xi, double level) {
    if (xi.v.empty() || level <= xi.v.front()) return xi.t.empty() ? 0.0 : xi.t.front();
    if (level > xi.v.back()) return xi.t.back();
    auto it = std::lower_bound(xi.v.begin(), xi.v.end(), level);
    size_t i = static_cast<size_t>(it - xi.v.begin());
    if (xi.v[i] == level) {
        // first time the level is reached
        while (i > 0 && xi.v[i - 1] == level) --i;
        return xi.t[i];
    }
    double dv = xi.v[i] - xi.v[i - 1];
    return xi.t[i - 1] + (xi.t[i] - xi.t[i - 1]) * (level - xi.v[i - 1]) / dv;
}

StepPath quenched_type1(const TimeChange& xi, const SpaceTimeJumpModel& u_model,
                        double horizon, RngStream& rng, double wait_scale,
                        double jump_scale) {
    if (std::abs(xi(0.0)) > 1e-12)
        throw InvariantViolation("environment must start at zero");
    double inner_horizon = xi(horizon);
    StepPath inner = inner_horizon > 0.0
                         ? simulate_ctrw(u_model, inner_horizon, rng, wait_scale, jump_scale)
                         : StepPath{};
    StepPath out;
    out.dim = u_model.dim;
    out.horizon = horizon;
    out.initial.assign(u_model.dim, 0.0);
    for (size_t k = 0; k < inner.epochs.size(); ++k) {
        double t = time_change_left_inverse(xi, inner.epochs[k]);
        if (t > horizon) break;
        if (!out.epochs.empty() && t <= out.epochs.back()) {
            for (size_t c = 0; c < out.dim; ++c)
                out.values[(out.epochs.size() - 1) * out.dim + c] =
                    inner.values[k * out.dim + c];
            continue;
        }
        out.epochs.push_back(t);
        for (size_t c = 0; c < out.dim; ++c) out.values.push_back(inner.values[k * out.dim + c]);
    }
    return out;
}

StepPath quenched_type2(const TemporalLandscape& landscape,
                        const SpaceTimeJumpModel& j_model, double horizon, RngStream& rng,
                        const std::vector<double>* tau_realization, double jump_scale) {
    StepPath out;
    out.dim = j_model.dim;
    out.horizon = horizon;
    out.initial.assign(j_model.dim, 0.0);
    std::vector<double> level(j_model.dim, 0.0), jump(j_model.dim);
    double t = 0.0;
    size_t i = 0;
    while (true) {
        double tau = tau_realization
                         ? (i < tau_realization->size()
                                ? (*tau_realization)[i]
                                : throw InvariantViolation("tau realization exhausted"))
                         : landscape.tau(rng);
        double u = landscape.wait_raw(rng);
        if (landscape.normalize) u /= landscape.wait_norm;
        t += tau * u;
        if (t > horizon) break;
        j_model.spatial_conditional(tau * u, rng, jump.data());
        for (size_t k = 0; k < j_model.dim; ++k) level[k] += jump_scale * jump[k];
        out.epochs.push_back(t);
        out.values.insert(out.values.end(), level.begin(), level.end());
        if (++i > kMaxJumps) throw ZeroProgress("type-II walk stalled");
    }
    return out;
}

StepPath general_scheme_ctrw(const StepPath& a_path, const SubordinatorSkeleton& d_path,
                             const DistributionSpec& u_spec, double a_n, double horizon,
                             RngStream& rng) {
    StepPath out;
    out.dim = a_path.dim;
    out.horizon = horizon;
    out.initial = a_path.initial;
    std::vector<double> level = a_path.initial;
    double renewal = 0.0;
    double clock = 0.0;
    double inner_horizon = std::min(a_path.horizon, d_path.horizon);
    while (true) {
        double prev = renewal;
        renewal += a_n * sample_distribution(u_spec, rng);
        if (renewal > inner_horizon) break;
        double w = d_path.eval(renewal) - d_path.eval(prev);
        std::vector<double> a_now = a_path.value(renewal);
        clock += w;
        if (clock > horizon) break;
        level = a_now;
        if (!out.epochs.empty() && clock <= out.epochs.back()) {
            for (size_t c = 0; c < out.dim; ++c)
                out.values[(out.epochs.size() - 1) * out.dim + c] = level[c];
        } else if (clock > 0.0) {
            out.epochs.push_back(clock);
            out.values.insert(out.values.end(), level.begin(), level.end());
        } else {
            out.initial = level;
        }
        if (out.epochs.size() > kMaxJumps) throw ZeroProgress("general scheme stalled");
    }
    return out;
}

double sigma_sq_mu(const std::function<double(double)>& sigma_sq, const DistributionSpec& mu) {
    switch (mu.kind) {
        case DistKind::Dirac:
            return sigma_sq(mu.atom);
        case DistKind::Exponential: {
            double cut = 60.0 / mu.rate;
            return integrate([&](double w) {
                return sigma_sq(w) * mu.rate * std::exp(-mu.rate * w);
            }, 0.0, cut, 1e-10);
        }
        default: {
            // quantile-grid expectation
            const int n = 2048;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += sigma_sq(mu.tail_quantile((i + 0.5) / n));
            return acc / n;
        }
    }
}

QuenchedVarianceReport quenched_variance_check(const TimeChange& xi,
                                               const std::function<double(double)>& sigma_sq,
                                               const DistributionSpec& wait_law,
                                               const std::vector<double>& t_grid,
                                               size_t reps, uint64_t n, RngStream rng) {
    QuenchedVarianceReport rep;
    double n_d = static_cast<double>(n);
    double s2mu = sigma_sq_mu(sigma_sq, wait_law);
    std::vector<std::vector<double>> samples(t_grid.size());
    double max_inner = 0.0;
    for (double t : t_grid) max_inner = std::max(max_inner, xi(t));
    for (size_t r = 0; r < reps; ++r) {
        RngStream stream = rng.child(r);
        // walk the inner clock once, reading off values at the xi(t) levels
        double s = 0.0, x = 0.0;
        size_t gi = 0;
        std::vector<double> levels(t_grid.size());
        for (size_t k = 0; k < t_grid.size(); ++k) levels[k] = xi(t_grid[k]);
        while (gi < t_grid.size()) {
            double w = sample_distribution(wait_law, stream) / n_d;
            double s_next = s + w;
            while (gi < t_grid.size() && levels[gi] < s_next) {
                samples[gi].push_back(x);
                ++gi;
            }
            if (s_next > max_inner) break;
            double sd = std::sqrt(sigma_sq(w * n_d));
            x += (stream.next_u64() >> 63 ? 1.0 : -1.0) * sd / std::sqrt(n_d);
            s = s_next;
        }
        while (gi < t_grid.size()) samples[gi++].push_back(x);
    }
    for (size_t k = 0; k < t_grid.size(); ++k) {
        double v_hat = variance_of(samples[k]);
        double pred = s2mu * xi(t_grid[k]);
        double se = std::max(pred, 1e-12) * std::sqrt(2.0 / static_cast<double>(reps - 1));
        double z = (v_hat - pred) / se;
        rep.points.push_back({t_grid[k], v_hat, pred, z});
        if (std::abs(z) >= 3.0) rep.pass = false;
    }
    return rep;
}

} // namespace ctrw
