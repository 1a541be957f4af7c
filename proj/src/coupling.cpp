#include "ctrw/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace ctrw {

namespace {

// Kahan-compensated sum; the marginal invariants are checked at 1e-12.
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

double tail_quantile_of(const TailFunction& tail, double p, double lo_hint) {
    double lo = lo_hint, hi = std::max(2.0 * lo_hint, 2.0);
    while (tail(hi) > p && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (tail(mid) > p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double DiscretizedTail::block_mass(size_t lo, size_t hi) const {
    double s = 0.0;
    for (size_t j = lo; j < std::min(hi, j_max); ++j) s += masses[j];
    return s;
}

DiscretizedTail interval_masses(const TailFunction& tail, size_t j_max) {
    DiscretizedTail out;
    out.j_max = j_max;
    out.source = tail;
    out.masses.resize(j_max);
    // F(j) = P(X >= j); at zero this is 1 for a nonnegative variable even
    // when the law has an atom at the origin.
    double prev = 1.0;
    for (size_t j = 1; j <= j_max; ++j) {
        double cur = tail(static_cast<double>(j));
        out.masses[j - 1] = prev - cur;
        prev = cur;
    }
    out.residual = prev;
    return out;
}

DiscretizedTail tail_from_masses(const std::vector<std::pair<size_t, double>>& masses,
                                 size_t j_max) {
    DiscretizedTail out;
    out.j_max = j_max;
    out.uniform_conditional = true;
    out.masses.assign(j_max, 0.0);
    Kahan total;
    for (const auto& [j, m] : masses) {
        if (j >= j_max) throw InvariantViolation("mass outside the horizon");
        out.masses[j] += m;
        total.add(m);
    }
    out.residual = 1.0 - total.s;
    if (out.residual < -1e-12) throw InvariantViolation("masses exceed one");
    if (out.residual < 0.0) out.residual = 0.0;
    auto masses_copy = out.masses;
    out.source.survival = [masses_copy, j_max](double t) {
        if (t <= 0.0) return 1.0;
        Kahan below;
        size_t full = std::min(static_cast<size_t>(t), j_max);
        for (size_t j = 0; j < full; ++j) below.add(masses_copy[j]);
        // uniform placement inside the interval containing t
        if (full < j_max && t > static_cast<double>(full))
            below.add(masses_copy[full] * (t - static_cast<double>(full)));
        return 1.0 - below.s;
    };
    return out;
}

CouplingPlan dyadic_coupling(const DiscretizedTail& f1, const DiscretizedTail& f2) {
    if (f1.j_max != f2.j_max)
        throw InvariantViolation("tails must be discretized to the same horizon");
    const size_t j_max = f1.j_max;
    CouplingPlan plan;
    plan.f1 = std::make_shared<DiscretizedTail>(f1);
    plan.f2 = std::make_shared<DiscretizedTail>(f2);
    plan.within.resize(j_max);
    for (size_t j = 0; j < j_max; ++j)
        plan.within[j] = std::min(f1.masses[j], f2.masses[j]);

    std::vector<std::pair<uint32_t, double>> leftover_demand; // X-side surplus
    std::vector<std::pair<uint32_t, double>> leftover_supply; // Y-side surplus

    auto run_block = [&](int64_t block, size_t lo, size_t hi) {
        std::vector<std::pair<uint32_t, double>> customers, servers;
        for (size_t j = lo; j < std::min(hi, j_max); ++j) {
            double e = f1.masses[j] - f2.masses[j]; // g(j) - g(j+1)
            if (e < 0.0)
                customers.emplace_back(static_cast<uint32_t>(j), -e);
            else if (e > 0.0)
                servers.emplace_back(static_cast<uint32_t>(j), e);
        }
        // FIFO by index: the head customer is drained by servers in index order.
        size_t ci = 0, si = 0;
        double crem = ci < customers.size() ? customers[ci].second : 0.0;
        double srem = si < servers.size() ? servers[si].second : 0.0;
        while (ci < customers.size() && si < servers.size()) {
            double a = std::min(crem, srem);
            if (a > 0.0)
                plan.cross.push_back({customers[ci].first, servers[si].first, a});
            crem -= a;
            srem -= a;
            if (crem <= 0.0) {
                ++ci;
                crem = ci < customers.size() ? customers[ci].second : 0.0;
            }
            if (srem <= 0.0) {
                ++si;
                srem = si < servers.size() ? servers[si].second : 0.0;
            }
        }
        double left = 0.0;
        int sign = 0;
        if (ci < customers.size()) {
            sign = -1;
            leftover_demand.emplace_back(customers[ci].first, crem);
            left += crem;
            for (size_t c = ci + 1; c < customers.size(); ++c) {
                leftover_demand.emplace_back(customers[c]);
                left += customers[c].second;
            }
        } else if (si < servers.size()) {
            sign = +1;
            leftover_supply.emplace_back(servers[si].first, srem);
            left += srem;
            for (size_t s = si + 1; s < servers.size(); ++s) {
                leftover_supply.emplace_back(servers[s]);
                left += servers[s].second;
            }
        }
        if (left > 0.0) plan.block_residuals.push_back({block, left, sign});
    };

    run_block(-1, 0, 1);
    for (size_t lo = 1; lo < j_max; lo *= 2) {
        int64_t n = 0;
        for (size_t v = lo; v > 1; v /= 2) ++n;
        run_block(n, lo, lo * 2);
    }

    // Completion: pair the per-block leftovers across blocks in index order,
    // then against the beyond-horizon tails.
    size_t di = 0, si = 0;
    double drem = di < leftover_demand.size() ? leftover_demand[di].second : 0.0;
    double srem = si < leftover_supply.size() ? leftover_supply[si].second : 0.0;
    while (di < leftover_demand.size() && si < leftover_supply.size()) {
        double a = std::min(drem, srem);
        if (a > 0.0)
            plan.completion.push_back({leftover_demand[di].first, leftover_supply[si].first, a});
        drem -= a;
        srem -= a;
        if (drem <= 0.0) {
            ++di;
            drem = di < leftover_demand.size() ? leftover_demand[di].second : 0.0;
        }
        if (srem <= 0.0) {
            ++si;
            srem = si < leftover_supply.size() ? leftover_supply[si].second : 0.0;
        }
    }
    double far1 = f1.residual, far2 = f2.residual;
    while (di < leftover_demand.size()) {
        // X surplus pairs against the deep end of the Y far tail
        plan.x_far.emplace_back(leftover_demand[di].first, drem);
        ++di;
        drem = di < leftover_demand.size() ? leftover_demand[di].second : 0.0;
    }
    while (si < leftover_supply.size()) {
        plan.y_far.emplace_back(leftover_supply[si].first, srem);
        ++si;
        srem = si < leftover_supply.size() ? leftover_supply[si].second : 0.0;
    }
    double x_far_total = 0.0, y_far_total = 0.0;
    for (auto& [j, m] : plan.x_far) x_far_total += m;
    for (auto& [k, m] : plan.y_far) y_far_total += m;
    plan.far_both = std::max(0.0, std::min(far1 - x_far_total, far2 - y_far_total));
    plan.validate();
    return plan;
}

void CouplingPlan::validate() const {
    const size_t j_max = f1->j_max;
    std::vector<Kahan> mx(j_max), my(j_max);
    for (size_t j = 0; j < j_max; ++j) {
        mx[j].add(within[j]);
        my[j].add(within[j]);
    }
    for (const auto& c : cross) {
        mx[c.j].add(c.mass);
        my[c.k].add(c.mass);
    }
    for (const auto& c : completion) {
        mx[c.j].add(c.mass);
        my[c.k].add(c.mass);
    }
    for (const auto& [j, m] : x_far) mx[j].add(m);
    for (const auto& [k, m] : y_far) my[k].add(m);
    for (size_t j = 0; j < j_max; ++j) {
        if (std::abs(mx[j].s - f2->masses[j]) > 1e-12)
            throw MarginalMismatch("X marginal broken at interval " + std::to_string(j));
        if (std::abs(my[j].s - f1->masses[j]) > 1e-12)
            throw MarginalMismatch("Y marginal broken at interval " + std::to_string(j));
    }
    double x_far_total = far_both, y_far_total = far_both;
    for (const auto& [k, m] : y_far) x_far_total += m; // X beyond horizon
    for (const auto& [j, m] : x_far) y_far_total += m; // Y beyond horizon
    if (std::abs(x_far_total - f2->residual) > 1e-12)
        throw MarginalMismatch("X far-tail mass broken");
    if (std::abs(y_far_total - f1->residual) > 1e-12)
        throw MarginalMismatch("Y far-tail mass broken");
}

std::vector<uint32_t> find_i_bad(const CouplingPlan& plan, uint32_t i) {
    std::unordered_map<uint32_t, uint32_t> last_server;
    for (const auto& c : plan.cross) last_server[c.j] = std::max(last_server[c.j], c.k);
    std::vector<uint32_t> bad;
    for (const auto& [j, k] : last_server) {
        uint32_t d = j > k ? j - k : k - j;
        if (d > i) bad.push_back(j);
    }
    std::sort(bad.begin(), bad.end());
    return bad;
}

std::vector<uint32_t> i_bad_condition_flags(const CouplingPlan& plan, uint32_t i) {
    const auto& m1 = plan.f1->masses;
    const auto& m2 = plan.f2->masses;
    const size_t j_max = plan.f1->j_max;
    std::vector<uint32_t> bad;
    for (size_t lo = 1; lo < j_max; lo *= 2) {
        size_t hi = std::min(lo * 2, j_max);
        auto s1 = [&](size_t a, size_t b) {
            double s = 0.0;
            for (size_t j = a; j < std::min(b, j_max); ++j) s += m1[j];
            return s;
        };
        auto s2 = [&](size_t a, size_t b) {
            double s = 0.0;
            for (size_t j = a; j < std::min(b, j_max); ++j) s += m2[j];
            return s;
        };
        for (size_t j = lo; j < hi; ++j) {
            if (!(m2[j] > m1[j])) continue; // not a customer
            size_t upper1 = j > i ? std::max(lo, j - i) : lo;
            bool cond1 = s1(lo, upper1) >= s2(lo, j + 1) && s2(lo, j + 1) > 0.0;
            bool cond2 = s1(lo, j + i + 1) < s2(lo, j + 1);
            if (cond1 || cond2) bad.push_back(static_cast<uint32_t>(j));
        }
    }
    std::sort(bad.begin(), bad.end());
    return bad;
}

// ---- PlanSampler ----

PlanSampler::PlanSampler(std::shared_ptr<const CouplingPlan> plan) : plan_(std::move(plan)) {
    const auto& p = *plan_;
    for (size_t j = 0; j < p.within.size(); ++j)
        if (p.within[j] > 0.0)
            atoms_.push_back({0, static_cast<uint32_t>(j), static_cast<uint32_t>(j), p.within[j]});
    for (const auto& c : p.cross) atoms_.push_back({1, c.j, c.k, c.mass});
    for (const auto& c : p.completion) atoms_.push_back({1, c.j, c.k, c.mass});
    for (const auto& [j, m] : p.x_far) atoms_.push_back({2, j, 0, m});
    for (const auto& [k, m] : p.y_far) atoms_.push_back({3, 0, k, m});
    if (p.far_both > 0.0) atoms_.push_back({4, 0, 0, p.far_both});
    cum_.reserve(atoms_.size());
    double acc = 0.0;
    for (const auto& a : atoms_) cum_.push_back(acc += a.mass);
    q1_.resize(p.within.size());
    q2_.resize(p.within.size());
}

namespace {
std::mutex g_table_mutex;
constexpr int kNodes = 64; // piecewise-linear quantile resolution per interval
} // namespace

double PlanSampler::offset_quantile(int side, uint32_t j, double u) const {
    const DiscretizedTail& dt = side == 1 ? *plan_->f1 : *plan_->f2;
    if (dt.uniform_conditional) return u;
    auto& cache = side == 1 ? q1_ : q2_;
    {
        std::lock_guard<std::mutex> lock(g_table_mutex);
        if (cache[j].empty()) {
            std::vector<double> table(kNodes + 1);
            double f_lo = j == 0 ? 1.0 : dt.source(static_cast<double>(j));
            double mass = dt.masses[j];
            for (int i = 0; i <= kNodes; ++i) {
                double target = f_lo - mass * (static_cast<double>(i) / kNodes);
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (dt.source(static_cast<double>(j) + mid) > target)
                        lo = mid;
                    else
                        hi = mid;
                }
                double off = 0.5 * (lo + hi);
                // keep boundary atoms exactly on the boundary
                if (off < 1e-12) off = 0.0;
                if (off > 1.0 - 1e-12) off = 1.0;
                table[i] = off;
            }
            table[0] = 0.0;
            table[kNodes] = 1.0;
            cache[j] = std::move(table);
        }
    }
    const std::vector<double>& t = cache[j];
    double pos = u * kNodes;
    int i = std::min(static_cast<int>(pos), kNodes - 1);
    double frac = pos - i;
    if (t[i + 1] - t[i] > 0.04) {
        // steep or discontinuous conditional (atoms, support gaps): linear
        // interpolation would smear mass across the gap, so resolve exactly
        double f_lo = j == 0 ? 1.0 : dt.source(static_cast<double>(j));
        double target = f_lo - dt.masses[j] * u;
        double lo = t[i], hi = t[i + 1];
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (dt.source(static_cast<double>(j) + mid) > target)
                lo = mid;
            else
                hi = mid;
        }
        double off = 0.5 * (lo + hi);
        // snap to the interval edge so atoms at the boundary stay atoms
        if (off < 1e-12) off = 0.0;
        if (off > 1.0 - 1e-12) off = 1.0;
        return off;
    }
    return t[i] * (1.0 - frac) + t[i + 1] * frac;
}

double PlanSampler::far_quantile(int side, double p) const {
    const DiscretizedTail& dt = side == 1 ? *plan_->f1 : *plan_->f2;
    double j_max = static_cast<double>(dt.j_max);
    if (dt.uniform_conditional) return j_max; // no information beyond the horizon
    return tail_quantile_of(dt.source, p, j_max);
}

std::pair<double, double> PlanSampler::sample(RngStream& rng) const {
    double u = rng.uniform01() * cum_.back();
    size_t idx = static_cast<size_t>(
        std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    if (idx >= atoms_.size()) idx = atoms_.size() - 1;
    const Atom& a = atoms_[idx];
    const CouplingPlan& p = *plan_;
    double far1 = p.f1->residual, far2 = p.f2->residual;
    switch (a.type) {
        case 0: { // within, comonotone
            double v = rng.uniform01();
            double x = a.j + offset_quantile(2, a.j, v);
            double y = a.j + offset_quantile(1, a.j, v);
            return {x, y};
        }
        case 1: { // cross, independent conditional placement
            double x = a.j + offset_quantile(2, a.j, rng.uniform01());
            double y = a.k + offset_quantile(1, a.k, rng.uniform01());
            return {x, y};
        }
        case 2: { // X in I_j, Y in the deep segment of its far tail
            double x = a.j + offset_quantile(2, a.j, rng.uniform01());
            double deep = far1 - p.far_both;
            double y = far_quantile(1, deep * rng.uniform01());
            return {x, y};
        }
        case 3: {
            double y = a.k + offset_quantile(1, a.k, rng.uniform01());
            double deep = far2 - p.far_both;
            double x = far_quantile(2, deep * rng.uniform01());
            return {x, y};
        }
        default: { // both far: comonotone by relative depth
            double v = rng.uniform01();
            double x = far_quantile(2, (far2 - p.far_both) + p.far_both * v);
            double y = far_quantile(1, (far1 - p.far_both) + p.far_both * v);
            return {x, y};
        }
    }
}

std::pair<double, double> sample_pair_from_plan(const PlanSampler& sampler, RngStream& rng) {
    return sampler.sample(rng);
}

namespace {

// P(phi_a(u) - phi_b(v) > c) for independent uniforms, with phi the
// piecewise-linear offset quantiles; midpoint rule at 1e-5 resolution.
double prob_offset_diff_exceeds(const PlanSampler& s, int side_a, uint32_t ja, int side_b,
                                uint32_t jb, double c) {
    const int grid = 512;
    double acc = 0.0;
    for (int i = 0; i < grid; ++i) {
        double v = (i + 0.5) / grid;
        double target = s.offset_quantile(side_b, jb, v) + c;
        // measure of u with phi_a(u) > target; phi_a monotone
        if (target < 0.0) {
            acc += 1.0;
            continue;
        }
        if (target >= 1.0) continue;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (s.offset_quantile(side_a, ja, mid) > target)
                hi = mid;
            else
                lo = mid;
        }
        acc += 1.0 - 0.5 * (lo + hi);
    }
    return acc / grid;
}

} // namespace

double coupled_tail(const CouplingPlan& plan, double i) {
    if (i < 1.0) throw InvariantViolation("coupled_tail defined for levels i >= 1");
    // mass beyond the horizon can affect the answer once i is comparable to
    // j_max; with no far-tail mass any level is exactly answerable
    if (4.0 * i > static_cast<double>(plan.f1->j_max) &&
        plan.f1->residual + plan.f2->residual > 1e-15)
        throw HorizonTooSmall("discretization horizon too small for level i");
    PlanSampler sampler(std::make_shared<CouplingPlan>(plan));
    double total = 0.0;
    auto add_pair = [&](uint32_t j, uint32_t k, double mass) {
        double d = std::abs(static_cast<double>(j) - static_cast<double>(k));
        if (d - 1.0 >= i) {
            total += mass;
        } else if (d + 1.0 <= i) {
            // |X - Y| < i surely
        } else if (mass > 0.0) {
            // partial band: |X-Y| = d + (phi_far - phi_near)
            double c = i - d;
            double p = (k > j) ? prob_offset_diff_exceeds(sampler, 1, k, 2, j, c)
                               : prob_offset_diff_exceeds(sampler, 2, j, 1, k, c);
            total += mass * p;
        }
    };
    for (const auto& c : plan.cross) add_pair(c.j, c.k, c.mass);
    for (const auto& c : plan.completion) add_pair(c.j, c.k, c.mass);
    // in-range vs far pairs exceed any queried level (horizon >> i)
    for (const auto& [j, m] : plan.x_far) total += m;
    for (const auto& [k, m] : plan.y_far) total += m;
    if (plan.far_both > 0.0) {
        const int grid = 512;
        double far1 = plan.f1->residual, far2 = plan.f2->residual;
        double count = 0.0;
        for (int g = 0; g < grid; ++g) {
            double v = (g + 0.5) / grid;
            double x = tail_quantile_of(plan.f2->source, (far2 - plan.far_both) + plan.far_both * v,
                                        static_cast<double>(plan.f2->j_max));
            double y = tail_quantile_of(plan.f1->source, (far1 - plan.far_both) + plan.far_both * v,
                                        static_cast<double>(plan.f1->j_max));
            if (std::abs(x - y) > i) count += 1.0;
        }
        total += plan.far_both * count / grid;
    }
    return total;
}

// ---- quantitative pipeline ----

double RateScanPlan::xi0_statement() const {
    double a = alpha / (7.0 * alpha + 4.0);
    if (std::isinf(beta)) return a;
    return std::min(a, (beta - alpha) / (3.0 * beta + alpha + 4.0));
}

double RateScanPlan::M1(uint64_t n) const {
    double nd = static_cast<double>(n);
    return c_prime() * nd * std::log(nd);
}

double RateScanPlan::M2(uint64_t n) const {
    double nd = static_cast<double>(n);
    return c_prime() * std::pow(nd, 1.0 - alpha * c_prime()) * std::log(nd);
}

PathCouplingReplica path_coupling_replica(const std::vector<double>& waits_y,
                                          const std::vector<double>& waits_x,
                                          const std::vector<double>& shared_jumps,
                                          double horizon) {
    std::vector<double> ty, tx;
    double acc = 0.0;
    for (double w : waits_y) {
        acc += w;
        if (acc > horizon) break;
        ty.push_back(acc);
    }
    acc = 0.0;
    for (double w : waits_x) {
        acc += w;
        if (acc > horizon) break;
        tx.push_back(acc);
    }
    size_t m = std::min(ty.size(), tx.size());
    size_t m_max = std::max(ty.size(), tx.size());
    if (shared_jumps.size() < m_max)
        throw InvariantViolation("need a shared jump for every epoch");
    PathCouplingReplica rep{0.0, 0.0, 0.0};
    double disp = 0.0;
    for (size_t k = 0; k < m; ++k) {
        disp = std::max(disp, std::abs(ty[k] - tx[k]));
        rep.l1_bound += std::abs(waits_y[k] - waits_x[k]);
    }
    // partial sums of the shared jumps past the matched region
    double s = 0.0, osc = 0.0;
    for (size_t k = m; k < m_max; ++k) {
        s += shared_jumps[k];
        osc = std::max(osc, std::abs(s));
    }
    rep.tail_osc = osc;
    rep.witness = std::max(disp, osc);
    return rep;
}

PathCouplingReport path_coupling_distance(const PlanSampler& sampler, uint64_t n,
                                          double alpha, double horizon, size_t reps,
                                          RngStream rng, const std::vector<double>& eps_grid) {
    std::vector<double> grid = eps_grid;
    if (grid.empty()) {
        for (int i = 0; i < 128; ++i)
            grid.push_back(std::pow(10.0, -4.0 + 4.5 * i / 127.0));
    }
    double a_n = std::pow(static_cast<double>(n), -1.0 / alpha);
    double j_scale = 1.0 / std::sqrt(static_cast<double>(n));
    PathCouplingReport report;
    report.replicas.reserve(reps);
    for (size_t r = 0; r < reps; ++r) {
        RngStream stream = rng.child(r);
        std::vector<double> wy, wx, jumps;
        double cy = 0.0, cx = 0.0;
        while (cy <= horizon || cx <= horizon) {
            auto [x, y] = sampler.sample(stream);
            // Y carries the original law (X side of the plan), X the approximant
            double wyk = a_n * x, wxk = a_n * y;
            wy.push_back(wyk);
            wx.push_back(wxk);
            jumps.push_back((stream.next_u64() >> 63 ? 1.0 : -1.0) * j_scale);
            cy += wyk;
            cx += wxk;
            if (wy.size() > 50'000'000) throw ZeroProgress("path coupling replica stalled");
        }
        report.replicas.push_back(path_coupling_replica(wy, wx, jumps, horizon));
    }
    report.exact_coupling = true;
    double sum_l1 = 0.0, sum_tail = 0.0;
    for (const auto& rep : report.replicas) {
        report.exact_coupling = report.exact_coupling && rep.witness == 0.0;
        sum_l1 += rep.l1_bound;
        sum_tail += rep.tail_osc;
    }
    report.mean_l1 = sum_l1 / static_cast<double>(reps);
    report.mean_tail = sum_tail / static_cast<double>(reps);
    if (report.exact_coupling) {
        report.eps_hat = 0.0; // all sampled distances vanish identically
        return report;
    }
    report.eps_hat = grid.back();
    for (double eps : grid) {
        size_t exceed = 0;
        for (const auto& rep : report.replicas)
            if (rep.witness > eps) ++exceed;
        if (static_cast<double>(exceed) / static_cast<double>(reps) < eps) {
            report.eps_hat = eps;
            break;
        }
    }
    return report;
}

RateScanReport rate_scan(const RateScanPlan& plan, const PlanSampler& sampler,
                         double horizon, size_t reps, RngStream rng) {
    RateScanReport out;
    out.n_grid = plan.n_grid;
    out.xi0_statement = plan.xi0_statement();
    out.xi0_proof = plan.xi0_proof();
    std::vector<std::vector<double>> witnesses;
    std::vector<double> grid;
    for (int i = 0; i < 128; ++i) grid.push_back(std::pow(10.0, -4.0 + 4.5 * i / 127.0));
    for (size_t gi = 0; gi < plan.n_grid.size(); ++gi) {
        auto rep = path_coupling_distance(sampler, plan.n_grid[gi], plan.alpha, horizon,
                                          reps, rng.child(gi), grid);
        out.eps_hat.push_back(rep.eps_hat);
        std::vector<double> w;
        for (const auto& r : rep.replicas) w.push_back(r.witness);
        witnesses.push_back(std::move(w));
    }
    out.monotone_nonincreasing = true;
    for (size_t i = 1; i < out.eps_hat.size(); ++i)
        if (out.eps_hat[i] > out.eps_hat[i - 1] * (1.0 + 1e-12))
            out.monotone_nonincreasing = false;
    out.exact_coupling = true;
    for (const auto& w : witnesses)
        for (double x : w)
            if (x != 0.0) out.exact_coupling = false;
    if (out.exact_coupling) {
        out.c_hat = std::numeric_limits<double>::infinity();
        out.ci_lo = out.ci_hi = out.c_hat;
        return out;
    }
    auto eps_from = [&](const std::vector<double>& w) {
        for (double eps : grid) {
            size_t exceed = 0;
            for (double x : w)
                if (x > eps) ++exceed;
            if (static_cast<double>(exceed) / static_cast<double>(w.size()) < eps) return eps;
        }
        return grid.back();
    };
    std::vector<double> xs(plan.n_grid.begin(), plan.n_grid.end());
    PowerLawFit fit = fit_power_law(xs, out.eps_hat, 0);
    out.c_hat = -fit.exponent;
    // bootstrap over replicas within each n
    RngStream boot = rng.child(999'001);
    std::vector<double> slopes;
    for (int b = 0; b < 400; ++b) {
        std::vector<double> eps_b;
        for (const auto& w : witnesses) {
            std::vector<double> res(w.size());
            for (size_t i = 0; i < w.size(); ++i) {
                size_t k = static_cast<size_t>(boot.uniform_co() * w.size());
                res[i] = w[std::min(k, w.size() - 1)];
            }
            eps_b.push_back(eps_from(res));
        }
        PowerLawFit f = fit_power_law(xs, eps_b, 0);
        slopes.push_back(-f.exponent);
    }
    out.ci_lo = percentile_of(slopes, 0.025);
    out.ci_hi = percentile_of(slopes, 0.975);
    return out;
}

} // namespace ctrw
