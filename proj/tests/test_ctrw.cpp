#include <cmath>
#include <memory>

#include "doctest.h"

#include "ctrw/ctrw_process.hpp"
#include "ctrw/harness.hpp"
#include "ctrw/stats.hpp"

using namespace ctrw;

TEST_CASE("simulate_ctrw basics") {
    SUBCASE("unit waits and unit jumps give the staircase") {
        SpaceTimeJumpModel m;
        m.waiting = DistributionSpec::dirac(1.0);
        m.dim = 1;
        m.spatial_conditional = [](double, RngStream&, double* out) { out[0] = 1.0; };
        RngStream rng(1, 1);
        StepPath p = simulate_ctrw(m, 3.5, rng);
        REQUIRE(p.jump_count() == 3);
        CHECK(p.epochs == std::vector<double>{1.0, 2.0, 3.0});
        CHECK(p.values == std::vector<double>{1.0, 2.0, 3.0});
    }
    SUBCASE("degenerate waits trip the progress guard") {
        SpaceTimeJumpModel m;
        m.waiting = DistributionSpec::dirac(1e-12);
        m.spatial_conditional = [](double, RngStream&, double* out) { out[0] = 1.0; };
        RngStream rng(1, 2);
        CHECK_THROWS_AS(simulate_ctrw(m, 1.0, rng), ZeroProgress);
    }
}

TEST_CASE("model registration enforces the conditional-moment invariants") {
    RngStream rng(2, 1);
    auto lattice = SpaceTimeJumpModel::lattice(DistributionSpec::exponential(1.0), 2);
    CHECK_NOTHROW(register_space_time_model(lattice, rng, {0.1, 1.0, 5.0}));
    // J == W violates E(J | W = w) = 0
    SpaceTimeJumpModel coupled;
    coupled.waiting = DistributionSpec::exponential(1.0);
    coupled.coupled = true;
    coupled.spatial_conditional = [](double w, RngStream&, double* out) { out[0] = w; };
    CHECK_THROWS_AS(register_space_time_model(coupled, rng, {0.5, 2.0}), InvariantViolation);
}

TEST_CASE("time-changed representation") {
    SUBCASE("pure drift collapses to the identity representation") {
        auto rep = build_time_changed_representation(DistributionSpec::exponential(1.0),
                                                     BernsteinSymbol::pure_drift(1.0), 5.0);
        RngStream rng(3, 1);
        auto sc = rep.sample_scenario(rng);
        REQUIRE(sc.epochs_x.size() == sc.epochs_y.size());
        for (size_t k = 0; k < sc.epochs_x.size(); ++k) {
            CHECK(sc.epochs_y[k] == sc.epochs_x[k]);
            CHECK(sc.w_psi[k] == doctest::Approx(sc.u[k]).epsilon(1e-12));
        }
    }
    SUBCASE("bounded symbols are rejected") {
        BernsteinSymbol bounded;
        bounded.measure = LevyMeasure::atomic({{1.0, 1.0}});
        CHECK_THROWS_AS(
            build_time_changed_representation(DistributionSpec::exponential(1.0), bounded, 1.0),
            UnboundedSymbolRequired);
    }
    SUBCASE("Exp waits with a stable symbol produce Mittag-Leffler Y-waits") {
        auto rep = build_time_changed_representation(DistributionSpec::exponential(1.0),
                                                     BernsteinSymbol::stable(0.5), 40.0);
        RngStream rng(3, 2), ml_rng(3, 3);
        std::vector<double> w_psi, ml;
        while (w_psi.size() < 20000) {
            auto sc = rep.sample_scenario(rng);
            for (double w : sc.w_psi) w_psi.push_back(w);
        }
        w_psi.resize(20000);
        for (size_t i = 0; i < w_psi.size(); ++i)
            ml.push_back(sample_mittag_leffler_wait(0.5, 1.0, ml_rng));
        CHECK(ks_two_sample(w_psi, ml).p_value > 0.01);
    }
    SUBCASE("pathwise identity holds exactly at random query times") {
        auto [psi, mu1] = build_truncation_symbol(pareto_tail(0.5), 10.0);
        (void)mu1;
        auto rep =
            build_time_changed_representation(DistributionSpec::exponential(1.0), psi, 3.0);
        RngStream rng(3, 4);
        size_t violations = 0;
        for (int s = 0; s < 100; ++s) {
            auto sc = rep.sample_scenario(rng);
            StepPath x = sc.x_path(), y = sc.y_path();
            TimeChange env = sc.environment();
            for (int q = 0; q < 100; ++q) {
                double t = rng.uniform01() * 3.0;
                if (y.value1(t) != evaluate_time_changed(x, env, t)) ++violations;
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("scaled pair") {
    SUBCASE("n = 1 reduces to the plain representation") {
        auto psi = BernsteinSymbol::stable(0.5);
        auto a = build_time_changed_representation(DistributionSpec::exponential(1.0), psi, 2.0);
        auto b = scaled_ctrw_pair(DistributionSpec::exponential(1.0), psi, 1, 1.0, 2.0);
        RngStream r1(4, 1), r2(4, 1);
        auto sa = a.sample_scenario(r1);
        auto sb = b.sample_scenario(r2);
        REQUIRE(sa.epochs_y.size() == sb.epochs_y.size());
        for (size_t k = 0; k < sa.epochs_y.size(); ++k)
            CHECK(sa.epochs_y[k] == sb.epochs_y[k]);
    }
    SUBCASE("rescaled drift vanishes along n for alpha < 1") {
        auto [psi, mu1] = build_truncation_symbol(pareto_tail(0.5), 10.0);
        (void)mu1;
        double prev = 1e300;
        for (uint64_t n : {uint64_t{10}, uint64_t{100}, uint64_t{1000}}) {
            double a_n = std::pow(static_cast<double>(n), -2.0);
            auto r = rescale_symbol(psi, n, a_n);
            CHECK(r.drift < prev);
            prev = r.drift;
        }
        CHECK(prev < 1e-2);
    }
    SUBCASE("E^n(1) marginal approaches the inverse-stable reference (smoke)") {
        double alpha = 0.5, m = 10.0;
        auto [psi, mu1] = build_truncation_symbol(pareto_tail(alpha), m);
        uint64_t n = 500;
        auto w_m = std::make_shared<DistributionSpec>(DistributionSpec::truncated(
            std::make_shared<DistributionSpec>(DistributionSpec::pareto_gamma_skew(alpha)), m));
        auto sched =
            compute_a_n([&](double s) { return w_m->one_minus_lt(psi.eval(s)); }, n);
        auto psi_n = rescale_symbol(psi, n, sched.a_n);
        RngStream rng(4, 9);
        size_t samples = 2000;
        std::vector<double> en(samples), ref(samples);
        for (size_t i = 0; i < samples; ++i) {
            en[i] = sample_inverse_subordinator_marginal(psi_n, 1.0, 1.0 / 1024.0, rng);
            ref[i] = mu1 * std::pow(sample_positive_stable(alpha, 1.0, rng), -alpha);
        }
        CHECK(ks_two_sample(en, ref).p_value > 0.001);
    }
}

TEST_CASE("quenched type I") {
    auto model = SpaceTimeJumpModel::lattice(DistributionSpec::exponential(1.0), 1);
    SUBCASE("identity environment reproduces the plain walk") {
        RngStream r1(5, 1), r2(5, 1);
        StepPath direct = simulate_ctrw(model, 2.0, r1);
        StepPath composed = quenched_type1(TimeChange::identity(2.0), model, 2.0, r2);
        REQUIRE(direct.jump_count() == composed.jump_count());
        for (size_t k = 0; k < direct.jump_count(); ++k) {
            CHECK(direct.epochs[k] == doctest::Approx(composed.epochs[k]).epsilon(1e-12));
            CHECK(direct.values[k] == composed.values[k]);
        }
    }
    SUBCASE("plateaus freeze the walk") {
        TimeChange xi{{0.0, 0.4, 0.8, 1.2}, {0.0, 0.4, 0.4, 0.8}};
        RngStream rng(5, 2);
        for (int rep = 0; rep < 50; ++rep) {
            StepPath p = quenched_type1(xi, model, 1.2, rng, 0.02);
            for (double e : p.epochs) CHECK((e <= 0.4 + 1e-12 || e > 0.8 - 1e-12));
        }
    }
    SUBCASE("environment must start at zero") {
        TimeChange bad{{0.0, 1.0}, {0.5, 1.0}};
        RngStream rng(5, 3);
        CHECK_THROWS_AS(quenched_type1(bad, model, 1.0, rng), InvariantViolation);
    }
}

TEST_CASE("quenched type II") {
    auto j_model = SpaceTimeJumpModel::lattice(DistributionSpec::exponential(1.0), 1);
    SUBCASE("unit traps give an ordinary finite-mean CTRW") {
        TemporalLandscape flat;
        flat.tau = [](RngStream&) { return 1.0; };
        flat.wait_raw = [](RngStream& r) { return r.exponential(); };
        flat.normalize = false;
        RngStream r1(6, 1), r2(6, 2);
        size_t n = 20000;
        std::vector<double> a, b;
        // a fixed prefix of each path avoids the truncation bias of the
        // straddling wait; P(fewer than 5 jumps by t=20) is negligible
        while (a.size() < n) {
            StepPath p = quenched_type2(flat, j_model, 20.0, r1);
            double prev = 0.0;
            for (size_t k = 0; k < 5 && k < p.jump_count(); ++k) {
                a.push_back(p.epochs[k] - prev);
                prev = p.epochs[k];
            }
        }
        a.resize(n);
        for (size_t i = 0; i < n; ++i) b.push_back(r2.exponential());
        CHECK(ks_two_sample(a, b).p_value > 0.01);
    }
    SUBCASE("stable traps with U^{1/alpha} waits reproduce Mittag-Leffler epochs") {
        double alpha = 0.5;
        TemporalLandscape traps;
        traps.tau = [alpha](RngStream& r) { return sample_positive_stable(alpha, 1.0, r); };
        traps.wait_raw = [alpha](RngStream& r) {
            return std::pow(r.exponential(), 1.0 / alpha);
        };
        traps.normalize = false;
        RngStream r1(6, 3), r2(6, 4);
        size_t n = 100000;
        std::vector<double> first_waits, ml;
        for (size_t i = 0; i < n; ++i) {
            double tau = traps.tau(r1);
            first_waits.push_back(tau * traps.wait_raw(r1));
            ml.push_back(sample_mittag_leffler_wait(alpha, 1.0, r2));
        }
        CHECK(ks_two_sample(first_waits, ml).p_value > 0.01);
    }
    SUBCASE("normalization shifts the wait scale by E(U^{1/alpha})") {
        // for U ~ Exp(1), alpha = 1/2: E(U^2) = 2
        double alpha = 0.5;
        RngStream rng(6, 5);
        size_t n = 100000;
        std::vector<double> raw(n), norm(n);
        for (size_t i = 0; i < n; ++i) {
            double u = std::pow(rng.exponential(), 1.0 / alpha);
            raw[i] = u;
            norm[i] = u / 2.0;
        }
        double ratio = percentile_of(raw, 0.5) / percentile_of(norm, 0.5);
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.02));
    }
    SUBCASE("a supplied trap realization is consumed deterministically") {
        TemporalLandscape flat;
        flat.tau = [](RngStream&) { return 1.0; };
        flat.wait_raw = [](RngStream& r) { return r.exponential(); };
        flat.normalize = false;
        std::vector<double> taus(4, 0.5);
        RngStream rng(6, 6);
        CHECK_THROWS_AS(quenched_type2(flat, j_model, 1e9, rng, &taus), InvariantViolation);
    }
}

TEST_CASE("renewal counts of scaled Pareto waits follow fractional kinetics") {
    // N^n_T / n converges to E_T, so E(N_T) ~ n T^alpha / Gamma(1+alpha) and
    // quadrupling n quadruples the count
    double alpha = 0.5, T = 1.0;
    RngStream rng(13, 1);
    auto mean_count = [&](uint64_t n, uint64_t stream) {
        double a_n = std::pow(static_cast<double>(n), -1.0 / alpha);
        RngStream r(13, stream);
        size_t reps = 3000;
        double acc = 0.0;
        for (size_t i = 0; i < reps; ++i) {
            double t = 0.0;
            size_t count = 0;
            while ((t += a_n * sample_pareto(alpha, r)) <= T) ++count;
            acc += static_cast<double>(count);
        }
        return acc / static_cast<double>(reps);
    };
    double m400 = mean_count(400, 2), m1600 = mean_count(1600, 3);
    CHECK(m1600 / m400 == doctest::Approx(4.0).epsilon(0.03));
    double reference = 400.0 * std::pow(T, alpha) / std::tgamma(1.0 + alpha);
    CHECK(m400 == doctest::Approx(reference).epsilon(0.05));
}

TEST_CASE("scaling identity: X^n equals n^{-1} X at time t n^{2/alpha}") {
    double alpha = 0.5;
    uint64_t n = 2;
    double t = 0.4;
    RngStream r1(7, 1), r2(7, 2);
    size_t reps = 4000;
    std::vector<double> scaled(reps), direct(reps);
    double nd = static_cast<double>(n);
    for (size_t r = 0; r < reps; ++r) {
        // X^n at t: waits n^{-2/alpha} W, jumps n^{-1} J
        double clock = 0.0, x = 0.0;
        while (true) {
            clock += std::pow(nd, -2.0 / alpha) * sample_mittag_leffler_wait(alpha, 1.0, r1);
            if (clock > t) break;
            x += (r1.next_u64() >> 63 ? 1.0 : -1.0) / nd;
        }
        scaled[r] = x;
        // n^{-1} X at t n^{2/alpha}
        double horizon = t * std::pow(nd, 2.0 / alpha);
        clock = 0.0;
        double y = 0.0;
        while (true) {
            clock += sample_mittag_leffler_wait(alpha, 1.0, r2);
            if (clock > horizon) break;
            y += (r2.next_u64() >> 63 ? 1.0 : -1.0);
        }
        direct[r] = y / nd;
    }
    CHECK(ks_two_sample(scaled, direct).p_value > 0.01);
}

TEST_CASE("sigma_sq_mu") {
    auto one = [](double) { return 1.0; };
    CHECK(sigma_sq_mu(one, DistributionSpec::exponential(1.0)) == doctest::Approx(1.0));
    auto clipped = [](double w) { return std::min(w, 1.0); };
    CHECK(sigma_sq_mu(clipped, DistributionSpec::dirac(0.5)) == doctest::Approx(0.5));
    CHECK(sigma_sq_mu(clipped, DistributionSpec::exponential(1.0)) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("quenched variance check (reduced)") {
    RngStream rng(8, 1);
    auto sigma = [](double) { return 1.0; };
    SUBCASE("identity environment accrues variance t") {
        auto rep = quenched_variance_check(TimeChange::identity(1.0), sigma,
                                           DistributionSpec::exponential(1.0),
                                           {0.4, 0.9}, 3000, 1000, rng.child(1));
        CHECK(rep.pass);
    }
    SUBCASE("half-speed environment accrues t/2") {
        TimeChange half{{0.0, 1.0}, {0.0, 0.5}};
        auto rep = quenched_variance_check(half, sigma, DistributionSpec::exponential(1.0),
                                           {0.5, 1.0}, 3000, 1000, rng.child(2));
        CHECK(rep.pass);
        CHECK(rep.points[1].predicted == doctest::Approx(0.5));
    }
    SUBCASE("plateau freezes variance accrual") {
        TimeChange plateau{{0.0, 0.3, 0.9, 1.0}, {0.0, 0.3, 0.3, 0.4}};
        auto rep = quenched_variance_check(plateau, sigma, DistributionSpec::exponential(1.0),
                                           {0.3, 0.6, 0.9}, 3000, 1000, rng.child(3));
        CHECK(rep.pass);
        CHECK(rep.points[1].predicted == rep.points[0].predicted);
        CHECK(std::abs(rep.points[1].empirical - rep.points[0].empirical) <
              4.0 * rep.points[0].predicted * std::sqrt(2.0 / 2999.0));
    }
}

TEST_CASE("general scheme (deterministic + distributional smoke)") {
    SUBCASE("identity pair with unit waits approaches the diagonal") {
        uint64_t n = 50;
        StepPath a;
        a.horizon = 2.5;
        a.initial = {0.0};
        for (int i = 1; i <= 2500; ++i) {
            a.epochs.push_back(i * 0.001);
            a.values.push_back(i * 0.001);
        }
        SubordinatorSkeleton d{1.0, 2.5, {}, {}, {}};
        RngStream rng(9, 1);
        StepPath out = general_scheme_ctrw(a, d, DistributionSpec::dirac(1.0),
                                           1.0 / static_cast<double>(n), 2.0, rng);
        for (double t = 0.0; t <= 2.0; t += 0.01)
            CHECK(std::abs(out.value1(t) - t) < 2.0 / static_cast<double>(n));
    }
}
