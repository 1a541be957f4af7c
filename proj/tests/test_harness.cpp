#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ctrw/harness.hpp"
#include "ctrw/stats.hpp"

using namespace ctrw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("ks_two_sample") {
    SUBCASE("identical samples") {
        std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        auto r = ks_two_sample(a, a);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
    SUBCASE("shifted uniforms separate at statistic one half") {
        RngStream rng(31, 1);
        size_t n = 10000;
        std::vector<double> a(n), b(n);
        for (size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform01();
            b[i] = 0.5 + rng.uniform01();
        }
        auto r = ks_two_sample(a, b);
        CHECK(r.statistic == doctest::Approx(0.5).epsilon(0.04));
        CHECK(r.p_value < 1e-12);
    }
    SUBCASE("null calibration: same law rarely rejects") {
        size_t rejections = 0;
        for (int rep = 0; rep < 100; ++rep) {
            RngStream r1(32, 2 * rep), r2(32, 2 * rep + 1);
            size_t n = 10000;
            std::vector<double> a(n), b(n);
            for (size_t i = 0; i < n; ++i) {
                a[i] = sample_mittag_leffler_wait(0.5, 1.0, r1);
                b[i] = sample_mittag_leffler_wait(0.5, 1.0, r2);
            }
            if (ks_two_sample(a, b).p_value <= 0.01) ++rejections;
        }
        CHECK(rejections <= 5);
    }
    SUBCASE("empty samples throw") {
        CHECK_THROWS_AS(ks_two_sample({}, {1.0}), EmptySample);
    }
}

TEST_CASE("fit_power_law") {
    SUBCASE("exact quadratic decay") {
        std::vector<double> xs{1.0, 2.0, 4.0, 8.0, 16.0};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(std::pow(x, -2.0));
        auto fit = fit_power_law(xs, ys);
        CHECK(fit.exponent == doctest::Approx(-2.0).epsilon(1e-12));
    }
    SUBCASE("noisy -1/15 decay stays inside the bootstrap CI") {
        RngStream rng(33, 1);
        std::vector<double> xs, ys;
        for (double x = 100.0; x <= 1e5; x *= 3.16)
            xs.push_back(x);
        for (double x : xs)
            ys.push_back(std::pow(x, -1.0 / 15.0) * (1.0 + 0.01 * (rng.uniform01() - 0.5)));
        auto fit = fit_power_law(xs, ys);
        CHECK(fit.ci_lo <= -1.0 / 15.0);
        CHECK(fit.ci_hi >= -1.0 / 15.0);
    }
    SUBCASE("constant data fits exponent zero") {
        std::vector<double> xs{1.0, 2.0, 4.0, 8.0};
        std::vector<double> ys{3.0, 3.0, 3.0, 3.0};
        auto fit = fit_power_law(xs, ys);
        CHECK(fit.exponent == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("nonpositive data throws") {
        CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0, 4.0}, {1.0, -1.0, 1.0, 1.0}),
                        NonPositiveData);
    }
}

TEST_CASE("experiment configs") {
    SUBCASE("unknown experiment rejected") {
        ExperimentConfig cfg;
        cfg.experiment = "frobnicate";
        CHECK_THROWS_AS(run_experiment(cfg), ConfigInvalid);
    }
    SUBCASE("empty n_grid rejected") {
        ExperimentConfig cfg;
        cfg.experiment = "pareto-rate-scan";
        cfg.out_dir = "/tmp/ctrw-test-out";
        cfg.params["n_grid"] = nlohmann::json::array();
        CHECK_THROWS_AS(run_experiment(cfg), ConfigInvalid);
    }
    SUBCASE("config json round trip") {
        nlohmann::json j{{"experiment", "verify-ml-renewal"},
                         {"seed", 7},
                         {"out_dir", "x"},
                         {"params", {{"samples", 100}}}};
        auto cfg = ExperimentConfig::from_json(j);
        CHECK(cfg.experiment == "verify-ml-renewal");
        CHECK(cfg.seed == 7);
        CHECK(cfg.params.at("samples") == 100);
        CHECK(ExperimentConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
        CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json{{"seed", 3}}),
                        ConfigInvalid);
    }
}

TEST_CASE("artifact reproducibility") {
    ExperimentConfig cfg;
    cfg.experiment = "verify-ml-renewal";
    cfg.seed = 4242;
    cfg.params["samples"] = 20000;
    cfg.out_dir = "/tmp/ctrw-repro-a";
    auto r1 = run_experiment(cfg);
    std::string csv_a = slurp("/tmp/ctrw-repro-a/verify-ml-renewal/ks.csv");
    cfg.out_dir = "/tmp/ctrw-repro-b";
    auto r2 = run_experiment(cfg);
    std::string csv_b = slurp("/tmp/ctrw-repro-b/verify-ml-renewal/ks.csv");
    CHECK(csv_a == csv_b);
    CHECK(!csv_a.empty());
    CHECK(r1.pass() == r2.pass());
    // a different seed changes the artifact bytes
    cfg.seed = 4243;
    cfg.out_dir = "/tmp/ctrw-repro-c";
    run_experiment(cfg);
    CHECK(slurp("/tmp/ctrw-repro-c/verify-ml-renewal/ks.csv") != csv_a);
    // manifest carries the config hash and pass flag
    auto manifest = nlohmann::json::parse(slurp("/tmp/ctrw-repro-a/verify-ml-renewal/manifest.json"));
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.at("pass").get<bool>());
    fs::remove_all("/tmp/ctrw-repro-a");
    fs::remove_all("/tmp/ctrw-repro-b");
    fs::remove_all("/tmp/ctrw-repro-c");
}

TEST_CASE("thread count does not change results") {
    ExperimentConfig cfg;
    cfg.experiment = "verify-time-change";
    cfg.seed = 99;
    cfg.params["scenarios"] = 50;
    cfg.params["queries"] = 50;
    cfg.threads = 1;
    cfg.out_dir = "/tmp/ctrw-thr-a";
    run_experiment(cfg);
    cfg.threads = 4;
    cfg.out_dir = "/tmp/ctrw-thr-b";
    run_experiment(cfg);
    CHECK(slurp("/tmp/ctrw-thr-a/verify-time-change/violations.csv") ==
          slurp("/tmp/ctrw-thr-b/verify-time-change/violations.csv"));
    fs::remove_all("/tmp/ctrw-thr-a");
    fs::remove_all("/tmp/ctrw-thr-b");
}
