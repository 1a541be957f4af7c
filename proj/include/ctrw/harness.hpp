#pragma once

// Experiment orchestration: named, seeded, configured experiments producing
// CSV artifacts, a JSON manifest, and pass/fail StatReports. Every
// paper-level verification run is one named experiment; the CLI and the
// acceptance suite both go through run_experiment.

#include <functional>
#include <string>
#include <vector>

#include "ctrw/coupling.hpp"
#include "ctrw/ctrw_process.hpp"
#include "ctrw/paths.hpp"
#include "ctrw/stats.hpp"
#include "ctrw/symbol.hpp"

#include "json.hpp"

namespace ctrw {

struct ExperimentConfig {
    std::string experiment;
    uint64_t seed = 987654321;
    std::string out_dir = "out";
    int threads = 0; // 0: hardware concurrency
    nlohmann::json params = nlohmann::json::object();

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ExperimentResult {
    std::vector<StatReport> reports;
    nlohmann::json artifacts = nlohmann::json::object(); // summary values
    bool pass() const;
};

std::vector<std::string> experiment_names();
ExperimentResult run_experiment(const ExperimentConfig& config);

// --- shared builders used by experiments and the acceptance suite ---

// Tail of the section-4.1 Pareto law: t^{-alpha} / Gamma(1-alpha) above
// Gamma(1-alpha)^{-1/alpha}.
TailFunction pareto_tail(double alpha);

// Tail of Phi_{psi_m}(W 1_{W<=m}) for the Pareto law, where psi_m is the
// drift-1 + stable/mu_1^m truncation symbol. Cached on a log grid for speed;
// exact erf-mixture evaluation for alpha = 1/2 underneath. Returns the tail,
// the symbol, and mu_1^m.
struct TruncationImage {
    TailFunction tail;
    BernsteinSymbol psi_m;
    double mu1 = 0.0;
};
TruncationImage make_truncation_image(double alpha, double m, double grid_hi = 1e15);

// The coupled Pareto / psi_m-image pair discretized to j_max unit intervals.
struct ParetoCouplingPair {
    DiscretizedTail f1; // psi_m image (approximant, Y side)
    DiscretizedTail f2; // Pareto (original, X side)
    TruncationImage image;
};
ParetoCouplingPair make_pareto_coupling_pair(double alpha, double m, size_t j_max);

// Deterministic replica scheduling: body(i) for i in [0, count), spread over
// the requested threads; results must be written by index.
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body);

// Simulate the inverse-subordinator marginal E(t) = inf{s : D_s > t} for a
// drift + stable symbol by exact grid increments; step is the grid width.
double sample_inverse_subordinator_marginal(const BernsteinSymbol& psi, double t,
                                            double step, RngStream& rng);

// Full inverse path xi = generalized inverse of a simulated skeleton of psi
// on [0, s_max], with exact stable/compound increments on the grid.
TimeChange simulate_inverse_time_change(const BernsteinSymbol& psi, double target_level,
                                        double step, RngStream& rng);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Plot-ready path export: one row per segment start (t, value...).
void write_step_path_csv(const std::string& path, const StepPath& p);

} // namespace ctrw
