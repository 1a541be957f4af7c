// ctrw-lab: run a named verification experiment and emit CSV artifacts plus a
// manifest. Exit status is 0 iff every configured check passed.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ctrw/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Heavy-tailed CTRW simulation and verification toolkit"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = "out";
    uint64_t seed = 987654321;
    int threads = 0;
    bool seed_set = false, out_set = false;

    std::vector<CLI::App*> subs;
    for (const auto& name : ctrw::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--out", out_dir, "output directory")->each([&](const std::string&) {
            out_set = true;
        });
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        subs.push_back(sub);
    }
    bool list = false;
    app.add_flag("--list", list, "list experiments");

    CLI11_PARSE(app, argc, argv);

    if (list || app.get_subcommands().empty()) {
        for (const auto& name : ctrw::experiment_names()) std::puts(name.c_str());
        return list ? 0 : 1;
    }

    try {
        ctrw::ExperimentConfig config;
        config.experiment = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ctrw::ConfigInvalid("cannot open config file " + config_path);
            nlohmann::json j;
            in >> j;
            if (!j.contains("experiment")) j["experiment"] = config.experiment;
            config = ctrw::ExperimentConfig::from_json(j);
            if (config.experiment != app.get_subcommands().front()->get_name())
                throw ctrw::ConfigInvalid("config experiment does not match the subcommand");
        }
        if (const char* env_seed = std::getenv("CTRW_LAB_SEED"); env_seed && !seed_set)
            config.seed = std::strtoull(env_seed, nullptr, 10);
        if (seed_set) config.seed = seed;
        if (out_set) config.out_dir = out_dir;
        if (threads != 0) config.threads = threads;

        ctrw::ExperimentResult result = ctrw::run_experiment(config);
        for (const auto& r : result.reports) {
            std::printf("[%s] %-42s value=%.6g ref=%.6g%s%s\n", r.pass ? "PASS" : "FAIL",
                        r.name.c_str(), r.value, r.null_reference,
                        r.p_value >= 0.0 ? (" p=" + std::to_string(r.p_value)).c_str() : "",
                        r.detail.empty() ? "" : ("  (" + r.detail + ")").c_str());
        }
        return result.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
