// Experiment driver. Exit status: 0 all hard checks passed, 1 soft deviations only, 2 hard failure.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fbcode/workbench.hpp"

int main(int argc, char** argv) {
    CLI::App app{"twisted fiber bundle code workbench"};
    app.require_subcommand(1, 1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    app.add_option("--config", config_path, "JSON experiment config; defaults to the custom preset");
    app.add_option("--seed", seed, "master seed, overrides the config");
    app.add_option("--out", out, "output directory, overrides the config");
    app.add_option("--threads", threads, "worker threads for independent trials")->check(CLI::PositiveNumber);

    for (const char* name : {"build", "distance", "bench-decoders", "twistcode-mc", "weight-reduce", "verify"})
        app.add_subcommand(name);
    app.get_subcommand("build")->description("generate, certify and write the instance");
    app.get_subcommand("distance")->description("exact distances or search bounds");
    app.get_subcommand("bench-decoders")->description("X, Z and erasure success curves");
    app.get_subcommand("twistcode-mc")->description("check-violation Monte Carlo and twist-code word ratios");
    app.get_subcommand("weight-reduce")->description("weight reduction with homotopy verification");
    app.get_subcommand("verify")->description("compare stored build artifacts with a fresh build");

    CLI11_PARSE(app, argc, argv);

    fb::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? fb::parse_config(fb::Json::object()) : fb::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out) cfg.out = *out;
        if (threads) cfg.threads = *threads;
        fb::validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const fb::CommandResult r = fb::run_command(command, cfg);
        fb::write_outputs(cfg.out, r, cfg.threads);
        for (const auto& chk : r.report["checks"])
            std::cout << (chk["pass"].get<bool>() ? "ok   " : chk["level"] == "hard" ? "FAIL " : "warn ")
                      << chk["name"].get<std::string>() << '\n';
        std::cout << command << ": " << r.hard_failures << " hard failures, " << r.soft_deviations
                  << " soft deviations, " << r.seconds << " s\n";
        return r.exit_code();
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return 2;
    }
}
