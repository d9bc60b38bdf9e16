#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fbcode/base_code.hpp"
#include "fbcode/bundle.hpp"
#include "fbcode/decoders.hpp"
#include "fbcode/twist.hpp"

namespace fb {

using Json = nlohmann::ordered_json;

/// Parsed and validated experiment settings. Code presets (custom, reference) build the twisted bundle
/// over a generated classical code; torus presets (toric, twisted-torus) build a circle bundle.
struct ExperimentConfig {
    std::string preset = "custom";

    // code presets
    std::size_t n = 16;
    double delta = 6;
    std::size_t k_types = 2;
    std::size_t ell = 3;
    double kappa_target = 0;  // <= 0: uncertified twist graph
    std::string profile = "desk";
    std::optional<DegreeWindow> check_window, var_window;
    std::optional<double> expansion_threshold;
    std::size_t base_attempts = 200;
    std::size_t twist_attempts = 100;

    // torus presets
    std::size_t base_length = 3;
    std::size_t fiber_length = 3;
    std::size_t twist = 0;
    std::vector<std::size_t> sweep_base{3, 4, 5};
    std::vector<std::size_t> sweep_fiber{3, 4, 5};

    // decoders
    std::string fix_mode = "exact";
    double fix_ratio = 0.8;
    long r_max = -1;
    std::size_t erasure_bound = 6;

    // trial counts
    std::size_t decoder_trials = 200;
    std::size_t erasure_trials = 500;
    std::size_t max_error_weight = 3;
    std::size_t mc_pairs = 20;
    std::size_t mc_samples = 100000;
    std::size_t mc_words = 200;
    std::size_t mc_word_weight = 4;
    std::size_t distance_trials = 100;
    std::size_t homotopy_trials = 100;

    std::uint64_t seed = 1;
    std::string out = "out";
    std::size_t threads = 1;

    bool code_preset() const { return preset == "custom" || preset == "reference"; }
    CertifyParams certify_params() const;
    /// The echo written into reports; omits out and threads so reports do not depend on them.
    Json echo() const;
};

/// Throws invalid_argument on unknown keys, wrong types, or violated divisibility constraints.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& c);

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of trial `index` in harness stream `stream`; independent of thread scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

struct Instance {
    Bundle bundle;
    std::optional<GeneratedBase> base;  // code presets only
    std::optional<TwistGraph> graph;
    std::size_t twist_attempts = 0;
    std::uint64_t base_seed = 0, twist_seed = 0;

    bool certified() const { return base.has_value() && base->cert.passed(); }
};

/// Deterministic in the config. Throws GenerationFailure or ExpanderFailure.
Instance build_instance(const ExperimentConfig& c);

struct CommandResult {
    std::string command;
    Json report;
    std::map<std::string, std::string> files;  // relative path -> contents, report included
    std::size_t hard_failures = 0, soft_deviations = 0;
    double seconds = 0;

    int exit_code() const { return hard_failures ? 2 : soft_deviations ? 1 : 0; }
};

CommandResult cmd_build(const ExperimentConfig& c);
CommandResult cmd_distance(const ExperimentConfig& c);
CommandResult cmd_bench_decoders(const ExperimentConfig& c);
CommandResult cmd_twistcode_montecarlo(const ExperimentConfig& c);
CommandResult cmd_weight_reduce(const ExperimentConfig& c);
/// Rebuilds the build artifacts and compares them byte for byte with those under c.out.
CommandResult cmd_verify(const ExperimentConfig& c);

/// name in {build, distance, bench-decoders, twistcode-mc, weight-reduce, verify}.
CommandResult run_command(const std::string& name, const ExperimentConfig& c);

/// Writes result.files under dir and records wall time in dir/timing.json, which is kept out of
/// the deterministic artifacts.
void write_outputs(const std::string& dir, const CommandResult& r, std::size_t threads);

}  // namespace fb
