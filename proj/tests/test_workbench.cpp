#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "fbcode/workbench.hpp"

using namespace fb;

namespace {

ExperimentConfig cfg_of(const char* text) { return parse_config(Json::parse(text)); }

const Json* find_check(const CommandResult& r, const std::string& name) {
    for (const auto& c : r.report["checks"])
        if (c["name"] == name) return &c;
    return nullptr;
}

std::filesystem::path scratch_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("fbwb_test_" + tag);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing applies presets, overrides and validation") {
    const auto ref = cfg_of(R"({"preset": "reference"})");
    CHECK(ref.n == 32);
    CHECK(ref.delta == 8);
    CHECK(ref.k_types == 4);
    CHECK(ref.ell == 5);
    CHECK(cfg_of(R"({"preset": "reference", "seed": 9, "n": 16, "k_types": 2})").n == 16);

    CHECK_THROWS_AS(cfg_of(R"({"bogus": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(cfg_of(R"({"preset": "moebius"})"), std::invalid_argument);
    // TRIVIAL: n must be divisible by 4 and 3n/4 by k.
    CHECK_THROWS_AS(cfg_of(R"({"n": 18})"), std::invalid_argument);
    CHECK_THROWS_AS(cfg_of(R"({"n": 16, "k_types": 5})"), std::invalid_argument);
    CHECK_THROWS_AS(cfg_of(R"({"preset": "toric", "twist": 3})"), std::invalid_argument);
    CHECK_THROWS_AS(cfg_of(R"({"n": "sixteen"})"), std::invalid_argument);
    CHECK_THROWS_AS(cfg_of(R"({"fix_mode": "fuzzy"})"), std::invalid_argument);
}

TEST_CASE("derived seeds depend only on master, stream and index") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    // DERIVED: reference splitmix64 output for input 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("toric preset builds the 18-qubit torus with two logical qubits") {
    const auto r = cmd_build(cfg_of(R"({"preset": "toric"})"));
    CHECK(r.exit_code() == 0);
    // TRIVIAL: 3x3 torus has 2*9 edges and k = 2.
    CHECK(r.report["code"]["n_qubits"] == 18);
    CHECK(r.report["code"]["k_logical"] == 2);
    CHECK(r.report["h1_iso"]["cond_iv"] == false);
    CHECK(r.report["h1_iso"]["iso_asserted"] == false);
    CHECK(r.files.count("css_hx.alist") == 1);

    const auto d = cmd_distance(cfg_of(R"({"preset": "toric"})"));
    CHECK(d.exit_code() == 0);
    CHECK(d.report["distance"]["d_x"] == 3);
    CHECK(d.report["distance"]["d_z"] == 3);
}

TEST_CASE("reference preset reports N = 1400 and k = n/4") {
    const auto r = cmd_build(cfg_of(R"({"preset": "reference"})"));
    REQUIRE(r.hard_failures == 0);
    // DERIVED: 32*25 horizontal plus 24*25 vertical 1-cells.
    CHECK(r.report["code"]["n_qubits"] == 1400);
    CHECK(r.report["code"]["k_logical"] == 8);
    CHECK(r.report["h1_iso"]["iso_asserted"] == true);
    const Json* relaxed = &r.report["relaxed_constants"];
    CHECK(relaxed->size() >= 3);
}

TEST_CASE("builds are byte-identical across reruns and thread counts") {
    auto a = cfg_of(R"({"seed": 5})");
    auto b = a;
    b.threads = 4;
    b.out = "elsewhere";
    const auto ra = cmd_build(a), rb = cmd_build(b);
    CHECK(ra.files == rb.files);
    const auto ba = cmd_bench_decoders(a), bb = cmd_bench_decoders(b);
    CHECK(ba.files == bb.files);
    CHECK(cmd_build(cfg_of(R"({"seed": 6})")).files != ra.files);
}

TEST_CASE("verify accepts stored artifacts and flags a tampered one") {
    const auto dir = scratch_dir("verify");
    auto c = cfg_of(R"({"preset": "toric"})");
    c.out = dir.string();
    write_outputs(c.out, run_command("build", c), 1);
    CHECK(cmd_verify(c).exit_code() == 0);
    CHECK(std::filesystem::exists(dir / "timing.json"));

    std::ofstream(dir / "css_hz.alist", std::ios::app) << "0\n";
    const auto r = cmd_verify(c);
    CHECK(r.exit_code() == 2);
    const Json* chk = find_check(r, "artifact css_hz.alist matches a fresh build");
    REQUIRE(chk != nullptr);
    CHECK((*chk)["pass"] == false);
    std::filesystem::remove_all(dir);
}

TEST_CASE("generation failure is a hard failure carrying the best certificate") {
    // The reference windows are out of reach at this size.
    const auto r = cmd_build(cfg_of(R"({"n": 16, "delta": 6, "k_types": 2, "profile": "reference", "base_attempts": 3})"));
    CHECK(r.exit_code() == 2);
    CHECK(r.report.contains("generation_failure"));
    CHECK(r.report["generation_failure"]["best_certificate"]["attempts"] == 3);
}

TEST_CASE("Monte Carlo harness: trivial pair is exact and the first pair matches delta/(2n)") {
    const auto r = cmd_twistcode_montecarlo(cfg_of(R"({"mc_pairs": 3, "mc_samples": 20000, "mc_words": 20})"));
    const Json* zero = find_check(r, "(y, z) = (0, 0) is never violated");
    REQUIRE(zero != nullptr);
    CHECK((*zero)["pass"] == true);
    // PAPER: |y| = 1, |z| = 0 is violated with probability about delta/(2n).
    const double predicted = r.report["pairs"]["first"]["predicted"];
    CHECK(predicted == doctest::Approx(6.0 / 32.0).epsilon(0.05));
    CHECK(r.report["twist_words"]["trials"] == 20);
}

TEST_CASE("bench curves carry the experimental flag on Z rows only") {
    const auto r = cmd_bench_decoders(cfg_of(R"({"decoder_trials": 10, "erasure_trials": 30, "max_error_weight": 2})"));
    const std::string csv = r.files.at("bench_decoders.csv");
    CHECK(csv.find("x_exhaustive,1,252,252,1,,0,") != std::string::npos);
    for (const auto& c : r.report["curves"]) CHECK(c.value("experimental", false) == (c["kind"] == "z"));
    CHECK(r.report["erasure"]["successes"] == 30);
}

TEST_CASE("weight-reduce on the reference preset verifies and preserves k") {
    const auto r = cmd_weight_reduce(cfg_of(R"({"preset": "reference", "homotopy_trials": 20})"));
    CHECK(r.exit_code() == 0);
    CHECK(r.report["bundle"]["k_before"] == r.report["bundle"]["k_after"]);
    CHECK(r.report["bundle"]["x_stabilizers_after"]["max"] <= 6);
    CHECK(r.report["bundle"]["z_stabilizers_after"]["max"] <= 6);
    CHECK(r.files.count("bundle_equiv/manifest.txt") == 1);
    CHECK(r.files.count("classical_equiv/f_1.alist") == 1);
}
