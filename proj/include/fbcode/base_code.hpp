#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbcode/chain_complex.hpp"
#include "fbcode/gf2.hpp"

namespace fb {

/// Random classical code viewed as a 1-complex: variables are 1-cells, checks are 0-cells.
/// Invariants: m == 3n/4, m % k_types == 0, heads[a] and tails[a] partition adj[a].
struct PartitionedBaseCode {
    std::size_t n = 0;
    std::size_t m = 0;
    double delta = 0;
    std::size_t k_types = 1;
    std::vector<std::vector<std::size_t>> adj;  // per check, sorted variables
    std::vector<std::size_t> type_of;
    std::vector<std::vector<std::size_t>> heads, tails;
    std::uint64_t seed = 0;

    Gf2Matrix parity_check() const;  // m x n, equals the boundary of the 1-complex
    ChainComplex complex() const;
    std::vector<std::size_t> variable_degrees() const;
    std::size_t checks_per_type() const { return m / k_types; }
};

struct DegreeWindow {
    double lo = 0, hi = 0;  // multiples of delta
};

struct CertifyParams {
    DegreeWindow check_window{0.99, 1.01};
    DegreeWindow var_window{0.74, 0.76};
    double expansion_threshold = 0.9;
    std::size_t exhaustive_set_size = 2;
    double sample_set_bound = -1;  // negative: m / (1e5 * delta)
    std::size_t expansion_samples = 2000;
    double min_distance_fraction = 0.2;
    std::size_t distance_kernel_budget = 22;
    std::size_t distance_search_trials = 200;
    double beta = 1.0;
    std::string profile = "reference";

    static CertifyParams reference();
    static CertifyParams desk();
};

struct BaseCertificate {
    bool degree_ok = false;
    std::size_t check_deg_min = 0, check_deg_max = 0, var_deg_min = 0, var_deg_max = 0;
    bool full_rank = false;
    std::size_t rank = 0;
    bool expansion_ok = false;
    double worst_expansion = 0;
    std::size_t expansion_sets_tested = 0;
    std::size_t sampled_set_bound = 0;
    std::size_t min_distance = 0;
    bool distance_exact = false;
    bool distance_ok = false;
    std::size_t attempts = 0;
    std::string profile;

    bool passed() const { return degree_ok && full_rank && expansion_ok && distance_ok; }
    int score() const;
};

class GenerationFailure : public std::runtime_error {
public:
    GenerationFailure(const std::string& what, BaseCertificate best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const BaseCertificate& best() const { return best_; }

private:
    BaseCertificate best_;
};

struct CheckSample {
    std::vector<std::size_t> neighborhood, heads, tails;
};

/// One check: each variable joins with probability delta/n, resampled while empty,
/// then split into heads and tails by fair coins.
CheckSample sample_check(std::size_t n, double delta, std::mt19937_64& rng);

/// One unconditioned draw from the ensemble.
PartitionedBaseCode sample_base(std::size_t n, double delta, std::size_t k_types, std::mt19937_64& rng);

BaseCertificate certify(const PartitionedBaseCode& b, const CertifyParams& params, std::uint64_t seed);

struct GeneratedBase {
    PartitionedBaseCode code;
    BaseCertificate cert;
};

/// Regenerates until certify passes; throws GenerationFailure carrying the best certificate.
GeneratedBase gen_base(std::size_t n, double delta, std::size_t k_types, std::uint64_t seed,
                       std::size_t max_attempts = 200, const CertifyParams& params = CertifyParams::reference());

struct CouniqueResult {
    std::vector<std::size_t> counique;
    std::optional<std::size_t> owner;
};

CouniqueResult counique_neighbors(const PartitionedBaseCode& b, const std::vector<std::size_t>& checks);

/// Per check "type; heads; tails", with an optional fourth field of per-neighbor twists.
void write_sidecar(std::ostream& os, const PartitionedBaseCode& b,
                   const std::vector<std::vector<std::size_t>>* twists = nullptr);

}  // namespace fb
