#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "fbcode/base_code.hpp"
#include "fbcode/gf2.hpp"

namespace fb {

/// Directed circulant graph on ell vertices, one shift per type.
/// Invariants: every shift lies in [1, ell), kappa lies in [0, 1].
struct TwistGraph {
    std::size_t ell = 0;
    std::size_t k_types = 0;
    std::vector<std::size_t> shifts;
    double kappa = 1.0;

    /// Twist carried by tails of a type-t check, as an element of Z_{ell^2}.
    std::size_t phi(std::size_t type) const { return shifts.at(type) * ell; }
};

/// Per check, twists aligned with PartitionedBaseCode::adj of that check.
struct TwistAssignment {
    std::size_t modulus = 0;
    std::vector<std::vector<std::size_t>> per_check;
};

class ExpanderFailure : public std::runtime_error {
public:
    ExpanderFailure(const std::string& what, double best_kappa, std::size_t attempts)
        : std::runtime_error(what), best_kappa(best_kappa), attempts(attempts) {}
    double best_kappa;
    std::size_t attempts;
};

std::size_t default_k_types(std::size_t ell);

/// Circulant closed form: max over j >= 1 of |(1/k) sum_t cos(2 pi j s_t / ell)|.
double kappa_of(const TwistGraph& g);
/// The full spectrum lambda_0..lambda_{ell-1} of the normalized undirected adjacency.
std::vector<double> circulant_spectrum(const TwistGraph& g);

TwistGraph gen_twist_graph(std::size_t ell, std::size_t k_types, std::uint64_t seed);

struct CertifiedTwistGraph {
    TwistGraph graph;
    std::size_t attempts = 0;
    double kappa_target = 0;
};

CertifiedTwistGraph certify_expander(std::size_t ell, std::size_t k_types, double kappa_target,
                                     std::uint64_t seed, std::size_t max_attempts = 100);

TwistAssignment assign_twists(const PartitionedBaseCode& b, const TwistGraph& g);

/// A check with the given tails and heads is violated by (y, z) iff
/// sum over tails of y plus sum over heads of z is odd.
bool check_violated(const std::vector<std::size_t>& tails, const std::vector<std::size_t>& heads,
                    const BitVec& y, const BitVec& z);

/// w has ell blocks of n bits; block u is the word at vertex u.
/// Type-t edges run u -> u + s_t and carry every check of type t.
std::size_t twist_code_violations(const PartitionedBaseCode& b, const TwistGraph& g, const BitVec& w);

/// Closed-form violation probability of a freshly sampled check at density p = delta/n.
double violation_probability(std::size_t n, double delta, const BitVec& y, const BitVec& z);

struct ViolationEstimate {
    std::size_t samples = 0;
    std::size_t violated = 0;
    double empirical = 0;
    double predicted = 0;
    double std_error = 0;
    double z_score = 0;
};

ViolationEstimate violation_monte_carlo(std::size_t n, double delta, const BitVec& y, const BitVec& z,
                                        std::size_t samples, std::uint64_t seed);

/// "ell k s_1 ... s_k kappa"
void write_twist_graph(std::ostream& os, const TwistGraph& g);
TwistGraph read_twist_graph(std::istream& is);

}  // namespace fb
