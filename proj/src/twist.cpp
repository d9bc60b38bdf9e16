#include "fbcode/twist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

namespace fb {

std::size_t default_k_types(std::size_t ell) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < ell) ++bits;
    return std::max<std::size_t>(bits, 1) * 4;
}

std::vector<double> circulant_spectrum(const TwistGraph& g) {
    if (g.shifts.empty()) throw std::invalid_argument("kappa_of: no types");
    std::vector<double> lam(g.ell, 0.0);
    const double ell = static_cast<double>(g.ell);
    for (std::size_t j = 0; j < g.ell; ++j) {
        double s = 0;
        for (auto sh : g.shifts) {
            // Reduce j*s mod ell first so the cosine argument stays small and exact.
            const auto r = static_cast<double>((j * sh) % g.ell);
            s += std::cos(2.0 * std::numbers::pi * r / ell);
        }
        lam[j] = s / static_cast<double>(g.shifts.size());
    }
    return lam;
}

double kappa_of(const TwistGraph& g) {
    const auto lam = circulant_spectrum(g);
    double k = 0;
    for (std::size_t j = 1; j < lam.size(); ++j) k = std::max(k, std::abs(lam[j]));
    return std::min(k, 1.0);
}

namespace {

TwistGraph draw(std::size_t ell, std::size_t k_types, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> shift(1, ell - 1);
    TwistGraph g;
    g.ell = ell;
    g.k_types = k_types;
    for (std::size_t t = 0; t < k_types; ++t) g.shifts.push_back(shift(rng));
    g.kappa = kappa_of(g);
    return g;
}

void check_args(std::size_t ell, std::size_t k_types) {
    if (ell < 2) throw std::invalid_argument("twist graph: ell must be at least 2");
    if (k_types < 1) throw std::invalid_argument("twist graph: k must be at least 1");
}

}  // namespace

TwistGraph gen_twist_graph(std::size_t ell, std::size_t k_types, std::uint64_t seed) {
    check_args(ell, k_types);
    std::mt19937_64 rng(seed);
    return draw(ell, k_types, rng);
}

CertifiedTwistGraph certify_expander(std::size_t ell, std::size_t k_types, double kappa_target,
                                     std::uint64_t seed, std::size_t max_attempts) {
    check_args(ell, k_types);
    if (!(kappa_target > 0 && kappa_target <= 1)) throw std::invalid_argument("certify_expander: target outside (0,1]");
    std::mt19937_64 rng(seed);
    double best = 2;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        TwistGraph g = draw(ell, k_types, rng);
        if (g.kappa <= kappa_target) return {std::move(g), attempt, kappa_target};
        best = std::min(best, g.kappa);
    }
    throw ExpanderFailure("certify_expander: kappa target not reached", best, max_attempts);
}

TwistAssignment assign_twists(const PartitionedBaseCode& b, const TwistGraph& g) {
    if (g.k_types != b.k_types) throw std::invalid_argument("assign_twists: type count mismatch");
    TwistAssignment out;
    out.modulus = g.ell * g.ell;
    out.per_check.resize(b.m);
    for (std::size_t a = 0; a < b.m; ++a) {
        const std::size_t phi = g.phi(b.type_of[a]);
        for (auto v : b.adj[a])
            out.per_check[a].push_back(std::binary_search(b.tails[a].begin(), b.tails[a].end(), v) ? phi : 0);
    }
    return out;
}

bool check_violated(const std::vector<std::size_t>& tails, const std::vector<std::size_t>& heads,
                    const BitVec& y, const BitVec& z) {
    bool parity = false;
    for (auto i : tails) parity ^= y.get(i);
    for (auto j : heads) parity ^= z.get(j);
    return parity;
}

std::size_t twist_code_violations(const PartitionedBaseCode& b, const TwistGraph& g, const BitVec& w) {
    if (g.k_types != b.k_types) throw std::invalid_argument("twist_code_violations: type count mismatch");
    if (w.size() != g.ell * b.n) throw std::invalid_argument("twist_code_violations: word length");
    std::vector<BitVec> block(g.ell, BitVec(b.n));
    for (auto i : w.support()) block[i / b.n].set(i % b.n);
    std::size_t violated = 0;
    for (std::size_t u = 0; u < g.ell; ++u)
        for (std::size_t a = 0; a < b.m; ++a) {
            const std::size_t v = (u + g.shifts[b.type_of[a]]) % g.ell;
            violated += check_violated(b.tails[a], b.heads[a], block[u], block[v]);
        }
    return violated;
}

double violation_probability(std::size_t n, double delta, const BitVec& y, const BitVec& z) {
    if (y.size() != n || z.size() != n) throw std::invalid_argument("violation_probability: word length");
    const double p = delta / static_cast<double>(n);
    const double sym = static_cast<double>((y ^ z).popcount());
    std::size_t both = 0;
    for (std::size_t w = 0; w < y.words().size(); ++w)
        both += static_cast<std::size_t>(std::popcount(y.words()[w] & z.words()[w]));
    return 0.5 - 0.5 * std::pow(1 - p, sym) * std::pow(1 - 2 * p, static_cast<double>(both));
}

ViolationEstimate violation_monte_carlo(std::size_t n, double delta, const BitVec& y, const BitVec& z,
                                        std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("violation_monte_carlo: samples must be positive");
    ViolationEstimate est;
    est.samples = samples;
    est.predicted = violation_probability(n, delta, y, z);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        const CheckSample c = sample_check(n, delta, rng);
        est.violated += check_violated(c.tails, c.heads, y, z);
    }
    const double s = static_cast<double>(samples);
    est.empirical = static_cast<double>(est.violated) / s;
    est.std_error = std::sqrt(est.predicted * (1 - est.predicted) / s);
    est.z_score = est.std_error > 0 ? (est.empirical - est.predicted) / est.std_error
                                    : (est.empirical == est.predicted ? 0.0 : INFINITY);
    return est;
}

void write_twist_graph(std::ostream& os, const TwistGraph& g) {
    os << g.ell << ' ' << g.k_types;
    for (auto s : g.shifts) os << ' ' << s;
    os << ' ' << std::setprecision(17) << g.kappa << '\n';
}

TwistGraph read_twist_graph(std::istream& is) {
    TwistGraph g;
    if (!(is >> g.ell >> g.k_types)) throw std::runtime_error("twist graph: bad header");
    g.shifts.resize(g.k_types);
    for (auto& s : g.shifts)
        if (!(is >> s) || s == 0 || s >= g.ell) throw std::runtime_error("twist graph: bad shift");
    if (!(is >> g.kappa)) throw std::runtime_error("twist graph: missing kappa");
    return g;
}

}  // namespace fb
