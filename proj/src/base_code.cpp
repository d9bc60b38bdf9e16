#include "fbcode/base_code.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace fb {

Gf2Matrix PartitionedBaseCode::parity_check() const { return Gf2Matrix::from_rows(m, n, adj); }

ChainComplex PartitionedBaseCode::complex() const { return ChainComplex({m, n}, {parity_check()}); }

std::vector<std::size_t> PartitionedBaseCode::variable_degrees() const {
    std::vector<std::size_t> deg(n, 0);
    for (const auto& row : adj)
        for (auto v : row) ++deg[v];
    return deg;
}

CertifyParams CertifyParams::reference() { return CertifyParams{}; }

CertifyParams CertifyParams::desk() {
    CertifyParams p;
    p.check_window = {0.25, 1.75};
    p.var_window = {0.25, 1.5};
    p.expansion_threshold = 0.25;
    p.sample_set_bound = 3;
    p.expansion_samples = 500;
    p.profile = "desk";
    return p;
}

int BaseCertificate::score() const {
    return static_cast<int>(degree_ok) + static_cast<int>(full_rank) + static_cast<int>(expansion_ok) +
           static_cast<int>(distance_ok);
}

CheckSample sample_check(std::size_t n, double delta, std::mt19937_64& rng) {
    std::bernoulli_distribution join(delta / static_cast<double>(n));
    std::bernoulli_distribution coin(0.5);
    CheckSample s;
    while (s.neighborhood.empty())
        for (std::size_t v = 0; v < n; ++v)
            if (join(rng)) s.neighborhood.push_back(v);
    for (auto v : s.neighborhood) (coin(rng) ? s.heads : s.tails).push_back(v);
    return s;
}

PartitionedBaseCode sample_base(std::size_t n, double delta, std::size_t k_types, std::mt19937_64& rng) {
    if (n % 4 != 0) throw std::invalid_argument("gen_base: n must be divisible by 4");
    const std::size_t m = 3 * n / 4;
    if (k_types == 0 || m % k_types != 0) throw std::invalid_argument("gen_base: 3n/4 must be divisible by k");
    if (delta < 2) throw std::invalid_argument("gen_base: delta must be at least 2");
    if (delta > static_cast<double>(n)) throw std::invalid_argument("gen_base: delta exceeds n");
    PartitionedBaseCode b;
    b.n = n;
    b.m = m;
    b.delta = delta;
    b.k_types = k_types;
    const std::size_t per_type = m / k_types;
    for (std::size_t a = 0; a < m; ++a) {
        auto s = sample_check(n, delta, rng);
        b.adj.push_back(std::move(s.neighborhood));
        b.heads.push_back(std::move(s.heads));
        b.tails.push_back(std::move(s.tails));
        b.type_of.push_back(a / per_type);
    }
    return b;
}

namespace {

void check_expansion(const PartitionedBaseCode& b, const CertifyParams& p, std::uint64_t seed,
                     BaseCertificate& cert) {
    const double delta = b.delta;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    std::vector<int> mark(b.n, -1);
    int stamp = 0;
    auto ratio = [&](const std::vector<std::size_t>& set) {
        ++stamp;
        std::size_t nb = 0;
        for (auto a : set)
            for (auto v : b.adj[a])
                if (mark[v] != stamp) {
                    mark[v] = stamp;
                    ++nb;
                }
        ++tested;
        return static_cast<double>(nb) / (delta * static_cast<double>(set.size()));
    };
    const std::size_t exh = std::min<std::size_t>(p.exhaustive_set_size, 2);
    for (std::size_t a = 0; a < b.m && exh >= 1; ++a) worst = std::min(worst, ratio({a}));
    if (exh >= 2)
        for (std::size_t a = 0; a < b.m; ++a)
            for (std::size_t c = a + 1; c < b.m; ++c) worst = std::min(worst, ratio({a, c}));

    const double bound = p.sample_set_bound >= 0 ? p.sample_set_bound
                                                 : static_cast<double>(b.m) / (1e5 * delta);
    const auto max_size = static_cast<std::size_t>(std::floor(std::min(bound, static_cast<double>(b.m))));
    cert.sampled_set_bound = max_size;
    if (max_size > exh) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_int_distribution<std::size_t> size_dist(exh + 1, max_size);
        std::vector<std::size_t> all(b.m);
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t t = 0; t < p.expansion_samples; ++t) {
            const std::size_t s = size_dist(rng);
            std::vector<std::size_t> pick;
            std::sample(all.begin(), all.end(), std::back_inserter(pick), s, rng);
            worst = std::min(worst, ratio(pick));
        }
    }
    cert.worst_expansion = worst;
    cert.expansion_sets_tested = tested;
    cert.expansion_ok = worst >= p.expansion_threshold;
}

}  // namespace

BaseCertificate certify(const PartitionedBaseCode& b, const CertifyParams& p, std::uint64_t seed) {
    BaseCertificate cert;
    cert.profile = p.profile;
    cert.attempts = 1;

    std::size_t cmin = b.n, cmax = 0;
    for (const auto& row : b.adj) {
        cmin = std::min(cmin, row.size());
        cmax = std::max(cmax, row.size());
    }
    const auto vdeg = b.variable_degrees();
    const auto [vmin_it, vmax_it] = std::minmax_element(vdeg.begin(), vdeg.end());
    cert.check_deg_min = cmin;
    cert.check_deg_max = cmax;
    cert.var_deg_min = *vmin_it;
    cert.var_deg_max = *vmax_it;
    auto inside = [&](std::size_t d, const DegreeWindow& w) {
        const double x = static_cast<double>(d);
        return x >= w.lo * b.delta && x <= w.hi * b.delta;
    };
    cert.degree_ok = inside(cmin, p.check_window) && inside(cmax, p.check_window) &&
                     inside(cert.var_deg_min, p.var_window) && inside(cert.var_deg_max, p.var_window);

    const Gf2Matrix h = b.parity_check();
    cert.rank = rank(h);
    cert.full_rank = cert.rank == b.m;

    check_expansion(b, p, seed, cert);

    // Codewords are the 1-cycles of the base complex.
    const ChainComplex cx = b.complex();
    const std::size_t kdim = b.n - cert.rank;
    if (kdim == 0) {
        cert.min_distance = 0;
        cert.distance_exact = true;
        cert.distance_ok = false;
    } else if (kdim <= p.distance_kernel_budget) {
        ExactSearchOptions opt;
        opt.cell_budget = 0;
        opt.kernel_budget = p.distance_kernel_budget;
        cert.min_distance = *coset_min_weight_exact(cx, 1, Mode::Homology, opt);
        cert.distance_exact = true;
    } else {
        CssCode classical{b.n, h, Gf2Matrix(0, b.n), kdim};
        cert.min_distance = *distance_upper_random_search(classical, Side::Z, p.distance_search_trials, seed);
        cert.distance_exact = false;
    }
    cert.distance_ok = kdim > 0 && static_cast<double>(cert.min_distance) >= p.min_distance_fraction * b.n;
    return cert;
}

GeneratedBase gen_base(std::size_t n, double delta, std::size_t k_types, std::uint64_t seed,
                       std::size_t max_attempts, const CertifyParams& params) {
    if (max_attempts == 0) throw std::invalid_argument("gen_base: max_attempts must be positive");
    std::mt19937_64 rng(seed);
    std::optional<BaseCertificate> best;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        PartitionedBaseCode b = sample_base(n, delta, k_types, rng);
        b.seed = seed;
        BaseCertificate cert = certify(b, params, seed + attempt);
        cert.attempts = attempt;
        if (cert.passed()) return {std::move(b), cert};
        if (!best || cert.score() > best->score() ||
            (cert.score() == best->score() && cert.worst_expansion > best->worst_expansion))
            best = cert;
    }
    best->attempts = max_attempts;
    throw GenerationFailure("gen_base: no certified instance within " + std::to_string(max_attempts) + " attempts",
                            *best);
}

CouniqueResult counique_neighbors(const PartitionedBaseCode& b, const std::vector<std::size_t>& checks) {
    if (checks.empty()) throw std::invalid_argument("counique_neighbors: empty check set");
    std::vector<std::size_t> hits(b.n, 0);
    for (auto a : checks)
        for (auto v : b.adj.at(a)) ++hits[v];
    CouniqueResult r;
    for (std::size_t v = 0; v < b.n; ++v)
        if (hits[v] == 1) r.counique.push_back(v);
    std::vector<std::size_t> order = checks;
    std::sort(order.begin(), order.end());
    for (auto a : order) {
        const auto& nb = b.adj[a];
        const auto uniq = static_cast<std::size_t>(
            std::count_if(nb.begin(), nb.end(), [&](std::size_t v) { return hits[v] == 1; }));
        if (!nb.empty() && static_cast<double>(uniq) > 0.8 * static_cast<double>(nb.size())) {
            r.owner = a;
            break;
        }
    }
    return r;
}

void write_sidecar(std::ostream& os, const PartitionedBaseCode& b,
                   const std::vector<std::vector<std::size_t>>* twists) {
    auto list = [&](const std::vector<std::size_t>& l) {
        for (std::size_t i = 0; i < l.size(); ++i) os << (i ? " " : "") << l[i];
    };
    for (std::size_t a = 0; a < b.m; ++a) {
        os << b.type_of[a] << "; ";
        list(b.heads[a]);
        os << "; ";
        list(b.tails[a]);
        if (twists) {
            os << "; ";
            list((*twists)[a]);
        }
        os << '\n';
    }
}

}  // namespace fb
