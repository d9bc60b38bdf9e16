#include "fbcode/chain_complex.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace fb {

ChainComplex::ChainComplex(std::vector<std::size_t> d, std::vector<Gf2Matrix> b)
    : dims(std::move(d)), bd(std::move(b)) {
    if (dims.empty()) throw std::invalid_argument("ChainComplex: no degrees");
    if (bd.size() + 1 != dims.size()) throw std::invalid_argument("ChainComplex: boundary count");
    for (std::size_t j = 1; j < dims.size(); ++j)
        if (bd[j - 1].rows() != dims[j - 1] || bd[j - 1].cols() != dims[j])
            throw std::invalid_argument("ChainComplex: boundary shape at degree " + std::to_string(j));
}

Gf2Matrix ChainComplex::boundary(int j) const {
    if (j >= 1 && j <= top()) return bd[static_cast<std::size_t>(j - 1)];
    return Gf2Matrix(dim(j - 1), dim(j));
}

bool validate(const ChainComplex& c) {
    for (int j = 1; j < c.top(); ++j)
        if (!(c.boundary(j) * c.boundary(j + 1)).is_zero()) return false;
    return true;
}

ChainComplex dual_complex(const ChainComplex& c) {
    const int top = c.top();
    std::vector<std::size_t> dims(c.dims.rbegin(), c.dims.rend());
    std::vector<Gf2Matrix> bd;
    for (int d = 1; d <= top; ++d) bd.push_back(c.boundary(top - d + 1).transpose());
    ChainComplex out(std::move(dims), std::move(bd));
    if (!c.labels.empty()) out.labels.assign(c.labels.rbegin(), c.labels.rend());
    return out;
}

std::size_t betti(const ChainComplex& c, int j) {
    if (j < 0 || j > c.top()) throw std::out_of_range("betti: degree");
    return c.dim(j) - rank(c.boundary(j)) - rank(c.boundary(j + 1));
}

namespace {

std::vector<BitVec> columns(const Gf2Matrix& m) {
    std::vector<BitVec> cols(m.cols(), BitVec(m.rows()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (auto c : m.row_support(r)) cols[c].set(r);
    return cols;
}

// Cycle space = ker(cycle_map); trivial classes = column space of trivial_map.
struct ClassProblem {
    Gf2Matrix cycle_map;
    Gf2Matrix trivial_map;
};

ClassProblem class_problem(const ChainComplex& c, int j, Mode mode) {
    if (mode == Mode::Homology) return {c.boundary(j), c.boundary(j + 1)};
    return {c.boundary(j + 1).transpose(), c.boundary(j).transpose()};
}

std::vector<BitChain> class_basis(const ClassProblem& p) {
    const std::size_t n = p.cycle_map.cols();
    SpanBuilder span(n);
    for (const auto& col : columns(p.trivial_map)) span.add(col);
    std::vector<BitChain> out;
    for (const auto& z : kernel_basis(p.cycle_map))
        if (span.add(z.to_vec())) out.push_back(z);
    return out;
}

}  // namespace

std::vector<BitChain> homology_basis(const ChainComplex& c, int j) {
    if (j < 0 || j > c.top()) throw std::out_of_range("homology_basis: degree");
    return class_basis(class_problem(c, j, Mode::Homology));
}

std::vector<BitChain> cohomology_basis(const ChainComplex& c, int j) {
    if (j < 0 || j > c.top()) throw std::out_of_range("cohomology_basis: degree");
    return class_basis(class_problem(c, j, Mode::Cohomology));
}

CssCode css_from_complex(const ChainComplex& c, int q) {
    if (q < 1 || q > c.top()) throw std::out_of_range("css_from_complex: qubit degree");
    CssCode code;
    code.n_qubits = c.dim(q);
    code.h_x = c.boundary(q);
    code.h_z = c.boundary(q + 1).transpose();
    code.k_logical = code.n_qubits - rank(code.h_x) - rank(code.h_z);
    return code;
}

namespace {

std::optional<std::size_t> combination_search(const ClassProblem& p, const Gf2Solver& triv) {
    const std::size_t n = p.cycle_map.cols();
    const auto cols = columns(p.cycle_map);
    const std::size_t words = cols.empty() ? 0 : cols[0].words().size();
    std::vector<std::size_t> pick;
    std::vector<std::vector<std::uint64_t>> syn;

    for (std::size_t w = 1; w <= n; ++w) {
        pick.assign(w, 0);
        syn.assign(w + 1, std::vector<std::uint64_t>(words, 0));
        // Depth-first walk over increasing index tuples with incremental syndromes.
        std::size_t depth = 0;
        pick[0] = 0;
        while (true) {
            if (pick[depth] > n - (w - depth)) {
                if (depth == 0) break;
                --depth;
                ++pick[depth];
                continue;
            }
            const auto& cw = cols[pick[depth]].words();
            for (std::size_t k = 0; k < words; ++k) syn[depth + 1][k] = syn[depth][k] ^ cw[k];
            if (depth + 1 == w) {
                bool zero = std::all_of(syn[w].begin(), syn[w].end(), [](std::uint64_t x) { return x == 0; });
                if (zero) {
                    BitVec v(n);
                    for (auto i : pick) v.set(i);
                    if (!triv.consistent(v)) return w;
                }
                ++pick[depth];
            } else {
                pick[depth + 1] = pick[depth] + 1;
                ++depth;
            }
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> kernel_enumeration(const std::vector<BitChain>& kernel, const Gf2Solver& triv,
                                              std::size_t n) {
    const std::size_t kdim = kernel.size();
    std::vector<BitVec> vecs, sigs;
    for (const auto& z : kernel) {
        vecs.push_back(z.to_vec());
        sigs.push_back(triv.obstruction(vecs.back()));
    }
    BitVec v(n), sig(sigs.empty() ? 0 : sigs[0].size());
    std::optional<std::size_t> best;
    const std::uint64_t total = std::uint64_t{1} << kdim;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(g));
        v ^= vecs[bit];
        sig ^= sigs[bit];
        if (!sig.any()) continue;
        const std::size_t wt = v.popcount();
        if (!best || wt < *best) best = wt;
    }
    return best;
}

}  // namespace

std::optional<std::size_t> coset_min_weight_exact(const ChainComplex& c, int j, Mode mode,
                                                  const ExactSearchOptions& opt) {
    if (j < 0 || j > c.top()) throw std::out_of_range("coset_min_weight_exact: degree");
    if (betti(c, j) == 0) return std::nullopt;
    const ClassProblem p = class_problem(c, j, mode);
    const Gf2Solver triv(p.trivial_map);
    const std::size_t n = c.dim(j);
    if (n <= opt.cell_budget) return combination_search(p, triv);
    const auto kernel = kernel_basis(p.cycle_map);
    if (kernel.size() <= opt.kernel_budget) return kernel_enumeration(kernel, triv, n);
    throw BudgetExceeded("exact search refused: " + std::to_string(n) + " cells, cycle space dimension " +
                         std::to_string(kernel.size()));
}

std::optional<std::size_t> distance_upper_random_search(const CssCode& code, Side side,
                                                        std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("distance_upper_random_search: trials must be positive");
    if (code.k_logical == 0) return std::nullopt;
    const Gf2Matrix& checks = side == Side::Z ? code.h_x : code.h_z;
    const Gf2Matrix trivial = (side == Side::Z ? code.h_z : code.h_x).transpose();
    const Gf2Solver triv(trivial);
    const std::size_t n = code.n_qubits;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::optional<std::size_t> best;
    for (std::size_t t = 0; t < trials; ++t) {
        if (t > 0) std::shuffle(perm.begin(), perm.end(), rng);
        for (const auto& z : kernel_basis(checks.select_cols(perm))) {
            if (best && z.weight() >= *best) continue;
            BitVec v(n);
            for (auto i : z.support()) v.set(perm[i]);
            if (!triv.consistent(v)) best = z.weight();
        }
    }
    return best;
}

void write_complex(std::ostream& os, const ChainComplex& c) {
    os << "chain_complex " << c.top() << '\n' << "dims";
    for (auto d : c.dims) os << ' ' << d;
    os << '\n';
    for (int j = 1; j <= c.top(); ++j) {
        os << "boundary " << j << '\n';
        write_alist(os, c.boundary(j));
    }
}

ChainComplex read_complex(std::istream& is) {
    std::string tag;
    int top = -1;
    if (!(is >> tag >> top) || tag != "chain_complex" || top < 0)
        throw std::runtime_error("complex: bad header");
    if (!(is >> tag) || tag != "dims") throw std::runtime_error("complex: missing dims");
    std::vector<std::size_t> dims(static_cast<std::size_t>(top) + 1);
    for (auto& d : dims)
        if (!(is >> d)) throw std::runtime_error("complex: bad dims");
    std::vector<Gf2Matrix> bd;
    for (int j = 1; j <= top; ++j) {
        int deg = 0;
        if (!(is >> tag >> deg) || tag != "boundary" || deg != j)
            throw std::runtime_error("complex: missing boundary block");
        bd.push_back(read_alist(is));
    }
    ChainComplex c(std::move(dims), std::move(bd));
    return c;
}

void write_labels(std::ostream& os, const ChainComplex& c) {
    for (std::size_t d = 0; d < c.labels.size(); ++d)
        for (std::size_t i = 0; i < c.labels[d].size(); ++i) os << d << ' ' << i << ' ' << c.labels[d][i] << '\n';
}

}  // namespace fb
