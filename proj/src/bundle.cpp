#include "fbcode/bundle.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace fb {

BaseComplex BaseComplex::circle(std::size_t length, std::size_t twist) {
    if (length < 2) throw std::invalid_argument("circle: length must be at least 2");
    BaseComplex c;
    c.n1 = c.n0 = length;
    for (std::size_t e = 0; e < length; ++e) {
        const std::size_t lo = std::min(e, (e + 1) % length), hi = std::max(e, (e + 1) % length);
        c.bd.push_back({lo, hi});
        c.tw.push_back({0, 0});
    }
    // The last 1-cell joins 0-cells 0 and L-1; 0-cell 0 is first in its sorted boundary.
    c.tw[length - 1][0] = twist;
    return c;
}

BaseComplex BaseComplex::from_code(const PartitionedBaseCode& code, const TwistAssignment* twists) {
    BaseComplex c;
    c.n1 = code.n;
    c.n0 = code.m;
    c.bd.assign(code.n, {});
    c.tw.assign(code.n, {});
    for (std::size_t a = 0; a < code.m; ++a)
        for (std::size_t k = 0; k < code.adj[a].size(); ++k) {
            const std::size_t v = code.adj[a][k];
            c.bd[v].push_back(a);
            c.tw[v].push_back(twists ? twists->per_check.at(a).at(k) : 0);
        }
    return c;
}

Gf2Matrix BaseComplex::boundary() const {
    Gf2Matrix m(n0, n1);
    for (std::size_t e = 0; e < n1; ++e)
        for (auto a : bd[e]) m.flip(a, e);
    return m;
}

ChainComplex BaseComplex::complex() const { return ChainComplex({n0, n1}, {boundary()}); }

std::vector<std::vector<std::size_t>> BaseComplex::coboundary() const {
    std::vector<std::vector<std::size_t>> cob(n0);
    for (std::size_t e = 0; e < n1; ++e)
        for (auto a : bd[e]) cob[a].push_back(e);
    return cob;
}

std::size_t BaseComplex::twist(std::size_t e, std::size_t a) const {
    const auto& row = bd.at(e);
    const auto it = std::lower_bound(row.begin(), row.end(), a);
    if (it == row.end() || *it != a) throw std::out_of_range("twist: 0-cell not in boundary");
    return tw[e][static_cast<std::size_t>(it - row.begin())];
}

std::pair<std::size_t, std::size_t> Bundle::locate1(std::size_t idx1) const {
    if (idx1 < n_horizontal()) return {idx1 / m_f, idx1 % m_f};
    const std::size_t r = idx1 - n_horizontal();
    return {r / m_f, r % m_f};
}

Bundle build_bundle(BaseComplex base, std::size_t m, std::size_t ell) {
    if (m == 0) throw std::invalid_argument("build_bundle: empty fiber");
    if (base.bd.size() != base.n1 || base.tw.size() != base.n1)
        throw std::invalid_argument("build_bundle: base cell lists do not match n1");
    for (std::size_t e = 0; e < base.n1; ++e) {
        const auto& row = base.bd[e];
        if (row.size() != base.tw[e].size()) throw std::invalid_argument("build_bundle: twist alignment");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] >= base.n0 || (k > 0 && row[k - 1] >= row[k]))
                throw std::invalid_argument("build_bundle: base boundary must be sorted distinct 0-cells");
            if (base.tw[e][k] >= m) throw std::invalid_argument("build_bundle: twist outside Z_m");
        }
    }
    if (ell > 0 && ell * ell != m) throw std::invalid_argument("build_bundle: fiber size must be ell^2");

    Bundle bn;
    bn.m_f = m;
    bn.ell = ell;
    bn.base = std::move(base);
    const auto& B = bn.base;
    const std::size_t d0 = B.n0 * m, d1 = B.n1 * m + B.n0 * m, d2 = B.n1 * m;

    std::vector<std::vector<std::size_t>> c1(d1), c2(d2);
    for (std::size_t b = 0; b < B.n1; ++b)
        for (std::size_t i = 0; i < m; ++i) {
            auto& col = c1[bn.horizontal(b, i)];
            for (std::size_t k = 0; k < B.bd[b].size(); ++k) col.push_back(bn.cell0(B.bd[b][k], i + B.tw[b][k]));
        }
    for (std::size_t a = 0; a < B.n0; ++a)
        for (std::size_t i = 0; i < m; ++i) c1[bn.vertical(a, i)] = {bn.cell0(a, i), bn.cell0(a, i + 1)};
    for (std::size_t b = 0; b < B.n1; ++b)
        for (std::size_t i = 0; i < m; ++i) {
            auto& col = c2[bn.cell2(b, i)];
            col = {bn.horizontal(b, i), bn.horizontal(b, i + 1)};
            for (std::size_t k = 0; k < B.bd[b].size(); ++k) col.push_back(bn.vertical(B.bd[b][k], i + B.tw[b][k]));
        }
    bn.complex = ChainComplex({d0, d1, d2}, {Gf2Matrix::from_cols(d0, d1, c1), Gf2Matrix::from_cols(d1, d2, c2)});
    if (!validate(bn.complex)) throw std::logic_error("build_bundle: boundary of boundary is nonzero");
    return bn;
}

Bundle build_twisted_bundle(const PartitionedBaseCode& code, const TwistGraph& g) {
    const TwistAssignment tw = assign_twists(code, g);
    for (const auto& row : tw.per_check)
        for (auto t : row)
            if (t % g.ell != 0) throw std::logic_error("build_twisted_bundle: twist not a multiple of ell");
    return build_bundle(BaseComplex::from_code(code, &tw), g.ell * g.ell, g.ell);
}

Gf2Matrix projection_matrix(const Bundle& bn, int degree) {
    const auto& B = bn.base;
    const std::size_t m = bn.m_f;
    if (degree == 0) {
        Gf2Matrix p(B.n0, bn.complex.dim(0));
        for (std::size_t a = 0; a < B.n0; ++a)
            for (std::size_t i = 0; i < m; ++i) p.set(a, bn.cell0(a, i));
        return p;
    }
    if (degree == 1) {
        Gf2Matrix p(B.n1, bn.complex.dim(1));
        for (std::size_t b = 0; b < B.n1; ++b)
            for (std::size_t i = 0; i < m; ++i) p.set(b, bn.horizontal(b, i));
        return p;
    }
    if (degree == 2) return Gf2Matrix(0, bn.complex.dim(2));
    throw std::out_of_range("projection: degree");
}

BitChain projection(const Bundle& bn, int degree, const BitChain& e) {
    if (e.length() != bn.complex.dim(degree)) throw std::invalid_argument("projection: chain length");
    if (degree == 2) return BitChain(0);
    std::vector<std::size_t> out;
    for (auto idx : e.support()) {
        if (degree == 0) out.push_back(idx / bn.m_f);
        else if (bn.is_horizontal(idx)) out.push_back(idx / bn.m_f);
    }
    return BitChain(degree == 0 ? bn.base.n0 : bn.base.n1, std::move(out));
}

Gf2Matrix k_matrix(const Bundle& bn, int degree) {
    const auto& B = bn.base;
    if (degree == 2) {
        Gf2Matrix k(B.n1, bn.complex.dim(2));
        for (std::size_t b = 0; b < B.n1; ++b)
            for (std::size_t i = 0; i < bn.m_f; ++i) k.set(b, bn.cell2(b, i));
        return k;
    }
    if (degree == 1) {
        Gf2Matrix k(B.n0, bn.complex.dim(1));
        for (std::size_t a = 0; a < B.n0; ++a)
            for (std::size_t i = 0; i < bn.m_f; ++i) k.set(a, bn.vertical(a, i));
        return k;
    }
    if (degree == 0) return Gf2Matrix(0, bn.complex.dim(0));
    throw std::out_of_range("k_map: degree");
}

BitChain k_map(const Bundle& bn, int degree, const BitChain& e) {
    if (e.length() != bn.complex.dim(degree)) throw std::invalid_argument("k_map: chain length");
    if (degree == 2) {
        std::vector<std::size_t> out;
        for (auto idx : e.support()) out.push_back(idx / bn.m_f);
        return BitChain(bn.base.n1, std::move(out));
    }
    if (degree == 1) {
        std::vector<std::size_t> out;
        for (auto idx : e.support())
            if (!bn.is_horizontal(idx)) out.push_back(bn.locate1(idx).first);
        return BitChain(bn.base.n0, std::move(out));
    }
    if (degree == 0) return BitChain(0);
    throw std::out_of_range("k_map: degree");
}

std::pair<BitChain, BitChain> hv_decompose(const Bundle& bn, const BitChain& e1) {
    if (e1.length() != bn.complex.dim(1)) throw std::invalid_argument("hv_decompose: chain length");
    std::vector<std::size_t> h, v;
    for (auto idx : e1.support()) (bn.is_horizontal(idx) ? h : v).push_back(idx);
    return {BitChain(e1.length(), std::move(h)), BitChain(e1.length(), std::move(v))};
}

ShadowWeights shadow_weights(const Bundle& bn, const BitChain& e1) {
    if (e1.length() != bn.complex.dim(1)) throw std::invalid_argument("shadow_weights: chain length");
    std::vector<std::size_t> hb, va;
    for (auto idx : e1.support()) (bn.is_horizontal(idx) ? hb : va).push_back(bn.locate1(idx).first);
    // Support is sorted, so base indices within each part are nondecreasing.
    ShadowWeights s;
    s.hsw = static_cast<std::size_t>(std::unique(hb.begin(), hb.end()) - hb.begin());
    s.vsw = static_cast<std::size_t>(std::unique(va.begin(), va.end()) - va.begin());
    return s;
}

std::size_t shadow_weight0(const Bundle& bn, const BitChain& e0) {
    if (e0.length() != bn.complex.dim(0)) throw std::invalid_argument("shadow_weight0: chain length");
    std::vector<std::size_t> a;
    for (auto idx : e0.support()) a.push_back(idx / bn.m_f);
    return static_cast<std::size_t>(std::unique(a.begin(), a.end()) - a.begin());
}

std::vector<BitChain> cohomology_lift_basis(const Bundle& bn, const std::vector<BitChain>& base_cochains) {
    std::vector<BitChain> out;
    for (const auto& c : base_cochains) {
        if (c.length() != bn.base.n1) throw std::invalid_argument("cohomology_lift_basis: cochain length");
        std::vector<std::size_t> s;
        for (auto b : c.support())
            for (std::size_t i = 0; i < bn.m_f; ++i) s.push_back(bn.horizontal(b, i));
        out.emplace_back(bn.complex.dim(1), std::move(s));
    }
    return out;
}

std::vector<std::size_t> fiber_path(std::size_t m, std::vector<std::size_t> points) {
    for (auto& p : points) p %= m;
    // Cancel repeated points in pairs.
    BitChain pts(m, std::move(points));
    const auto& p = pts.support();
    if (p.size() % 2) throw std::logic_error("fiber_path: odd boundary");
    std::vector<std::size_t> arcs;
    for (std::size_t k = 0; k < p.size(); k += 2)
        for (std::size_t j = p[k]; j < p[k + 1]; ++j) arcs.push_back(j);
    if (2 * arcs.size() <= m) return arcs;
    std::vector<std::size_t> comp;
    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (k < arcs.size() && arcs[k] == j) ++k;
        else comp.push_back(j);
    }
    return comp;
}

BitChain homology_lift(const Bundle& bn, const BitChain& c) {
    const auto& B = bn.base;
    if (c.length() != B.n1) throw std::invalid_argument("homology_lift: chain length");
    const ChainComplex bc = B.complex();
    if (!bc.bd[0].mul(c).empty()) throw std::invalid_argument("homology_lift: input is not a cycle");
    if (betti(bc, 0) != 0) throw std::invalid_argument("homology_lift: base has nonzero b0");
    std::vector<std::size_t> out;
    std::vector<std::vector<std::size_t>> defect(B.n0);
    for (auto b : c.support()) {
        out.push_back(bn.horizontal(b, 0));
        for (std::size_t k = 0; k < B.bd[b].size(); ++k) defect[B.bd[b][k]].push_back(B.tw[b][k] % bn.m_f);
    }
    for (std::size_t a = 0; a < B.n0; ++a) {
        if (defect[a].empty()) continue;
        for (auto j : fiber_path(bn.m_f, defect[a])) out.push_back(bn.vertical(a, j));
    }
    BitChain lift(bn.complex.dim(1), std::move(out));
    if (!bn.complex.bd[0].mul(lift).empty()) throw std::logic_error("homology_lift: lift is not closed");
    return lift;
}

H1IsoReport verify_h1_iso(const Bundle& bn) {
    H1IsoReport r;
    const std::size_t m = bn.m_f;
    r.cond_i = true;  // BaseComplex has no cells above degree 1

    Gf2Matrix fbd(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        fbd.flip(i, i);
        fbd.flip((i + 1) % m, i);
    }
    r.cond_ii = true;
    for (const auto& col : fbd.col_supports()) r.cond_ii = r.cond_ii && col.size() % 2 == 0;
    r.cond_iii = r.cond_ii && rank(fbd) + 1 == m;

    const ChainComplex bc = bn.base.complex();
    r.b0_base = betti(bc, 0);
    r.b1_base = betti(bc, 1);
    r.cond_iv = r.b0_base == 0;

    // Rotations are the only automorphisms in use; each must fix the all-ones fiber cycle.
    BitVec ones(m);
    for (std::size_t i = 0; i < m; ++i) ones.set(i);
    r.cond_v = fbd.mul(ones).popcount() == 0;
    for (const auto& row : bn.base.tw)
        for (auto t : row) {
            BitVec rot(m);
            for (auto i : ones.support()) rot.set((i + t) % m);
            r.cond_v = r.cond_v && rot == ones;
        }

    r.b1_bundle = betti(bn.complex, 1);
    r.b1_bundle_dual = betti(dual_complex(bn.complex), 1);
    const Gf2Matrix pi = projection_matrix(bn, 1);
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& h : homology_basis(bn.complex, 1)) rows.push_back(pi.mul(h).support());
    r.projected_rank = rank(Gf2Matrix::from_rows(rows.size(), bn.base.n1, rows));
    r.projection_spans = r.projected_rank == r.b1_base;
    r.iso_asserted = r.all_conditions() && r.b1_bundle == r.b1_base && r.projection_spans;
    return r;
}

namespace {

// Column of boundary_2 for the 2-cell (b, i), as 1-cell indices (may repeat only when m_F <= 1).
std::vector<std::size_t> boundary2(const Bundle& bn, std::size_t b, std::size_t i) {
    std::vector<std::size_t> out{bn.horizontal(b, i), bn.horizontal(b, i + 1)};
    const auto& B = bn.base;
    for (std::size_t k = 0; k < B.bd[b].size(); ++k) out.push_back(bn.vertical(B.bd[b][k], i + B.tw[b][k]));
    return out;
}

}  // namespace

SlideResult slide_normalize(const Bundle& bn, const BitChain& r) {
    const auto& B = bn.base;
    const std::size_t m = bn.m_f, ell = bn.ell;
    if (ell == 0) throw std::invalid_argument("slide_normalize: bundle has no ell");
    for (const auto& row : B.tw)
        for (auto t : row)
            if (t % ell) throw std::invalid_argument("slide_normalize: twist not a multiple of ell");
    if (r.length() != bn.complex.dim(1)) throw std::invalid_argument("slide_normalize: chain length");
    if (!bn.complex.bd[0].mul(r).empty()) throw std::invalid_argument("slide_normalize: input is not a cycle");

    BitVec cur = r.to_vec();
    BitVec two(bn.complex.dim(2));
    std::size_t moves = 0;
    const std::size_t w0 = r.weight();
    const std::size_t cap = (w0 + 1) * (w0 + 1) * ell + 16;

    // Boundary points of a horizontal cell: one 0-cell per base incidence.
    auto points = [&](std::size_t b, std::size_t i) {
        std::vector<std::size_t> p;
        for (std::size_t k = 0; k < B.bd[b].size(); ++k) p.push_back(bn.cell0(B.bd[b][k], i + B.tw[b][k]));
        return p;
    };

    while (true) {
        std::optional<std::size_t> seed;
        std::vector<std::size_t> horiz;
        for (auto idx : cur.support()) {
            if (!bn.is_horizontal(idx)) break;
            horiz.push_back(idx);
            if (!seed && (idx % m) % ell != 0) seed = idx;
        }
        if (!seed) break;
        if (++moves > cap) throw std::logic_error("slide_normalize: move cap exceeded");

        // Cluster: horizontal cells of cur linked by shared boundary points.
        std::vector<std::vector<std::size_t>> at_point(bn.complex.dim(0));
        for (auto idx : horiz)
            for (auto p : points(idx / m, idx % m)) at_point[p].push_back(idx);
        std::vector<std::size_t> cluster{*seed};
        std::vector<char> seen(bn.n_horizontal(), 0);
        seen[*seed] = 1;
        for (std::size_t q = 0; q < cluster.size(); ++q)
            for (auto p : points(cluster[q] / m, cluster[q] % m))
                for (auto nb : at_point[p])
                    if (!seen[nb]) {
                        seen[nb] = 1;
                        cluster.push_back(nb);
                    }

        auto move_chain = [&](int dir) {
            std::vector<std::size_t> cells;
            for (auto idx : cluster) cells.push_back(bn.cell2(idx / m, dir > 0 ? idx % m : idx % m + m - 1));
            return BitChain(bn.complex.dim(2), std::move(cells));
        };
        auto delta = [&](const BitChain& moved) {
            std::vector<std::size_t> t;
            for (auto c : moved.support()) {
                auto col = boundary2(bn, c / m, c % m);
                t.insert(t.end(), col.begin(), col.end());
            }
            const BitChain toggles(bn.complex.dim(1), std::move(t));
            long d = 0;
            for (auto idx : toggles.support()) d += cur.get(idx) ? -1 : 1;
            return std::pair{d, toggles};
        };
        const BitChain down = move_chain(-1), up = move_chain(+1);
        auto [d_down, t_down] = delta(down);
        auto [d_up, t_up] = delta(up);
        const bool go_up = d_up < d_down;
        for (auto idx : (go_up ? t_up : t_down).support()) cur.flip(idx);
        for (auto c : (go_up ? up : down).support()) two.flip(c);
    }
    SlideResult out{cur.to_chain(), two.to_chain(), moves};
    if (out.normalized.weight() > w0) throw std::logic_error("slide_normalize: weight increased");
    return out;
}

GaugeMove gauge_at_1cell(const Bundle& bn, std::size_t e, std::size_t shift) {
    const std::size_t m = bn.m_f;
    if (e >= bn.base.n1) throw std::out_of_range("gauge_at_1cell: cell");
    shift %= m;
    GaugeMove g{bn.base, {}};
    for (auto& t : g.base.tw[e]) t = (t + shift) % m;
    for (int d = 0; d < 3; ++d) {
        g.perm[d].resize(bn.complex.dim(d));
        std::iota(g.perm[d].begin(), g.perm[d].end(), std::size_t{0});
    }
    for (std::size_t i = 0; i < m; ++i) {
        g.perm[1][bn.horizontal(e, i)] = bn.horizontal(e, i + m - shift);
        g.perm[2][bn.cell2(e, i)] = bn.cell2(e, i + m - shift);
    }
    return g;
}

GaugeMove gauge_at_0cell(const Bundle& bn, std::size_t a, std::size_t shift) {
    const std::size_t m = bn.m_f;
    if (a >= bn.base.n0) throw std::out_of_range("gauge_at_0cell: cell");
    shift %= m;
    GaugeMove g{bn.base, {}};
    for (std::size_t e = 0; e < g.base.n1; ++e)
        for (std::size_t k = 0; k < g.base.bd[e].size(); ++k)
            if (g.base.bd[e][k] == a) g.base.tw[e][k] = (g.base.tw[e][k] + shift) % m;
    for (int d = 0; d < 3; ++d) {
        g.perm[d].resize(bn.complex.dim(d));
        std::iota(g.perm[d].begin(), g.perm[d].end(), std::size_t{0});
    }
    for (std::size_t i = 0; i < m; ++i) {
        g.perm[0][bn.cell0(a, i)] = bn.cell0(a, i + shift);
        g.perm[1][bn.vertical(a, i)] = bn.vertical(a, i + shift);
    }
    return g;
}

Gf2Matrix permutation_matrix(const std::vector<std::size_t>& perm) {
    Gf2Matrix p(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) p.set(perm[i], i);
    return p;
}

void write_bundle(std::ostream& os, const Bundle& bn, std::uint64_t seed, const std::string& twist_file) {
    os << "bundle " << bn.base.n1 << ' ' << bn.base.n0 << ' ' << bn.m_f << ' ' << bn.ell << ' ' << seed << ' '
       << twist_file << '\n'
       << "layout e1=horizontal(b,i)->b*mF+i,vertical(a,i)->n1*mF+a*mF+i e0=(a,i)->a*mF+i e2=(b,i)->b*mF+i\n";
    write_complex(os, bn.complex);
}

}  // namespace fb
