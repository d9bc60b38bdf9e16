#include "doctest.h"

#include <random>
#include <sstream>

#include "fbcode/bundle.hpp"

using namespace fb;

namespace {

Bundle code_instance(std::size_t n, double delta, std::size_t k, std::size_t ell, std::uint64_t seed) {
    const auto base = gen_base(n, delta, k, seed, 200, CertifyParams::desk());
    const auto g = gen_twist_graph(ell, k, seed + 1);
    return build_twisted_bundle(base.code, g);
}

BitChain chain(std::size_t len, std::vector<std::size_t> s) { return BitChain(len, std::move(s)); }

// The untwisted product written from the tensor rule: d(x (x) y) = dx (x) y + x (x) dy.
bool matches_untwisted_product(const Bundle& bn) {
    const auto& B = bn.base;
    const std::size_t m = bn.m_f;
    const Gf2Matrix db = B.boundary();
    Gf2Matrix df(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        df.flip(i, i);
        df.flip((i + 1) % m, i);
    }
    Gf2Matrix e1(bn.complex.dim(0), bn.complex.dim(1)), e2(bn.complex.dim(1), bn.complex.dim(2));
    for (std::size_t b = 0; b < B.n1; ++b)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t a = 0; a < B.n0; ++a)
                if (db.get(a, b)) {
                    e1.flip(a * m + i, b * m + i);
                    e2.flip(B.n1 * m + a * m + i, b * m + i);
                }
    for (std::size_t x = 0; x < B.n0; ++x)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (df.get(j, i)) e1.flip(x * m + j, B.n1 * m + x * m + i);
    for (std::size_t b = 0; b < B.n1; ++b)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (df.get(j, i)) e2.flip(b * m + j, b * m + i);
    return e1 == bn.complex.bd[0] && e2 == bn.complex.bd[1];
}

BitChain random_closed_chain(const Bundle& bn, std::mt19937_64& rng) {
    const auto& c = bn.complex;
    BitVec r(c.dim(1));
    for (const auto& h : homology_basis(c, 1))
        if (rng() & 1) r ^= h.to_vec();
    for (int t = 0; t < 3; ++t) {
        BitVec x(c.dim(2));
        x.set(rng() % c.dim(2));
        r ^= c.bd[1].mul(x);
    }
    return r.to_chain();
}

}  // namespace

TEST_CASE("twisted boundary on a single three-legged base cell") {
    BaseComplex base;
    base.n1 = 1;
    base.n0 = 3;
    base.bd = {{0, 1, 2}};
    base.tw = {{0, 3, 6}};
    const auto bn = build_bundle(base, 9, 3);
    const auto d1 = bn.complex.bd[0].mul(chain(bn.complex.dim(1), {bn.horizontal(0, 0)}));
    CHECK(d1 == chain(bn.complex.dim(0), {bn.cell0(0, 0), bn.cell0(1, 3), bn.cell0(2, 6)}));
    const auto d2 = bn.complex.bd[1].mul(chain(bn.complex.dim(2), {bn.cell2(0, 0)}));
    CHECK(d2 == chain(bn.complex.dim(1), {bn.horizontal(0, 0), bn.horizontal(0, 1), bn.vertical(0, 0),
                                          bn.vertical(1, 3), bn.vertical(2, 6)}));
}

TEST_CASE("zero twists reproduce the untwisted product rule") {
    CHECK(matches_untwisted_product(build_bundle(BaseComplex::circle(4), 3)));
    const auto b = gen_base(16, 6, 2, 3, 200, CertifyParams::desk());
    CHECK(matches_untwisted_product(build_bundle(BaseComplex::from_code(b.code), 5)));
}

TEST_CASE("dimension formulas and boundary of boundary") {
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto bn = code_instance(16, 6, 2, 3, s);
        const std::size_t nb = 16, mb = 12, mf = 9;
        CHECK(bn.complex.dim(0) == mb * mf);
        CHECK(bn.n_qubits() == nb * mf + mb * mf);
        CHECK(bn.complex.dim(2) == nb * mf);
        CHECK(bn.complex.dim(0) + bn.complex.dim(1) + bn.complex.dim(2) == (nb + mb) * (mf + mf));
        CHECK((bn.complex.bd[0] * bn.complex.bd[1]).is_zero());
        const auto code = bn.css();
        CHECK((code.h_x * code.h_z.transpose()).is_zero());
    }
}

TEST_CASE("rejects twists outside the fiber group and malformed ell") {
    BaseComplex base = BaseComplex::circle(3, 9);
    CHECK_THROWS(build_bundle(base, 9));
    CHECK_THROWS(build_bundle(BaseComplex::circle(3), 8, 3));
}

TEST_CASE("projection and K on single cells") {
    const auto bn = code_instance(16, 6, 2, 3, 1);
    const auto d1 = bn.complex.dim(1);
    CHECK(projection(bn, 1, chain(d1, {bn.horizontal(4, 5)})) == chain(16, {4}));
    CHECK(projection(bn, 1, chain(d1, {bn.vertical(2, 2)})).empty());
    CHECK(projection(bn, 1, chain(d1, {bn.horizontal(4, 1), bn.horizontal(4, 2)})).empty());
    CHECK(k_map(bn, 2, chain(bn.complex.dim(2), {bn.cell2(7, 3)})) == chain(16, {7}));
    CHECK(k_map(bn, 1, chain(d1, {bn.horizontal(7, 3)})).empty());
    CHECK(k_map(bn, 1, chain(d1, {bn.vertical(5, 1)})) == chain(12, {5}));
    // The two 2-cells above a horizontal cell cancel under K.
    const auto cob = bn.complex.bd[1].transpose().mul(chain(d1, {bn.horizontal(3, 4)}));
    CHECK(cob.weight() == 2);
    CHECK(k_map(bn, 2, cob).empty());
}

TEST_CASE("projection commutes with boundaries and K commutes with coboundaries") {
    const auto bn = code_instance(16, 6, 2, 3, 2);
    const Gf2Matrix db = bn.base.boundary();
    CHECK(projection_matrix(bn, 0) * bn.complex.bd[0] == db * projection_matrix(bn, 1));
    CHECK((projection_matrix(bn, 1) * bn.complex.bd[1]).is_zero());
    CHECK(k_matrix(bn, 2) * bn.complex.bd[1].transpose() == db.transpose() * k_matrix(bn, 1));
    CHECK((k_matrix(bn, 1) * bn.complex.bd[0].transpose()).is_zero());
}

TEST_CASE("horizontal and vertical split with shadow weights") {
    const auto bn = code_instance(16, 6, 2, 3, 3);
    const auto d1 = bn.complex.dim(1);
    const auto e = chain(d1, {bn.horizontal(2, 0), bn.vertical(1, 2), bn.vertical(1, 5), bn.vertical(2, 0)});
    const auto [h, v] = hv_decompose(bn, e);
    CHECK(h == chain(d1, {bn.horizontal(2, 0)}));
    CHECK((h ^ v) == e);
    CHECK(hv_decompose(bn, v).first.empty());
    const auto sw = shadow_weights(bn, e);
    CHECK(sw.vsw == 2);
    CHECK(sw.hsw == 1);
    CHECK(shadow_weights(bn, BitChain(d1)).vsw == 0);
    std::vector<std::size_t> full;
    for (std::size_t i = 0; i < 9; ++i) full.push_back(bn.horizontal(6, i));
    CHECK(shadow_weights(bn, chain(d1, full)).hsw == 1);
    CHECK(shadow_weight0(bn, chain(bn.complex.dim(0), {bn.cell0(1, 1), bn.cell0(1, 2), bn.cell0(4, 0)})) == 2);
}

TEST_CASE("cohomology lifts are cocycles of weight |b| m_F with independent classes") {
    const auto bn = code_instance(16, 6, 2, 3, 4);
    const auto base_cx = bn.base.complex();
    const auto basis = cohomology_basis(base_cx, 1);
    CHECK(basis.size() == 4);
    const auto lifts = cohomology_lift_basis(bn, basis);
    CHECK(cohomology_lift_basis(bn, {chain(16, {5})})[0].weight() == 9);
    const Gf2Matrix cob2 = bn.complex.bd[1].transpose();
    SpanBuilder span(bn.complex.dim(1));
    for (const auto& col : bn.complex.bd[0].transpose().col_supports()) span.add(BitChain(bn.complex.dim(1), col).to_vec());
    for (std::size_t j = 0; j < lifts.size(); ++j) {
        CHECK(lifts[j].weight() == basis[j].weight() * 9);
        CHECK(cob2.mul(lifts[j]).empty());
        CHECK(span.add(lifts[j].to_vec()));
    }
}

TEST_CASE("homology lift: untwisted needs no caps; one twist of ell needs a cap of length ell") {
    const auto b = gen_base(16, 6, 2, 5, 200, CertifyParams::desk());
    const auto flat = build_bundle(BaseComplex::from_code(b.code), 9, 3);
    for (const auto& c : homology_basis(b.code.complex(), 1)) {
        const auto lift = homology_lift(flat, c);
        CHECK(lift.weight() == c.weight());
        CHECK(flat.complex.bd[0].mul(lift).empty());
        CHECK(projection(flat, 1, lift) == c);
    }

    for (std::size_t ell : {2, 3, 4}) {
        BaseComplex toy;
        toy.n1 = 2;
        toy.n0 = 1;
        toy.bd = {{0}, {0}};
        toy.tw = {{0}, {ell}};
        const auto bn = build_bundle(toy, ell * ell, ell);
        const auto lift = homology_lift(bn, chain(2, {0, 1}));
        const auto [h, v] = hv_decompose(bn, lift);
        CHECK(h.weight() == 2);
        CHECK(v.weight() == ell);
        CHECK(bn.complex.bd[0].mul(lift).empty());
    }
}

TEST_CASE("homology lift on twisted instances is closed and projects back") {
    const auto bn = code_instance(16, 6, 2, 3, 6);
    for (const auto& c : homology_basis(bn.base.complex(), 1)) {
        const auto lift = homology_lift(bn, c);
        CHECK(bn.complex.bd[0].mul(lift).empty());
        CHECK(projection(bn, 1, lift) == c);
    }
    CHECK_THROWS(homology_lift(build_bundle(BaseComplex::circle(3), 3), chain(3, {0, 1, 2})));
}

TEST_CASE("fiber paths pick the shorter side and break ties toward increasing index") {
    CHECK(fiber_path(9, {2, 4}) == std::vector<std::size_t>{2, 3});
    CHECK(fiber_path(9, {1, 7}) == std::vector<std::size_t>{0, 7, 8});
    CHECK(fiber_path(8, {1, 5}) == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(fiber_path(9, {3, 3}).empty());
}

TEST_CASE("H1 isomorphism report on certified instances and on the torus") {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto bn = code_instance(16, 6, 2, 3, 10 + s);
        const auto r = verify_h1_iso(bn);
        CHECK(r.all_conditions());
        CHECK(r.b1_base == 4);
        CHECK(r.b1_bundle == 4);
        CHECK(r.b1_bundle_dual == r.b1_bundle);
        CHECK(r.projection_spans);
        CHECK(r.iso_asserted);
        CHECK(bn.css().k_logical == 4);
    }
    const auto torus = build_bundle(BaseComplex::circle(3), 3);
    const auto r = verify_h1_iso(torus);
    CHECK_FALSE(r.cond_iv);
    CHECK(r.b1_bundle == 2);
    CHECK(r.b1_base == 1);
    CHECK_FALSE(r.iso_asserted);
}

TEST_CASE("sliding: translation, fixed points, and random cycles") {
    const auto flat = build_bundle(BaseComplex::circle(4), 9, 3);
    std::vector<std::size_t> ring;
    for (std::size_t b = 0; b < 4; ++b) ring.push_back(flat.horizontal(b, 1));
    const auto r = chain(flat.complex.dim(1), ring);
    const auto s = slide_normalize(flat, r);
    std::vector<std::size_t> at0;
    for (std::size_t b = 0; b < 4; ++b) at0.push_back(flat.horizontal(b, 0));
    CHECK(s.normalized == chain(flat.complex.dim(1), at0));
    CHECK(slide_normalize(flat, s.normalized).normalized == s.normalized);
    CHECK(slide_normalize(flat, s.normalized).moves == 0);

    BitChain not_cycle(flat.complex.dim(1), {flat.horizontal(0, 1)});
    CHECK_THROWS(slide_normalize(flat, not_cycle));

    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto bn = code_instance(16, 6, 2, 3, 20 + seed);
        for (int t = 0; t < 10; ++t) {
            const auto c = random_closed_chain(bn, rng);
            const auto out = slide_normalize(bn, c);
            CHECK(out.normalized.weight() <= c.weight());
            CHECK((c ^ bn.complex.bd[1].mul(out.two_chain)) == out.normalized);
            for (auto idx : out.normalized.support())
                if (bn.is_horizontal(idx)) CHECK(bn.locate1(idx).second % 3 == 0);
        }
    }
}

TEST_CASE("gauge moves are isomorphisms preserving Betti numbers and distances") {
    std::mt19937_64 rng(30);
    const auto bn = code_instance(16, 6, 2, 3, 31);
    for (int t = 0; t < 6; ++t) {
        const bool on_edge = t % 2 == 0;
        const std::size_t cell = on_edge ? rng() % bn.base.n1 : rng() % bn.base.n0;
        const std::size_t shift = 1 + rng() % 8;
        const auto g = on_edge ? gauge_at_1cell(bn, cell, shift) : gauge_at_0cell(bn, cell, shift);
        const auto moved = build_bundle(g.base, bn.m_f);
        for (int d = 1; d <= 2; ++d) {
            const auto pd = permutation_matrix(g.perm[d]);
            const auto pd1 = permutation_matrix(g.perm[d - 1]);
            CHECK(moved.complex.boundary(d) * pd == pd1 * bn.complex.boundary(d));
        }
        for (int j = 0; j <= 2; ++j) CHECK(betti(moved.complex, j) == betti(bn.complex, j));
    }

    // Tiny twisted torus: exact distances survive a gauge move at each cell type.
    const auto tt = build_bundle(BaseComplex::circle(3, 2), 4);
    ExactSearchOptions opt;
    opt.cell_budget = 30;
    const auto dz = coset_min_weight_exact(tt.complex, 1, Mode::Homology, opt);
    const auto dx = coset_min_weight_exact(tt.complex, 1, Mode::Cohomology, opt);
    for (const auto& g : {gauge_at_1cell(tt, 1, 3), gauge_at_0cell(tt, 2, 1)}) {
        const auto moved = build_bundle(g.base, 4);
        CHECK(coset_min_weight_exact(moved.complex, 1, Mode::Homology, opt) == dz);
        CHECK(coset_min_weight_exact(moved.complex, 1, Mode::Cohomology, opt) == dx);
    }
}

TEST_CASE("untwisted circle bundles are toric codes with distance min(L, L')") {
    ExactSearchOptions opt;
    opt.cell_budget = 60;
    for (std::size_t L : {3, 4})
        for (std::size_t M : {3, 4}) {
            const auto bn = build_bundle(BaseComplex::circle(L), M);
            CHECK(bn.css().k_logical == 2);
            CHECK(coset_min_weight_exact(bn.complex, 1, Mode::Homology, opt) == std::min(L, M));
            CHECK(coset_min_weight_exact(bn.complex, 1, Mode::Cohomology, opt) == std::min(L, M));
        }
}

TEST_CASE("bundle header records the layout") {
    const auto bn = build_bundle(BaseComplex::circle(3), 3);
    std::ostringstream os;
    write_bundle(os, bn, 7, "twist.txt");
    CHECK(os.str().rfind("bundle 3 3 3 0 7 twist.txt\nlayout ", 0) == 0);
}
