#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fbcode/weight_reduction.hpp"

using namespace fb;

namespace {

ChainComplex one_complex(std::size_t n0, const std::vector<std::vector<std::size_t>>& edges) {
    return ChainComplex({n0, edges.size()}, {Gf2Matrix::from_cols(n0, edges.size(), edges)});
}

BaseComplex desk_base(std::size_t n, double delta, std::size_t k, std::uint64_t seed) {
    return BaseComplex::from_code(gen_base(n, delta, k, seed, 200, CertifyParams::desk()).code);
}

Bundle code_instance(std::size_t n, double delta, std::size_t k, std::size_t ell, std::uint64_t seed) {
    const auto base = gen_base(n, delta, k, seed, 200, CertifyParams::desk());
    return build_twisted_bundle(base.code, gen_twist_graph(ell, k, seed + 1));
}

std::vector<std::size_t> bettis(const ChainComplex& c) {
    std::vector<std::size_t> b;
    for (int j = 0; j <= c.top(); ++j) b.push_back(betti(c, j));
    return b;
}

std::size_t max_row_weight(const Gf2Matrix& m) { return m.rows() ? m.max_row_weight() : 0; }

// Minimum weight over the coset e + ker(d), by enumerating the kernel.
BitChain min_weight_preimage(const Gf2Matrix& d, const BitChain& s) {
    const auto e0 = solve(d, s);
    REQUIRE(e0);
    const auto ker = kernel_basis(d);
    REQUIRE(ker.size() <= 20);
    BitVec cur = e0->to_vec(), best = cur;
    std::vector<BitVec> kv;
    for (const auto& z : ker) kv.push_back(z.to_vec());
    for (std::uint64_t g = 1; g < (std::uint64_t{1} << kv.size()); ++g) {
        cur ^= kv[static_cast<std::size_t>(std::countr_zero(g))];
        if (cur.popcount() < best.popcount()) best = cur;
    }
    return best.to_chain();
}

}  // namespace

TEST_CASE("sparse maps agree with dense products and transposes") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const std::size_t r = 1 + rng() % 12, k = 1 + rng() % 12, c = 1 + rng() % 12;
        Gf2Matrix a(r, k), b(k, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < k; ++j) a.set(i, j, rng() & 1);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < c; ++j) b.set(i, j, rng() & 1);
        const auto sa = SparseMap::from_dense(a), sb = SparseMap::from_dense(b);
        CHECK((sa * sb).to_dense() == a * b);
        CHECK(sa.transpose().to_dense() == a.transpose());
        CHECK((sa + sa).is_zero());
        std::ostringstream x, y;
        write_alist(x, a);
        write_alist(y, sa);
        CHECK(x.str() == y.str());
    }
}

TEST_CASE("identity equivalence verifies with unit constants") {
    const auto c = one_complex(3, {{0, 1}, {1, 2}, {0, 2}});
    auto eq = identity_equivalence(c);
    CHECK(verify_homotopy(eq));
    CHECK(lipschitz(eq.f) == std::vector<std::size_t>{1, 1});
    CHECK(lipschitz_transpose(eq.g) == std::vector<std::size_t>{1, 1});
    // DERIVED: a single corrupted homotopy entry breaks gf - I = hd + dh.
    eq.h_a[0] = SparseMap(3, {{0}, {}, {}});
    CHECK_FALSE(verify_homotopy(eq));
}

TEST_CASE("zero maps on a circle admit no homotopy") {
    // TRIVIAL: b1 = 1, so the induced map must be an isomorphism; try every h: C_0 -> C_1.
    const auto c = one_complex(3, {{0, 1}, {1, 2}, {0, 2}});
    HomotopyEquivalence eq{c, c, {}, {}, {}, {}};
    for (int j = 0; j <= 1; ++j) {
        eq.f.f.emplace_back(3, 3);
        eq.g.f.emplace_back(3, 3);
    }
    eq.h_b = {SparseMap(3, 3)};
    std::size_t passing = 0;
    for (unsigned mask = 0; mask < 512; ++mask) {
        std::vector<std::vector<std::size_t>> cols(3);
        for (unsigned bit = 0; bit < 9; ++bit)
            if (mask >> bit & 1u) cols[bit / 3].push_back(bit % 3);
        eq.h_a = {SparseMap(3, cols)};
        passing += verify_homotopy(eq);
    }
    CHECK(passing == 0);
}

TEST_CASE("combining two cells at a degree-2 vertex") {
    // PAPER: d e1 = v + u1 and d e2 = v + u2 merge into d e = u1 + u2. Cells: v=1, u1=0, u2=2, plus a spur.
    const auto a = one_complex(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto eq = combine_cells(a, 1);
    CHECK(verify_homotopy(eq));
    CHECK(eq.b.dims == std::vector<std::size_t>{3, 2});
    CHECK(eq.b.bd[0].col_supports() == std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}});
    CHECK(bettis(eq.b) == bettis(a));
    // f(v) = v + d e2 is the far endpoint u2, which relabels to 1.
    CHECK(eq.f.f[0].col(1) == std::vector<std::size_t>{1});
    CHECK(eq.g.f[1].col(0) == std::vector<std::size_t>{0, 1});
    // TRIVIAL: a two-edge path coarsens to one edge between the outer endpoints.
    const auto p = combine_cells(one_complex(3, {{0, 1}, {1, 2}}), 1);
    CHECK(p.b.bd[0].col_supports() == std::vector<std::vector<std::size_t>>{{0, 1}});
    CHECK_THROWS_AS(combine_cells(a, 0), std::invalid_argument);
}

TEST_CASE("collapsing an edge merges its endpoints") {
    // TRIVIAL: a single edge is contractible.
    const auto e = collapse_cell(one_complex(2, {{0, 1}}), 0);
    CHECK(verify_homotopy(e));
    CHECK(e.b.dims == std::vector<std::size_t>{1, 0});
    CHECK(bettis(e.b) == std::vector<std::size_t>{1, 0});
    // Triangle with a tail keeps b0 = b1 = 1.
    const auto tri = one_complex(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
    const auto t = collapse_cell(tri, 3);
    CHECK(verify_homotopy(t));
    CHECK(bettis(t.b) == bettis(tri));
    CHECK_THROWS_AS(collapse_cell(one_complex(3, {{0, 1, 2}}), 0), std::invalid_argument);
}

TEST_CASE("collapse after combine on a three-edge path leaves one edge") {
    // DERIVED: 0-1-2-3, combine at 1 gives 0-2-3 (relabelled 0-1-2), collapse its first edge.
    const auto path = one_complex(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto c1 = combine_cells(path, 1);
    const auto c2 = collapse_cell(c1.b, 0);
    CHECK(verify_homotopy(c2));
    CHECK(c2.b.dims == std::vector<std::size_t>{2, 1});
    CHECK(c2.b.bd[0].col_supports() == std::vector<std::vector<std::size_t>>{{0, 1}});
}

TEST_CASE("reduced base of one bit in three checks") {
    // DERIVED: E = 3, N0 = 3 checks, N1 = 1 bit: 2E - N0 = 3 bits, 2E - N1 = 5 checks, no aux bits.
    BaseComplex b;
    b.n1 = 1;
    b.n0 = 3;
    b.bd = {{0, 1, 2}};
    b.tw = {{0, 0, 0}};
    const auto r = reduce_base(b);
    CHECK(r.base.n1 == 3);
    CHECK(r.base.n0 == 5);
    CHECK(r.bit_labels == std::vector<std::string>{"(0,0)", "(0,1)", "(0,2)"});
    CHECK(r.check_labels == std::vector<std::string>{"(0,0)", "(1,0)", "(2,0)", "[0,1]", "[0,2]"});
    // (0,c1) sits in check (1,0) and aux checks [0,1], [0,2].
    CHECK(r.base.bd[1] == std::vector<std::size_t>{1, 3, 4});
    const auto w = weight_reduce_classical(b);
    CHECK(verify_homotopy(w.equiv));
    CHECK(w.combines == 2);
    CHECK(w.collapses == 0);
}

TEST_CASE("reduced base counts, degrees and twist placement") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto code = gen_base(24, 6, 2, seed, 200, CertifyParams::desk()).code;
        const auto g = gen_twist_graph(3, 2, seed);
        const auto tw = assign_twists(code, g);
        const auto base = BaseComplex::from_code(code, &tw);
        const auto r = reduce_base(base);
        const std::size_t E = r.incidences;
        CHECK(r.base.n1 == 2 * E - base.n0);
        CHECK(r.base.n0 == 2 * E - base.n1);
        const auto cob = r.base.coboundary();
        for (std::size_t e = 0; e < r.base.n1; ++e) {
            CHECK(r.base.bd[e].size() <= 3);
            CHECK(r.base.bd[e].size() >= 1);
        }
        for (const auto& l : cob) CHECK(l.size() <= 3);
        // Degrees drop below 2 only where the original had degree 1.
        const auto vdeg = code.variable_degrees();
        const bool low = *std::min_element(vdeg.begin(), vdeg.end()) < 2;
        std::size_t deg1 = 0;
        for (std::size_t e = 0; e < r.base.n1; ++e) deg1 += r.base.bd[e].size() < 2;
        for (const auto& l : cob) deg1 += l.size() < 2;
        CHECK((deg1 > 0) == low);
        // Twists: the (b,c) copy of each incidence carries the original twist; aux incidences carry zero.
        std::size_t nonzero = 0, expected = 0;
        for (std::size_t e = 0; e < r.base.n1; ++e)
            for (auto t : r.base.tw[e]) nonzero += t != 0;
        for (std::size_t b = 0; b < base.n1; ++b)
            for (auto t : base.tw[b]) expected += t != 0;
        CHECK(nonzero == expected);
    }
}

TEST_CASE("classical weight reduction is a verified equivalence across seeds") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto base = desk_base(16 + 8 * (seed % 3), 6 + 2 * (seed % 2), 2, seed);
        const auto w = weight_reduce_classical(base);
        REQUIRE(verify_homotopy(w.equiv));
        CHECK(bettis(w.equiv.a) == bettis(w.equiv.b));
        CHECK(w.equiv.b.bd[0] == base.boundary());
        // Every reduced check and bit has degree at most 3.
        CHECK(max_row_weight(w.equiv.a.bd[0]) <= 3);
        CHECK(w.equiv.a.bd[0].max_col_weight() <= 3);
        const auto kf = lipschitz(w.equiv.f), kg = lipschitz(w.equiv.g);
        CHECK(kf[1] >= 1);
        MESSAGE("seed " << seed << " K1(f)=" << kf[1] << " K1(g)=" << kg[1] << " K0(f)=" << kf[0]);
    }
}

TEST_CASE("distance transports through the classical equivalence") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto base = desk_base(16, 6, 2, seed);
        const auto w = weight_reduce_classical(base);
        ExactSearchOptions opt;
        opt.cell_budget = 0;
        const auto da = coset_min_weight_exact(w.equiv.a, 1, Mode::Homology, opt);
        const auto db = coset_min_weight_exact(w.equiv.b, 1, Mode::Homology, opt);
        REQUIRE(da);
        REQUIRE(db);
        const std::size_t k = lipschitz(w.equiv.f)[1];
        CHECK(*da * k >= *db);
        // The reduced code stretches codewords, so its distance is at least the original's.
        CHECK(*da >= *db);
    }
}

TEST_CASE("bundle weight reduction keeps logicals and caps stabilizer weight at six") {
    for (auto [n, delta, k, ell, seed] : {std::tuple{16ul, 6.0, 2ul, 3ul, 7ul}, std::tuple{24ul, 8.0, 2ul, 3ul, 3ul}}) {
        const Bundle bn = code_instance(n, delta, k, ell, seed);
        const auto r = weight_reduce_bundle(bn);
        CHECK(r.gauge_moves == 0);
        REQUIRE(verify_homotopy(r.equiv));
        const CssCode before = bn.css(), after = r.reduced.css();
        CHECK(after.k_logical == before.k_logical);
        CHECK(max_row_weight(after.h_x) <= 6);
        CHECK(max_row_weight(after.h_z) <= 6);
        const auto kf = lipschitz(r.equiv.f);
        MESSAGE("K1(f)=" << kf[1] << " max base degree " << std::max(bn.base.boundary().max_row_weight(),
                                                                    bn.base.boundary().max_col_weight()));
    }
}

TEST_CASE("untwisted torus reduces to weight six") {
    // DERIVED: reduced base degrees are <= 3, so a bundle stabilizer meets <= 3 base-direction cells and 2 fiber-direction cells.
    const Bundle bn = build_bundle(BaseComplex::circle(4), 3);
    const auto r = weight_reduce_bundle(bn);
    CHECK(verify_homotopy(r.equiv));
    CHECK(r.reduced.css().k_logical == 2);
    CHECK(max_row_weight(r.reduced.css().h_x) <= 6);
    CHECK(max_row_weight(r.reduced.css().h_z) <= 6);
}

TEST_CASE("gauge moves clear twists on rewritten cells") {
    const Bundle bn = code_instance(16, 6, 2, 3, 7);
    auto rb = reduce_base(bn.base);
    // Put nonzero twists on auxiliary incidences; the result is a different but equivalent bundle.
    std::mt19937_64 rng(12);
    for (std::size_t e = 0; e < rb.base.n1; ++e)
        for (auto& t : rb.base.tw[e])
            if (t == 0) t = rng() % bn.m_f;
    RewriteAudit audit;
    const auto r = contract_reduced_bundle(rb, bn.base, bn.m_f, bn.ell, &audit);
    CHECK(r.gauge_moves > 0);
    CHECK(verify_homotopy(r.equiv));
    CHECK(audit.steps == r.combines + r.collapses + r.gauge_moves);
    CHECK(audit.all_verified());
    CHECK(bettis(r.equiv.a) == bettis(r.equiv.b));
}

TEST_CASE("every single rewrite of both pipelines is itself a verified equivalence") {
    const Bundle bn = code_instance(16, 6, 2, 3, 3);
    RewriteAudit classical, bundle;
    const auto wr = weight_reduce_classical(bn.base, &classical);
    const auto br = weight_reduce_bundle(bn, &bundle);
    CHECK(classical.steps == wr.combines + wr.collapses);
    CHECK(classical.all_verified());
    CHECK(bundle.steps == br.combines + br.collapses + br.gauge_moves);
    CHECK(bundle.all_verified());
}

TEST_CASE("distance transports through a tiny bundle equivalence") {
    for (auto [L, M] : {std::pair{3ul, 2ul}, std::pair{2ul, 3ul}}) {
        const Bundle bn = build_bundle(BaseComplex::circle(L), M);
        const auto r = weight_reduce_bundle(bn);
        REQUIRE(verify_homotopy(r.equiv));
        ExactSearchOptions opt;
        opt.cell_budget = 0;
        const auto dza = coset_min_weight_exact(r.equiv.a, 1, Mode::Homology, opt);
        const auto dzb = coset_min_weight_exact(r.equiv.b, 1, Mode::Homology, opt);
        const auto dxa = coset_min_weight_exact(r.equiv.a, 1, Mode::Cohomology, opt);
        const auto dxb = coset_min_weight_exact(r.equiv.b, 1, Mode::Cohomology, opt);
        REQUIRE((dza && dzb && dxa && dxb));
        CHECK(*dzb == std::min(L, M));  // PAPER: toric distance
        CHECK(*dza * lipschitz(r.equiv.f)[1] >= *dzb);
        CHECK(*dxa * lipschitz_transpose(r.equiv.g)[1] >= *dxb);
    }
}

TEST_CASE("decode through the identity equivalence returns the inner output") {
    const auto c = one_complex(3, {{0, 1}, {1, 2}, {0, 2}, {0, 1}});
    const auto eq = identity_equivalence(c);
    const BitChain s(3, {0, 2});
    const auto r = decode_via_homotopy(eq, 1, [&](const BitChain& sb) {
        DecodeResult d;
        d.correction = BitChain(4, {2});
        d.success = Verdict::SyndromeMatchedOnly;
        CHECK(sb == s);
        return d;
    }, s);
    CHECK(r.success == Verdict::SyndromeMatchedOnly);
    CHECK(r.correction == BitChain(4, {2}));
}

TEST_CASE("weight-1 errors on the reduced code decode through the original") {
    // DERIVED: exhaustive single-bit sweep with a brute-force minimum-weight inner decoder on the
    // original base. K1(f) = 1 and the original distance is >= 3, so every single error is in range.
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto base = desk_base(16, 6, 2, seed);
        const auto w = weight_reduce_classical(base);
        const auto& eq = w.equiv;  // a = reduced, b = original
        REQUIRE(lipschitz(eq.f)[1] == 1);
        const Gf2Matrix& db = eq.b.bd[0];
        const auto inner = [&](const BitChain& sb) {
            DecodeResult d;
            d.correction = min_weight_preimage(db, sb);
            d.success = Verdict::SyndromeMatchedOnly;
            return d;
        };
        const std::size_t n = eq.a.dim(1);
        std::size_t exact = 0, used_h = 0;
        for (std::size_t bit = 0; bit < n; ++bit) {
            const BitChain e(n, {bit});
            const BitChain s = eq.a.bd[0].mul(e);
            used_h += !eq.h_a[0].apply(s).empty();
            const auto r = decode_via_homotopy(eq, 1, inner, s);
            REQUIRE(r.success != Verdict::Failed);
            CHECK(eq.a.bd[0].mul(r.correction) == s);
            exact += r.correction == e;  // no 2-cells: the coset of e is {e}
        }
        CHECK(exact == n);
        CHECK(used_h > 0);
    }
}

TEST_CASE("the reversed direction succeeds wherever the weight guarantee applies") {
    // Decoding the original through the reduced code: guaranteed when K1(f) * |e| <= (d_B - 1) / 2.
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto base = desk_base(16, 6, 2, seed);
        const auto eq = reversed(weight_reduce_classical(base).equiv);
        ExactSearchOptions opt;
        opt.cell_budget = 0;
        const std::size_t d_b = *coset_min_weight_exact(eq.b, 1, Mode::Homology, opt);
        const Gf2Matrix& db = eq.b.bd[0];
        const auto inner = [&](const BitChain& sb) {
            DecodeResult d;
            d.correction = min_weight_preimage(db, sb);
            d.success = Verdict::SyndromeMatchedOnly;
            return d;
        };
        std::size_t exact = 0, in_range = 0;
        for (std::size_t bit = 0; bit < base.n1; ++bit) {
            const BitChain e(base.n1, {bit});
            const BitChain s = eq.a.bd[0].mul(e);
            const auto r = decode_via_homotopy(eq, 1, inner, s);
            CHECK(eq.a.bd[0].mul(r.correction) == s);
            const bool ok = r.correction == e;
            exact += ok;
            if (2 * eq.f.f[1].apply(e).weight() + 1 <= d_b) {
                ++in_range;
                CHECK(ok);
            }
        }
        MESSAGE("seed " << seed << ": exact " << exact << " of " << base.n1 << ", guaranteed " << in_range
                        << ", K1 " << lipschitz(eq.f)[1] << ", d_B " << d_b);
    }
}

TEST_CASE("equivalences serialize as alist sets with a manifest") {
    const auto w = weight_reduce_classical(desk_base(16, 6, 2, 1));
    const auto dir = std::filesystem::temp_directory_path() / "fb_equiv_test";
    std::filesystem::remove_all(dir);
    write_equivalence(dir.string(), w.equiv, "reduced.complex", "base.complex");
    std::ifstream man(dir / "manifest.txt");
    std::string line;
    std::getline(man, line);
    CHECK(line == "homotopy_equivalence top 1");
    std::ifstream f1(dir / "f_1.alist");
    CHECK(read_alist(f1) == w.equiv.f.f[1].to_dense());
    std::ifstream h0(dir / "h_a_0.alist");
    CHECK(read_alist(h0) == w.equiv.h_a[0].to_dense());
    std::filesystem::remove_all(dir);
}
