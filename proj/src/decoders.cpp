#include "fbcode/decoders.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fb {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::VerifiedCosetCorrect: return "verified-coset-correct";
        case Verdict::SyndromeMatchedOnly: return "syndrome-matched-only";
        case Verdict::Failed: return "failed";
    }
    return "?";
}

namespace {

std::vector<std::vector<std::size_t>> rows_of(const Gf2Matrix& m) {
    std::vector<std::vector<std::size_t>> r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) r[i] = m.row_support(i);
    return r;
}

}  // namespace

DecoderContext::DecoderContext(const Bundle& bn)
    : bn_(&bn),
      cob0_(rows_of(bn.complex.bd[0])),
      bd1_(bn.complex.bd[0].col_supports()),
      cob1_(rows_of(bn.complex.bd[1])),
      bd2_(bn.complex.bd[1].col_supports()),
      base_cob_(bn.base.coboundary()),
      x_image_(bn.complex.bd[1].transpose()),
      z_image_(bn.complex.bd[0]),
      coboundaries_(bn.complex.bd[0].transpose()),
      boundaries_(bn.complex.bd[1]),
      base_cob_solver_(bn.base.boundary().transpose()) {}

std::optional<std::vector<std::size_t>> DecoderContext::base_coboundary_preimage(const BitChain& target) const {
    const auto x = base_cob_solver_.solve(target.to_vec());
    if (!x) return std::nullopt;
    return x->support();
}

BitChain DecoderContext::x_syndrome(const BitChain& e1) const {
    std::vector<std::size_t> s;
    for (auto i : e1.support()) s.insert(s.end(), cob1_[i].begin(), cob1_[i].end());
    return BitChain(bn_->complex.dim(2), std::move(s));
}

BitChain DecoderContext::z_syndrome(const BitChain& e1) const {
    std::vector<std::size_t> s;
    for (auto i : e1.support()) s.insert(s.end(), bd1_[i].begin(), bd1_[i].end());
    return BitChain(bn_->complex.dim(0), std::move(s));
}

bool DecoderContext::x_syndrome_valid(const BitChain& s2) const { return x_image_.consistent(s2.to_vec()); }
bool DecoderContext::z_syndrome_valid(const BitChain& s0) const { return z_image_.consistent(s0.to_vec()); }

bool DecoderContext::x_coset_equal(const BitChain& a, const BitChain& b) const {
    return coboundaries_.consistent((a ^ b).to_vec());
}

bool DecoderContext::z_coset_equal(const BitChain& a, const BitChain& b) const {
    return boundaries_.consistent((a ^ b).to_vec());
}

std::optional<std::vector<std::size_t>> greedy_flip(const std::vector<std::vector<std::size_t>>& adj,
                                                    std::size_t n_checks, const BitChain& target,
                                                    std::size_t& steps) {
    if (target.length() != n_checks) throw std::invalid_argument("greedy_flip: target length");
    std::vector<char> viol(n_checks, 0);
    std::size_t n_viol = 0;
    for (auto c : target.support()) {
        viol[c] = 1;
        ++n_viol;
    }
    std::vector<char> chosen(adj.size(), 0);
    steps = 0;
    const std::size_t cap = adj.size() + n_checks + 1;
    while (n_viol > 0) {
        long best_gain = 0;
        std::size_t best = adj.size();
        for (std::size_t u = 0; u < adj.size(); ++u) {
            long g = 0;
            for (auto c : adj[u]) g += viol[c] ? 1 : -1;
            if (g > best_gain) {
                best_gain = g;
                best = u;
            }
        }
        if (best == adj.size() || ++steps > cap) return std::nullopt;
        chosen[best] ^= 1;
        for (auto c : adj[best]) {
            viol[c] ^= 1;
            if (viol[c]) ++n_viol;
            else --n_viol;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < adj.size(); ++u)
        if (chosen[u]) out.push_back(u);
    return out;
}

BitChain horizontal_completion(const Bundle& bn, const BitChain& r) {
    const std::size_t m = bn.m_f;
    if (r.length() != bn.complex.dim(2)) throw std::invalid_argument("horizontal_completion: chain length");
    std::vector<std::vector<char>> per(bn.base.n1);
    for (auto c : r.support()) {
        auto& row = per[c / m];
        if (row.empty()) row.assign(m, 0);
        row[c % m] ^= 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < bn.base.n1; ++b) {
        if (per[b].empty()) continue;
        const auto& rb = per[b];
        if (std::count(rb.begin(), rb.end(), 1) % 2) throw std::logic_error("horizontal_completion: odd fiber");
        // Cell (b,i) is hit by 2-cells (b,i-1) and (b,i): x_{i+1} = x_i + r_i with x_0 = 0.
        std::vector<char> x(m, 0);
        for (std::size_t i = 0; i + 1 < m; ++i) x[i + 1] = x[i] ^ rb[i];
        const auto w = static_cast<std::size_t>(std::count(x.begin(), x.end(), 1));
        const bool flip = 2 * w > m;
        for (std::size_t i = 0; i < m; ++i)
            if (x[i] ^ flip) out.push_back(bn.horizontal(b, i));
    }
    return BitChain(bn.complex.dim(1), std::move(out));
}

std::optional<Amendment> fixable_test(const DecoderContext& ctx, const BitVec& e, std::size_t a,
                                      const FixOptions& opt) {
    const Bundle& bn = ctx.bundle();
    const std::size_t m = bn.m_f;
    const auto& rows = ctx.base_cob().at(a);
    const std::size_t q = rows.size();
    if (q == 0) return std::nullopt;

    // grid[i][j]: occupancy of b_i (x) f0_{j - phi(b_i, a)}.
    std::vector<std::vector<char>> grid(q, std::vector<char>(m, 0));
    std::size_t before = 0;
    std::vector<std::size_t> row_count(q, 0), col_count(m, 0);
    for (std::size_t i = 0; i < q; ++i) {
        const std::size_t phi = bn.base.twist(rows[i], a) % m;
        for (std::size_t j = 0; j < m; ++j)
            if (e.get(bn.horizontal(rows[i], j + m - phi))) {
                grid[i][j] = 1;
                ++row_count[i];
                ++col_count[j];
                ++before;
            }
    }
    if (before == 0) return std::nullopt;

    Amendment am;
    am.cell = a;
    am.before = before;
    am.row_violation = std::any_of(row_count.begin(), row_count.end(), [&](std::size_t c) { return 2 * c > m; });
    am.column_violation = std::any_of(col_count.begin(), col_count.end(), [&](std::size_t c) { return 2 * c > q; });

    // c[j] = number of rows i with grid[i][j] != x_i; with the best y_j the column keeps min(c, q - c).
    std::vector<std::size_t> c = col_count;
    auto total = [&] {
        std::size_t t = 0;
        for (std::size_t j = 0; j < m; ++j) t += std::min(c[j], q - c[j]);
        return t;
    };
    auto flip_row = [&](std::size_t i, std::vector<char>& x) {
        for (std::size_t j = 0; j < m; ++j) {
            if (grid[i][j] == x[i]) ++c[j];
            else --c[j];
        }
        x[i] ^= 1;
    };
    std::vector<char> x(q, 0), best_x(q, 0);
    std::size_t best = total();

    if (opt.mode == FixMode::Exact) {
        if (q > opt.exact_degree_limit) throw std::invalid_argument("fixable_test: coboundary too large for exact mode");
        const std::uint64_t count = std::uint64_t{1} << q;
        for (std::uint64_t g = 1; g < count; ++g) {
            flip_row(static_cast<std::size_t>(std::countr_zero(g)), x);
            const std::size_t t = total();
            if (t < best) {
                best = t;
                best_x = x;
            }
        }
    } else {
        // Alternate majority updates of y (implicit in c) and x until neither moves, from two
        // starts: x = 0 and x = per-row majority. Keep the better local optimum.
        auto descend = [&](std::vector<char>& xs) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (std::size_t i = 0; i < q; ++i) {
                    std::size_t occ = 0, occ_flipped = 0;
                    for (std::size_t j = 0; j < m; ++j) {
                        const bool yj = q - c[j] < c[j];
                        const bool here = (grid[i][j] ^ xs[i] ^ yj) != 0;
                        occ += here;
                        occ_flipped += !here;
                    }
                    if (occ_flipped < occ) {
                        flip_row(i, xs);
                        moved = true;
                    }
                }
            }
            return total();
        };
        best = descend(x);
        best_x = x;
        std::vector<char> x2(q, 0);
        c = col_count;
        for (std::size_t i = 0; i < q; ++i)
            if (2 * row_count[i] > m) flip_row(i, x2);
        if (const std::size_t t = descend(x2); t < best) {
            best = t;
            best_x = x2;
        }
    }

    am.ratio_violation = static_cast<double>(before) >
                         opt.ratio * static_cast<double>(best) + (1 - opt.ratio) * static_cast<double>(q * m);
    if (!(am.row_violation || am.column_violation || am.ratio_violation)) return std::nullopt;

    // Rebuild column counts for the chosen x, then take y by strict majority.
    std::fill(x.begin(), x.end(), 0);
    c = col_count;
    for (std::size_t i = 0; i < q; ++i)
        if (best_x[i]) flip_row(i, x);
    am.x = x;
    am.y.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) am.y[j] = q - c[j] < c[j];
    am.after = total();
    if (am.after >= am.before) throw std::logic_error("fixable_test: amendment does not reduce weight");
    return am;
}

namespace {

void apply_amendment(const DecoderContext& ctx, const Amendment& am, BitVec& e) {
    const Bundle& bn = ctx.bundle();
    const auto& rows = ctx.base_cob()[am.cell];
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (am.x[i])
            for (std::size_t k = 0; k < bn.m_f; ++k) e.flip(bn.horizontal(rows[i], k));
    for (std::size_t j = 0; j < bn.m_f; ++j)
        if (am.y[j])
            for (auto cell : ctx.cob0()[bn.cell0(am.cell, j)]) e.flip(cell);
}

std::size_t horizontal_weight(const Bundle& bn, const BitVec& e) {
    std::size_t w = 0;
    for (auto i : e.support()) {
        if (!bn.is_horizontal(i)) break;
        ++w;
    }
    return w;
}

}  // namespace

DecodeResult decode_x(const DecoderContext& ctx, const BitChain& s, const XDecodeOptions& opt) {
    const Bundle& bn = ctx.bundle();
    const std::size_t m = bn.m_f;
    if (s.length() != bn.complex.dim(2)) throw std::invalid_argument("decode_x: syndrome length");
    if (!ctx.x_syndrome_valid(s)) throw std::invalid_argument("decode_x: syndrome is not a coboundary");
    DecodeResult res;
    res.correction = BitChain(bn.complex.dim(1));
    if (s.empty()) {
        res.success = Verdict::SyndromeMatchedOnly;
        return res;
    }

    // Stage 1: base 0-chain e_b with coboundary K(s), lifted to e_b (x) f1_0 plus a horizontal completion.
    const BitChain ks = k_map(bn, 2, s);
    std::size_t flips = 0;
    auto eb = greedy_flip(ctx.base_cob(), bn.base.n1, ks, flips);
    res.notes["stage1_flips"] = static_cast<double>(flips);
    if (!eb) {
        // Greedy flipping can stall on decoys; the preimage is unique when the base boundary has full rank.
        eb = ctx.base_coboundary_preimage(ks);
        res.notes["stage1_solver_fallback"] = 1;
    }
    if (!eb) {
        res.steps = flips;
        res.notes["stage1_stalled"] = 1;
        return res;
    }
    std::vector<std::size_t> vert;
    for (auto a : *eb) vert.push_back(bn.vertical(a, 0));
    BitChain e_arb(bn.complex.dim(1), vert);
    e_arb ^= horizontal_completion(bn, s ^ ctx.x_syndrome(e_arb));
    res.notes["e_arb_vsw"] = static_cast<double>(shadow_weights(bn, e_arb).vsw);
    res.notes["e_arb_weight"] = static_cast<double>(e_arb.weight());

    // Stage 2: whole-fiber flips first, then amend fixable 0-cells until none remain.
    BitVec e = e_arb.to_vec();
    std::vector<std::size_t> per_b(bn.base.n1, 0);
    for (auto i : e.support()) {
        if (!bn.is_horizontal(i)) break;
        ++per_b[i / m];
    }
    for (std::size_t b = 0; b < bn.base.n1; ++b)
        if (2 * per_b[b] > m)
            for (std::size_t k = 0; k < m; ++k) e.flip(bn.horizontal(b, k));

    // Apply the amendment with the largest weight drop; only 0-cells sharing a base 1-cell with
    // the amended one can change, so the others keep their cached verdicts.
    const std::size_t limit = bn.n_qubits();
    std::vector<std::optional<Amendment>> cache(bn.base.n0);
    std::vector<char> stale(bn.base.n0, 1);
    std::size_t fixes = 0;
    while (true) {
        std::optional<std::size_t> pick;
        for (std::size_t a = 0; a < bn.base.n0; ++a) {
            if (stale[a]) {
                cache[a] = fixable_test(ctx, e, a, opt.fix);
                stale[a] = 0;
            }
            if (cache[a] && (!pick || cache[a]->before - cache[a]->after >
                                          cache[*pick]->before - cache[*pick]->after))
                pick = a;
        }
        if (!pick) break;
        const std::size_t hw = horizontal_weight(bn, e);
        apply_amendment(ctx, *cache[*pick], e);
        if (horizontal_weight(bn, e) >= hw) throw std::logic_error("decode_x: amendment did not reduce weight");
        if (++fixes > limit) throw std::logic_error("decode_x: more than N amendments");
        for (auto b : ctx.base_cob()[*pick])
            for (auto a : bn.base.bd[b]) stale[a] = 1;
    }
    res.notes["fixes"] = static_cast<double>(fixes);
    res.steps = flips + fixes;
    res.correction = e.to_chain();
    if (ctx.x_syndrome(res.correction) != s) throw std::logic_error("decode_x: correction lost the syndrome");
    res.success = Verdict::SyndromeMatchedOnly;
    return res;
}

DecodeResult decode_erasure_x(const DecoderContext& ctx, const BitChain& erased, const BitChain& s_in) {
    const Bundle& bn = ctx.bundle();
    const std::size_t n1 = bn.complex.dim(1);
    if (erased.length() != n1) throw std::invalid_argument("decode_erasure_x: erasure length");
    if (s_in.length() != bn.complex.dim(2)) throw std::invalid_argument("decode_erasure_x: syndrome length");

    std::vector<char> in_d(n1, 0);
    for (auto i : erased.support()) in_d[i] = 1;
    std::size_t d_size = erased.weight();
    BitVec s = s_in.to_vec();
    BitVec corr(n1);
    std::size_t removals = 0, pushes = 0;
    DecodeResult res;

    // A 2-cell certifies e when it meets no erased cell other than e (and `skip`).
    auto private_cell = [&](std::size_t e, std::size_t skip) -> std::optional<std::size_t> {
        for (auto c : ctx.cob1()[e]) {
            bool alone = true;
            for (auto o : ctx.bd2()[c])
                if (o != e && o != skip && in_d[o]) {
                    alone = false;
                    break;
                }
            if (alone) return c;
        }
        return std::nullopt;
    };

    std::size_t max_deg = 1;
    for (const auto& l : ctx.cob0()) max_deg = std::max(max_deg, l.size());
    const std::size_t guard = 16 * (d_size + 1) * max_deg * max_deg + 64;

    while (d_size > 0) {
        if (removals + pushes > guard) {
            res.notes["guard_hit"] = 1;
            break;
        }
        bool progressed = false;
        for (std::size_t e = 0; e < n1 && !progressed; ++e) {
            if (!in_d[e]) continue;
            const auto c = private_cell(e, n1);
            if (!c) continue;
            if (s.get(*c)) {
                corr.flip(e);
                for (auto c2 : ctx.cob1()[e]) s.flip(c2);
            }
            in_d[e] = 0;
            --d_size;
            ++removals;
            progressed = true;
        }
        if (progressed) continue;

        // Stabilizer push over pairs (u, v), u a bundle 0-cell and v an erased vertical cell in its coboundary.
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t v = bn.n_horizontal(); v < n1; ++v)
            if (in_d[v])
                for (auto u : ctx.bd1()[v]) pairs.emplace_back(u, v);
        std::sort(pairs.begin(), pairs.end());
        for (auto [u, v] : pairs) {
            std::size_t horiz = 0, good = 0;
            for (auto h : ctx.cob0()[u]) {
                if (!bn.is_horizontal(h)) continue;
                ++horiz;
                if (in_d[h] && private_cell(h, v)) ++good;
            }
            if (2 * good <= horiz) continue;
            in_d[v] = 0;
            --d_size;
            for (auto w : ctx.cob0()[u])
                if (w != v && !in_d[w]) {
                    in_d[w] = 1;
                    ++d_size;
                }
            ++pushes;
            progressed = true;
            break;
        }
        if (!progressed) break;
    }

    res.steps = removals + pushes;
    res.notes["removals"] = static_cast<double>(removals);
    res.notes["pushes"] = static_cast<double>(pushes);
    res.notes["remaining"] = static_cast<double>(d_size);
    res.correction = corr.to_chain();
    if (d_size > 0) return res;
    if (s.any()) throw std::logic_error("decode_erasure_x: residual syndrome after emptying the erasure");
    // Emptying the erasure leaves a zero residual, so the correction is coset-correct by construction.
    res.success = Verdict::VerifiedCosetCorrect;
    return res;
}

DecodeResult decode_z(const DecoderContext& ctx, const BitChain& s0, const ZDecodeOptions& opt) {
    const Bundle& bn = ctx.bundle();
    const auto& B = bn.base;
    const std::size_t m = bn.m_f;
    if (s0.length() != bn.complex.dim(0)) throw std::invalid_argument("decode_z: syndrome length");
    if (!ctx.z_syndrome_valid(s0)) throw std::invalid_argument("decode_z: syndrome is not a boundary");
    DecodeResult res;
    res.experimental = true;
    res.correction = BitChain(bn.complex.dim(1));
    if (s0.empty()) {
        res.success = Verdict::SyndromeMatchedOnly;
        return res;
    }
    const std::size_t r_max = opt.r_max >= 0 ? static_cast<std::size_t>(opt.r_max) : (bn.ell ? bn.ell : m) / 4;

    BitVec s = s0.to_vec();
    BitVec u(bn.complex.dim(1));
    auto toggle = [&](std::size_t cell1) {
        u.flip(cell1);
        for (auto p : ctx.bd1()[cell1]) s.flip(p);
    };
    // Fiber string on fiber a from position p by `len` steps (negative: downward).
    auto string = [&](std::size_t a, std::size_t p, long len) {
        const long mm = static_cast<long>(m);
        const long lo = len >= 0 ? static_cast<long>(p) : static_cast<long>(p) + len;
        for (long t = 0; t < std::abs(len); ++t)
            toggle(bn.vertical(a, static_cast<std::size_t>(((lo + t) % mm + mm) % mm)));
    };
    auto offset_hit = [&](std::size_t a, std::size_t p, std::size_t r) -> std::optional<long> {
        for (long d = 0; d <= static_cast<long>(r); ++d)
            for (long sgn : {1L, -1L}) {
                if (d == 0 && sgn < 0) continue;
                const long mm = static_cast<long>(m);
                const auto q = static_cast<std::size_t>(((static_cast<long>(p) + sgn * d) % mm + mm) % mm);
                if (s.get(bn.cell0(a, q))) return sgn * d;
            }
        return std::nullopt;
    };

    std::size_t moves = 0;
    for (std::size_t r = 0; r <= r_max; ++r) {
        while (true) {
            long best_gain = 0;
            int kind = 0;  // 1 string, 2 horizontal
            std::size_t best_a = 0, best_p = 0, best_b = 0, best_i = 0;
            long best_len = 0;
            for (auto pt : s.support()) {
                const std::size_t a = pt / m, p = pt % m;
                for (std::size_t len = 1; len <= r && best_gain < 2; ++len)
                    if (s.get(bn.cell0(a, p + len))) {
                        best_gain = 2;
                        kind = 1;
                        best_a = a;
                        best_p = p;
                        best_len = static_cast<long>(len);
                    }
                if (best_gain >= 2) break;
            }
            for (std::size_t b = 0; b < B.n1; ++b)
                for (std::size_t i = 0; i < m; ++i) {
                    long g = 0;
                    for (std::size_t k = 0; k < B.bd[b].size(); ++k)
                        g += offset_hit(B.bd[b][k], (i + B.tw[b][k]) % m, r) ? 1 : -1;
                    if (g > best_gain) {
                        best_gain = g;
                        kind = 2;
                        best_b = b;
                        best_i = i;
                    }
                }
            if (best_gain <= 0) break;
            ++moves;
            if (kind == 1) {
                string(best_a, best_p, best_len);
            } else {
                std::vector<std::pair<std::size_t, std::size_t>> ends;
                std::vector<long> offs;
                for (std::size_t k = 0; k < B.bd[best_b].size(); ++k) {
                    const std::size_t a = B.bd[best_b][k], p = (best_i + B.tw[best_b][k]) % m;
                    ends.emplace_back(a, p);
                    offs.push_back(offset_hit(a, p, r).value_or(0));
                }
                toggle(bn.horizontal(best_b, best_i));
                for (std::size_t k = 0; k < ends.size(); ++k) string(ends[k].first, ends[k].second, offs[k]);
            }
            if (moves > bn.n_qubits() * (r_max + 1) + s0.weight()) throw std::logic_error("decode_z: greedy did not settle");
        }
    }
    res.notes["greedy_moves"] = static_cast<double>(moves);

    // Project the leftover to the base, solve there, lift at fiber position 0, close up vertically.
    std::vector<std::size_t> proj;
    for (auto pt : s.support()) proj.push_back(pt / m);
    std::size_t flips = 0;
    const auto w = greedy_flip(B.bd, B.n0, BitChain(B.n0, std::move(proj)), flips);
    res.notes["base_flips"] = static_cast<double>(flips);
    res.steps = moves + flips;
    if (!w) {
        res.notes["base_stalled"] = 1;
        return res;
    }
    for (auto b : *w) toggle(bn.horizontal(b, 0));
    std::vector<std::vector<std::size_t>> per_fiber(B.n0);
    for (auto pt : s.support()) per_fiber[pt / m].push_back(pt % m);
    for (std::size_t a = 0; a < B.n0; ++a) {
        if (per_fiber[a].empty()) continue;
        if (per_fiber[a].size() % 2) return res;
        for (auto j : fiber_path(m, per_fiber[a])) toggle(bn.vertical(a, j));
    }
    if (s.any()) return res;
    res.correction = u.to_chain();
    res.success = Verdict::SyndromeMatchedOnly;
    return res;
}

BitChain random_error(std::size_t length, std::size_t weight, std::mt19937_64& rng) {
    if (weight > length) throw std::invalid_argument("random_error: weight exceeds length");
    std::vector<std::size_t> all(length);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> pick;
    std::sample(all.begin(), all.end(), std::back_inserter(pick), weight, rng);
    return BitChain(length, std::move(pick));
}

const char* erasure_shape_name(ErasureShape s) {
    switch (s) {
        case ErasureShape::FiberInterval: return "fiber-interval";
        case ErasureShape::StabilizerSupport: return "stabilizer-support";
        case ErasureShape::RandomCells: return "random-cells";
    }
    return "?";
}

ErasureSample sample_erasure(const DecoderContext& ctx, std::size_t max_size, std::mt19937_64& rng) {
    if (max_size == 0) throw std::invalid_argument("sample_erasure: empty bound");
    const Bundle& bn = ctx.bundle();
    const std::size_t n1 = bn.complex.dim(1);
    ErasureSample out;
    out.shape = static_cast<ErasureShape>(std::uniform_int_distribution<int>(0, 2)(rng));
    std::vector<std::size_t> cells;
    switch (out.shape) {
        case ErasureShape::FiberInterval: {
            const std::size_t b = std::uniform_int_distribution<std::size_t>(0, bn.base.n1 - 1)(rng);
            const std::size_t start = std::uniform_int_distribution<std::size_t>(0, bn.m_f - 1)(rng);
            const std::size_t len = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, bn.m_f))(rng);
            for (std::size_t t = 0; t < len; ++t) cells.push_back(bn.horizontal(b, start + t));
            break;
        }
        case ErasureShape::StabilizerSupport: {
            const std::size_t u = std::uniform_int_distribution<std::size_t>(0, bn.complex.dim(0) - 1)(rng);
            cells = ctx.cob0()[u];
            std::shuffle(cells.begin(), cells.end(), rng);
            const std::size_t len =
                std::uniform_int_distribution<std::size_t>(1, std::min(max_size, cells.size()))(rng);
            cells.resize(len);
            break;
        }
        case ErasureShape::RandomCells: {
            const std::size_t len = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, n1))(rng);
            cells = random_error(n1, len, rng).support();
            break;
        }
    }
    out.erased = BitChain(n1, cells);
    std::vector<std::size_t> err;
    for (auto c : out.erased.support())
        if (rng() & 1) err.push_back(c);
    out.error = BitChain(n1, std::move(err));
    return out;
}

}  // namespace fb
