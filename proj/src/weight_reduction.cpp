#include "fbcode/weight_reduction.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fb {

namespace {

using List = std::vector<std::size_t>;

// Sorts and cancels repeated entries in pairs.
void normalize(List& l) {
    std::sort(l.begin(), l.end());
    List out;
    for (std::size_t i = 0; i < l.size();) {
        std::size_t j = i;
        while (j < l.size() && l[j] == l[i]) ++j;
        if ((j - i) % 2) out.push_back(l[i]);
        i = j;
    }
    l.swap(out);
}

List sum_of(const std::vector<List>& cols, const List& picks) {
    List acc;
    for (auto p : picks) acc.insert(acc.end(), cols[p].begin(), cols[p].end());
    normalize(acc);
    return acc;
}

}  // namespace

SparseMap::SparseMap(std::size_t rows, std::vector<std::vector<std::size_t>> cols)
    : rows_(rows), cols_(std::move(cols)) {
    for (auto& c : cols_) {
        normalize(c);
        if (!c.empty() && c.back() >= rows_) throw std::out_of_range("SparseMap: row index");
    }
}

SparseMap SparseMap::identity(std::size_t n) {
    std::vector<List> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = {i};
    return SparseMap(n, std::move(c));
}

SparseMap SparseMap::from_dense(const Gf2Matrix& m) { return SparseMap(m.rows(), m.col_supports()); }

Gf2Matrix SparseMap::to_dense() const { return Gf2Matrix::from_cols(rows_, cols(), cols_); }

SparseMap SparseMap::transpose() const {
    std::vector<List> t(rows_);
    for (std::size_t j = 0; j < cols_.size(); ++j)
        for (auto i : cols_[j]) t[i].push_back(j);
    return SparseMap(cols(), std::move(t));
}

BitChain SparseMap::apply(const BitChain& x) const {
    if (x.length() != cols()) throw std::invalid_argument("SparseMap::apply: length");
    return BitChain(rows_, sum_of(cols_, x.support()));
}

std::size_t SparseMap::max_col_weight() const {
    std::size_t w = 0;
    for (const auto& c : cols_) w = std::max(w, c.size());
    return w;
}

bool SparseMap::is_zero() const {
    return std::all_of(cols_.begin(), cols_.end(), [](const List& c) { return c.empty(); });
}

SparseMap SparseMap::operator*(const SparseMap& o) const {
    if (cols() != o.rows_) throw std::invalid_argument("SparseMap: product shape");
    std::vector<List> out(o.cols());
    for (std::size_t j = 0; j < o.cols(); ++j) out[j] = sum_of(cols_, o.cols_[j]);
    SparseMap r(rows_, o.cols());
    r.cols_ = std::move(out);
    return r;
}

SparseMap SparseMap::operator+(const SparseMap& o) const {
    if (rows_ != o.rows_ || cols() != o.cols()) throw std::invalid_argument("SparseMap: sum shape");
    std::vector<List> out(cols());
    for (std::size_t j = 0; j < cols(); ++j) {
        out[j] = cols_[j];
        out[j].insert(out[j].end(), o.cols_[j].begin(), o.cols_[j].end());
    }
    return SparseMap(rows_, std::move(out));
}

namespace {

SparseMap bd_map(const ChainComplex& c, int j) {
    if (j >= 1 && j <= c.top()) return SparseMap::from_dense(c.bd[static_cast<std::size_t>(j - 1)]);
    return SparseMap(j >= 1 ? c.dim(j - 1) : 0, j <= c.top() ? c.dim(j) : 0);
}

// The homotopy identity g f - I = h d + d h at degree j on complex x.
bool homotopy_identity(const ChainComplex& x, const SparseMap& gf, const std::vector<SparseMap>& h, int j) {
    const std::size_t n = x.dim(j);
    SparseMap lhs = gf + SparseMap::identity(n);
    SparseMap rhs(n, n);
    if (j >= 1) rhs = rhs + h[static_cast<std::size_t>(j - 1)] * bd_map(x, j);
    if (j < x.top()) rhs = rhs + bd_map(x, j + 1) * h[static_cast<std::size_t>(j)];
    return lhs == rhs;
}

bool shapes_ok(const HomotopyEquivalence& eq) {
    const int t = eq.a.top();
    if (eq.b.top() != t) return false;
    const auto nt = static_cast<std::size_t>(t);
    if (eq.f.f.size() != nt + 1 || eq.g.f.size() != nt + 1 || eq.h_a.size() != nt || eq.h_b.size() != nt) return false;
    for (int j = 0; j <= t; ++j) {
        const auto u = static_cast<std::size_t>(j);
        if (eq.f.f[u].rows() != eq.b.dim(j) || eq.f.f[u].cols() != eq.a.dim(j)) return false;
        if (eq.g.f[u].rows() != eq.a.dim(j) || eq.g.f[u].cols() != eq.b.dim(j)) return false;
        if (j < t) {
            if (eq.h_a[u].rows() != eq.a.dim(j + 1) || eq.h_a[u].cols() != eq.a.dim(j)) return false;
            if (eq.h_b[u].rows() != eq.b.dim(j + 1) || eq.h_b[u].cols() != eq.b.dim(j)) return false;
        }
    }
    return true;
}

}  // namespace

bool is_chain_map(const ChainComplex& src, const ChainComplex& dst, const ChainMap& m) {
    if (src.top() != dst.top() || m.f.size() != src.dims.size()) return false;
    for (int j = 1; j <= src.top(); ++j) {
        const auto u = static_cast<std::size_t>(j);
        if (bd_map(dst, j) * m.f[u] != m.f[u - 1] * bd_map(src, j)) return false;
    }
    return true;
}

bool verify_homotopy(const HomotopyEquivalence& eq) {
    if (!shapes_ok(eq)) return false;
    if (!is_chain_map(eq.a, eq.b, eq.f) || !is_chain_map(eq.b, eq.a, eq.g)) return false;
    for (int j = 0; j <= eq.a.top(); ++j) {
        const auto u = static_cast<std::size_t>(j);
        if (!homotopy_identity(eq.a, eq.g.f[u] * eq.f.f[u], eq.h_a, j)) return false;
        if (!homotopy_identity(eq.b, eq.f.f[u] * eq.g.f[u], eq.h_b, j)) return false;
    }
    return true;
}

std::vector<std::size_t> lipschitz(const ChainMap& m) {
    std::vector<std::size_t> k;
    for (const auto& f : m.f) k.push_back(f.max_col_weight());
    return k;
}

std::vector<std::size_t> lipschitz_transpose(const ChainMap& m) {
    std::vector<std::size_t> k;
    for (const auto& f : m.f) k.push_back(f.transpose().max_col_weight());
    return k;
}

HomotopyEquivalence identity_equivalence(const ChainComplex& c) {
    HomotopyEquivalence eq{c, c, {}, {}, {}, {}};
    for (int j = 0; j <= c.top(); ++j) {
        eq.f.f.push_back(SparseMap::identity(c.dim(j)));
        eq.g.f.push_back(SparseMap::identity(c.dim(j)));
        if (j < c.top()) {
            eq.h_a.emplace_back(c.dim(j + 1), c.dim(j));
            eq.h_b.emplace_back(c.dim(j + 1), c.dim(j));
        }
    }
    return eq;
}

HomotopyEquivalence reversed(const HomotopyEquivalence& eq) {
    return HomotopyEquivalence{eq.b, eq.a, eq.g, eq.f, eq.h_b, eq.h_a};
}

HomotopyEquivalence dual_equivalence(const HomotopyEquivalence& eq) {
    const int t = eq.a.top();
    HomotopyEquivalence d{dual_complex(eq.a), dual_complex(eq.b), {}, {}, {}, {}};
    for (int j = 0; j <= t; ++j) {
        const auto src = static_cast<std::size_t>(t - j);
        d.f.f.push_back(eq.g.f[src].transpose());
        d.g.f.push_back(eq.f.f[src].transpose());
    }
    for (int j = 0; j < t; ++j) {
        const auto src = static_cast<std::size_t>(t - j - 1);
        d.h_a.push_back(eq.h_a[src].transpose());
        d.h_b.push_back(eq.h_b[src].transpose());
    }
    return d;
}

namespace {

// One elementary equivalence on the current complex, in stable cell ids. Cells absent from f map to
// themselves unless removed (then to 0); cells absent from g map to themselves.
struct Step {
    std::vector<List> removed;
    std::vector<std::map<std::size_t, List>> f, g, h;

    explicit Step(int top)
        : removed(static_cast<std::size_t>(top) + 1),
          f(static_cast<std::size_t>(top) + 1),
          g(static_cast<std::size_t>(top) + 1),
          h(static_cast<std::size_t>(top)) {}
};

// Composes elementary equivalences starting from A0 = the input complex. Every current cell keeps
// its A0 id, so F, G and the running boundary all live in A0 coordinates.
// Invariants: F G = I on the current complex; G F - I = H d + d H on A0.
class Rewriter {
public:
    explicit Rewriter(const ChainComplex& a) : a0_(a), top_(a.top()) {
        const auto nd = a.dims.size();
        alive_.resize(nd);
        F_.resize(nd);
        G_.resize(nd);
        H_.resize(nd - 1);
        bd_.resize(nd);
        cob_.resize(nd);
        for (std::size_t j = 0; j < nd; ++j) {
            alive_[j].assign(a.dims[j], 1);
            F_[j].resize(a.dims[j]);
            G_[j].resize(a.dims[j]);
            for (std::size_t x = 0; x < a.dims[j]; ++x) F_[j][x] = G_[j][x] = {x};
            if (j + 1 < nd) H_[j].resize(a.dims[j]);
            cob_[j].resize(a.dims[j]);
        }
        for (std::size_t j = 1; j < nd; ++j) {
            bd_[j] = a.bd[j - 1].col_supports();
            for (std::size_t x = 0; x < bd_[j].size(); ++x)
                for (auto y : bd_[j][x]) cob_[j - 1][y].push_back(x);
        }
    }

    void set_audit(RewriteAudit* audit) { audit_ = audit; }

    const List& boundary(std::size_t j, std::size_t x) const { return bd_[j][x]; }
    const List& coboundary(std::size_t j, std::size_t x) const { return cob_[j][x]; }
    bool alive(std::size_t j, std::size_t x) const { return alive_[j][x] != 0; }

    void apply(const Step& s) {
        if (audit_) {
            ++audit_->steps;
            audit_->verified += audit_step(s) ? 1 : 0;
        }
        const std::size_t nd = alive_.size();
        std::vector<std::vector<char>> gone(nd), touched(nd);
        for (std::size_t j = 0; j < nd; ++j) {
            gone[j].assign(alive_[j].size(), 0);
            touched[j].assign(alive_[j].size(), 0);
            for (auto x : s.removed[j]) {
                if (!alive_[j][x]) throw std::logic_error("rewrite: cell already removed");
                gone[j][x] = touched[j][x] = 1;
            }
            for (const auto& [x, img] : s.f[j]) touched[j][x] = 1;
        }
        auto f_image = [&](std::size_t j, std::size_t y, List& out) {
            if (!touched[j][y]) {
                out.push_back(y);
                return;
            }
            if (auto it = s.f[j].find(y); it != s.f[j].end()) out.insert(out.end(), it->second.begin(), it->second.end());
        };

        // H' = H + G h F, using the old F and G.
        for (std::size_t j = 0; j + 1 < nd; ++j) {
            if (s.h[j].empty()) continue;
            for (std::size_t x = 0; x < F_[j].size(); ++x) {
                List acc;
                for (auto y : F_[j][x])
                    if (auto it = s.h[j].find(y); it != s.h[j].end())
                        for (auto z : it->second) acc.insert(acc.end(), G_[j + 1][z].begin(), G_[j + 1][z].end());
                if (acc.empty()) continue;
                acc.insert(acc.end(), H_[j][x].begin(), H_[j][x].end());
                normalize(acc);
                H_[j][x] = std::move(acc);
            }
        }
        // F' = f F.
        for (std::size_t j = 0; j < nd; ++j)
            for (auto& col : F_[j]) {
                if (std::none_of(col.begin(), col.end(), [&](std::size_t y) { return touched[j][y] != 0; })) continue;
                List acc;
                for (auto y : col) f_image(j, y, acc);
                normalize(acc);
                col = std::move(acc);
            }
        // G' = G g.
        for (std::size_t j = 0; j < nd; ++j) {
            std::vector<std::pair<std::size_t, List>> fresh;
            for (const auto& [y, img] : s.g[j]) fresh.emplace_back(y, sum_of(G_[j], img));
            for (auto& [y, col] : fresh) G_[j][y] = std::move(col);
            for (auto x : s.removed[j]) G_[j][x].clear();
        }
        // d' = f d g on every cell whose g-image or boundary moved.
        std::vector<std::vector<std::pair<std::size_t, List>>> fresh_bd(nd);
        for (std::size_t j = 1; j < nd; ++j) {
            List affected;
            for (const auto& [x, img] : s.g[j]) affected.push_back(x);
            for (std::size_t y = 0; y < touched[j - 1].size(); ++y)
                if (touched[j - 1][y]) affected.insert(affected.end(), cob_[j - 1][y].begin(), cob_[j - 1][y].end());
            std::sort(affected.begin(), affected.end());
            affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
            for (auto x : affected) {
                if (gone[j][x]) continue;
                const auto git = s.g[j].find(x);
                const List gx = git != s.g[j].end() ? git->second : List{x};
                List mid = sum_of(bd_[j], gx), img;
                for (auto y : mid) f_image(j - 1, y, img);
                normalize(img);
                fresh_bd[j].emplace_back(x, std::move(img));
            }
        }
        auto unlink = [&](std::size_t j, std::size_t x) {
            for (auto y : bd_[j][x]) {
                auto& c = cob_[j - 1][y];
                c.erase(std::find(c.begin(), c.end(), x));
            }
        };
        for (std::size_t j = 1; j < nd; ++j) {
            for (auto x : s.removed[j]) {
                unlink(j, x);
                bd_[j][x].clear();
            }
            for (auto& [x, nb] : fresh_bd[j]) {
                unlink(j, x);
                bd_[j][x] = std::move(nb);
                for (auto y : bd_[j][x]) cob_[j - 1][y].push_back(x);
            }
        }
        for (std::size_t j = 0; j < nd; ++j)
            for (auto x : s.removed[j]) {
                if (!cob_[j].empty() && !cob_[j][x].empty()) throw std::logic_error("rewrite: removed cell still has cofaces");
                alive_[j][x] = 0;
            }
    }

    // Relabels surviving cells by index[j][id] and materializes the composed equivalence.
    HomotopyEquivalence finish(const std::vector<std::vector<std::size_t>>& index) const {
        const std::size_t nd = alive_.size();
        std::vector<std::size_t> dims(nd, 0);
        for (std::size_t j = 0; j < nd; ++j)
            for (std::size_t x = 0; x < alive_[j].size(); ++x)
                if (alive_[j][x]) dims[j] = std::max(dims[j], index[j][x] + 1);
        auto relabel = [&](std::size_t j, const List& l) {
            List out;
            for (auto y : l) out.push_back(index[j][y]);
            return out;
        };
        std::vector<Gf2Matrix> bd;
        for (std::size_t j = 1; j < nd; ++j) {
            std::vector<List> cols(dims[j]);
            for (std::size_t x = 0; x < alive_[j].size(); ++x)
                if (alive_[j][x]) cols[index[j][x]] = relabel(j - 1, bd_[j][x]);
            bd.push_back(Gf2Matrix::from_cols(dims[j - 1], dims[j], cols));
        }
        HomotopyEquivalence eq{a0_, ChainComplex(dims, std::move(bd)), {}, {}, {}, {}};
        for (std::size_t j = 0; j < nd; ++j) {
            std::vector<List> fcols(F_[j].size()), gcols(dims[j]);
            for (std::size_t x = 0; x < F_[j].size(); ++x) fcols[x] = relabel(j, F_[j][x]);
            for (std::size_t x = 0; x < alive_[j].size(); ++x)
                if (alive_[j][x]) gcols[index[j][x]] = G_[j][x];
            eq.f.f.emplace_back(dims[j], std::move(fcols));
            eq.g.f.emplace_back(a0_.dims[j], std::move(gcols));
            if (j + 1 < nd) {
                eq.h_a.emplace_back(a0_.dims[j + 1], H_[j]);
                eq.h_b.emplace_back(dims[j + 1], dims[j]);
            }
        }
        return eq;
    }

    // Surviving cells keep their relative order.
    std::vector<std::vector<std::size_t>> compact_index() const {
        std::vector<std::vector<std::size_t>> index(alive_.size());
        for (std::size_t j = 0; j < alive_.size(); ++j) {
            index[j].assign(alive_[j].size(), 0);
            std::size_t k = 0;
            for (std::size_t x = 0; x < alive_[j].size(); ++x)
                if (alive_[j][x]) index[j][x] = k++;
        }
        return index;
    }

private:
    // Replays s alone on the current complex, in compact ids, and verifies that single rewrite.
    bool audit_step(const Step& s) const {
        const auto index = compact_index();
        const std::size_t nd = alive_.size();
        auto relabel = [&](std::size_t j, const List& l) {
            List out;
            for (auto y : l) out.push_back(index[j][y]);
            return out;
        };
        std::vector<std::size_t> dims(nd, 0);
        for (std::size_t j = 0; j < nd; ++j) dims[j] = static_cast<std::size_t>(std::count(alive_[j].begin(), alive_[j].end(), 1));
        std::vector<Gf2Matrix> bd;
        for (std::size_t j = 1; j < nd; ++j) {
            std::vector<List> cols(dims[j]);
            for (std::size_t x = 0; x < alive_[j].size(); ++x)
                if (alive_[j][x]) cols[index[j][x]] = relabel(j - 1, bd_[j][x]);
            bd.push_back(Gf2Matrix::from_cols(dims[j - 1], dims[j], cols));
        }
        Step t(top_);
        for (std::size_t j = 0; j < nd; ++j) {
            t.removed[j] = relabel(j, s.removed[j]);
            for (const auto& [x, img] : s.f[j]) t.f[j][index[j][x]] = relabel(j, img);
            for (const auto& [x, img] : s.g[j]) t.g[j][index[j][x]] = relabel(j, img);
            if (j + 1 < nd)
                for (const auto& [x, img] : s.h[j]) t.h[j][index[j][x]] = relabel(j + 1, img);
        }
        Rewriter single(ChainComplex(std::move(dims), std::move(bd)));
        single.apply(t);
        return verify_homotopy(single.finish(single.compact_index()));
    }

    RewriteAudit* audit_ = nullptr;
    ChainComplex a0_;
    int top_;
    std::vector<std::vector<char>> alive_;
    std::vector<std::vector<List>> F_, G_, H_, bd_, cob_;
};

void require_one_complex(const ChainComplex& a) {
    if (a.top() != 1) throw std::invalid_argument("rewrite: expected a 1-complex");
}

Step combine_step(const Rewriter& rw, std::size_t v) {
    const List& cob = rw.coboundary(0, v);
    if (cob.size() != 2) throw std::invalid_argument("combine_cells: 0-cell must have exactly two coboundary cells");
    const std::size_t e1 = std::min(cob[0], cob[1]), e2 = std::max(cob[0], cob[1]);
    Step s(1);
    s.removed[0] = {v};
    s.removed[1] = {e2};
    List fv;
    for (auto u : rw.boundary(1, e2))
        if (u != v) fv.push_back(u);
    s.f[0][v] = fv;
    s.g[1][e1] = {e1, e2};
    s.h[0][v] = {e2};
    return s;
}

Step collapse_step(const Rewriter& rw, std::size_t e) {
    const List& bd = rw.boundary(1, e);
    if (bd.size() != 2) throw std::invalid_argument("collapse_cell: 1-cell must have exactly two boundary cells");
    const std::size_t w1 = std::min(bd[0], bd[1]), w2 = std::max(bd[0], bd[1]);
    Step s(1);
    s.removed[1] = {e};
    s.removed[0] = {w2};
    s.f[0][w2] = {w1};
    for (auto d : rw.coboundary(0, w2))
        if (d != e) s.g[1][d] = {d, e};
    s.h[0][w2] = {e};
    return s;
}

}  // namespace

HomotopyEquivalence combine_cells(const ChainComplex& a, std::size_t v) {
    require_one_complex(a);
    if (v >= a.dim(0)) throw std::out_of_range("combine_cells: cell");
    Rewriter rw(a);
    rw.apply(combine_step(rw, v));
    auto eq = rw.finish(rw.compact_index());
    if (!verify_homotopy(eq)) throw std::logic_error("combine_cells: identities fail");
    return eq;
}

HomotopyEquivalence collapse_cell(const ChainComplex& a, std::size_t e) {
    require_one_complex(a);
    if (e >= a.dim(1)) throw std::out_of_range("collapse_cell: cell");
    if (a.bd[0].col_supports()[e].size() != 2)
        throw std::invalid_argument("collapse_cell: 1-cell must have exactly two boundary cells");
    // In the dual complex e is a 0-cell whose coboundary is its two boundary cells.
    const auto d = combine_cells(dual_complex(a), e);
    return dual_equivalence(d);
}

ReducedBase reduce_base(const BaseComplex& o) {
    ReducedBase r;
    std::size_t E = 0;
    for (std::size_t b = 0; b < o.n1; ++b) {
        if (o.bd[b].empty()) throw std::invalid_argument("reduce_base: 1-cell with empty boundary");
        E += o.bd[b].size();
    }
    r.incidences = E;
    const auto cob = o.coboundary();
    // Ids: (b,c) bits and (c,b) checks by incidence order.
    std::vector<std::vector<std::size_t>> bit_id(o.n1), check_id(o.n0);
    std::size_t next = 0;
    for (std::size_t b = 0; b < o.n1; ++b)
        for (auto c : o.bd[b]) {
            bit_id[b].push_back(next++);
            r.bit_labels.push_back("(" + std::to_string(b) + "," + std::to_string(c) + ")");
        }
    next = 0;
    std::vector<std::map<std::size_t, std::size_t>> check_of(o.n0);
    for (std::size_t c = 0; c < o.n0; ++c)
        for (auto b : cob[c]) {
            check_of[c][b] = next;
            check_id[c].push_back(next++);
            r.check_labels.push_back("(" + std::to_string(c) + "," + std::to_string(b) + ")");
        }
    std::size_t n1 = E, n0 = E;
    for (std::size_t c = 0; c < o.n0; ++c)
        for (std::size_t k = 1; k < cob[c].size(); ++k)
            r.bit_labels.push_back("[" + std::to_string(c) + "," + std::to_string(k) + "]"), ++n1;
    for (std::size_t b = 0; b < o.n1; ++b)
        for (std::size_t j = 1; j < o.bd[b].size(); ++j)
            r.check_labels.push_back("[" + std::to_string(b) + "," + std::to_string(j) + "]"), ++n0;

    BaseComplex& B = r.base;
    B.n1 = n1;
    B.n0 = n0;
    B.bd.resize(n1);
    B.tw.resize(n1);
    std::vector<std::size_t> aux_check_start(o.n1);
    std::size_t ac = E;
    for (std::size_t b = 0; b < o.n1; ++b) {
        aux_check_start[b] = ac;
        ac += o.bd[b].size() - 1;
    }
    for (std::size_t b = 0; b < o.n1; ++b) {
        const std::size_t deg = o.bd[b].size();
        for (std::size_t j = 0; j < deg; ++j) {
            const std::size_t c = o.bd[b][j];
            std::vector<std::pair<std::size_t, std::size_t>> inc{{check_of[c].at(b), o.tw[b][j]}};
            // 1-based aux [b,j'] joins (b,c_j') and (b,c_{j'+1}); here j is 0-based.
            if (j >= 1) inc.emplace_back(aux_check_start[b] + j - 1, 0);
            if (j + 1 < deg) inc.emplace_back(aux_check_start[b] + j, 0);
            std::sort(inc.begin(), inc.end());
            const std::size_t id = bit_id[b][j];
            for (auto [cell, t] : inc) {
                B.bd[id].push_back(cell);
                B.tw[id].push_back(t);
            }
        }
    }
    std::size_t ab = E;
    for (std::size_t c = 0; c < o.n0; ++c)
        for (std::size_t k = 1; k < cob[c].size(); ++k) {
            B.bd[ab] = {check_id[c][k - 1], check_id[c][k]};
            B.tw[ab] = {0, 0};
            ++ab;
        }
    return r;
}

namespace {

// First-incidence representatives: the reduced cells that survive as b and as c.
struct Representatives {
    std::vector<std::size_t> bit, check;
};

Representatives representatives(const BaseComplex& o) {
    Representatives r;
    std::size_t next = 0;
    for (std::size_t b = 0; b < o.n1; ++b) {
        r.bit.push_back(next);
        next += o.bd[b].size();
    }
    next = 0;
    for (const auto& l : o.coboundary()) {
        r.check.push_back(next);
        next += l.size();
    }
    return r;
}

// Auxiliary cells sit after the E incidence cells in both degrees, in ascending label order.
struct Schedule {
    std::vector<std::size_t> aux_checks, aux_bits;
};

Schedule schedule(const ReducedBase& r) {
    Schedule s;
    for (std::size_t v = r.incidences; v < r.base.n0; ++v) s.aux_checks.push_back(v);
    for (std::size_t e = r.incidences; e < r.base.n1; ++e) s.aux_bits.push_back(e);
    return s;
}

}  // namespace

WeightReduction weight_reduce_classical(const BaseComplex& base, RewriteAudit* audit) {
    WeightReduction out;
    out.reduced = reduce_base(base);
    Rewriter rw(out.reduced.base.complex());
    rw.set_audit(audit);
    const auto sch = schedule(out.reduced);
    for (auto v : sch.aux_checks) {
        rw.apply(combine_step(rw, v));
        ++out.combines;
    }
    for (auto e : sch.aux_bits) {
        rw.apply(collapse_step(rw, e));
        ++out.collapses;
    }
    const auto rep = representatives(base);
    std::vector<std::vector<std::size_t>> index(2);
    index[0].assign(out.reduced.base.n0, 0);
    index[1].assign(out.reduced.base.n1, 0);
    for (std::size_t c = 0; c < base.n0; ++c) index[0][rep.check[c]] = c;
    for (std::size_t b = 0; b < base.n1; ++b) index[1][rep.bit[b]] = b;
    out.equiv = rw.finish(index);
    if (out.equiv.b.bd[0] != base.boundary())
        throw std::logic_error("weight_reduce_classical: rewrites did not return the original complex");
    return out;
}

namespace {

// Base-level bookkeeping for the fiberwise rewrites: incidences with twists, in stable ids.
struct TwistedBase {
    std::vector<std::map<std::size_t, std::size_t>> bd;  // 1-cell -> (0-cell -> twist)
    std::vector<std::vector<std::size_t>> cob;           // 0-cell -> 1-cells
    std::size_t m = 1;

    TwistedBase(const BaseComplex& b, std::size_t m_f) : bd(b.n1), cob(b.n0), m(m_f) {
        for (std::size_t e = 0; e < b.n1; ++e)
            for (std::size_t k = 0; k < b.bd[e].size(); ++k) {
                bd[e][b.bd[e][k]] = b.tw[e][k] % m;
                cob[b.bd[e][k]].push_back(e);
            }
    }
    void unlink(std::size_t e, std::size_t a) {
        bd[e].erase(a);
        cob[a].erase(std::find(cob[a].begin(), cob[a].end(), e));
    }
    void link(std::size_t e, std::size_t a, std::size_t t) {
        if (bd[e].count(a)) throw std::logic_error("fiberwise rewrite: repeated incidence");
        bd[e][a] = t % m;
        cob[a].push_back(e);
    }
};

class FiberwiseReducer {
public:
    FiberwiseReducer(const Bundle& reduced, RewriteAudit* audit)
        : bn_(reduced), tb_(reduced.base, reduced.m_f), rw_(reduced.complex) {
        rw_.set_audit(audit);
    }

    std::size_t gauges = 0;

    void combine(std::size_t v) {
        auto cob = tb_.cob[v];
        if (cob.size() != 2) throw std::invalid_argument("fiberwise combine: 0-cell must have two coboundary cells");
        std::sort(cob.begin(), cob.end());
        const std::size_t e1 = cob[0], e2 = cob[1];
        zero_at(e1, v);
        zero_at(e2, v);
        const std::size_t m = bn_.m_f;
        Step s(2);
        for (std::size_t i = 0; i < m; ++i) {
            s.removed[0].push_back(Z0(v, i));
            s.removed[1].push_back(H(e2, i));
            s.removed[1].push_back(V(v, i));
            s.removed[2].push_back(C2(e2, i));
            List f0, f1;
            for (auto [u, t] : tb_.bd[e2])
                if (u != v) {
                    f0.push_back(Z0(u, i + t));
                    f1.push_back(V(u, i + t));
                }
            s.f[0][Z0(v, i)] = f0;
            s.f[1][V(v, i)] = f1;
            s.g[1][H(e1, i)] = {H(e1, i), H(e2, i)};
            s.g[2][C2(e1, i)] = {C2(e1, i), C2(e2, i)};
            s.h[0][Z0(v, i)] = {H(e2, i)};
            s.h[1][V(v, i)] = {C2(e2, i)};
        }
        rw_.apply(s);
        tb_.unlink(e1, v);
        tb_.unlink(e2, v);
        for (auto [u, t] : std::map<std::size_t, std::size_t>(tb_.bd[e2])) {
            tb_.unlink(e2, u);
            tb_.link(e1, u, t);
        }
    }

    void collapse(std::size_t e) {
        if (tb_.bd[e].size() != 2) throw std::invalid_argument("fiberwise collapse: 1-cell must have two boundary cells");
        const std::size_t w1 = tb_.bd[e].begin()->first, w2 = std::next(tb_.bd[e].begin())->first;
        zero_at(e, w1);
        // With e untwisted at w1, rotating the fiber over w2 clears the twist there.
        if (const std::size_t t = tb_.bd[e].at(w2); t != 0) gauge_0cell(w2, (bn_.m_f - t) % bn_.m_f);
        const std::size_t m = bn_.m_f;
        Step s(2);
        for (std::size_t i = 0; i < m; ++i) {
            s.removed[1].push_back(H(e, i));
            s.removed[1].push_back(V(w2, i));
            s.removed[0].push_back(Z0(w2, i));
            s.removed[2].push_back(C2(e, i));
            s.f[0][Z0(w2, i)] = {Z0(w1, i)};
            s.f[1][V(w2, i)] = {V(w1, i)};
            for (auto d : tb_.cob[w2])
                if (d != e) {
                    const std::size_t t = tb_.bd[d].at(w2);
                    s.g[1][H(d, i)] = {H(d, i), H(e, i + t)};
                    s.g[2][C2(d, i)] = {C2(d, i), C2(e, i + t)};
                }
            s.h[0][Z0(w2, i)] = {H(e, i)};
            s.h[1][V(w2, i)] = {C2(e, i)};
        }
        rw_.apply(s);
        tb_.unlink(e, w1);
        tb_.unlink(e, w2);
        for (auto d : std::vector<std::size_t>(tb_.cob[w2])) {
            const std::size_t t = tb_.bd[d].at(w2);
            tb_.unlink(d, w2);
            tb_.link(d, w1, t);
        }
    }

    // Surviving base cells become the final base through the given maps; returns the composed equivalence.
    HomotopyEquivalence finish(const std::vector<std::size_t>& bit_of, const std::vector<std::size_t>& check_of,
                               std::size_t n1, std::size_t n0, BaseComplex& final_base) const {
        const std::size_t m = bn_.m_f;
        const std::size_t nr1 = bn_.base.n1, nr0 = bn_.base.n0;
        std::vector<std::vector<std::size_t>> index(3);
        index[0].assign(nr0 * m, 0);
        index[1].assign((nr1 + nr0) * m, 0);
        index[2].assign(nr1 * m, 0);
        final_base = BaseComplex{};
        final_base.n1 = n1;
        final_base.n0 = n0;
        final_base.bd.resize(n1);
        final_base.tw.resize(n1);
        for (std::size_t rb = 0; rb < nr1; ++rb) {
            if (bit_of[rb] == SIZE_MAX) continue;
            const std::size_t b = bit_of[rb];
            std::vector<std::pair<std::size_t, std::size_t>> inc;
            for (auto [a, t] : tb_.bd[rb]) inc.emplace_back(check_of.at(a), t);
            std::sort(inc.begin(), inc.end());
            for (auto [a, t] : inc) {
                final_base.bd[b].push_back(a);
                final_base.tw[b].push_back(t);
            }
            for (std::size_t i = 0; i < m; ++i) {
                index[1][H(rb, i)] = b * m + i;
                index[2][C2(rb, i)] = b * m + i;
            }
        }
        for (std::size_t rc = 0; rc < nr0; ++rc) {
            if (check_of[rc] == SIZE_MAX) continue;
            const std::size_t c = check_of[rc];
            for (std::size_t i = 0; i < m; ++i) {
                index[0][Z0(rc, i)] = c * m + i;
                index[1][V(rc, i)] = n1 * m + c * m + i;
            }
        }
        return rw_.finish(index);
    }

private:
    std::size_t Z0(std::size_t a, std::size_t i) const { return bn_.cell0(a, i); }
    std::size_t H(std::size_t b, std::size_t i) const { return bn_.horizontal(b, i); }
    std::size_t V(std::size_t a, std::size_t i) const { return bn_.vertical(a, i); }
    std::size_t C2(std::size_t b, std::size_t i) const { return bn_.cell2(b, i); }

    // Relabels the fiber over 1-cell e so its twist at a becomes zero.
    void zero_at(std::size_t e, std::size_t a) {
        const std::size_t t = tb_.bd[e].at(a);
        if (t == 0) return;
        const std::size_t m = bn_.m_f;
        Step s(2);
        for (std::size_t i = 0; i < m; ++i) {
            s.f[1][H(e, i)] = {H(e, i + t)};
            s.g[1][H(e, i)] = {H(e, i + m - t)};
            s.f[2][C2(e, i)] = {C2(e, i + t)};
            s.g[2][C2(e, i)] = {C2(e, i + m - t)};
        }
        rw_.apply(s);
        for (auto& [u, tw] : tb_.bd[e]) tw = (tw + m - t) % m;
        ++gauges;
    }

    // Rotates the fiber over 0-cell a by t: every incident twist grows by t.
    void gauge_0cell(std::size_t a, std::size_t t) {
        const std::size_t m = bn_.m_f;
        Step s(2);
        for (std::size_t i = 0; i < m; ++i) {
            s.f[0][Z0(a, i)] = {Z0(a, i + t)};
            s.g[0][Z0(a, i)] = {Z0(a, i + m - t)};
            s.f[1][V(a, i)] = {V(a, i + t)};
            s.g[1][V(a, i)] = {V(a, i + m - t)};
        }
        rw_.apply(s);
        for (auto d : tb_.cob[a]) tb_.bd[d][a] = (tb_.bd[d][a] + t) % m;
        ++gauges;
    }

    const Bundle& bn_;
    TwistedBase tb_;
    Rewriter rw_;
};

}  // namespace

BundleReduction contract_reduced_bundle(const ReducedBase& rb, const BaseComplex& original_shape, std::size_t m_f,
                                        std::size_t ell, RewriteAudit* audit) {
    BundleReduction out;
    out.reduced_base = rb;
    out.reduced = build_bundle(rb.base, m_f, ell);
    FiberwiseReducer red(out.reduced, audit);
    const auto sch = schedule(rb);
    for (auto v : sch.aux_checks) {
        red.combine(v);
        ++out.combines;
    }
    for (auto e : sch.aux_bits) {
        red.collapse(e);
        ++out.collapses;
    }
    out.gauge_moves = red.gauges;
    const auto rep = representatives(original_shape);
    std::vector<std::size_t> bit_of(rb.base.n1, SIZE_MAX), check_of(rb.base.n0, SIZE_MAX);
    for (std::size_t b = 0; b < original_shape.n1; ++b) bit_of[rep.bit[b]] = b;
    for (std::size_t c = 0; c < original_shape.n0; ++c) check_of[rep.check[c]] = c;
    BaseComplex final_base;
    out.equiv = red.finish(bit_of, check_of, original_shape.n1, original_shape.n0, final_base);
    // The composed boundary must agree with a direct build over the contracted base.
    const Bundle direct = build_bundle(final_base, m_f, ell);
    if (direct.complex.bd != out.equiv.b.bd) throw std::logic_error("contract_reduced_bundle: composed complex mismatch");
    return out;
}

BundleReduction weight_reduce_bundle(const Bundle& original, RewriteAudit* audit) {
    auto out = contract_reduced_bundle(reduce_base(original.base), original.base, original.m_f, original.ell, audit);
    if (out.equiv.b.bd != original.complex.bd)
        throw std::logic_error("weight_reduce_bundle: rewrites did not return the original bundle");
    return out;
}

DecodeResult decode_via_homotopy(const HomotopyEquivalence& eq, int degree, const InnerDecoder& inner,
                                 const BitChain& s_a) {
    if (degree < 1 || degree > eq.a.top()) throw std::out_of_range("decode_via_homotopy: degree");
    const auto j = static_cast<std::size_t>(degree);
    if (s_a.length() != eq.a.dim(degree - 1)) throw std::invalid_argument("decode_via_homotopy: syndrome length");
    const BitChain s_b = eq.f.f[j - 1].apply(s_a);
    DecodeResult in = inner(s_b);
    DecodeResult out;
    out.steps = in.steps;
    out.experimental = in.experimental;
    out.notes = in.notes;
    out.notes["inner_syndrome_weight"] = static_cast<double>(s_b.weight());
    out.correction = BitChain(eq.a.dim(degree));
    if (in.success == Verdict::Failed) return out;
    out.correction = eq.g.f[j].apply(in.correction) ^ eq.h_a[j - 1].apply(s_a);
    const BitChain check = SparseMap::from_dense(eq.a.bd[j - 1]).apply(out.correction);
    if (check != s_a) throw std::logic_error("decode_via_homotopy: lifted correction lost the syndrome");
    out.success = Verdict::SyndromeMatchedOnly;
    return out;
}

void write_alist(std::ostream& os, const SparseMap& m) {
    const auto& cols = m.columns();
    const auto rows = m.transpose().columns();
    std::size_t maxc = 0, maxr = 0;
    for (const auto& c : cols) maxc = std::max(maxc, c.size());
    for (const auto& r : rows) maxr = std::max(maxr, r.size());
    os << m.cols() << ' ' << m.rows() << '\n' << maxc << ' ' << maxr << '\n';
    auto degree_line = [&](const std::vector<List>& lists) {
        for (std::size_t i = 0; i < lists.size(); ++i) os << (i ? " " : "") << lists[i].size();
        os << '\n';
    };
    degree_line(cols);
    degree_line(rows);
    auto index_lines = [&](const std::vector<List>& lists, std::size_t width) {
        for (const auto& l : lists) {
            for (std::size_t i = 0; i < width; ++i) {
                if (i) os << ' ';
                os << (i < l.size() ? l[i] + 1 : 0);
            }
            os << '\n';
        }
    };
    index_lines(cols, maxc);
    index_lines(rows, maxr);
}

std::map<std::string, std::string> equivalence_files(const HomotopyEquivalence& eq, const std::string& source_file,
                                                     const std::string& target_file) {
    std::map<std::string, std::string> files;
    std::ostringstream man;
    man << "homotopy_equivalence top " << eq.a.top() << '\n'
        << "source " << source_file << '\n'
        << "target " << target_file << '\n';
    auto dump = [&](const std::string& name, const SparseMap& m) {
        std::ostringstream os;
        write_alist(os, m);
        files[name] = os.str();
        man << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    };
    for (std::size_t j = 0; j < eq.f.f.size(); ++j) {
        dump("f_" + std::to_string(j) + ".alist", eq.f.f[j]);
        dump("g_" + std::to_string(j) + ".alist", eq.g.f[j]);
    }
    for (std::size_t j = 0; j < eq.h_a.size(); ++j) {
        dump("h_a_" + std::to_string(j) + ".alist", eq.h_a[j]);
        dump("h_b_" + std::to_string(j) + ".alist", eq.h_b[j]);
    }
    files["manifest.txt"] = man.str();
    return files;
}

void write_equivalence(const std::string& dir, const HomotopyEquivalence& eq, const std::string& source_file,
                       const std::string& target_file) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& [name, text] : equivalence_files(eq, source_file, target_file))
        std::ofstream(fs::path(dir) / name) << text;
}

}  // namespace fb
