#include "fbcode/gf2.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fb {

namespace {

template <class F>
void for_each_bit(const std::uint64_t* w, std::size_t nwords, F&& f) {
    for (std::size_t k = 0; k < nwords; ++k) {
        std::uint64_t x = w[k];
        while (x) {
            const int t = std::countr_zero(x);
            f(k * 64 + static_cast<std::size_t>(t));
            x &= x - 1;
        }
    }
}

inline void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) dst[k] ^= src[k];
}

}  // namespace

// ---------------------------------------------------------------- BitVec

BitVec& BitVec::operator^=(const BitVec& o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec xor: length mismatch");
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
}

bool BitVec::any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x != 0; });
}

std::size_t BitVec::popcount() const {
    std::size_t c = 0;
    for (auto x : w_) c += static_cast<std::size_t>(std::popcount(x));
    return c;
}

bool BitVec::dot(const BitVec& o) const {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
    return std::popcount(acc) & 1;
}

std::vector<std::size_t> BitVec::support() const {
    std::vector<std::size_t> s;
    for_each_bit(w_.data(), w_.size(), [&](std::size_t i) { s.push_back(i); });
    return s;
}

BitChain BitVec::to_chain() const { return BitChain(n_, support()); }

// ---------------------------------------------------------------- BitChain

BitChain::BitChain(std::size_t length, std::vector<std::size_t> indices) : len_(length) {
    std::sort(indices.begin(), indices.end());
    for (std::size_t i = 0; i < indices.size();) {
        std::size_t j = i;
        while (j < indices.size() && indices[j] == indices[i]) ++j;
        if (indices[i] >= len_) throw std::out_of_range("BitChain: index out of range");
        if ((j - i) & 1) supp_.push_back(indices[i]);
        i = j;
    }
}

bool BitChain::test(std::size_t i) const { return std::binary_search(supp_.begin(), supp_.end(), i); }

void BitChain::toggle(std::size_t i) {
    if (i >= len_) throw std::out_of_range("BitChain::toggle");
    auto it = std::lower_bound(supp_.begin(), supp_.end(), i);
    if (it != supp_.end() && *it == i) supp_.erase(it);
    else supp_.insert(it, i);
}

BitChain BitChain::operator^(const BitChain& o) const {
    if (o.len_ != len_) throw std::invalid_argument("BitChain xor: length mismatch");
    BitChain r(len_);
    std::set_symmetric_difference(supp_.begin(), supp_.end(), o.supp_.begin(), o.supp_.end(),
                                  std::back_inserter(r.supp_));
    return r;
}

BitVec BitChain::to_vec() const {
    BitVec v(len_);
    for (auto i : supp_) v.set(i);
    return v;
}

// ---------------------------------------------------------------- Gf2Matrix

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * ((cols + 63) / 64), 0) {}

Gf2Matrix Gf2Matrix::identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

Gf2Matrix Gf2Matrix::from_rows(std::size_t rows, std::size_t cols,
                               const std::vector<std::vector<std::size_t>>& row_support) {
    if (row_support.size() != rows) throw std::invalid_argument("from_rows: row count mismatch");
    Gf2Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (auto c : row_support[r]) {
            if (c >= cols) throw std::out_of_range("from_rows: column index");
            m.flip(r, c);
        }
    return m;
}

Gf2Matrix Gf2Matrix::from_cols(std::size_t rows, std::size_t cols,
                               const std::vector<std::vector<std::size_t>>& col_support) {
    if (col_support.size() != cols) throw std::invalid_argument("from_cols: column count mismatch");
    Gf2Matrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (auto r : col_support[c]) {
            if (r >= rows) throw std::out_of_range("from_cols: row index");
            m.flip(r, c);
        }
    return m;
}

Gf2Matrix Gf2Matrix::from_dense(const std::vector<std::vector<int>>& entries) {
    const std::size_t rows = entries.size();
    const std::size_t cols = rows ? entries[0].size() : 0;
    Gf2Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (entries[r].size() != cols) throw std::invalid_argument("from_dense: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            if (entries[r][c] & 1) m.set(r, c);
    }
    return m;
}

void Gf2Matrix::set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (c & 63);
    auto& w = data_[r * wpr_ + (c >> 6)];
    if (v) w |= mask; else w &= ~mask;
}

BitVec Gf2Matrix::row(std::size_t r) const {
    BitVec v(cols_);
    std::copy(row_ptr(r), row_ptr(r) + wpr_, v.words().begin());
    return v;
}

std::vector<std::size_t> Gf2Matrix::row_support(std::size_t r) const {
    std::vector<std::size_t> s;
    for_each_bit(row_ptr(r), wpr_, [&](std::size_t c) { s.push_back(c); });
    return s;
}

std::vector<std::vector<std::size_t>> Gf2Matrix::col_supports() const {
    std::vector<std::vector<std::size_t>> cs(cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for_each_bit(row_ptr(r), wpr_, [&](std::size_t c) { cs[c].push_back(r); });
    return cs;
}

std::size_t Gf2Matrix::row_weight(std::size_t r) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < wpr_; ++k) c += static_cast<std::size_t>(std::popcount(row_ptr(r)[k]));
    return c;
}

std::size_t Gf2Matrix::max_row_weight() const {
    std::size_t best = 0;
    for (std::size_t r = 0; r < rows_; ++r) best = std::max(best, row_weight(r));
    return best;
}

std::size_t Gf2Matrix::max_col_weight() const {
    std::vector<std::size_t> w(cols_, 0);
    for (std::size_t r = 0; r < rows_; ++r)
        for_each_bit(row_ptr(r), wpr_, [&](std::size_t c) { ++w[c]; });
    return w.empty() ? 0 : *std::max_element(w.begin(), w.end());
}

std::size_t Gf2Matrix::nnz() const {
    std::size_t c = 0;
    for (auto x : data_) c += static_cast<std::size_t>(std::popcount(x));
    return c;
}

bool Gf2Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t x) { return x == 0; });
}

void Gf2Matrix::xor_row(std::size_t dst, std::size_t src) {
    xor_words(row_ptr(dst), row_ptr(src), 0, wpr_);
}

BitVec Gf2Matrix::mul(const BitVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("mul: dimension mismatch");
    BitVec y(rows_);
    const auto& xw = x.words();
    for (std::size_t r = 0; r < rows_; ++r) {
        const std::uint64_t* p = row_ptr(r);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < wpr_; ++k) acc ^= p[k] & xw[k];
        if (std::popcount(acc) & 1) y.set(r);
    }
    return y;
}

BitChain Gf2Matrix::mul(const BitChain& x) const {
    if (x.length() != cols_) throw std::invalid_argument("mul: dimension mismatch");
    return mul(x.to_vec()).to_chain();
}

BitVec Gf2Matrix::left_mul(const BitVec& y) const {
    if (y.size() != rows_) throw std::invalid_argument("left_mul: dimension mismatch");
    BitVec out(cols_);
    auto* ow = out.words().data();
    for_each_bit(y.words().data(), y.words().size(),
                 [&](std::size_t r) { xor_words(ow, row_ptr(r), 0, wpr_); });
    return out;
}

Gf2Matrix Gf2Matrix::transpose() const {
    Gf2Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for_each_bit(row_ptr(r), wpr_, [&](std::size_t c) { t.flip(c, r); });
    return t;
}

Gf2Matrix Gf2Matrix::operator*(const Gf2Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("mat_mul: inner dimension mismatch");
    Gf2Matrix p(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t* dst = p.row_ptr(r);
        for_each_bit(row_ptr(r), wpr_, [&](std::size_t k) { xor_words(dst, o.row_ptr(k), 0, o.wpr_); });
    }
    return p;
}

Gf2Matrix Gf2Matrix::operator+(const Gf2Matrix& o) const {
    Gf2Matrix s = *this;
    s += o;
    return s;
}

Gf2Matrix& Gf2Matrix::operator+=(const Gf2Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("mat_add: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] ^= o.data_[k];
    return *this;
}

bool Gf2Matrix::operator==(const Gf2Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Gf2Matrix Gf2Matrix::select_cols(const std::vector<std::size_t>& cols) const {
    Gf2Matrix s(rows_, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t r = 0; r < rows_; ++r)
            if (get(r, cols[j])) s.set(r, j);
    return s;
}

// ---------------------------------------------------------------- elimination

std::size_t rank(const Gf2Matrix& m0) {
    Gf2Matrix m = m0;
    const std::size_t rows = m.rows(), wpr = m.words_per_row();
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m.get(i, c)) { piv = i; break; }
        if (piv == rows) continue;
        if (piv != r) std::swap_ranges(m.row_ptr(piv), m.row_ptr(piv) + wpr, m.row_ptr(r));
        const std::size_t from = c >> 6;
        for (std::size_t i = piv + 1; i < rows; ++i)
            if (m.get(i, c)) xor_words(m.row_ptr(i), m.row_ptr(r), from, wpr);
        ++r;
    }
    return r;
}

namespace {

// Shared elimination; when `tr` is non-null the same row operations are applied to it.
std::vector<std::size_t> eliminate(Gf2Matrix& m, Gf2Matrix* tr) {
    const std::size_t rows = m.rows(), wpr = m.words_per_row();
    const std::size_t twpr = tr ? tr->words_per_row() : 0;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m.get(i, c)) { piv = i; break; }
        if (piv == rows) continue;
        if (piv != r) {
            std::swap_ranges(m.row_ptr(piv), m.row_ptr(piv) + wpr, m.row_ptr(r));
            if (tr) std::swap_ranges(tr->row_ptr(piv), tr->row_ptr(piv) + twpr, tr->row_ptr(r));
        }
        const std::size_t from = c >> 6;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || !m.get(i, c)) continue;
            xor_words(m.row_ptr(i), m.row_ptr(r), from, wpr);
            if (tr) xor_words(tr->row_ptr(i), tr->row_ptr(r), 0, twpr);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

Echelon rref(const Gf2Matrix& m) {
    Echelon e{m, {}};
    e.pivot_cols = eliminate(e.reduced, nullptr);
    return e;
}

Gf2Solver::Gf2Solver(const Gf2Matrix& m) : rows_(m.rows()), cols_(m.cols()) {
    Gf2Matrix work = m;
    transform_ = Gf2Matrix::identity(rows_);
    pivot_cols_ = eliminate(work, &transform_);
}

bool Gf2Solver::consistent(const BitVec& b) const {
    if (b.size() != rows_) throw std::invalid_argument("Gf2Solver: rhs length mismatch");
    const auto& bw = b.words();
    for (std::size_t i = rank(); i < rows_; ++i) {
        const std::uint64_t* p = transform_.row_ptr(i);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < bw.size(); ++k) acc ^= p[k] & bw[k];
        if (std::popcount(acc) & 1) return false;
    }
    return true;
}

BitVec Gf2Solver::obstruction(const BitVec& b) const {
    if (b.size() != rows_) throw std::invalid_argument("Gf2Solver: rhs length mismatch");
    BitVec o(rows_ - rank());
    const auto& bw = b.words();
    for (std::size_t i = rank(); i < rows_; ++i) {
        const std::uint64_t* p = transform_.row_ptr(i);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < bw.size(); ++k) acc ^= p[k] & bw[k];
        if (std::popcount(acc) & 1) o.set(i - rank());
    }
    return o;
}

std::optional<BitVec> Gf2Solver::solve(const BitVec& b) const {
    if (!consistent(b)) return std::nullopt;
    BitVec x(cols_);
    const auto& bw = b.words();
    for (std::size_t i = 0; i < rank(); ++i) {
        const std::uint64_t* p = transform_.row_ptr(i);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < bw.size(); ++k) acc ^= p[k] & bw[k];
        if (std::popcount(acc) & 1) x.set(pivot_cols_[i]);
    }
    return x;
}

std::optional<BitChain> solve(const Gf2Matrix& m, const BitChain& b) {
    if (b.length() != m.rows()) throw std::invalid_argument("solve: rhs length mismatch");
    auto x = Gf2Solver(m).solve(b.to_vec());
    if (!x) return std::nullopt;
    return x->to_chain();
}

std::vector<BitChain> kernel_basis(const Gf2Matrix& m) {
    const Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    std::vector<BitChain> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<std::size_t> supp{f};
        for (std::size_t i = 0; i < e.rank(); ++i)
            if (e.reduced.get(i, f)) supp.push_back(e.pivot_cols[i]);
        basis.emplace_back(m.cols(), std::move(supp));
    }
    return basis;
}

// ---------------------------------------------------------------- SpanBuilder

BitVec SpanBuilder::reduce(BitVec v) const {
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (v.get(lead_[i])) v ^= basis_[i];
    return v;
}

bool SpanBuilder::add(const BitVec& v0) {
    if (v0.size() != n_) throw std::invalid_argument("SpanBuilder: length mismatch");
    BitVec v = reduce(v0);
    const auto s = v.support();
    if (s.empty()) return false;
    const std::size_t lead = s.front();
    // Keep every stored vector free of the new lead so reduction stays one pass.
    for (auto& b : basis_)
        if (b.get(lead)) b ^= v;
    basis_.push_back(std::move(v));
    lead_.push_back(lead);
    return true;
}

bool SpanBuilder::contains(const BitVec& v) const { return !reduce(v).any(); }

// ---------------------------------------------------------------- alist

void write_alist(std::ostream& os, const Gf2Matrix& m) {
    const auto cols = m.col_supports();
    std::vector<std::vector<std::size_t>> rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row_support(r);
    std::size_t maxc = 0, maxr = 0;
    for (auto& c : cols) maxc = std::max(maxc, c.size());
    for (auto& r : rows) maxr = std::max(maxr, r.size());

    os << m.cols() << ' ' << m.rows() << '\n' << maxc << ' ' << maxr << '\n';
    auto degree_line = [&](const std::vector<std::vector<std::size_t>>& lists) {
        for (std::size_t i = 0; i < lists.size(); ++i) os << (i ? " " : "") << lists[i].size();
        os << '\n';
    };
    degree_line(cols);
    degree_line(rows);
    auto index_lines = [&](const std::vector<std::vector<std::size_t>>& lists, std::size_t width) {
        for (auto& l : lists) {
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

Gf2Matrix read_alist(std::istream& is) {
    std::size_t ncols = 0, nrows = 0, maxc = 0, maxr = 0;
    if (!(is >> ncols >> nrows >> maxc >> maxr)) throw std::runtime_error("alist: bad header");
    std::vector<std::size_t> cdeg(ncols), rdeg(nrows);
    for (auto& d : cdeg)
        if (!(is >> d)) throw std::runtime_error("alist: bad column degrees");
    for (auto& d : rdeg)
        if (!(is >> d)) throw std::runtime_error("alist: bad row degrees");
    Gf2Matrix m(nrows, ncols);
    for (std::size_t c = 0; c < ncols; ++c)
        for (std::size_t i = 0; i < maxc; ++i) {
            std::size_t v = 0;
            if (!(is >> v)) throw std::runtime_error("alist: truncated column lists");
            if (i < cdeg[c]) {
                if (v == 0 || v > nrows) throw std::runtime_error("alist: row index out of range");
                m.set(v - 1, c);
            } else if (v != 0) {
                throw std::runtime_error("alist: nonzero padding");
            }
        }
    for (std::size_t r = 0; r < nrows; ++r)
        for (std::size_t i = 0; i < maxr; ++i) {
            std::size_t v = 0;
            if (!(is >> v)) throw std::runtime_error("alist: truncated row lists");
            if (i < rdeg[r]) {
                if (v == 0 || v > ncols || !m.get(r, v - 1))
                    throw std::runtime_error("alist: row list disagrees with column lists");
            } else if (v != 0) {
                throw std::runtime_error("alist: nonzero padding");
            }
        }
    for (std::size_t r = 0; r < nrows; ++r)
        if (m.row_weight(r) != rdeg[r]) throw std::runtime_error("alist: row degree mismatch");
    return m;
}

}  // namespace fb
