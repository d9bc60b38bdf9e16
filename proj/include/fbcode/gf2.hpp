#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fb {

class BitChain;

/// Dense packed vector over GF(2).
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    BitVec& operator^=(const BitVec& o);
    BitVec operator^(const BitVec& o) const { BitVec r = *this; r ^= o; return r; }
    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool any() const;
    std::size_t popcount() const;
    bool dot(const BitVec& o) const;
    std::vector<std::size_t> support() const;
    BitChain to_chain() const;

    const std::vector<std::uint64_t>& words() const { return w_; }
    std::vector<std::uint64_t>& words() { return w_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// Sparse chain: a length and a strictly increasing support.
class BitChain {
public:
    BitChain() = default;
    explicit BitChain(std::size_t length) : len_(length) {}
    /// Repeated indices cancel in pairs.
    BitChain(std::size_t length, std::vector<std::size_t> indices);
    BitChain(std::size_t length, std::initializer_list<std::size_t> indices)
        : BitChain(length, std::vector<std::size_t>(indices)) {}

    std::size_t length() const { return len_; }
    std::size_t weight() const { return supp_.size(); }
    bool empty() const { return supp_.empty(); }
    const std::vector<std::size_t>& support() const { return supp_; }
    bool test(std::size_t i) const;
    void toggle(std::size_t i);

    BitChain operator^(const BitChain& o) const;
    BitChain& operator^=(const BitChain& o) { return *this = *this ^ o; }
    bool operator==(const BitChain& o) const { return len_ == o.len_ && supp_ == o.supp_; }
    bool operator!=(const BitChain& o) const { return !(*this == o); }

    BitVec to_vec() const;

private:
    std::size_t len_ = 0;
    std::vector<std::size_t> supp_;
};

/// Row-major bit-packed matrix over GF(2).
class Gf2Matrix {
public:
    Gf2Matrix() = default;
    Gf2Matrix(std::size_t rows, std::size_t cols);

    static Gf2Matrix identity(std::size_t n);
    static Gf2Matrix from_rows(std::size_t rows, std::size_t cols,
                               const std::vector<std::vector<std::size_t>>& row_support);
    static Gf2Matrix from_cols(std::size_t rows, std::size_t cols,
                               const std::vector<std::vector<std::size_t>>& col_support);
    static Gf2Matrix from_dense(const std::vector<std::vector<int>>& entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v = true);
    void flip(std::size_t r, std::size_t c) {
        data_[r * wpr_ + (c >> 6)] ^= std::uint64_t{1} << (c & 63);
    }

    const std::uint64_t* row_ptr(std::size_t r) const { return data_.data() + r * wpr_; }
    std::uint64_t* row_ptr(std::size_t r) { return data_.data() + r * wpr_; }
    BitVec row(std::size_t r) const;
    std::vector<std::size_t> row_support(std::size_t r) const;
    std::vector<std::vector<std::size_t>> col_supports() const;
    std::size_t row_weight(std::size_t r) const;
    std::size_t max_row_weight() const;
    std::size_t max_col_weight() const;
    std::size_t nnz() const;
    bool is_zero() const;

    /// dst ^= src (whole rows).
    void xor_row(std::size_t dst, std::size_t src);

    BitVec mul(const BitVec& x) const;
    BitChain mul(const BitChain& x) const;
    /// Row vector times matrix: y^T M.
    BitVec left_mul(const BitVec& y) const;

    Gf2Matrix transpose() const;
    Gf2Matrix operator*(const Gf2Matrix& o) const;
    Gf2Matrix operator+(const Gf2Matrix& o) const;
    Gf2Matrix& operator+=(const Gf2Matrix& o);
    bool operator==(const Gf2Matrix& o) const;
    bool operator!=(const Gf2Matrix& o) const { return !(*this == o); }

    /// Column selection in the given order.
    Gf2Matrix select_cols(const std::vector<std::size_t>& cols) const;

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> data_;
};

inline Gf2Matrix mat_mul(const Gf2Matrix& a, const Gf2Matrix& b) { return a * b; }
inline Gf2Matrix mat_add(const Gf2Matrix& a, const Gf2Matrix& b) { return a + b; }
inline Gf2Matrix transpose(const Gf2Matrix& a) { return a.transpose(); }

std::size_t rank(const Gf2Matrix& m);

/// Reduced row echelon form with pivot bookkeeping.
/// Pivot rule: scan columns left to right, take the first unused row holding a one.
struct Echelon {
    Gf2Matrix reduced;                   // rows permuted so pivot rows come first
    std::vector<std::size_t> pivot_cols; // pivot column of reduced row i
    std::size_t rank() const { return pivot_cols.size(); }
};
Echelon rref(const Gf2Matrix& m);

/// Factorization reused across many right-hand sides of M x = b.
class Gf2Solver {
public:
    explicit Gf2Solver(const Gf2Matrix& m);

    std::size_t rank() const { return pivot_cols_.size(); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    /// Particular solution with every free variable at zero.
    std::optional<BitVec> solve(const BitVec& b) const;
    bool consistent(const BitVec& b) const;
    /// Linear obstruction to solvability; zero exactly when b is in the column space.
    BitVec obstruction(const BitVec& b) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    Gf2Matrix transform_;               // T with T M = R, pivot rows first
    std::vector<std::size_t> pivot_cols_;
};

std::optional<BitChain> solve(const Gf2Matrix& m, const BitChain& b);
std::vector<BitChain> kernel_basis(const Gf2Matrix& m);

/// Incremental span membership over GF(2).
class SpanBuilder {
public:
    explicit SpanBuilder(std::size_t n) : n_(n) {}
    /// Adds v if independent of the current span; returns whether it was added.
    bool add(const BitVec& v);
    bool contains(const BitVec& v) const;
    std::size_t dim() const { return basis_.size(); }

private:
    BitVec reduce(BitVec v) const;
    std::size_t n_;
    std::vector<BitVec> basis_;
    std::vector<std::size_t> lead_;
};

void write_alist(std::ostream& os, const Gf2Matrix& m);
Gf2Matrix read_alist(std::istream& is);

}  // namespace fb
