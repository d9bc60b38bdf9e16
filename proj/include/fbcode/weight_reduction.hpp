#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fbcode/bundle.hpp"
#include "fbcode/chain_complex.hpp"
#include "fbcode/decoders.hpp"
#include "fbcode/gf2.hpp"

namespace fb {

/// Column-sparse GF(2) matrix: col(j) is the sorted support of the image of basis vector j.
class SparseMap {
public:
    SparseMap() = default;
    SparseMap(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
    /// Repeated indices in a column cancel in pairs.
    SparseMap(std::size_t rows, std::vector<std::vector<std::size_t>> cols);

    static SparseMap identity(std::size_t n);
    static SparseMap from_dense(const Gf2Matrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_.size(); }
    const std::vector<std::size_t>& col(std::size_t j) const { return cols_[j]; }
    const std::vector<std::vector<std::size_t>>& columns() const { return cols_; }

    Gf2Matrix to_dense() const;
    SparseMap transpose() const;
    BitChain apply(const BitChain& x) const;
    std::size_t max_col_weight() const;
    bool is_zero() const;

    SparseMap operator*(const SparseMap& o) const;
    SparseMap operator+(const SparseMap& o) const;
    bool operator==(const SparseMap& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator!=(const SparseMap& o) const { return !(*this == o); }

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<std::size_t>> cols_;
};

/// f[j]: source degree j -> target degree j.
struct ChainMap {
    std::vector<SparseMap> f;
};

/// f: A -> B, g: B -> A, gf - I = h_a d + d h_a on A, fg - I = h_b d + d h_b on B.
/// h_a[j] maps A_j -> A_{j+1} for j < top.
struct HomotopyEquivalence {
    ChainComplex a, b;
    ChainMap f, g;
    std::vector<SparseMap> h_a, h_b;
};

bool is_chain_map(const ChainComplex& src, const ChainComplex& dst, const ChainMap& m);
/// The four identities, checked as exact matrix equations at every degree.
bool verify_homotopy(const HomotopyEquivalence& eq);

/// Per degree: max column weight, so |m(u)| <= K_j |u|.
std::vector<std::size_t> lipschitz(const ChainMap& m);
/// Same constants for the transposes (max row weights).
std::vector<std::size_t> lipschitz_transpose(const ChainMap& m);

HomotopyEquivalence identity_equivalence(const ChainComplex& c);
/// B -> A with the roles of the maps and homotopies exchanged.
HomotopyEquivalence reversed(const HomotopyEquivalence& eq);
/// Equivalence of dual complexes: (g^T, f^T, h^T) with degrees reversed.
HomotopyEquivalence dual_equivalence(const HomotopyEquivalence& eq);

/// v must be a 0-cell of a 1-complex with exactly two coboundary 1-cells e1 < e2.
/// e1 survives as the merged cell; v and e2 disappear.
HomotopyEquivalence combine_cells(const ChainComplex& a, std::size_t v);
/// e must be a 1-cell with exactly two boundary 0-cells; computed as the dual of combine_cells.
HomotopyEquivalence collapse_cell(const ChainComplex& a, std::size_t e);

/// Weight-reduced base: bits (b,c) then [c,k]; checks (c,b) then [b,j]; every ordering ascending.
/// Twists sit only on (b,c) at (c,b), copying the original twist of b at c.
struct ReducedBase {
    BaseComplex base;
    std::vector<std::string> bit_labels, check_labels;
    std::size_t incidences = 0;  // E
};

/// Throws invalid_argument when some 1-cell has an empty boundary.
ReducedBase reduce_base(const BaseComplex& original);

/// Per-rewrite verification: each elementary rewrite (including gauge moves) is replayed alone on
/// the current complex and checked with verify_homotopy.
struct RewriteAudit {
    std::size_t steps = 0, verified = 0;
    bool all_verified() const { return steps == verified; }
};

struct WeightReduction {
    ReducedBase reduced;
    HomotopyEquivalence equiv;  // a = reduced complex, b = original complex
    std::size_t combines = 0, collapses = 0, gauge_moves = 0;
};

/// Classical route on base.complex(): combines at auxiliary checks, then collapses at auxiliary bits.
WeightReduction weight_reduce_classical(const BaseComplex& base, RewriteAudit* audit = nullptr);

struct BundleReduction {
    Bundle reduced;
    ReducedBase reduced_base;
    HomotopyEquivalence equiv;  // a = reduced bundle complex, b = original bundle complex
    std::size_t combines = 0, collapses = 0, gauge_moves = 0;
};

/// Same rewrite schedule applied fiberwise. Throws logic_error if the composed complex does not
/// reproduce the original bundle.
BundleReduction weight_reduce_bundle(const Bundle& original, RewriteAudit* audit = nullptr);

/// Runs the fiberwise schedule over the bundle on rb.base with any twists, inserting gauge moves
/// where a rewritten cell is twisted. The target is the bundle over the contracted base, whose
/// shape (cell counts, incidences) is that of original_shape.
BundleReduction contract_reduced_bundle(const ReducedBase& rb, const BaseComplex& original_shape, std::size_t m_f,
                                        std::size_t ell, RewriteAudit* audit = nullptr);

using InnerDecoder = std::function<DecodeResult(const BitChain&)>;

/// Decodes a degree-j error on eq.a from its boundary s_a: e = g(inner(f(s_a))) + h(s_a).
DecodeResult decode_via_homotopy(const HomotopyEquivalence& eq, int degree, const InnerDecoder& inner,
                                 const BitChain& s_a);

/// Same text layout as write_alist.
void write_alist(std::ostream& os, const SparseMap& m);
/// File name -> contents: f_j, g_j, h_a_j, h_b_j alists and a manifest naming the two complex files.
std::map<std::string, std::string> equivalence_files(const HomotopyEquivalence& eq, const std::string& source_file,
                                                     const std::string& target_file);
/// Writes equivalence_files into dir.
void write_equivalence(const std::string& dir, const HomotopyEquivalence& eq, const std::string& source_file,
                       const std::string& target_file);

}  // namespace fb
