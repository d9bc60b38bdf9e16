#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fbcode/base_code.hpp"
#include "fbcode/chain_complex.hpp"
#include "fbcode/gf2.hpp"
#include "fbcode/twist.hpp"

namespace fb {

/// A 1-complex with a twist on every (1-cell, boundary 0-cell) incidence.
/// Invariant: bd[e] is strictly increasing and tw[e] is aligned with it.
struct BaseComplex {
    std::size_t n1 = 0, n0 = 0;
    std::vector<std::vector<std::size_t>> bd;
    std::vector<std::vector<std::size_t>> tw;

    /// C_L: 1-cell i joins 0-cells i and i+1 mod L. `twist` sits on 1-cell L-1 at 0-cell 0.
    static BaseComplex circle(std::size_t length, std::size_t twist = 0);
    /// Variables become 1-cells and checks 0-cells; twists default to zero.
    static BaseComplex from_code(const PartitionedBaseCode& code, const TwistAssignment* twists = nullptr);

    Gf2Matrix boundary() const;  // n0 x n1
    ChainComplex complex() const;
    std::vector<std::vector<std::size_t>> coboundary() const;  // per 0-cell, sorted 1-cells
    std::size_t twist(std::size_t e, std::size_t a) const;
};

/// Twisted product of a base 1-complex with the m_F-cycle fiber.
/// Layout: E0 (a,i) -> a*m_F+i; E1 horizontal (b,i) -> b*m_F+i, then vertical (a,i) -> n1*m_F + a*m_F+i;
/// E2 (b,i) -> b*m_F+i. Fiber 1-cell i has boundary f0_i + f0_{i+1}.
struct Bundle {
    BaseComplex base;
    std::size_t m_f = 0;
    std::size_t ell = 0;  // 0 when the fiber is not of the form ell^2
    ChainComplex complex;

    std::size_t cell0(std::size_t a, std::size_t i) const { return a * m_f + i % m_f; }
    std::size_t horizontal(std::size_t b, std::size_t i) const { return b * m_f + i % m_f; }
    std::size_t vertical(std::size_t a, std::size_t i) const { return base.n1 * m_f + a * m_f + i % m_f; }
    std::size_t cell2(std::size_t b, std::size_t i) const { return b * m_f + i % m_f; }

    std::size_t n_horizontal() const { return base.n1 * m_f; }
    bool is_horizontal(std::size_t idx1) const { return idx1 < n_horizontal(); }
    /// Base cell and fiber position of a 1-cell.
    std::pair<std::size_t, std::size_t> locate1(std::size_t idx1) const;

    std::size_t n_qubits() const { return complex.dim(1); }
    CssCode css() const { return css_from_complex(complex, 1); }
};

Bundle build_bundle(BaseComplex base, std::size_t m_fiber, std::size_t ell = 0);

/// Fiber ell^2 over the code, with twists from the types, heads and tails.
Bundle build_twisted_bundle(const PartitionedBaseCode& code, const TwistGraph& g);

/// Bundle projection as matrices: degree 0 -> base 0-cells, degree 1 -> base 1-cells, degree 2 -> 0.
Gf2Matrix projection_matrix(const Bundle& bn, int degree);
BitChain projection(const Bundle& bn, int degree, const BitChain& e);

/// K lowers degree by one: b (x) f1 -> b, vertical a (x) f1 -> a, every (x) f0 cell -> 0.
Gf2Matrix k_matrix(const Bundle& bn, int degree);
BitChain k_map(const Bundle& bn, int degree, const BitChain& e);

std::pair<BitChain, BitChain> hv_decompose(const Bundle& bn, const BitChain& e1);

struct ShadowWeights {
    std::size_t vsw = 0, hsw = 0;
};
ShadowWeights shadow_weights(const Bundle& bn, const BitChain& e1);
std::size_t shadow_weight0(const Bundle& bn, const BitChain& e0);

/// base 1-chain c -> c (x) (sum of all fiber 0-cells).
std::vector<BitChain> cohomology_lift_basis(const Bundle& bn, const std::vector<BitChain>& base_cochains);

/// Closed 1-chain projecting to the base 1-cycle c. Requires b0(base) = 0.
BitChain homology_lift(const Bundle& bn, const BitChain& c);

/// Vertical 1-chain on one fiber with boundary equal to the even 0-chain `points` (fiber positions).
/// Picks the lighter of the two solutions; on a tie, the one whose arcs run from each odd-ranked
/// point toward increasing index.
std::vector<std::size_t> fiber_path(std::size_t m_f, std::vector<std::size_t> points);

struct H1IsoReport {
    bool cond_i = false, cond_ii = false, cond_iii = false, cond_iv = false, cond_v = false;
    std::size_t b1_bundle = 0, b1_bundle_dual = 0, b1_base = 0, b0_base = 0;
    std::size_t projected_rank = 0;
    bool projection_spans = false;
    bool iso_asserted = false;
    bool all_conditions() const { return cond_i && cond_ii && cond_iii && cond_iv && cond_v; }
};
H1IsoReport verify_h1_iso(const Bundle& bn);

struct SlideResult {
    BitChain normalized;
    BitChain two_chain;  // normalized = input + boundary_2(two_chain)
    std::size_t moves = 0;
};
SlideResult slide_normalize(const Bundle& bn, const BitChain& r);

/// Gauge move: add `shift` to every twist at one base cell.
/// perm[d][old] is the index of the image cell in degree d of the new bundle.
struct GaugeMove {
    BaseComplex base;
    std::array<std::vector<std::size_t>, 3> perm;
};
GaugeMove gauge_at_1cell(const Bundle& bn, std::size_t e, std::size_t shift);
GaugeMove gauge_at_0cell(const Bundle& bn, std::size_t a, std::size_t shift);
Gf2Matrix permutation_matrix(const std::vector<std::size_t>& perm);

/// Header line "bundle n1 n0 m_F ell seed twist_file", the layout tag, then the complex.
void write_bundle(std::ostream& os, const Bundle& bn, std::uint64_t seed, const std::string& twist_file);

}  // namespace fb
