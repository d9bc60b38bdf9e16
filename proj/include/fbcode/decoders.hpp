#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fbcode/bundle.hpp"
#include "fbcode/gf2.hpp"

namespace fb {

enum class Verdict { VerifiedCosetCorrect, SyndromeMatchedOnly, Failed };
const char* verdict_name(Verdict v);

/// Invariant: unless success == Failed, the correction reproduces the input syndrome.
struct DecodeResult {
    BitChain correction;
    Verdict success = Verdict::Failed;
    std::size_t steps = 0;
    bool experimental = false;
    std::map<std::string, double> notes;
};

/// Precomputed incidence lists and solvers for one bundle. Immutable after construction,
/// so one context can serve decode calls from many threads.
class DecoderContext {
public:
    explicit DecoderContext(const Bundle& bn);

    const Bundle& bundle() const { return *bn_; }
    const std::vector<std::vector<std::size_t>>& cob0() const { return cob0_; }  // 0-cell -> 1-cells
    const std::vector<std::vector<std::size_t>>& bd1() const { return bd1_; }    // 1-cell -> 0-cells
    const std::vector<std::vector<std::size_t>>& cob1() const { return cob1_; }  // 1-cell -> 2-cells
    const std::vector<std::vector<std::size_t>>& bd2() const { return bd2_; }    // 2-cell -> 1-cells
    const std::vector<std::vector<std::size_t>>& base_cob() const { return base_cob_; }

    BitChain x_syndrome(const BitChain& e1) const;  // coboundary, a 2-chain
    BitChain z_syndrome(const BitChain& e1) const;  // boundary, a 0-chain
    bool x_syndrome_valid(const BitChain& s2) const;
    bool z_syndrome_valid(const BitChain& s0) const;
    /// Residual true + correction must be a coboundary (X) or a boundary (Z).
    bool x_coset_equal(const BitChain& a, const BitChain& b) const;
    bool z_coset_equal(const BitChain& a, const BitChain& b) const;
    /// Exact base 0-chain with the given coboundary, if one exists.
    std::optional<std::vector<std::size_t>> base_coboundary_preimage(const BitChain& target) const;

private:
    const Bundle* bn_;
    std::vector<std::vector<std::size_t>> cob0_, bd1_, cob1_, bd2_, base_cob_;
    Gf2Solver x_image_, z_image_, coboundaries_, boundaries_, base_cob_solver_;
};

/// Greedy bit flipping for unknowns u with checks adj[u]: find u-set whose check parity equals target.
/// Toggles the unknown with the largest drop in violated checks, lowest index on ties.
std::optional<std::vector<std::size_t>> greedy_flip(const std::vector<std::vector<std::size_t>>& adj,
                                                    std::size_t n_checks, const BitChain& target,
                                                    std::size_t& steps);

enum class FixMode { Exact, Alternating };

struct FixOptions {
    FixMode mode = FixMode::Exact;
    double ratio = 0.8;                  // condition (iii) constant
    std::size_t exact_degree_limit = 22; // exact mode refuses larger coboundaries
};

/// Local move at base 0-cell a: flip whole fibers over rows with x set, add coboundaries of
/// a (x) f0_j for j in y. Rows follow the sorted base coboundary of a.
struct Amendment {
    std::size_t cell = 0;
    std::vector<char> x;
    std::vector<char> y;
    std::size_t before = 0, after = 0;  // horizontal weight on A
    bool row_violation = false, column_violation = false, ratio_violation = false;
};

std::optional<Amendment> fixable_test(const DecoderContext& ctx, const BitVec& e, std::size_t a,
                                      const FixOptions& opt = {});

struct XDecodeOptions {
    FixOptions fix;
};

DecodeResult decode_x(const DecoderContext& ctx, const BitChain& s, const XDecodeOptions& opt = {});

/// Per base 1-cell completion used by decode_x: horizontal chain h with coboundary r,
/// r having even weight over every base 1-cell. Each fiber takes the lighter of the two solutions.
BitChain horizontal_completion(const Bundle& bn, const BitChain& r);

DecodeResult decode_erasure_x(const DecoderContext& ctx, const BitChain& erased, const BitChain& s);

struct ZDecodeOptions {
    long r_max = -1;  // negative: floor(ell / 4), or floor(m_F / 4) without ell
};
DecodeResult decode_z(const DecoderContext& ctx, const BitChain& s0, const ZDecodeOptions& opt = {});

/// Error and erasure samplers for benchmarks.
BitChain random_error(std::size_t length, std::size_t weight, std::mt19937_64& rng);

enum class ErasureShape { FiberInterval, StabilizerSupport, RandomCells };
const char* erasure_shape_name(ErasureShape s);

struct ErasureSample {
    ErasureShape shape = ErasureShape::RandomCells;
    BitChain erased;
    BitChain error;  // uniformly random subset of erased
};
ErasureSample sample_erasure(const DecoderContext& ctx, std::size_t max_size, std::mt19937_64& rng);

}  // namespace fb
