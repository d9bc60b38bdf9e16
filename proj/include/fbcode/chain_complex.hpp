#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbcode/gf2.hpp"

namespace fb {

/// Graded complex over GF(2) with cell spaces 0..top().
/// Invariant (checked by validate): boundary(j) * boundary(j+1) == 0.
struct ChainComplex {
    std::vector<std::size_t> dims;
    std::vector<Gf2Matrix> bd;  // bd[j-1] is the boundary from degree j to j-1
    std::vector<std::vector<std::string>> labels;  // optional, per degree

    ChainComplex() = default;
    ChainComplex(std::vector<std::size_t> d, std::vector<Gf2Matrix> b);

    int top() const { return static_cast<int>(dims.size()) - 1; }
    /// Out-of-range degrees give the appropriately shaped zero map.
    Gf2Matrix boundary(int j) const;
    std::size_t dim(int j) const { return j < 0 || j > top() ? 0 : dims[static_cast<std::size_t>(j)]; }
};

bool validate(const ChainComplex& c);

/// Degree-reversed complex whose boundaries are the transposed coboundaries.
ChainComplex dual_complex(const ChainComplex& c);

std::size_t betti(const ChainComplex& c, int j);
std::vector<BitChain> homology_basis(const ChainComplex& c, int j);
std::vector<BitChain> cohomology_basis(const ChainComplex& c, int j);

struct CssCode {
    std::size_t n_qubits = 0;
    Gf2Matrix h_x;  // rows: (q-1)-cells
    Gf2Matrix h_z;  // rows: (q+1)-cells
    std::size_t k_logical = 0;
};

CssCode css_from_complex(const ChainComplex& c, int q);

enum class Mode { Homology, Cohomology };
enum class Side { X, Z };

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExactSearchOptions {
    std::size_t cell_budget = 26;    // combination search over cells
    std::size_t kernel_budget = 24;  // enumeration of the (co)cycle space
};

/// Minimum weight of a nontrivial (co)homology representative in degree j.
/// nullopt when the class group is trivial. Throws BudgetExceeded when neither strategy fits.
std::optional<std::size_t> coset_min_weight_exact(const ChainComplex& c, int j, Mode mode,
                                                  const ExactSearchOptions& opt = {});

/// Upper bound from random information sets. nullopt when k_logical == 0.
std::optional<std::size_t> distance_upper_random_search(const CssCode& code, Side side,
                                                        std::size_t trials, std::uint64_t seed);

void write_complex(std::ostream& os, const ChainComplex& c);
ChainComplex read_complex(std::istream& is);
void write_labels(std::ostream& os, const ChainComplex& c);

}  // namespace fb
