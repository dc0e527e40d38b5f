#pragma once

#include <cstdint>
#include <vector>

#include "nwr/circuit.hpp"
#include "nwr/pmc.hpp"
#include "nwr/polynomial.hpp"

namespace nwr {

/// (I_n - A) y = (0,...,0,1)^T where row i of A is the transition row
/// p_i. for interior states and rows n-1 (sink), n (target) are zero.
struct LinearSystem {
    std::uint32_t n = 0;
    std::vector<std::vector<Polynomial>> M;  // I_n - A, 0-indexed
    std::vector<Polynomial> rhs;
};

/// Diagonal form a_i * y_i = b_i with polynomial entries; after the
/// fraction-free elimination every a_i is the same determinant polynomial.
struct DiagonalSystem {
    std::vector<Polynomial> a;
    std::vector<Polynomial> b;
};

/// Requires a preprocessed model (target = n, sink = n-1).
LinearSystem build_system(const PMC& pmc);

/// One-step division-free (fraction-free) Gaussian elimination; every
/// division is an exact polynomial division. Dense; guarded at n <= 2000.
DiagonalSystem bareiss_eliminate(const LinearSystem& sys);

/// g_i = b_i / a_i; g_target = 1 and g_sink = 0.
std::vector<RationalFunction> value_functions(const PMC& pmc);

/// The same elimination traced gate-by-gate instead of expanded: the
/// returned circuit has 2n outputs, [num_1, den_1, ..., num_n, den_n],
/// with num_i/den_i = g_i. Division gates appear for the exact divisions.
Circuit value_function_circuits(const PMC& pmc);

/// Balanced circuit gates computing a polynomial (sum of monomial
/// products); shared by the tracers.
std::uint32_t emit_polynomial(CircuitBuilder& b, const Polynomial& f);

}  // namespace nwr
