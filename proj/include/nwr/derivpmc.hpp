#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwr/abp.hpp"
#include "nwr/pmc.hpp"
#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr {

/// Result of compiling an ABP into a simple pMC: the ABP's polynomial
/// satisfies [[A]] = beta + N * g(probe_state).
struct AbpPmc {
    PMC pmc;
    Rational beta;
    Integer N = 1;
    std::uint32_t probe_state = 1;
    /// (u-bar, u-under) state pairs; their values sum to 1.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dual_pairs;
};

/// Layer-by-layer backward compilation. Every ABP vertex u yields a
/// state pair (u-bar, u-under) with g(u-bar) + g(u-under) = 1 and
/// [[u]] = N_layer * (beta_u + g(u-bar)); edge labels stay simple
/// (constants, x, 1-x). The result is acyclic apart from the extremal
/// self-loops and in target = n / sink = n-1 normal form.
AbpPmc abp_to_pmc(const ABP& a);

/// Simple pMC encoding the derivative of a value function: the relation
/// d g_i / d x_k = (beta + N * g'(probe)) / scale holds, with
/// target_poly = beta + N * g'(probe) as a polynomial and
/// scale = (value-function denominator)^2.
struct DerivativePMC {
    PMC pmc;
    Rational beta;
    Integer N = 1;
    std::uint32_t probe_state = 1;
    Polynomial target_poly;  // d(num) * den - num * d(den)
    Polynomial scale;        // den^2
};

/// Full pipeline: traced value-function circuits, reverse-mode
/// derivatives, division elimination with polynomial compaction, depth
/// reduction, Ben-Or-Cleve, and the ABP-to-pMC compiler. Verifies the
/// relation by exact evaluation at seeded points before returning.
DerivativePMC derivative_pmc(const PMC& pmc, std::uint32_t i, std::uint32_t k);

/// Exact state values of an acyclic pMC (self-loops allowed on the two
/// extremal states only) by backward topological sweep.
std::vector<Rational> acyclic_values(const PMC& pmc, const Valuation& v);

/// Symbolic analogue; value functions of an acyclic pMC are polynomials.
/// Guard: at most 5000 states.
std::vector<Polynomial> acyclic_value_functions(const PMC& pmc);

/// PMC JSON extended with a `relation` object (beta, N, probe_state,
/// target_poly, scale_poly).
std::string derivative_pmc_to_json(const DerivativePMC& dp);

}  // namespace nwr
