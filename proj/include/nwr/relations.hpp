#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwr/derivpmc.hpp"
#include "nwr/pmc.hpp"
#include "nwr/rational.hpp"

namespace nwr {

/// Three-valued answer of the relation checkers. The exact problems are
/// not decided in general: certificates are sufficient conditions only,
/// and sampling can only falsify.
enum class Status { CertifiedYes, RefutedNo, Unknown };

struct Verdict {
    Status status = Status::Unknown;
    /// Names the certificate for CertifiedYes (e.g. "chonev-nonneg on ...").
    std::string certificate;
    /// RefutedNo evidence: one valuation for a never-worse query, a pair
    /// (v, v + eps*e_k) for a monotonicity query. Always re-verifies.
    std::vector<Valuation> witness;
    std::uint64_t samples_used = 0;
};

std::string status_name(Status s);
std::string verdict_to_json(const Verdict& v);

/// Exact state values at a valuation: backward sweep when the model is
/// acyclic (extremal self-loops aside), dense exact linear solve
/// otherwise (guard: 2000 states). Result is indexed by state - 1.
std::vector<Rational> state_values(const PMC& pmc, const Valuation& v);

/// Reduction gadget from never-worse to monotonicity: a fresh state
/// branching to j with a fresh parameter's probability and to i with the
/// complement. The extended model is monotone increasing at the new
/// state in the new parameter iff i is never worse than j originally.
struct NwrGadget {
    PMC pmc;
    std::uint32_t new_state;
    std::uint32_t new_param;  // 0-based parameter index
};
NwrGadget nwr_gadget(const PMC& pmc, std::uint32_t i, std::uint32_t j);

/// Reduction from monotonicity to a never-worse query on the
/// derivative-encoding model, with the two constant-sign short circuits.
enum class MonoReduction { Monotone, NotMonotone, Indeterminate, Query };
struct MonoToNwr {
    MonoReduction kind;
    std::string reason;
    /// Query only: ask query_i "never worse than" query_j in `pmc`.
    PMC pmc;
    std::uint32_t query_i = 0;
    std::uint32_t query_j = 0;
};
MonoToNwr mono_to_nwr(const DerivativePMC& d);

/// Is g_i(v) <= g_j(v) for every graph-preserving valuation v?
/// Samples up to `budget` valuations looking for a counterexample, then
/// attempts a nonnegativity certificate on g_j - g_i (symbolic form
/// available for small models only).
Verdict check_nwr(const PMC& pmc, std::uint32_t i, std::uint32_t j,
                  std::uint64_t budget = 1000, std::uint64_t seed = 0);

/// Whole-model monotonicity profile in parameter k: samples valuation
/// pairs (v, v + eps*e_k) and reports RefutedNo as soon as any state's
/// value decreases, Unknown after the budget is exhausted.
Verdict any_state_decrease(const PMC& pmc, std::uint32_t k, std::uint64_t budget,
                           std::uint64_t seed);

/// Is g_i monotone non-decreasing in parameter k over the
/// graph-preserving region?
enum class MonoMethod { Sampling, DerivativePmc, Certificate };
Verdict check_monotone(const PMC& pmc, std::uint32_t i, std::uint32_t k,
                       std::uint64_t budget = 1000, std::uint64_t seed = 0,
                       MonoMethod method = MonoMethod::Sampling);

}  // namespace nwr
