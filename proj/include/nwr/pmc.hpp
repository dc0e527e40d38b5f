#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr {

using PolyRef = std::shared_ptr<const Polynomial>;
PolyRef make_poly(Polynomial p);

/// Parametric Markov chain. States are 1..n; `out[i]` lists the outgoing
/// transitions of state i sorted by destination (parallel edges are
/// summed on insertion). Transition labels are shared immutable
/// polynomials so that large generated models stay cheap to copy.
struct PMC {
    std::uint32_t n = 0;       // state count
    std::uint32_t m = 0;       // parameter count
    std::uint32_t target = 0;  // unique target state
    std::uint32_t sink = 0;    // unique sink ("fail") state
    std::vector<std::vector<std::pair<std::uint32_t, PolyRef>>> out;  // index 0 unused
    std::vector<std::string> param_names;   // size m (defaults x0, x1, ...)
    std::vector<std::string> state_labels;  // optional; size n+1 when present

    void init(std::uint32_t states, std::uint32_t params);
    void add_edge(std::uint32_t i, std::uint32_t j, PolyRef f);
    void add_edge(std::uint32_t i, std::uint32_t j, Polynomial f);
    /// Label of edge (i,j); zero polynomial if absent.
    const Polynomial& edge(std::uint32_t i, std::uint32_t j) const;
    std::size_t edge_count() const;
    std::vector<std::string> effective_param_names() const;
};

struct PMCKind {
    bool simple = false;
    bool trivially_parametric = false;
};

struct QualitativeReport {
    std::vector<std::uint32_t> prob0;    // no path to target
    std::vector<std::uint32_t> prob1;    // reach target almost surely
    std::vector<std::uint32_t> mapping;  // old id -> new id (index 0 unused)
};

/// Structural and kind-specific well-formedness; empty result = OK.
std::vector<std::string> validate(const PMC& pmc, PMCKind kind);

/// Exact check: every present edge has 0 < p(v) <= 1 and rows sum to 1.
bool is_graph_preserving(const PMC& pmc, const Valuation& v);

/// True iff target = n, sink = n-1 and both carry only their self-loop.
bool is_preprocessed(const PMC& pmc);

/// Merge the no-path-to-target states into the sink and the
/// almost-surely-reaching states into the target, then renumber so that
/// sink = n-1 and target = n.
std::pair<PMC, QualitativeReport> qualitative_preprocess(const PMC& pmc);

/// Deterministic graph-preserving valuation. Throws std::runtime_error
/// when rejection sampling (general kind) exhausts its 10^4 budget.
Valuation sample_valuation(const PMC& pmc, PMCKind kind, std::uint64_t seed);

/// For trivially parametric models: rewrite the last (highest-target)
/// edge of each non-extremal row to 1 - sum(other labels of the row), so
/// that symbolic value functions respect the row-sum constraint.
PMC apply_row_sum_constraint(const PMC& pmc);

/// JSON explicit format (schema in README): lossless round-trip.
PMC parse_model(const std::string& text);
std::string emit_model(const PMC& pmc);

/// PRISM-language DTMC with hard-coded per-state commands.
std::string emit_prism(const PMC& pmc);

}  // namespace nwr
