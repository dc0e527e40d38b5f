#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr {

enum class GateOp : std::uint8_t { Input, Const, Add, Mul, Div };

struct Gate {
    GateOp op;
    std::uint32_t a = 0;  // left operand (gate id)
    std::uint32_t b = 0;  // right operand (gate id)
    std::uint32_t param = 0;  // Input only
    Rational c;               // Const only
};

/// Arithmetic circuit: gates in topological order (operands always refer
/// to earlier gates), fanin exactly 2 for add/mul/div, one or more outputs.
struct Circuit {
    std::vector<Gate> gates;
    std::vector<std::uint32_t> outputs;

    std::size_t size() const { return gates.size(); }
    std::uint32_t num_params() const;
    std::uint64_t depth() const;
    bool division_free() const;
    /// Throws std::invalid_argument on structural violations.
    void validate() const;
};

/// Builds circuits with hash-consing of identical gates and folding of
/// constant subexpressions and the identities x+0, x*1, x*0, x/1.
class CircuitBuilder {
public:
    std::uint32_t input(std::uint32_t k);
    std::uint32_t constant(const Rational& q);
    std::uint32_t add(std::uint32_t a, std::uint32_t b);
    std::uint32_t sub(std::uint32_t a, std::uint32_t b);  // a + (-1)*b
    std::uint32_t mul(std::uint32_t a, std::uint32_t b);
    std::uint32_t div(std::uint32_t a, std::uint32_t b);
    /// Balanced sum of a list (empty list = constant 0).
    std::uint32_t sum(std::vector<std::uint32_t> ids);

    /// Copies gate `id` of `src` (and its cone) into this builder;
    /// `cache` carries src-gate -> new-gate mappings across calls.
    std::uint32_t import(const Circuit& src, std::uint32_t id,
                         std::unordered_map<std::uint32_t, std::uint32_t>& cache);

    const Gate& gate(std::uint32_t id) const { return gates_[id]; }
    bool is_const(std::uint32_t id) const { return gates_[id].op == GateOp::Const; }
    std::size_t size() const { return gates_.size(); }

    Circuit take(std::vector<std::uint32_t> outputs);

private:
    std::uint32_t push(Gate g);
    std::vector<Gate> gates_;
    std::unordered_map<std::string, std::uint32_t> cse_;
};

/// Exact evaluation of all outputs. Throws std::domain_error naming the
/// gate on division by zero.
std::vector<Rational> circuit_eval(const Circuit& c, const Valuation& v);
/// As above for single-output circuits.
Rational circuit_eval_single(const Circuit& c, const Valuation& v);
/// nullopt instead of throwing on division by zero.
std::optional<std::vector<Rational>> circuit_eval_try(const Circuit& c, const Valuation& v);

/// Sum-of-products expansion per output; division-free circuits only.
/// Guard: any intermediate polynomial with > 10^5 monomials aborts.
std::vector<Polynomial> expand_to_polynomial(const Circuit& c);

/// Per-output syntactic degree bound (input 1, const 0, add max, mul sum).
std::vector<std::uint64_t> syntactic_degree(const Circuit& c);

/// Rewrites the circuit so each output is a single division of two
/// division-free subcircuits. Size <= 4|C| + O(outputs).
Circuit push_divisions(const Circuit& c);
/// Same construction exposed as separate outputs: for input outputs
/// o1..ok, result outputs are n1, d1, ..., nk, dk (all division-free).
Circuit split_divisions(const Circuit& c);

/// Strassen division elimination: returns a division-free circuit
/// computing the same outputs, assuming each output is a polynomial of
/// total degree <= d. Verifies itself by seeded random evaluation.
Circuit eliminate_divisions(const Circuit& c, std::uint64_t d, std::uint64_t seed = 0x5eed);

/// Reported constant of the depth-reduction bound.
inline constexpr std::uint64_t kDepthReduceKappa = 4;
/// kappa * ceil(log2(|C| d)) * (ceil(log2 d) + 1)
std::uint64_t depth_bound(std::size_t size, std::uint64_t d);

/// Depth reduction for division-free circuits. When the input already
/// meets depth_bound(|C|, d) it is returned unchanged; otherwise a
/// balanced circuit is rebuilt from homogeneous components. `force`
/// rebuilds unconditionally (used by tests). Guard: 10^6 output gates.
Circuit depth_reduce(const Circuit& c, bool force = false);

/// Reverse-mode derivative circuit for a single-output circuit: outputs
/// (f, df/dx0, ..., df/dx{m-1}), m = max(c.num_params(), nparams).
/// Division gates use the quotient rule. Size <= 5|C| + O(m).
Circuit derivatives(const Circuit& c, std::uint32_t nparams = 0);

/// Line-oriented text format (see emit_circuit).
Circuit parse_circuit(const std::string& text);
std::string emit_circuit(const Circuit& c);

}  // namespace nwr
