#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwr/circuit.hpp"
#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr {

/// Edge between consecutive layers; `from` and `to` index vertices
/// inside their own layers.
struct AbpEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    Polynomial label;  // degree <= 1
};

/// Layered algebraic branching program with a single source (layer 0)
/// and a single sink (last layer). The program computes the sum over
/// all source-to-sink paths of the product of edge labels.
struct ABP {
    std::vector<std::uint32_t> widths;          // |V_0|, ..., |V_d|
    std::vector<std::vector<AbpEdge>> layers;   // layers[t]: V_t -> V_{t+1}
    std::uint32_t m = 0;                        // parameter count

    std::uint32_t width() const;
    std::uint64_t size() const;  // total vertex count
    std::uint32_t depth() const { return static_cast<std::uint32_t>(layers.size()); }
};

std::vector<std::string> validate_abp(const ABP& a);

/// Exact path-sum value by forward dynamic programming.
Rational abp_eval(const ABP& a, const Valuation& v);

/// Symbolic path-sum polynomial. Guard: at most 20000 vertices.
Polynomial abp_expand(const ABP& a);

/// Register simulation of a division-free single-output circuit as a
/// width-4 ABP: three register vertices plus a constant-1 carrier per
/// layer, one layer per straight-line operation, at most 4^depth
/// operations. Circuits deeper than 24 are rejected (reduce depth
/// first); the vertex count is capped at 10^7.
ABP circuit_to_abp(const Circuit& c);

/// Line-oriented text format (see emit_abp).
ABP parse_abp(const std::string& text);
std::string emit_abp(const ABP& a);

}  // namespace nwr
