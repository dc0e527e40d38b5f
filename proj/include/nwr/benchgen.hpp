#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "nwr/pmc.hpp"

namespace nwr {

/// Scalable two-parameter ladder benchmark family. Each instance has a
/// start state, a target, a sink and 2n "blocks" arranged in two lanes
/// of n stages; every block is a 2 x n ladder over parameter p whose
/// states share one reachability value, so the model collapses from
/// 4n^2 - 2n + 3 states to 2n + 3. The four variants differ in the
/// inter-block and final-block wiring (parameter q and, for C/D, p),
/// which flips the monotonicity profile:
///   A: not monotone in q, p vanishes after collapse
///   B: monotone increasing in q, p vanishes after collapse
///   C: not monotone in q, monotone increasing in p
///   D: monotone increasing in q and in p
enum class Variant { A, B, C, D };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct VariantSpec {
    Variant variant;
    std::uint32_t n;  // >= 2
};

/// (generated states, states after collapse) = (4n^2-2n+3, 2n+3).
std::pair<std::uint64_t, std::uint64_t> expected_sizes(const VariantSpec& spec);

/// Deterministic generator. Parameters are p = x0, q = x1. States are
/// numbered start = 1, then block-major (stage 1 lane 1, stage 1 lane
/// 2, stage 2 lane 1, ...) with each block's surviving 2n-1 states laid
/// out top row first; sink = N-1, target = N. Per-block entry states
/// with no incoming edge are not generated.
PMC generate(const VariantSpec& spec);

}  // namespace nwr
