#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwr/pmc.hpp"

namespace nwr {

/// Equivalence class of states that share a value function. The exit is
/// the unique member with transitions leaving the class and acts as the
/// representative after collapsing.
struct EquivalenceClass {
    std::uint32_t exit = 0;
    std::vector<std::uint32_t> members;  // sorted, contains exit
};

struct CollapseReport {
    std::vector<EquivalenceClass> classes;
    std::uint32_t size_before = 0;
    std::uint32_t size_after = 0;
    std::vector<std::uint32_t> mapping;  // old id -> new id, index 0 unused
    double elapsed_ms = 0.0;
};

/// BFS over reversed edges starting from the target state. Ties inside a
/// frontier break by ascending id; states with no path to the target are
/// appended last in id order. Requires a preprocessed model.
std::vector<std::uint32_t> reverse_bfs_order(const PMC& pmc);

/// Classes of the parameter-erased graph: walk states in reverse-BFS
/// order and, for each still-unassigned u, collect u together with every
/// state whose every path to target or sink passes through u. Includes
/// singleton classes; target and sink are always singletons.
std::vector<EquivalenceClass> equivalence_classes(const PMC& pmc);

/// Replace every class by its exit: edges into any member redirect to the
/// exit, parallel edges are summed, and exit-to-member edges become a
/// self-loop on the exit. Surviving states are renumbered in ascending
/// order, so the result is again preprocessed.
std::pair<PMC, CollapseReport> collapse(const PMC& pmc);

/// Independent oracle for tests: group states by symbolic value-function
/// equality (after substituting the row-sum constraint). Guarded to
/// models with at most 12 states.
std::vector<std::vector<std::uint32_t>> oracle_equivalence_classes(const PMC& pmc);

std::string report_to_json(const CollapseReport& rep);
std::string report_to_csv(const CollapseReport& rep, const std::string& benchmark);

}  // namespace nwr
