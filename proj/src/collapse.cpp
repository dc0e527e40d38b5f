#include "nwr/collapse.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nwr/valuefn.hpp"

namespace nwr {

namespace {

// Predecessor adjacency in compressed (CSR) form so the per-candidate
// backward searches stay allocation-free on large models.
struct Csr {
    std::vector<std::uint32_t> off;  // size n+2, rows 1..n
    std::vector<std::uint32_t> dst;
};

Csr predecessors(const PMC& pmc) {
    std::uint32_t n = pmc.n;
    Csr csr;
    csr.off.assign(n + 2, 0);
    for (std::uint32_t i = 1; i <= n; ++i)
        for (auto& [j, f] : pmc.out[i]) ++csr.off[j + 1];
    for (std::uint32_t j = 1; j <= n; ++j) csr.off[j + 1] += csr.off[j];
    csr.dst.resize(csr.off[n + 1]);
    std::vector<std::uint32_t> cur(csr.off.begin(), csr.off.end() - 1);
    for (std::uint32_t i = 1; i <= n; ++i)
        for (auto& [j, f] : pmc.out[i]) csr.dst[cur[j]++] = i;
    return csr;
}

void require_preprocessed(const PMC& pmc, const char* who) {
    if (!is_preprocessed(pmc))
        throw std::invalid_argument(std::string(who) +
                                    ": model not in target=n / sink=n-1 normal form");
}

}  // namespace

std::vector<std::uint32_t> reverse_bfs_order(const PMC& pmc) {
    require_preprocessed(pmc, "reverse_bfs_order");
    std::uint32_t n = pmc.n;
    Csr pred = predecessors(pmc);
    std::vector<char> seen(n + 1, 0);
    std::vector<std::uint32_t> order, frontier = {pmc.target};
    seen[pmc.target] = 1;
    while (!frontier.empty()) {
        order.insert(order.end(), frontier.begin(), frontier.end());
        std::vector<std::uint32_t> next;
        for (std::uint32_t v : frontier)
            for (std::uint32_t e = pred.off[v]; e < pred.off[v + 1]; ++e) {
                std::uint32_t u = pred.dst[e];
                if (!seen[u]) {
                    seen[u] = 1;
                    next.push_back(u);
                }
            }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    for (std::uint32_t v = 1; v <= n; ++v)
        if (!seen[v]) order.push_back(v);
    return order;
}

std::vector<EquivalenceClass> equivalence_classes(const PMC& pmc) {
    require_preprocessed(pmc, "equivalence_classes");
    std::uint32_t n = pmc.n;
    Csr pred = predecessors(pmc);
    std::vector<std::uint32_t> order = reverse_bfs_order(pmc);

    std::vector<char> todo(n + 1, 1);
    std::vector<std::uint32_t> stamp(n + 1, 0);
    std::uint32_t cur = 0;
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    std::vector<EquivalenceClass> classes;

    for (std::uint32_t u : order) {
        if (!todo[u]) continue;
        // U = states with a path to target or sink avoiding u: one
        // backward search from both extremal states that never expands u.
        ++cur;
        queue.clear();
        for (std::uint32_t s : {pmc.target, pmc.sink})
            if (s != u) {
                stamp[s] = cur;
                queue.push_back(s);
            }
        for (std::size_t h = 0; h < queue.size(); ++h) {
            std::uint32_t v = queue[h];
            for (std::uint32_t e = pred.off[v]; e < pred.off[v + 1]; ++e) {
                std::uint32_t w = pred.dst[e];
                if (w != u && stamp[w] != cur) {
                    stamp[w] = cur;
                    queue.push_back(w);
                }
            }
        }
        EquivalenceClass cls;
        cls.exit = u;
        for (std::uint32_t v = 1; v <= n; ++v)
            if (stamp[v] != cur && todo[v]) {
                cls.members.push_back(v);
                todo[v] = 0;
            }
        if ((u == pmc.target || u == pmc.sink) && cls.members.size() != 1)
            throw std::logic_error("equivalence_classes: extremal state in a non-trivial class");
        classes.push_back(std::move(cls));
    }
    return classes;
}

std::pair<PMC, CollapseReport> collapse(const PMC& pmc) {
    require_preprocessed(pmc, "collapse");
    auto t0 = std::chrono::steady_clock::now();
    std::uint32_t n = pmc.n;

    CollapseReport rep;
    rep.classes = equivalence_classes(pmc);
    rep.size_before = n;

    std::vector<std::uint32_t> exit_of(n + 1, 0);
    for (auto& cls : rep.classes)
        for (std::uint32_t v : cls.members) exit_of[v] = cls.exit;

    // survivors keep their relative order, so the result stays in the
    // target=n / sink=n-1 normal form
    std::vector<std::uint32_t> new_id(n + 1, 0);
    std::uint32_t next = 0;
    for (std::uint32_t v = 1; v <= n; ++v)
        if (exit_of[v] == v) new_id[v] = ++next;
    rep.size_after = next;
    rep.mapping.assign(n + 1, 0);
    for (std::uint32_t v = 1; v <= n; ++v) rep.mapping[v] = new_id[exit_of[v]];

    PMC res;
    res.init(next, pmc.m);
    res.param_names = pmc.param_names;
    res.sink = rep.mapping[pmc.sink];
    res.target = rep.mapping[pmc.target];
    for (std::uint32_t v = 1; v <= n; ++v) {
        if (exit_of[v] != v) continue;
        for (auto& [j, f] : pmc.out[v]) res.add_edge(new_id[v], rep.mapping[j], f);
    }

    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(res), std::move(rep)};
}

std::vector<std::vector<std::uint32_t>> oracle_equivalence_classes(const PMC& pmc) {
    if (pmc.n > 12)
        throw std::invalid_argument("oracle_equivalence_classes: limited to 12 states");
    auto g = value_functions(apply_row_sum_constraint(pmc));
    std::vector<std::vector<std::uint32_t>> groups;
    for (std::uint32_t i = 1; i <= pmc.n; ++i) {
        bool placed = false;
        for (auto& grp : groups)
            if (ratfn_equal(g[grp[0] - 1], g[i - 1])) {
                grp.push_back(i);
                placed = true;
                break;
            }
        if (!placed) groups.push_back({i});
    }
    return groups;
}

std::string report_to_json(const CollapseReport& rep) {
    nlohmann::json j;
    j["size_before"] = rep.size_before;
    j["size_after"] = rep.size_after;
    j["elapsed_ms"] = rep.elapsed_ms;
    j["mapping"] = std::vector<std::uint32_t>(rep.mapping.begin() + 1, rep.mapping.end());
    j["classes"] = nlohmann::json::array();
    for (auto& cls : rep.classes)
        j["classes"].push_back({{"exit", cls.exit}, {"members", cls.members}});
    return j.dump(2) + "\n";
}

std::string report_to_csv(const CollapseReport& rep, const std::string& benchmark) {
    std::ostringstream os;
    os << "benchmark,size_before,size_after,classes,elapsed_ms\n";
    os << benchmark << ',' << rep.size_before << ',' << rep.size_after << ','
       << rep.classes.size() << ',' << rep.elapsed_ms << "\n";
    return os.str();
}

}  // namespace nwr
