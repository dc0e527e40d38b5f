#include "nwr/benchgen.hpp"

#include <stdexcept>

#include "nwr/polynomial.hpp"

namespace nwr {

Variant parse_variant(const std::string& name) {
    if (name == "A" || name == "a") return Variant::A;
    if (name == "B" || name == "b") return Variant::B;
    if (name == "C" || name == "c") return Variant::C;
    if (name == "D" || name == "d") return Variant::D;
    throw std::invalid_argument("unknown benchmark variant: " + name);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::A: return "A";
        case Variant::B: return "B";
        case Variant::C: return "C";
        default: return "D";
    }
}

std::pair<std::uint64_t, std::uint64_t> expected_sizes(const VariantSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("benchmark requires n >= 2");
    std::uint64_t n = spec.n;
    return {4 * n * n - 2 * n + 3, 2 * n + 3};
}

PMC generate(const VariantSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("benchmark requires n >= 2");
    const std::uint32_t n = spec.n;
    const Variant var = spec.variant;
    const bool swapped_ladder = var == Variant::C || var == Variant::D;  // lower-row wiring
    const std::uint32_t block_sz = 2 * n - 1;  // entry-row head is never generated
    const std::uint32_t total = 2 * n * block_sz + 3;

    PMC pmc;
    pmc.init(total, 2);
    pmc.param_names = {"p", "q"};
    pmc.sink = total - 1;
    pmc.target = total;

    PolyRef p = make_poly(Polynomial::variable(0));
    PolyRef q = make_poly(Polynomial::variable(1));
    PolyRef cp = make_poly(Polynomial(1) - Polynomial::variable(0));
    PolyRef cq = make_poly(Polynomial(1) - Polynomial::variable(1));
    PolyRef one = make_poly(Polynomial(1));

    // block(i, l): stage i in 1..n, lane l in {1, 2}. Local layout: top
    // row column j at offset j, bottom row column j (j >= 2) at offset
    // n + j - 1; the bottom-left state has no incoming edge and is
    // omitted, matching the published size law.
    auto base = [&](std::uint32_t stage, std::uint32_t lane) {
        return 1 + (2 * (stage - 1) + (lane - 1)) * block_sz;
    };
    auto top = [&](std::uint32_t stage, std::uint32_t lane, std::uint32_t j) {
        return base(stage, lane) + j;
    };
    auto bot = [&](std::uint32_t stage, std::uint32_t lane, std::uint32_t j) {
        return base(stage, lane) + n + j - 1;
    };
    auto entry = [&](std::uint32_t stage, std::uint32_t lane) { return top(stage, lane, 1); };

    pmc.add_edge(1, entry(1, 1), q);
    pmc.add_edge(1, entry(1, 2), cq);

    for (std::uint32_t stage = 1; stage <= n; ++stage) {
        for (std::uint32_t lane = 1; lane <= 2; ++lane) {
            // ladder columns
            for (std::uint32_t j = 1; j + 1 <= n; ++j) {
                std::uint32_t t = top(stage, lane, j + 1), b = bot(stage, lane, j + 1);
                pmc.add_edge(top(stage, lane, j), t, p);
                pmc.add_edge(top(stage, lane, j), b, cp);
                if (j >= 2) {
                    pmc.add_edge(bot(stage, lane, j), swapped_ladder ? b : t, p);
                    pmc.add_edge(bot(stage, lane, j), swapped_ladder ? t : b, cp);
                }
            }
            // last-column hop: the non-exit end feeds the exit
            std::uint32_t exit;
            if (!swapped_ladder && lane == 2) {
                // A/B lower lane runs upward: 2n -> n, exit at the top
                exit = top(stage, lane, n);
                pmc.add_edge(bot(stage, lane, n), exit, one);
            } else {
                exit = bot(stage, lane, n);
                pmc.add_edge(top(stage, lane, n), exit, one);
            }

            if (stage < n) {
                std::uint32_t same = entry(stage + 1, lane), other = entry(stage + 1, 3 - lane);
                bool q_to_lane1 =
                    lane == 1 || var == Variant::B || var == Variant::D;  // else q stays in lane 2
                if (q_to_lane1) {
                    pmc.add_edge(exit, lane == 1 ? same : other, q);
                    pmc.add_edge(exit, lane == 1 ? other : same, cq);
                } else {
                    pmc.add_edge(exit, same, q);
                    pmc.add_edge(exit, other, cq);
                }
            } else {
                switch (var) {
                    case Variant::A:
                        pmc.add_edge(exit, lane == 1 ? pmc.target : pmc.sink, q);
                        pmc.add_edge(exit, lane == 1 ? pmc.sink : pmc.target, cq);
                        break;
                    case Variant::B:
                        pmc.add_edge(exit, pmc.target, q);
                        pmc.add_edge(exit, pmc.sink, cq);
                        break;
                    case Variant::C:
                    case Variant::D:
                        // lane 2 funnels through lane 1's exit with p
                        pmc.add_edge(exit, lane == 1 ? pmc.target : bot(stage, 1, n), p);
                        pmc.add_edge(exit, pmc.sink, cp);
                        break;
                }
            }
        }
    }
    pmc.add_edge(pmc.sink, pmc.sink, one);
    pmc.add_edge(pmc.target, pmc.target, one);
    return pmc;
}

}  // namespace nwr
