#include "nwr/derivpmc.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nwr/chonev.hpp"
#include "nwr/circuit.hpp"
#include "nwr/valuefn.hpp"

namespace nwr {

namespace {

// reverse topological order of the non-extremal part: every state comes
// after all of its successors; extremal self-loops are ignored
std::vector<std::uint32_t> backward_topological(const PMC& pmc) {
    std::vector<std::uint8_t> color(pmc.n + 1, 0);  // 0 new, 1 open, 2 done
    std::vector<std::uint32_t> order;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack;
    for (std::uint32_t root = 1; root <= pmc.n; ++root) {
        if (color[root]) continue;
        stack.emplace_back(root, 0);
        color[root] = 1;
        while (!stack.empty()) {
            auto& [s, idx] = stack.back();
            bool extremal = (s == pmc.target || s == pmc.sink);
            if (extremal || idx >= pmc.out[s].size()) {
                color[s] = 2;
                order.push_back(s);
                stack.pop_back();
                continue;
            }
            std::uint32_t next = pmc.out[s][idx++].first;
            if (color[next] == 1)
                throw std::invalid_argument("acyclic pMC expected: cycle through state " +
                                            std::to_string(next));
            if (color[next] == 0) {
                color[next] = 1;
                stack.emplace_back(next, 0);
            }
        }
    }
    return order;
}

}  // namespace

std::vector<Rational> acyclic_values(const PMC& pmc, const Valuation& v) {
    std::vector<Rational> g(pmc.n + 1, Rational(0));
    g[pmc.target] = 1;
    for (std::uint32_t s : backward_topological(pmc)) {
        if (s == pmc.target || s == pmc.sink) continue;
        Rational acc(0);
        for (auto& [j, f] : pmc.out[s]) acc += f->eval(v) * g[j];
        g[s] = Rational(acc);
    }
    return {g.begin() + 1, g.end()};
}

std::vector<Polynomial> acyclic_value_functions(const PMC& pmc) {
    if (pmc.n > 5000)
        throw std::invalid_argument("acyclic_value_functions: limited to 5000 states");
    std::vector<Polynomial> g(pmc.n + 1);
    g[pmc.target] = Polynomial(1);
    for (std::uint32_t s : backward_topological(pmc)) {
        if (s == pmc.target || s == pmc.sink) continue;
        Polynomial acc;
        for (auto& [j, f] : pmc.out[s]) acc = acc + *f * g[j];
        g[s] = std::move(acc);
    }
    return {g.begin() + 1, g.end()};
}

namespace {

struct TmpRow {
    std::vector<std::pair<std::uint32_t, Polynomial>> edges;
};

struct Literal1 {
    std::uint32_t param;
    bool flipped;
};

Polynomial literal_poly(const Literal1& l) {
    return l.flipped ? Polynomial(1) - Polynomial::variable(l.param)
                     : Polynomial::variable(l.param);
}

Polynomial literal_complement(const Literal1& l) {
    return l.flipped ? Polynomial::variable(l.param)
                     : Polynomial(1) - Polynomial::variable(l.param);
}

}  // namespace

AbpPmc abp_to_pmc(const ABP& a) {
    auto bad = validate_abp(a);
    if (!bad.empty()) throw std::invalid_argument("abp_to_pmc: " + bad.front());
    std::uint32_t m = a.m;
    std::size_t L = a.layers.size();

    std::vector<TmpRow> rows;  // temp id 0 = sink, 1 = target
    rows.resize(2);
    auto new_state = [&rows]() {
        if (rows.size() > 2'000'000)
            throw std::runtime_error("abp_to_pmc: state guard (2*10^6) exceeded");
        rows.emplace_back();
        return static_cast<std::uint32_t>(rows.size() - 1);
    };
    constexpr std::uint32_t kSink = 0, kTarget = 1;

    // per current layer: state pair and offset beta for each vertex
    std::vector<std::uint32_t> bar = {kTarget}, under = {kSink};
    std::vector<Rational> beta = {Rational(0)};
    Integer n_layer = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> tmp_pairs;

    for (std::size_t j = L; j-- > 0;) {
        std::uint32_t w = a.widths[j];
        // the layer expression of every vertex, with g(v-bar) of the next
        // layer represented by the formal variable x_{m+v}
        std::vector<Polynomial> h(w);
        for (auto& e : a.layers[j]) {
            Polynomial scaled = e.label.scaled(Rational(n_layer));
            h[e.from] = h[e.from] + scaled.scaled(beta[e.to]) +
                        scaled * Polynomial::variable(m + e.to);
        }
        std::vector<ChonevProducts> prods(w);
        Rational max_a(0);
        for (std::uint32_t u = 0; u < w; ++u) {
            prods[u] = chonev_products(h[u]);
            Rational acc = abs(prods[u].c0);
            for (auto& [q, lits] : prods[u].terms) acc += q;
            if (acc > max_a) max_a = acc;
        }
        Integer nj = 1;
        if (max_a > 0) {
            mpz_cdiv_q(nj.get_mpz_t(), max_a.get_num().get_mpz_t(),
                       max_a.get_den().get_mpz_t());
            if (nj < 1) nj = 1;
        }

        std::vector<std::uint32_t> nbar(w), nunder(w);
        std::vector<Rational> nbeta(w);
        for (std::uint32_t u = 0; u < w; ++u) {
            nbeta[u] = Rational(prods[u].c0 / nj);
            // chains first so that rows always point at earlier states
            Rational total(0);
            struct PTerm {
                Rational alpha;
                std::optional<Literal1> x, y;
            };
            std::vector<PTerm> pterms;
            for (auto& [q, lits] : prods[u].terms) {
                PTerm t;
                t.alpha = Rational(q / nj);
                total += t.alpha;
                for (auto& lit : lits) {
                    auto& slot = lit.param < m ? t.x : t.y;
                    if (slot)
                        throw std::logic_error("abp_to_pmc: non-multilinear product term");
                    slot = Literal1{lit.param, lit.flipped};
                }
                pterms.push_back(std::move(t));
            }
            Rational rem = Rational(1 - total);

            std::uint32_t bu = 0, uu = 0;
            for (int side = 0; side < 2; ++side) {  // 0: u-bar, 1: u-under
                std::vector<std::pair<std::uint32_t, Polynomial>> hub_edges;
                for (auto& t : pterms) {
                    std::uint32_t dest;
                    if (t.y) {
                        std::uint32_t v = t.y->param - m;
                        bool straight = !t.y->flipped;
                        dest = (straight != (side == 1)) ? bar[v] : under[v];
                    } else {
                        dest = side == 0 ? kTarget : kSink;
                    }
                    if (!t.x) {
                        hub_edges.emplace_back(dest, Polynomial(t.alpha));
                    } else {
                        std::uint32_t c = new_state();
                        rows[c].edges.emplace_back(dest, literal_poly(*t.x));
                        rows[c].edges.emplace_back(side == 0 ? kSink : kTarget,
                                                   literal_complement(*t.x));
                        hub_edges.emplace_back(c, Polynomial(t.alpha));
                    }
                }
                if (rem > 0)
                    hub_edges.emplace_back(side == 0 ? kSink : kTarget, Polynomial(rem));
                std::uint32_t hub = new_state();
                rows[hub].edges = std::move(hub_edges);
                (side == 0 ? bu : uu) = hub;
            }
            nbar[u] = bu;
            nunder[u] = uu;
            tmp_pairs.emplace_back(bu, uu);
        }
        bar = std::move(nbar);
        under = std::move(nunder);
        beta = std::move(nbeta);
        n_layer = nj;
    }

    // renumber: probe (source's bar state) = 1, the rest of the interior
    // in creation order, sink = n-1, target = n
    std::uint32_t probe_tmp = bar[0];
    std::uint32_t n = static_cast<std::uint32_t>(rows.size());
    std::vector<std::uint32_t> id(rows.size(), 0);
    id[probe_tmp] = 1;
    std::uint32_t next = 1;
    for (std::uint32_t t = 2; t < rows.size(); ++t)
        if (t != probe_tmp) id[t] = ++next;
    id[kSink] = n - 1;
    id[kTarget] = n;

    AbpPmc res;
    res.pmc.init(n, m);
    res.pmc.sink = n - 1;
    res.pmc.target = n;
    Polynomial one(1);
    res.pmc.add_edge(n - 1, n - 1, one);
    res.pmc.add_edge(n, n, one);
    for (std::uint32_t t = 2; t < rows.size(); ++t)
        for (auto& [dest, label] : rows[t].edges)
            res.pmc.add_edge(id[t], id[dest], std::move(label));
    res.beta = Rational(beta[0] * n_layer);
    res.N = n_layer;
    res.probe_state = 1;
    for (auto& [b, u] : tmp_pairs) res.dual_pairs.emplace_back(id[b], id[u]);
    return res;
}

DerivativePMC derivative_pmc(const PMC& pmc, std::uint32_t i, std::uint32_t k) {
    if (i == 0 || i > pmc.n) throw std::invalid_argument("derivative_pmc: bad state");
    if (k >= pmc.m) throw std::invalid_argument("derivative_pmc: bad parameter");

    // symbolic reference: with g_i = num/den from the elimination,
    // d g_i / d x_k = (num' den - num den') / den^2
    DiagonalSystem ds = bareiss_eliminate(build_system(pmc));
    const Polynomial& num = ds.b[i - 1];
    const Polynomial& den = ds.a[i - 1];
    Polynomial p_poly =
        num.partial_derivative(k) * den - num * den.partial_derivative(k);
    Polynomial scale = den * den;

    // circuit path: traced elimination -> reverse-mode derivatives ->
    // quotient-rule numerator -> division elimination
    Circuit traced = value_function_circuits(pmc);
    Circuit cn{traced.gates, {traced.outputs[2 * (i - 1)]}};
    Circuit cd{traced.gates, {traced.outputs[2 * (i - 1) + 1]}};
    Circuit dn = derivatives(cn, pmc.m);
    Circuit dd = derivatives(cd, pmc.m);
    CircuitBuilder cb;
    std::unordered_map<std::uint32_t, std::uint32_t> cache_n, cache_d;
    std::uint32_t g_num = cb.import(dn, dn.outputs[0], cache_n);
    std::uint32_t g_dnum = cb.import(dn, dn.outputs[1 + k], cache_n);
    std::uint32_t g_den = cb.import(dd, dd.outputs[0], cache_d);
    std::uint32_t g_dden = cb.import(dd, dd.outputs[1 + k], cache_d);
    Circuit pc = cb.take({cb.sub(cb.mul(g_dnum, g_den), cb.mul(g_num, g_dden))});
    Circuit pe = eliminate_divisions(pc, std::max<std::uint64_t>(p_poly.degree(), 1));

    // the eliminated circuit must agree with the symbolic polynomial
    std::mt19937_64 rng(0xd1ffe4);
    std::uniform_int_distribution<long> dist(1, (1 << 16) - 1);
    auto point = [&]() {
        Valuation v;
        for (std::uint32_t p = 0; p < pmc.m; ++p) v.push_back(ratio(dist(rng), 1 << 16));
        return v;
    };
    for (int pt = 0; pt < 10; ++pt) {
        Valuation v = point();
        if (circuit_eval_single(pe, v) != p_poly.eval(v))
            throw std::runtime_error("derivative_pmc: circuit path disagrees with polynomial");
    }

    // compaction: re-emit the (verified) polynomial as a balanced
    // circuit so the Ben-Or-Cleve blow-up stays manageable
    CircuitBuilder compact;
    Circuit cc = compact.take({emit_polynomial(compact, p_poly)});
    ABP abp = circuit_to_abp(depth_reduce(cc));
    AbpPmc ap = abp_to_pmc(abp);
    if (abp.size() <= 20000 && abp_expand(abp) != p_poly)
        throw std::runtime_error("derivative_pmc: ABP expansion mismatch");

    for (int pt = 0; pt < 10; ++pt) {
        Valuation v = point();
        Rational lhs = Rational(ap.beta + acyclic_values(ap.pmc, v)[ap.probe_state - 1] * ap.N);
        if (lhs != p_poly.eval(v))
            throw std::runtime_error("derivative_pmc: relation check failed");
    }

    DerivativePMC dp;
    dp.pmc = std::move(ap.pmc);
    dp.pmc.param_names = pmc.param_names;
    dp.beta = ap.beta;
    dp.N = ap.N;
    dp.probe_state = ap.probe_state;
    dp.target_poly = std::move(p_poly);
    dp.scale = std::move(scale);
    return dp;
}

std::string derivative_pmc_to_json(const DerivativePMC& dp) {
    nlohmann::json j = nlohmann::json::parse(emit_model(dp.pmc));
    auto names = dp.pmc.effective_param_names();
    j["relation"] = {{"beta", to_string(dp.beta)},
                     {"N", dp.N.get_str()},
                     {"probe_state", dp.probe_state},
                     {"target_poly", dp.target_poly.str(names)},
                     {"scale_poly", dp.scale.str(names)}};
    return j.dump(2) + "\n";
}

}  // namespace nwr
