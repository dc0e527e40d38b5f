#include "nwr/pmc.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nwr {

PolyRef make_poly(Polynomial p) { return std::make_shared<const Polynomial>(std::move(p)); }

void PMC::init(std::uint32_t states, std::uint32_t params) {
    n = states;
    m = params;
    out.assign(states + 1, {});
    param_names.clear();
    for (std::uint32_t k = 0; k < m; ++k) param_names.push_back("x" + std::to_string(k));
}

void PMC::add_edge(std::uint32_t i, std::uint32_t j, PolyRef f) {
    if (i == 0 || i > n || j == 0 || j > n)
        throw std::invalid_argument("PMC::add_edge: state id out of range");
    if (!f || f->is_zero()) return;
    auto& row = out[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, std::uint32_t v) { return e.first < v; });
    if (it != row.end() && it->first == j)
        it->second = make_poly(*it->second + *f);  // parallel edges sum
    else
        row.insert(it, {j, std::move(f)});
}

void PMC::add_edge(std::uint32_t i, std::uint32_t j, Polynomial f) {
    add_edge(i, j, make_poly(std::move(f)));
}

const Polynomial& PMC::edge(std::uint32_t i, std::uint32_t j) const {
    static const Polynomial kZero;
    const auto& row = out[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, std::uint32_t v) { return e.first < v; });
    if (it != row.end() && it->first == j) return *it->second;
    return kZero;
}

std::size_t PMC::edge_count() const {
    std::size_t c = 0;
    for (std::uint32_t i = 1; i <= n; ++i) c += out[i].size();
    return c;
}

std::vector<std::string> PMC::effective_param_names() const {
    std::vector<std::string> names = param_names;
    names.resize(m);
    for (std::uint32_t k = 0; k < m; ++k)
        if (names[k].empty()) names[k] = "x" + std::to_string(k);
    return names;
}

namespace {

// c, c*x_k or c*(1-x_k) with 0 < c <= 1 — the label shapes a simple pMC
// may carry.
bool is_simple_label(const Polynomial& f) {
    const auto& t = f.terms();
    if (t.size() == 1) {
        const auto& [mono, c] = *t.begin();
        if (mono.is_one()) return c > 0 && c <= 1;
        if (mono.total_degree() == 1) return c > 0 && c <= 1;  // c*x_k
        return false;
    }
    if (t.size() == 2) {
        // c - c*x_k: constant term c, linear term -c
        const auto& [m0, c0] = *t.begin();
        const auto& [m1, c1] = *t.rbegin();
        return m0.is_one() && m1.total_degree() == 1 && c0 > 0 && c0 <= 1 && c1 == -c0;
    }
    return false;
}

}  // namespace

std::vector<std::string> validate(const PMC& pmc, PMCKind kind) {
    std::vector<std::string> bad;
    auto complain = [&](const std::string& s) { bad.push_back(s); };
    if (pmc.n < 2) complain("model needs at least target and sink states");
    if (pmc.target == 0 || pmc.target > pmc.n) complain("target id out of range");
    if (pmc.sink == 0 || pmc.sink > pmc.n) complain("sink id out of range");
    if (pmc.target == pmc.sink) complain("target and sink coincide");
    if (!bad.empty()) return bad;

    for (std::uint32_t i = 1; i <= pmc.n; ++i) {
        if (pmc.out[i].empty()) complain("state " + std::to_string(i) + " has no outgoing edge");
        for (auto& [j, f] : pmc.out[i]) {
            if (j == 0 || j > pmc.n)
                complain("edge from " + std::to_string(i) + " to out-of-range state");
            if (f->is_zero()) complain("zero-polynomial edge at state " + std::to_string(i));
        }
    }
    for (std::uint32_t s : {pmc.target, pmc.sink}) {
        const char* what = s == pmc.target ? "target" : "sink";
        if (pmc.out[s].size() != 1 || pmc.out[s][0].first != s ||
            *pmc.out[s][0].second != Polynomial(1))
            complain(std::string(what) + " must carry exactly a probability-1 self-loop");
    }

    if (kind.trivially_parametric) {
        std::vector<bool> used(pmc.m, false);
        for (std::uint32_t i = 1; i <= pmc.n; ++i) {
            if (i == pmc.target || i == pmc.sink) continue;
            for (auto& [j, f] : pmc.out[i]) {
                const auto& t = f->terms();
                bool single_var = t.size() == 1 && t.begin()->first.total_degree() == 1 &&
                                  t.begin()->second == 1;
                if (!single_var) {
                    complain("edge " + std::to_string(i) + "->" + std::to_string(j) +
                             " is not a bare variable");
                    continue;
                }
                std::uint32_t k = t.begin()->first.exps()[0].first;
                if (k >= pmc.m || used[k])
                    complain("variable reused or out of range on edge " + std::to_string(i) +
                             "->" + std::to_string(j));
                else
                    used[k] = true;
            }
        }
    } else {
        for (std::uint32_t i = 1; i <= pmc.n; ++i) {
            Polynomial sum;
            for (auto& [j, f] : pmc.out[i]) sum = sum + *f;
            if (sum != Polynomial(1)) complain("row sum != 1 at state " + std::to_string(i));
        }
    }
    if (kind.simple) {
        for (std::uint32_t i = 1; i <= pmc.n; ++i)
            for (auto& [j, f] : pmc.out[i])
                if (!is_simple_label(*f))
                    complain("edge " + std::to_string(i) + "->" + std::to_string(j) +
                             " is not of simple form c, c*x or c*(1-x)");
    }
    return bad;
}

bool is_graph_preserving(const PMC& pmc, const Valuation& v) {
    if (v.size() < pmc.m) return false;
    for (std::uint32_t i = 1; i <= pmc.n; ++i) {
        Rational sum = 0;
        for (auto& [j, f] : pmc.out[i]) {
            Rational p = f->eval(v);
            if (p <= 0 || p > 1) return false;
            sum += p;
        }
        if (sum != 1) return false;
    }
    return true;
}

bool is_preprocessed(const PMC& pmc) {
    if (pmc.target != pmc.n || pmc.sink != pmc.n - 1) return false;
    for (std::uint32_t s : {pmc.target, pmc.sink})
        if (pmc.out[s].size() != 1 || pmc.out[s][0].first != s ||
            *pmc.out[s][0].second != Polynomial(1))
            return false;
    return true;
}

std::pair<PMC, QualitativeReport> qualitative_preprocess(const PMC& pmc) {
    std::uint32_t n = pmc.n;
    // reversed parameter-erased adjacency
    std::vector<std::vector<std::uint32_t>> rev(n + 1);
    for (std::uint32_t i = 1; i <= n; ++i)
        for (auto& [j, f] : pmc.out[i]) rev[j].push_back(i);

    // can-reach-target (backward BFS from target)
    std::vector<bool> reach_t(n + 1, false);
    std::deque<std::uint32_t> q{pmc.target};
    reach_t[pmc.target] = true;
    while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop_front();
        for (std::uint32_t p : rev[u])
            if (!reach_t[p]) {
                reach_t[p] = true;
                q.push_back(p);
            }
    }
    std::vector<bool> in_prob0(n + 1, false);
    for (std::uint32_t i = 1; i <= n; ++i) in_prob0[i] = !reach_t[i];

    // states that can reach prob0 while avoiding target; prob1 = complement
    std::vector<bool> can_fail(n + 1, false);
    for (std::uint32_t i = 1; i <= n; ++i)
        if (in_prob0[i] && i != pmc.target) {
            can_fail[i] = true;
            q.push_back(i);
        }
    while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop_front();
        for (std::uint32_t p : rev[u])
            if (!can_fail[p] && p != pmc.target) {
                can_fail[p] = true;
                q.push_back(p);
            }
    }
    std::vector<bool> in_prob1(n + 1, false);
    for (std::uint32_t i = 1; i <= n; ++i) in_prob1[i] = !can_fail[i] && !in_prob0[i];

    QualitativeReport rep;
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (in_prob0[i]) rep.prob0.push_back(i);
        if (in_prob1[i]) rep.prob1.push_back(i);
    }

    // renumber: interior states first (ascending old id), then sink, target
    std::uint32_t count = 0;
    rep.mapping.assign(n + 1, 0);
    for (std::uint32_t i = 1; i <= n; ++i)
        if (!in_prob0[i] && !in_prob1[i]) rep.mapping[i] = ++count;
    std::uint32_t new_sink = count + 1, new_target = count + 2;
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (in_prob0[i]) rep.mapping[i] = new_sink;
        if (in_prob1[i]) rep.mapping[i] = new_target;
    }

    PMC res;
    res.init(count + 2, pmc.m);
    res.param_names = pmc.param_names;
    res.sink = new_sink;
    res.target = new_target;
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (in_prob0[i] || in_prob1[i]) continue;
        for (auto& [j, f] : pmc.out[i]) res.add_edge(rep.mapping[i], rep.mapping[j], f);
    }
    Polynomial one(1);
    res.add_edge(new_sink, new_sink, one);
    res.add_edge(new_target, new_target, one);
    if (!pmc.state_labels.empty()) {
        res.state_labels.assign(res.n + 1, "");
        for (std::uint32_t i = 1; i <= n; ++i)
            if (rep.mapping[i] <= count) res.state_labels[rep.mapping[i]] = pmc.state_labels[i];
        res.state_labels[new_sink] = pmc.state_labels[pmc.sink];
        res.state_labels[new_target] = pmc.state_labels[pmc.target];
    }
    return {std::move(res), std::move(rep)};
}

Valuation sample_valuation(const PMC& pmc, PMCKind kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u16(1, (1 << 16) - 1);
    auto unit = [&]() { return ratio(u16(rng), 1 << 16); };

    if (kind.trivially_parametric) {
        Valuation v(pmc.m);
        std::vector<bool> set(pmc.m, false);
        std::uniform_int_distribution<int> w(1, 100);
        for (std::uint32_t i = 1; i <= pmc.n; ++i) {
            if (i == pmc.target || i == pmc.sink) continue;
            std::vector<int> ws;
            long total = 0;
            for (std::size_t e = 0; e < pmc.out[i].size(); ++e) {
                ws.push_back(w(rng));
                total += ws.back();
            }
            for (std::size_t e = 0; e < pmc.out[i].size(); ++e) {
                const Polynomial& f = *pmc.out[i][e].second;
                std::uint32_t k = f.terms().begin()->first.exps()[0].first;
                v[k] = ratio(ws[e], total);
                set[k] = true;
            }
        }
        for (std::uint32_t k = 0; k < pmc.m; ++k)
            if (!set[k]) v[k] = unit();
        return v;
    }
    if (kind.simple) {
        Valuation v;
        for (std::uint32_t k = 0; k < pmc.m; ++k) v.push_back(unit());
        return v;
    }
    for (int tries = 0; tries < 10000; ++tries) {
        Valuation v;
        for (std::uint32_t k = 0; k < pmc.m; ++k) v.push_back(unit());
        if (is_graph_preserving(pmc, v)) return v;
    }
    throw std::runtime_error("sample_valuation: no graph-preserving valuation found");
}

PMC apply_row_sum_constraint(const PMC& pmc) {
    PMC res = pmc;
    for (std::uint32_t i = 1; i <= res.n; ++i) {
        if (i == res.target || i == res.sink || res.out[i].empty()) continue;
        Polynomial others;
        for (std::size_t e = 0; e + 1 < res.out[i].size(); ++e)
            others = others + *res.out[i][e].second;
        res.out[i].back().second = make_poly(Polynomial(1) - others);
    }
    return res;
}

// ----------------------------------------------------------- file formats

PMC parse_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("model parse: invalid JSON: ") + e.what());
    }
    for (const char* field : {"parameters", "states", "target", "sink", "transitions"})
        if (!j.contains(field))
            throw std::invalid_argument(std::string("model parse: missing field '") + field + "'");

    PMC pmc;
    std::vector<std::string> params = j["parameters"].get<std::vector<std::string>>();
    pmc.init(j["states"].get<std::uint32_t>(), static_cast<std::uint32_t>(params.size()));
    pmc.param_names = params;
    pmc.target = j["target"].get<std::uint32_t>();
    pmc.sink = j["sink"].get<std::uint32_t>();
    if (pmc.target == 0 || pmc.target > pmc.n || pmc.sink == 0 || pmc.sink > pmc.n)
        throw std::invalid_argument("model parse: target/sink out of range");

    std::map<std::string, std::uint32_t> names;
    for (std::uint32_t k = 0; k < pmc.m; ++k) names[params[k]] = k;

    for (auto& t : j["transitions"]) {
        std::uint32_t from = t.at("from").get<std::uint32_t>();
        std::uint32_t to = t.at("to").get<std::uint32_t>();
        if (from == 0 || from > pmc.n || to == 0 || to > pmc.n)
            throw std::invalid_argument("model parse: dangling state id in transition");
        pmc.add_edge(from, to, Polynomial::parse(t.at("poly").get<std::string>(), names));
    }
    if (j.contains("labels")) {
        auto ls = j["labels"].get<std::vector<std::string>>();
        if (ls.size() != pmc.n)
            throw std::invalid_argument("model parse: labels array must have one entry per state");
        pmc.state_labels.assign(pmc.n + 1, "");
        for (std::uint32_t i = 1; i <= pmc.n; ++i) pmc.state_labels[i] = ls[i - 1];
    }
    return pmc;
}

std::string emit_model(const PMC& pmc) {
    nlohmann::json j;
    j["parameters"] = pmc.effective_param_names();
    j["states"] = pmc.n;
    j["target"] = pmc.target;
    j["sink"] = pmc.sink;
    if (!pmc.state_labels.empty()) {
        std::vector<std::string> ls(pmc.state_labels.begin() + 1, pmc.state_labels.end());
        j["labels"] = ls;
    }
    nlohmann::json ts = nlohmann::json::array();
    auto names = pmc.effective_param_names();
    for (std::uint32_t i = 1; i <= pmc.n; ++i)
        for (auto& [to, f] : pmc.out[i])
            ts.push_back({{"from", i}, {"to", to}, {"poly", f->str(names)}});
    j["transitions"] = std::move(ts);
    return j.dump(2) + "\n";
}

namespace {

// PRISM expression for a polynomial (no '^' operator in the language:
// exponents become repeated products).
std::string prism_poly(const Polynomial& f, const std::vector<std::string>& names) {
    if (f.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
        const Rational& c = it->second;
        std::string term;
        Rational a = c < 0 ? Rational(-c) : c;
        std::vector<std::string> factors;
        if (a != 1 || it->first.is_one()) {
            if (a.get_den() == 1)
                factors.push_back(a.get_num().get_str());
            else
                factors.push_back(a.get_num().get_str() + "/" + a.get_den().get_str());
        }
        for (auto& [k, e] : it->first.exps())
            for (std::uint32_t t = 0; t < e; ++t) factors.push_back(names[k]);
        for (std::size_t i = 0; i < factors.size(); ++i)
            term += (i ? "*" : "") + factors[i];
        if (first) {
            out += (c < 0 ? "-" : "") + term;
            first = false;
        } else {
            out += (c < 0 ? " - " : " + ") + term;
        }
    }
    return out;
}

}  // namespace

std::string emit_prism(const PMC& pmc) {
    auto names = pmc.effective_param_names();
    std::ostringstream os;
    os << "dtmc\n\n";
    for (auto& p : names) os << "const double " << p << ";\n";
    os << "\nmodule chain\n";
    os << "  s : [1.." << pmc.n << "] init 1;\n";
    for (std::uint32_t i = 1; i <= pmc.n; ++i) {
        os << "  [] s=" << i << " -> ";
        bool first = true;
        for (auto& [j, f] : pmc.out[i]) {
            if (!first) os << " + ";
            first = false;
            os << "(" << prism_poly(*f, names) << ") : (s'=" << j << ")";
        }
        os << ";\n";
    }
    os << "endmodule\n\n";
    os << "label \"target\" = s=" << pmc.target << ";\n";
    os << "label \"fail\" = s=" << pmc.sink << ";\n";
    return os.str();
}

}  // namespace nwr
