#include "nwr/circuit.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nwr {

// ---------------------------------------------------------------- Circuit

std::uint32_t Circuit::num_params() const {
    std::uint32_t n = 0;
    for (auto& g : gates)
        if (g.op == GateOp::Input && g.param + 1 > n) n = g.param + 1;
    return n;
}

std::uint64_t Circuit::depth() const {
    std::vector<std::uint64_t> d(gates.size(), 0);
    std::uint64_t best = 0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        if (g.op == GateOp::Input || g.op == GateOp::Const)
            d[i] = 0;
        else
            d[i] = 1 + std::max(d[g.a], d[g.b]);
        best = std::max(best, d[i]);
    }
    return best;
}

bool Circuit::division_free() const {
    for (auto& g : gates)
        if (g.op == GateOp::Div) return false;
    return true;
}

void Circuit::validate() const {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        if (g.op == GateOp::Add || g.op == GateOp::Mul || g.op == GateOp::Div)
            if (g.a >= i || g.b >= i)
                throw std::invalid_argument("circuit: operand does not precede gate " +
                                            std::to_string(i));
    }
    if (outputs.empty()) throw std::invalid_argument("circuit: no outputs");
    for (auto o : outputs)
        if (o >= gates.size()) throw std::invalid_argument("circuit: dangling output");
}

// --------------------------------------------------------- CircuitBuilder

std::uint32_t CircuitBuilder::push(Gate g) {
    std::string key;
    switch (g.op) {
        case GateOp::Input: key = "i" + std::to_string(g.param); break;
        case GateOp::Const: key = "c" + to_string(g.c); break;
        case GateOp::Add: key = "a" + std::to_string(g.a) + "," + std::to_string(g.b); break;
        case GateOp::Mul: key = "m" + std::to_string(g.a) + "," + std::to_string(g.b); break;
        case GateOp::Div: key = "d" + std::to_string(g.a) + "," + std::to_string(g.b); break;
    }
    auto it = cse_.find(key);
    if (it != cse_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(gates_.size());
    gates_.push_back(std::move(g));
    cse_.emplace(std::move(key), id);
    return id;
}

std::uint32_t CircuitBuilder::input(std::uint32_t k) {
    Gate g;
    g.op = GateOp::Input;
    g.param = k;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::constant(const Rational& q) {
    Gate g;
    g.op = GateOp::Const;
    g.c = q;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::add(std::uint32_t a, std::uint32_t b) {
    if (is_const(a) && is_const(b)) return constant(gates_[a].c + gates_[b].c);
    if (is_const(a) && gates_[a].c == 0) return b;
    if (is_const(b) && gates_[b].c == 0) return a;
    if (a > b) std::swap(a, b);  // commutative normal form for consing
    Gate g;
    g.op = GateOp::Add;
    g.a = a;
    g.b = b;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::sub(std::uint32_t a, std::uint32_t b) {
    return add(a, mul(constant(-1), b));
}

std::uint32_t CircuitBuilder::mul(std::uint32_t a, std::uint32_t b) {
    if (is_const(a) && is_const(b)) return constant(gates_[a].c * gates_[b].c);
    if (is_const(a) && gates_[a].c == 0) return a;
    if (is_const(b) && gates_[b].c == 0) return b;
    if (is_const(a) && gates_[a].c == 1) return b;
    if (is_const(b) && gates_[b].c == 1) return a;
    if (a > b) std::swap(a, b);
    Gate g;
    g.op = GateOp::Mul;
    g.a = a;
    g.b = b;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::div(std::uint32_t a, std::uint32_t b) {
    if (is_const(b)) {
        if (gates_[b].c == 0) throw std::domain_error("circuit builder: division by zero constant");
        if (gates_[b].c == 1) return a;
        if (is_const(a)) return constant(gates_[a].c / gates_[b].c);
    }
    Gate g;
    g.op = GateOp::Div;
    g.a = a;
    g.b = b;
    return push(std::move(g));
}

std::uint32_t CircuitBuilder::sum(std::vector<std::uint32_t> ids) {
    if (ids.empty()) return constant(0);
    while (ids.size() > 1) {
        std::vector<std::uint32_t> next;
        for (std::size_t i = 0; i + 1 < ids.size(); i += 2) next.push_back(add(ids[i], ids[i + 1]));
        if (ids.size() % 2) next.push_back(ids.back());
        ids = std::move(next);
    }
    return ids[0];
}

std::uint32_t CircuitBuilder::import(const Circuit& src, std::uint32_t id,
                                     std::unordered_map<std::uint32_t, std::uint32_t>& cache) {
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    const Gate& g = src.gates[id];
    std::uint32_t out;
    switch (g.op) {
        case GateOp::Input: out = input(g.param); break;
        case GateOp::Const: out = constant(g.c); break;
        case GateOp::Add: out = add(import(src, g.a, cache), import(src, g.b, cache)); break;
        case GateOp::Mul: out = mul(import(src, g.a, cache), import(src, g.b, cache)); break;
        case GateOp::Div: out = div(import(src, g.a, cache), import(src, g.b, cache)); break;
        default: throw std::logic_error("unreachable");
    }
    cache.emplace(id, out);
    return out;
}

Circuit CircuitBuilder::take(std::vector<std::uint32_t> outputs) {
    Circuit c;
    c.gates = std::move(gates_);
    c.outputs = std::move(outputs);
    gates_.clear();
    cse_.clear();
    c.validate();
    return c;
}

// ------------------------------------------------------------- evaluation

namespace {

std::vector<Rational> eval_gates(const Circuit& c, const Valuation& v, bool* div_zero) {
    if (div_zero) *div_zero = false;
    std::vector<Rational> val(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input:
                if (g.param >= v.size())
                    throw std::invalid_argument("circuit_eval: valuation too short");
                val[i] = v[g.param];
                break;
            case GateOp::Const: val[i] = g.c; break;
            case GateOp::Add: val[i] = val[g.a] + val[g.b]; break;
            case GateOp::Mul: val[i] = val[g.a] * val[g.b]; break;
            case GateOp::Div:
                if (val[g.b] == 0) {
                    if (div_zero) {
                        *div_zero = true;
                        return {};
                    }
                    throw std::domain_error("circuit_eval: division by zero at gate " +
                                            std::to_string(i));
                }
                val[i] = val[g.a] / val[g.b];
                break;
        }
    }
    return val;
}

}  // namespace

std::vector<Rational> circuit_eval(const Circuit& c, const Valuation& v) {
    std::vector<Rational> val = eval_gates(c, v, nullptr);
    std::vector<Rational> out;
    for (auto o : c.outputs) out.push_back(val[o]);
    return out;
}

Rational circuit_eval_single(const Circuit& c, const Valuation& v) {
    if (c.outputs.size() != 1)
        throw std::invalid_argument("circuit_eval_single: circuit has multiple outputs");
    return circuit_eval(c, v)[0];
}

std::optional<std::vector<Rational>> circuit_eval_try(const Circuit& c, const Valuation& v) {
    bool dz = false;
    std::vector<Rational> val = eval_gates(c, v, &dz);
    if (dz) return std::nullopt;
    std::vector<Rational> out;
    for (auto o : c.outputs) out.push_back(val[o]);
    return out;
}

// -------------------------------------------------- symbolic expansion

static constexpr std::size_t kExpandGuard = 100000;

std::vector<Polynomial> expand_to_polynomial(const Circuit& c) {
    std::vector<Polynomial> val(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input: val[i] = Polynomial::variable(g.param); break;
            case GateOp::Const: val[i] = Polynomial(g.c); break;
            case GateOp::Add: val[i] = val[g.a] + val[g.b]; break;
            case GateOp::Mul: val[i] = val[g.a] * val[g.b]; break;
            case GateOp::Div:
                throw std::invalid_argument("expand_to_polynomial: circuit has division gates");
        }
        if (val[i].support_size() > kExpandGuard)
            throw std::runtime_error("expand_to_polynomial: support guard (10^5) exceeded");
    }
    std::vector<Polynomial> out;
    for (auto o : c.outputs) out.push_back(val[o]);
    return out;
}

std::vector<std::uint64_t> syntactic_degree(const Circuit& c) {
    std::vector<std::uint64_t> d(c.gates.size(), 0);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input: d[i] = 1; break;
            case GateOp::Const: d[i] = 0; break;
            case GateOp::Add: d[i] = std::max(d[g.a], d[g.b]); break;
            case GateOp::Mul: d[i] = d[g.a] + d[g.b]; break;
            case GateOp::Div:
                throw std::invalid_argument("syntactic_degree: circuit has division gates");
        }
    }
    std::vector<std::uint64_t> out;
    for (auto o : c.outputs) out.push_back(d[o]);
    return out;
}

// ------------------------------------------------------ division pushdown

namespace {

// Per-gate (numerator, denominator) pair in a fresh builder.
void split_into(const Circuit& c, CircuitBuilder& b, std::vector<std::uint32_t>& num,
                std::vector<std::uint32_t>& den) {
    num.resize(c.gates.size());
    den.resize(c.gates.size());
    std::uint32_t one = b.constant(1);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input:
                num[i] = b.input(g.param);
                den[i] = one;
                break;
            case GateOp::Const:
                num[i] = b.constant(g.c);
                den[i] = one;
                break;
            case GateOp::Add:
                num[i] = b.add(b.mul(num[g.a], den[g.b]), b.mul(num[g.b], den[g.a]));
                den[i] = b.mul(den[g.a], den[g.b]);
                break;
            case GateOp::Mul:
                num[i] = b.mul(num[g.a], num[g.b]);
                den[i] = b.mul(den[g.a], den[g.b]);
                break;
            case GateOp::Div:
                num[i] = b.mul(num[g.a], den[g.b]);
                den[i] = b.mul(den[g.a], num[g.b]);
                break;
        }
    }
}

}  // namespace

Circuit split_divisions(const Circuit& c) {
    CircuitBuilder b;
    std::vector<std::uint32_t> num, den;
    split_into(c, b, num, den);
    std::vector<std::uint32_t> outs;
    for (auto o : c.outputs) {
        outs.push_back(num[o]);
        outs.push_back(den[o]);
    }
    return b.take(std::move(outs));
}

Circuit push_divisions(const Circuit& c) {
    CircuitBuilder b;
    std::vector<std::uint32_t> num, den;
    split_into(c, b, num, den);
    std::vector<std::uint32_t> outs;
    for (auto o : c.outputs) outs.push_back(b.div(num[o], den[o]));
    return b.take(std::move(outs));
}

// ------------------------------------------------- division elimination

namespace {

// Homogeneous components (in y = x - a) of every gate of a division-free
// circuit, truncated at degree d. comp[i][j] is the gate computing the
// degree-j part of gate i evaluated at a + y; absent entries are zero.
// Because the builder folds constants, every degree-0 component is a
// literal Const gate.
std::vector<std::vector<std::optional<std::uint32_t>>> homogeneous_components(
    const Circuit& c, CircuitBuilder& b, const Valuation& a, std::uint64_t d) {
    std::vector<std::vector<std::optional<std::uint32_t>>> comp(
        c.gates.size(), std::vector<std::optional<std::uint32_t>>(d + 1));
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input: {
                if (g.param >= a.size())
                    throw std::invalid_argument("homogeneous_components: short shift point");
                if (a[g.param] != 0) comp[i][0] = b.constant(a[g.param]);
                if (d >= 1) comp[i][1] = b.sub(b.input(g.param), b.constant(a[g.param]));
                break;
            }
            case GateOp::Const:
                if (g.c != 0) comp[i][0] = b.constant(g.c);
                break;
            case GateOp::Add:
                for (std::uint64_t j = 0; j <= d; ++j) {
                    auto &l = comp[g.a][j], &r = comp[g.b][j];
                    if (l && r)
                        comp[i][j] = b.add(*l, *r);
                    else if (l)
                        comp[i][j] = *l;
                    else if (r)
                        comp[i][j] = *r;
                }
                break;
            case GateOp::Mul:
                for (std::uint64_t j = 0; j <= d; ++j) {
                    std::vector<std::uint32_t> parts;
                    for (std::uint64_t t = 0; t <= j; ++t) {
                        auto &l = comp[g.a][t], &r = comp[g.b][j - t];
                        if (l && r) parts.push_back(b.mul(*l, *r));
                    }
                    if (!parts.empty()) comp[i][j] = b.sum(std::move(parts));
                }
                break;
            case GateOp::Div:
                throw std::invalid_argument("homogeneous_components: division gate");
        }
    }
    return comp;
}

}  // namespace

Circuit eliminate_divisions(const Circuit& c, std::uint64_t d, std::uint64_t seed) {
    // Split into division-free numerator/denominator circuits.
    Circuit split = split_divisions(c);
    std::size_t k = c.outputs.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> numdist(-(1 << 12), 1 << 12);
    std::uint32_t m = std::max(c.num_params(), 1u);

    // Find a shift point where no denominator (and no internal division
    // of the original circuit) vanishes.
    Valuation a;
    bool found = false;
    for (int trial = 0; trial < 1000 && !found; ++trial) {
        a.clear();
        for (std::uint32_t i = 0; i < m; ++i) a.push_back(ratio(numdist(rng), 1 << 12));
        if (!circuit_eval_try(c, a)) continue;
        found = true;
    }
    if (!found)
        throw std::runtime_error("eliminate_divisions: no nonvanishing shift point found");

    CircuitBuilder b;
    auto comp = homogeneous_components(split, b, a, d);

    std::vector<std::uint32_t> outs;
    for (std::size_t oi = 0; oi < k; ++oi) {
        auto& nc = comp[split.outputs[2 * oi]];
        auto& dc = comp[split.outputs[2 * oi + 1]];
        if (!dc[0] || !b.is_const(*dc[0]))
            throw std::logic_error("eliminate_divisions: denominator constant term not folded");
        Rational g0 = b.gate(*dc[0]).c;
        if (g0 == 0)
            throw std::runtime_error("eliminate_divisions: denominator vanishes at shift point");
        // Power-series inverse of the denominator, truncated at degree d:
        // inv_0 = 1/g0, inv_j = -(1/g0) * sum_{t=1..j} den_t * inv_{j-t}.
        std::vector<std::optional<std::uint32_t>> inv(d + 1);
        inv[0] = b.constant(1 / g0);
        std::uint32_t neg = b.constant(-1 / g0);
        for (std::uint64_t j = 1; j <= d; ++j) {
            std::vector<std::uint32_t> parts;
            for (std::uint64_t t = 1; t <= j; ++t)
                if (dc[t] && inv[j - t]) parts.push_back(b.mul(*dc[t], *inv[j - t]));
            if (!parts.empty()) inv[j] = b.mul(neg, b.sum(std::move(parts)));
        }
        // f_j = sum_{t<=j} num_t * inv_{j-t}; output = sum_j f_j.
        std::vector<std::uint32_t> total;
        for (std::uint64_t j = 0; j <= d; ++j)
            for (std::uint64_t t = 0; t <= j; ++t)
                if (nc[t] && inv[j - t]) total.push_back(b.mul(*nc[t], *inv[j - t]));
        outs.push_back(b.sum(std::move(total)));
    }
    Circuit result = b.take(std::move(outs));

    // Self-check: agree with the source circuit wherever it is defined.
    int checked = 0;
    for (int trial = 0; trial < 1000 && checked < 20; ++trial) {
        Valuation v;
        for (std::uint32_t i = 0; i < m; ++i) v.push_back(ratio(numdist(rng), 1 << 12));
        auto ref = circuit_eval_try(c, v);
        if (!ref) continue;
        ++checked;
        if (circuit_eval(result, v) != *ref)
            throw std::runtime_error("eliminate_divisions: self-check failed (degree bound too small?)");
    }
    return result;
}

// ---------------------------------------------------------- depth reduce

std::uint64_t depth_bound(std::size_t size, std::uint64_t d) {
    auto clog2 = [](std::uint64_t x) {
        std::uint64_t r = 0;
        std::uint64_t v = 1;
        while (v < x) {
            v *= 2;
            ++r;
        }
        return r;
    };
    std::uint64_t sd = std::max<std::uint64_t>(2, size * std::max<std::uint64_t>(d, 1));
    return kDepthReduceKappa * clog2(sd) * (clog2(std::max<std::uint64_t>(d, 2)) + 1);
}

namespace {

static constexpr std::size_t kDepthReduceGuard = 1000000;

// Node arena for the homogenized circuit the balancing recurrences run on.
// Invariants: Add children have equal degree; Mul stores the
// higher-degree child on the left; degree-0 nodes are literal constants.
struct HNode {
    GateOp op;  // Input, Const, Add, Mul
    std::uint32_t a = 0, b = 0;
    std::uint32_t param = 0;
    Rational c;
    std::uint64_t deg = 0;
};

struct HArena {
    std::vector<HNode> nodes;
    std::unordered_map<std::string, std::uint32_t> cse;

    std::uint32_t push(HNode n, const std::string& key) {
        auto it = cse.find(key);
        if (it != cse.end()) return it->second;
        if (nodes.size() >= kDepthReduceGuard)
            throw std::runtime_error("depth_reduce: gate guard (10^6) exceeded");
        std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(std::move(n));
        cse.emplace(key, id);
        return id;
    }
    std::uint32_t hconst(const Rational& q) {
        HNode n;
        n.op = GateOp::Const;
        n.c = q;
        return push(std::move(n), "c" + to_string(q));
    }
    std::uint32_t hinput(std::uint32_t k) {
        HNode n;
        n.op = GateOp::Input;
        n.param = k;
        n.deg = 1;
        return push(std::move(n), "i" + std::to_string(k));
    }
    // absent (nullopt) means the zero polynomial throughout
    std::optional<std::uint32_t> hadd(std::optional<std::uint32_t> a,
                                      std::optional<std::uint32_t> b) {
        if (!a) return b;
        if (!b) return a;
        if (nodes[*a].op == GateOp::Const && nodes[*b].op == GateOp::Const) {
            Rational s = nodes[*a].c + nodes[*b].c;
            if (s == 0) return std::nullopt;
            return hconst(s);
        }
        assert(nodes[*a].deg == nodes[*b].deg);
        if (*a > *b) std::swap(*a, *b);
        HNode n;
        n.op = GateOp::Add;
        n.a = *a;
        n.b = *b;
        n.deg = nodes[*a].deg;
        return push(std::move(n), "a" + std::to_string(*a) + "," + std::to_string(*b));
    }
    std::optional<std::uint32_t> hmul(std::optional<std::uint32_t> a,
                                      std::optional<std::uint32_t> b) {
        if (!a || !b) return std::nullopt;
        const HNode &na = nodes[*a], &nb = nodes[*b];
        if (na.op == GateOp::Const && nb.op == GateOp::Const) {
            Rational p = na.c * nb.c;
            if (p == 0) return std::nullopt;
            return hconst(p);
        }
        if (na.op == GateOp::Const && na.c == 1) return b;
        if (nb.op == GateOp::Const && nb.c == 1) return a;
        std::uint32_t l = *a, r = *b;
        if (nodes[l].deg < nodes[r].deg) std::swap(l, r);
        HNode n;
        n.op = GateOp::Mul;
        n.a = l;
        n.b = r;
        n.deg = nodes[l].deg + nodes[r].deg;
        return push(std::move(n), "m" + std::to_string(l) + "," + std::to_string(r));
    }
};

// The balancing recursion (the classic simulation of a homogeneous
// circuit in depth O(log size * log degree)): values are rebuilt through
// "frontier" product gates at half degree, derivative-like quotients
// [d_v u] through frontiers at the degree midpoint.
struct Balancer {
    const HArena& h;
    CircuitBuilder& b;
    std::unordered_map<std::uint32_t, std::uint32_t> value_memo;
    std::unordered_map<std::uint64_t, std::uint32_t> deriv_memo;
    // per target v: path-count DP for the equal-degree scalar base case
    std::unordered_map<std::uint32_t, std::unordered_map<std::uint32_t, Rational>> scalar_memo;
    std::unordered_map<std::uint32_t, std::map<std::uint32_t, Rational>> lin_memo;

    // frontier: Mul nodes t reachable from u via left-edges (both edges of
    // an Add, left edge of a Mul) with deg(t) > m and both children <= m.
    std::vector<std::uint32_t> frontier(std::uint32_t u, std::uint64_t m) {
        std::vector<std::uint32_t> out, stack{u};
        std::unordered_map<std::uint32_t, bool> seen;
        while (!stack.empty()) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            if (seen[w]) continue;
            seen[w] = true;
            const HNode& n = h.nodes[w];
            assert(n.deg > m);
            if (n.op == GateOp::Add) {
                stack.push_back(n.a);
                stack.push_back(n.b);
            } else if (n.op == GateOp::Mul) {
                if (h.nodes[n.a].deg > m)
                    stack.push_back(n.a);
                else
                    out.push_back(w);  // both children <= m: frontier
            } else {
                assert(false && "input/const cannot have degree > m >= 1");
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // linear form of a degree-<=1 node
    const std::map<std::uint32_t, Rational>& linear(std::uint32_t u) {
        auto it = lin_memo.find(u);
        if (it != lin_memo.end()) return it->second;
        std::map<std::uint32_t, Rational> out;
        const HNode& n = h.nodes[u];
        switch (n.op) {
            case GateOp::Input: out[n.param] = 1; break;
            case GateOp::Const: assert(false); break;
            case GateOp::Add:
                for (auto& [k, c] : linear(n.a)) out[k] += c;
                for (auto& [k, c] : linear(n.b)) out[k] += c;
                break;
            case GateOp::Mul: {
                // deg 1 product: left is the linear child, right a constant
                assert(h.nodes[n.b].op == GateOp::Const);
                Rational c0 = h.nodes[n.b].c;
                for (auto& [k, c] : linear(n.a)) out[k] += c * c0;
                break;
            }
            default: assert(false);
        }
        std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
        return lin_memo.emplace(u, std::move(out)).first->second;
    }

    // scalar [d_v u] when deg u == deg v: weighted count of left-paths
    Rational scalar(std::uint32_t u, std::uint32_t v) {
        auto& dp = scalar_memo[v];
        auto it = dp.find(u);
        if (it != dp.end()) return it->second;
        Rational r = 0;
        if (u == v) {
            r = 1;
        } else {
            const HNode& n = h.nodes[u];
            if (n.op == GateOp::Add) {
                r = scalar(n.a, v) + scalar(n.b, v);
            } else if (n.op == GateOp::Mul && h.nodes[n.a].deg == n.deg) {
                assert(h.nodes[n.b].op == GateOp::Const);
                r = scalar(n.a, v) * h.nodes[n.b].c;
            }
        }
        dp.emplace(u, r);
        return r;
    }

    std::uint32_t value(std::uint32_t u) {
        auto it = value_memo.find(u);
        if (it != value_memo.end()) return it->second;
        const HNode& n = h.nodes[u];
        std::uint32_t out;
        if (n.op == GateOp::Const) {
            out = b.constant(n.c);
        } else if (n.deg <= 1) {
            std::vector<std::uint32_t> parts;
            for (auto& [k, c] : linear(u)) parts.push_back(b.mul(b.constant(c), b.input(k)));
            out = b.sum(std::move(parts));
        } else {
            std::uint64_t m = n.deg / 2;
            std::vector<std::uint32_t> parts;
            for (std::uint32_t t : frontier(u, m)) {
                const HNode& nt = h.nodes[t];
                parts.push_back(b.mul(deriv(u, t), b.mul(value(nt.a), value(nt.b))));
            }
            out = b.sum(std::move(parts));
        }
        value_memo.emplace(u, out);
        return out;
    }

    // gate computing [d_v u]; requires deg v <= deg u
    std::uint32_t deriv(std::uint32_t u, std::uint32_t v) {
        const std::uint64_t du = h.nodes[u].deg, dv = h.nodes[v].deg;
        assert(dv >= 1 && dv <= du);
        if (du == dv) return b.constant(scalar(u, v));
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
        auto it = deriv_memo.find(key);
        if (it != deriv_memo.end()) return it->second;
        std::uint64_t m = (du + dv) / 2;
        std::vector<std::uint32_t> parts;
        for (std::uint32_t t : frontier(u, m)) {
            const HNode& nt = h.nodes[t];
            if (h.nodes[nt.a].deg < dv) continue;  // [d_v t.a] = 0
            parts.push_back(b.mul(deriv(u, t), b.mul(deriv(nt.a, v), value(nt.b))));
        }
        std::uint32_t out = b.sum(std::move(parts));
        deriv_memo.emplace(key, out);
        return out;
    }
};

}  // namespace

Circuit depth_reduce(const Circuit& c, bool force) {
    if (!c.division_free())
        throw std::invalid_argument("depth_reduce: circuit has division gates");
    std::uint64_t d = 0;
    for (auto x : syntactic_degree(c)) d = std::max(d, x);
    if (!force && c.depth() <= depth_bound(c.size(), d)) return c;

    // Homogenize into the node arena.
    HArena h;
    std::vector<std::vector<std::optional<std::uint32_t>>> comp(
        c.gates.size(), std::vector<std::optional<std::uint32_t>>(d + 1));
    std::vector<std::uint64_t> gdeg(c.gates.size(), 0);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Input:
                gdeg[i] = 1;
                if (d >= 1) comp[i][1] = h.hinput(g.param);
                break;
            case GateOp::Const:
                if (g.c != 0) comp[i][0] = h.hconst(g.c);
                break;
            case GateOp::Add:
                // components above d can never reach an output (degrees only
                // grow through add/mul), so truncate everywhere at d
                gdeg[i] = std::max(gdeg[g.a], gdeg[g.b]);
                for (std::uint64_t j = 0; j <= std::min(gdeg[i], d); ++j)
                    comp[i][j] = h.hadd(comp[g.a][j], comp[g.b][j]);
                break;
            case GateOp::Mul:
                gdeg[i] = gdeg[g.a] + gdeg[g.b];
                for (std::uint64_t j = 0; j <= std::min(gdeg[i], d); ++j) {
                    std::optional<std::uint32_t> acc;
                    for (std::uint64_t t = 0; t <= j; ++t) {
                        if (t > gdeg[g.a] || j - t > gdeg[g.b]) continue;
                        acc = h.hadd(acc, h.hmul(comp[g.a][t], comp[g.b][j - t]));
                    }
                    comp[i][j] = acc;
                }
                break;
            case GateOp::Div: break;  // unreachable
        }
    }

    CircuitBuilder b;
    Balancer bal{h, b};
    std::vector<std::uint32_t> outs;
    for (auto o : c.outputs) {
        std::vector<std::uint32_t> parts;
        for (std::uint64_t j = 0; j <= d; ++j)
            if (j < comp[o].size() && comp[o][j]) parts.push_back(bal.value(*comp[o][j]));
        outs.push_back(b.sum(std::move(parts)));
        if (b.size() >= kDepthReduceGuard)
            throw std::runtime_error("depth_reduce: gate guard (10^6) exceeded");
    }
    return b.take(std::move(outs));
}

// ------------------------------------------------------------ derivatives

Circuit derivatives(const Circuit& c, std::uint32_t nparams) {
    if (c.outputs.size() != 1)
        throw std::invalid_argument("derivatives: single-output circuit required");
    std::uint32_t m = std::max(c.num_params(), nparams);
    CircuitBuilder b;
    std::unordered_map<std::uint32_t, std::uint32_t> cache;
    std::uint32_t f = b.import(c, c.outputs[0], cache);

    // adjoint (bar) per source gate in the cone of the output
    std::vector<bool> live(c.gates.size(), false);
    live[c.outputs[0]] = true;
    for (std::size_t i = c.gates.size(); i-- > 0;) {
        if (!live[i]) continue;
        const Gate& g = c.gates[i];
        if (g.op == GateOp::Add || g.op == GateOp::Mul || g.op == GateOp::Div) {
            live[g.a] = true;
            live[g.b] = true;
        }
    }
    std::vector<std::optional<std::uint32_t>> bar(c.gates.size());
    auto accum = [&](std::uint32_t src, std::uint32_t gate) {
        bar[src] = bar[src] ? b.add(*bar[src], gate) : gate;
    };
    bar[c.outputs[0]] = b.constant(1);
    for (std::size_t i = c.gates.size(); i-- > 0;) {
        if (!live[i] || !bar[i]) continue;
        const Gate& g = c.gates[i];
        switch (g.op) {
            case GateOp::Add:
                accum(g.a, *bar[i]);
                accum(g.b, *bar[i]);
                break;
            case GateOp::Mul:
                accum(g.a, b.mul(*bar[i], cache[g.b]));
                accum(g.b, b.mul(*bar[i], cache[g.a]));
                break;
            case GateOp::Div: {
                // g = a/b: dg/da = 1/b, dg/db = -g/b
                std::uint32_t u = b.div(*bar[i], cache[g.b]);
                accum(g.a, u);
                accum(g.b, b.mul(b.constant(-1), b.mul(u, cache[i])));
                break;
            }
            default: break;
        }
    }
    std::vector<std::uint32_t> outs{f};
    std::vector<std::optional<std::uint32_t>> by_param(m);
    for (std::size_t i = 0; i < c.gates.size(); ++i)
        if (c.gates[i].op == GateOp::Input && live[i] && bar[i]) {
            auto& slot = by_param[c.gates[i].param];
            slot = slot ? b.add(*slot, *bar[i]) : *bar[i];
        }
    for (std::uint32_t k = 0; k < m; ++k) outs.push_back(by_param[k] ? *by_param[k] : b.constant(0));
    return b.take(std::move(outs));
}

// -------------------------------------------------------------- text form

std::string emit_circuit(const Circuit& c) {
    std::ostringstream os;
    os << "circuit " << c.gates.size() << "\n";
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        os << i << " ";
        switch (g.op) {
            case GateOp::Input: os << "input " << g.param; break;
            case GateOp::Const: os << "const " << to_string(g.c); break;
            case GateOp::Add: os << "add " << g.a << " " << g.b; break;
            case GateOp::Mul: os << "mul " << g.a << " " << g.b; break;
            case GateOp::Div: os << "div " << g.a << " " << g.b; break;
        }
        os << "\n";
    }
    os << "outputs";
    for (auto o : c.outputs) os << " " << o;
    os << "\n";
    return os.str();
}

Circuit parse_circuit(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    std::size_t n;
    if (!(is >> tok >> n) || tok != "circuit")
        throw std::invalid_argument("parse_circuit: missing 'circuit <n>' header");
    Circuit c;
    c.gates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t id;
        std::string op;
        if (!(is >> id >> op) || id != i)
            throw std::invalid_argument("parse_circuit: bad gate line " + std::to_string(i));
        Gate& g = c.gates[i];
        if (op == "input") {
            g.op = GateOp::Input;
            is >> g.param;
        } else if (op == "const") {
            g.op = GateOp::Const;
            std::string q;
            is >> q;
            g.c = parse_rational(q);
        } else if (op == "add" || op == "mul" || op == "div") {
            g.op = op == "add" ? GateOp::Add : op == "mul" ? GateOp::Mul : GateOp::Div;
            is >> g.a >> g.b;
        } else {
            throw std::invalid_argument("parse_circuit: unknown op '" + op + "'");
        }
        if (!is) throw std::invalid_argument("parse_circuit: truncated gate line");
    }
    if (!(is >> tok) || tok != "outputs")
        throw std::invalid_argument("parse_circuit: missing outputs line");
    std::uint32_t o;
    while (is >> o) c.outputs.push_back(o);
    c.validate();
    return c;
}

}  // namespace nwr
