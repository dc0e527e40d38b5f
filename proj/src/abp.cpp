#include "nwr/abp.hpp"

#include <sstream>
#include <stdexcept>

namespace nwr {

std::uint32_t ABP::width() const {
    std::uint32_t w = 0;
    for (auto s : widths) w = std::max(w, s);
    return w;
}

std::uint64_t ABP::size() const {
    std::uint64_t s = 0;
    for (auto w : widths) s += w;
    return s;
}

std::vector<std::string> validate_abp(const ABP& a) {
    std::vector<std::string> bad;
    if (a.widths.size() < 2) {
        bad.push_back("fewer than two layers");
        return bad;
    }
    if (a.layers.size() + 1 != a.widths.size())
        bad.push_back("layer/edge-list count mismatch");
    if (a.widths.front() != 1) bad.push_back("source layer must have one vertex");
    if (a.widths.back() != 1) bad.push_back("sink layer must have one vertex");
    for (std::size_t t = 0; t < a.layers.size() && t + 1 < a.widths.size(); ++t)
        for (auto& e : a.layers[t]) {
            if (e.from >= a.widths[t] || e.to >= a.widths[t + 1])
                bad.push_back("edge endpoint out of range in layer " + std::to_string(t));
            if (e.label.degree() > 1)
                bad.push_back("nonlinear edge label in layer " + std::to_string(t));
        }
    return bad;
}

Rational abp_eval(const ABP& a, const Valuation& v) {
    auto bad = validate_abp(a);
    if (!bad.empty()) throw std::invalid_argument("abp_eval: " + bad.front());
    std::vector<Rational> cur(a.widths[0], Rational(0));
    cur[0] = 1;
    for (std::size_t t = 0; t < a.layers.size(); ++t) {
        std::vector<Rational> next(a.widths[t + 1], Rational(0));
        for (auto& e : a.layers[t])
            if (cur[e.from] != 0) next[e.to] += cur[e.from] * e.label.eval(v);
        cur = std::move(next);
    }
    return cur[0];
}

Polynomial abp_expand(const ABP& a) {
    auto bad = validate_abp(a);
    if (!bad.empty()) throw std::invalid_argument("abp_expand: " + bad.front());
    if (a.size() > 20000) throw std::runtime_error("abp_expand: ABP too large to expand");
    std::vector<Polynomial> cur(a.widths[0]);
    cur[0] = Polynomial(1);
    for (std::size_t t = 0; t < a.layers.size(); ++t) {
        std::vector<Polynomial> next(a.widths[t + 1]);
        for (auto& e : a.layers[t])
            if (!cur[e.from].is_zero()) next[e.to] = next[e.to] + cur[e.from] * e.label;
        cur = std::move(next);
    }
    return cur[0];
}

namespace {

// One straight-line register operation R_i += label * R_j.
struct Instr {
    int i, j;
    Polynomial label;
};

// Operation count of the register program per gate (shared across both
// signs), saturating well below overflow.
std::uint64_t op_count(const Circuit& c, std::vector<std::uint64_t>& memo, std::uint32_t id) {
    constexpr std::uint64_t kCap = 1ull << 40;
    if (memo[id]) return memo[id];
    const Gate& g = c.gates[id];
    std::uint64_t r = 1;
    if (g.op == GateOp::Add)
        r = op_count(c, memo, g.a) + op_count(c, memo, g.b);
    else if (g.op == GateOp::Mul)
        r = 2 * (op_count(c, memo, g.a) + op_count(c, memo, g.b));
    return memo[id] = std::min(r, kCap);
}

void emit_ops(const Circuit& c, std::uint32_t id, int i, int j, const Rational& sign,
              std::vector<Instr>& out) {
    const Gate& g = c.gates[id];
    switch (g.op) {
        case GateOp::Input:
            out.push_back({i, j, Polynomial(sign) * Polynomial::variable(g.param)});
            break;
        case GateOp::Const:
            out.push_back({i, j, Polynomial(sign * g.c)});
            break;
        case GateOp::Add:
            emit_ops(c, g.a, i, j, sign, out);
            emit_ops(c, g.b, i, j, sign, out);
            break;
        case GateOp::Mul: {
            int k = 3 - i - j;  // the free register
            // R_k += a*R_j; R_i += sign*b*R_k; then undo both so the
            // registers other than R_i are restored
            emit_ops(c, g.a, k, j, Rational(1), out);
            emit_ops(c, g.b, i, k, sign, out);
            emit_ops(c, g.a, k, j, Rational(-1), out);
            emit_ops(c, g.b, i, k, -sign, out);
            break;
        }
        case GateOp::Div:
            throw std::invalid_argument("circuit_to_abp: division gate");
    }
}

}  // namespace

ABP circuit_to_abp(const Circuit& c) {
    c.validate();
    if (c.outputs.size() != 1)
        throw std::invalid_argument("circuit_to_abp: single-output circuits only");
    if (!c.division_free())
        throw std::invalid_argument("circuit_to_abp: eliminate divisions first");
    if (c.depth() > 24)
        throw std::invalid_argument(
            "circuit_to_abp: depth > 24 (4^depth blow-up); run depth reduction first");
    std::vector<std::uint64_t> memo(c.size(), 0);
    std::uint64_t ops = op_count(c, memo, c.outputs[0]);
    if (4 * (ops + 1) + 2 > 10'000'000)
        throw std::runtime_error("circuit_to_abp: vertex guard (10^7) exceeded");

    std::vector<Instr> prog;
    emit_ops(c, c.outputs[0], 0, 1, Rational(1), prog);  // R1 += f * R2

    ABP a;
    a.m = c.num_params();
    Polynomial one(1);
    // source -> initial registers (R2 = 1) and the constant-1 carrier
    a.widths.push_back(1);
    a.layers.push_back({{0, 1, one}, {0, 3, one}});
    a.widths.push_back(4);
    for (auto& ins : prog) {
        std::vector<AbpEdge> layer;
        for (std::uint32_t r = 0; r < 4; ++r) layer.push_back({r, r, one});
        layer.push_back({static_cast<std::uint32_t>(ins.j), static_cast<std::uint32_t>(ins.i),
                         std::move(ins.label)});
        a.layers.push_back(std::move(layer));
        a.widths.push_back(4);
    }
    a.layers.push_back({{0, 0, one}});  // R1 -> sink
    a.widths.push_back(1);
    return a;
}

std::string emit_abp(const ABP& a) {
    std::ostringstream os;
    os << "abp " << a.widths.size() << ' ' << a.m << "\n";
    os << "widths";
    for (auto w : a.widths) os << ' ' << w;
    os << "\n";
    for (std::size_t t = 0; t < a.layers.size(); ++t)
        for (auto& e : a.layers[t])
            os << t << ' ' << e.from << ' ' << e.to << ' ' << e.label.str() << "\n";
    return os.str();
}

ABP parse_abp(const std::string& text) {
    std::istringstream is(text);
    std::string kw;
    std::size_t nlayers = 0;
    ABP a;
    if (!(is >> kw >> nlayers >> a.m) || kw != "abp")
        throw std::invalid_argument("parse_abp: bad header");
    if (!(is >> kw) || kw != "widths") throw std::invalid_argument("parse_abp: missing widths");
    a.widths.resize(nlayers);
    for (auto& w : a.widths)
        if (!(is >> w)) throw std::invalid_argument("parse_abp: truncated widths");
    if (nlayers < 2) throw std::invalid_argument("parse_abp: fewer than two layers");
    a.layers.resize(nlayers - 1);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t t;
        std::uint32_t u, v;
        if (!(ls >> t >> u >> v)) throw std::invalid_argument("parse_abp: bad edge line");
        if (t >= a.layers.size()) throw std::invalid_argument("parse_abp: layer out of range");
        std::string poly;
        std::getline(ls, poly);
        a.layers[t].push_back({u, v, Polynomial::parse(poly)});
    }
    auto bad = validate_abp(a);
    if (!bad.empty()) throw std::invalid_argument("parse_abp: " + bad.front());
    return a;
}

}  // namespace nwr
