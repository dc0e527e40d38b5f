#include "nwr/relations.hpp"

#include <optional>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nwr/chonev.hpp"
#include "nwr/circuit.hpp"
#include "nwr/valuefn.hpp"

namespace nwr {

std::string status_name(Status s) {
    switch (s) {
        case Status::CertifiedYes: return "certified-yes";
        case Status::RefutedNo: return "refuted-no";
        default: return "unknown";
    }
}

std::string verdict_to_json(const Verdict& v) {
    nlohmann::json j;
    j["status"] = status_name(v.status);
    j["certificate"] = v.certificate;
    nlohmann::json w = nlohmann::json::array();
    for (auto& val : v.witness) {
        nlohmann::json point = nlohmann::json::array();
        for (auto& q : val) point.push_back(to_string(q));
        w.push_back(point);
    }
    j["witness"] = w;
    j["samples_used"] = v.samples_used;
    return j.dump(2) + "\n";
}

std::vector<Rational> state_values(const PMC& pmc, const Valuation& v) {
    try {
        return acyclic_values(pmc, v);
    } catch (const std::invalid_argument&) {
        // cyclic: fall through to the dense solve
    }
    std::uint32_t n = pmc.n;
    if (n > 2000) throw std::runtime_error("state_values: dense solve limited to 2000 states");
    std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> b(n, Rational(0));
    for (std::uint32_t i = 0; i < n; ++i) M[i][i] = 1;
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (i == pmc.target || i == pmc.sink) continue;
        for (auto& [j, f] : pmc.out[i]) M[i - 1][j - 1] -= f->eval(v);
    }
    b[pmc.target - 1] = 1;
    for (std::uint32_t k = 0; k < n; ++k) {
        std::uint32_t piv = k;
        while (piv < n && M[piv][k] == 0) ++piv;
        if (piv == n) throw std::runtime_error("state_values: singular system at this valuation");
        std::swap(M[piv], M[k]);
        std::swap(b[piv], b[k]);
        for (std::uint32_t i = k + 1; i < n; ++i) {
            if (M[i][k] == 0) continue;
            Rational f = Rational(M[i][k] / M[k][k]);
            for (std::uint32_t j = k; j < n; ++j) M[i][j] -= f * M[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<Rational> g(n);
    for (std::uint32_t i = n; i-- > 0;) {
        Rational acc = b[i];
        for (std::uint32_t j = i + 1; j < n; ++j) acc -= M[i][j] * g[j];
        g[i] = Rational(acc / M[i][i]);
    }
    return g;
}

namespace {

bool is_extremal(const PMC& pmc, std::uint32_t s) { return s == pmc.target || s == pmc.sink; }

/// Copy `src` (assumed in target = n / sink = n-1 normal form) into a
/// model with one extra interior state, keeping the normal form: states
/// 1..n-2 keep their ids, the new state gets id n-1, sink and target
/// shift up by one. Returns the new interior state id.
std::uint32_t append_interior_state(const PMC& src, PMC& dst, std::uint32_t extra_params = 0) {
    std::uint32_t n = src.n;
    dst.init(n + 1, src.m + extra_params);
    dst.sink = n;
    dst.target = n + 1;
    dst.param_names = src.param_names;
    auto remap = [n](std::uint32_t s) { return s >= n - 1 ? s + 1 : s; };
    for (std::uint32_t i = 1; i <= n; ++i)
        for (auto& [j, f] : src.out[i]) dst.add_edge(remap(i), remap(j), f);
    return n - 1;
}

PMCKind detect_kind(const PMC& pmc) {
    PMCKind simple{.simple = true};
    if (validate(pmc, simple).empty()) return simple;
    return PMCKind{};
}

/// One evaluation backend for g over sampled points: symbolic closed
/// forms for small models, traced circuits for medium ones, exact
/// per-point linear solves beyond that.
class ValueEvaluator {
public:
    explicit ValueEvaluator(const PMC& pmc) : pmc_(pmc) {
        if (pmc.n <= 12) {
            sym_ = value_functions(pmc);
        } else if (pmc.n <= 200) {
            circuit_ = value_function_circuits(pmc);
        }
    }

    /// Values of all states at v; nullopt when the backing circuit hits
    /// a vanishing denominator at v (measure-zero locus).
    std::optional<std::vector<Rational>> values(const Valuation& v) const {
        if (sym_) {
            std::vector<Rational> g;
            for (auto& f : *sym_) {
                Rational d = f.den.eval(v);
                if (d == 0) return std::nullopt;
                g.push_back(Rational(f.num.eval(v) / d));
            }
            return g;
        }
        if (circuit_) {
            auto outs = circuit_eval_try(*circuit_, v);
            if (!outs) return std::nullopt;
            std::vector<Rational> g;
            for (std::uint32_t i = 0; i < pmc_.n; ++i) {
                if ((*outs)[2 * i + 1] == 0) return std::nullopt;
                g.push_back(Rational((*outs)[2 * i] / (*outs)[2 * i + 1]));
            }
            return g;
        }
        return state_values(pmc_, v);
    }

    const std::vector<RationalFunction>* symbolic() const {
        return sym_ ? &*sym_ : nullptr;
    }

private:
    const PMC& pmc_;
    std::optional<std::vector<RationalFunction>> sym_;
    std::optional<Circuit> circuit_;
};

}  // namespace

NwrGadget nwr_gadget(const PMC& pmc, std::uint32_t i, std::uint32_t j) {
    if (!is_preprocessed(pmc))
        throw std::invalid_argument("nwr_gadget: model not in target=n / sink=n-1 normal form");
    if (i == j) throw std::invalid_argument("nwr_gadget: states must differ");
    if (i == 0 || j == 0 || i > pmc.n || j > pmc.n || is_extremal(pmc, i) ||
        is_extremal(pmc, j))
        throw std::invalid_argument("nwr_gadget: states must be interior");

    NwrGadget out;
    std::uint32_t s = append_interior_state(pmc, out.pmc, 1);
    std::uint32_t n = pmc.n;
    auto remap = [n](std::uint32_t v) { return v >= n - 1 ? v + 1 : v; };
    Polynomial x = Polynomial::variable(pmc.m);
    out.pmc.add_edge(s, remap(j), x);
    out.pmc.add_edge(s, remap(i), Polynomial(1) - x);
    if (!out.pmc.param_names.empty()) {
        std::string name = "w";
        auto taken = [&](const std::string& c) {
            for (auto& nm : out.pmc.param_names)
                if (nm == c) return true;
            return false;
        };
        for (int suffix = 0; taken(name); ++suffix) name = "w" + std::to_string(suffix);
        out.pmc.param_names.push_back(name);
    }
    out.new_state = s;
    out.new_param = pmc.m;
    return out;
}

MonoToNwr mono_to_nwr(const DerivativePMC& d) {
    MonoToNwr out;
    Rational q = Rational(d.beta / Rational(d.N));
    if (q >= 0) {
        out.kind = MonoReduction::Monotone;
        out.reason = "beta/N >= 0: the derivative encoding is nonnegative everywhere";
        return out;
    }
    if (q <= -1) {
        // monotone only in the degenerate case g'(probe) == 1, beta+N == 0
        if (d.pmc.n <= 5000) {
            Polynomial g1;
            bool have = false;
            try {
                g1 = acyclic_value_functions(d.pmc)[d.probe_state - 1];
                have = true;
            } catch (const std::invalid_argument&) {
                // cyclic or oversized: cannot decide symbolically
            }
            if (have) {
                if (g1 == Polynomial(1) && Rational(d.beta + Rational(d.N)) == 0) {
                    out.kind = MonoReduction::Monotone;
                    out.reason = "g'(probe) == 1 and beta + N == 0: derivative is identically 0";
                } else {
                    out.kind = MonoReduction::NotMonotone;
                    out.reason = "beta/N <= -1 and g'(probe) is not identically 1";
                }
                return out;
            }
        }
        out.kind = MonoReduction::Indeterminate;
        out.reason = "beta/N <= -1 but g'(probe) == 1 is not checkable at this size";
        return out;
    }
    // -1 < beta/N < 0: fresh state with value -beta/N, compare against probe
    out.kind = MonoReduction::Query;
    std::uint32_t s = append_interior_state(d.pmc, out.pmc);
    out.pmc.add_edge(s, out.pmc.target, Polynomial(Rational(-q)));
    out.pmc.add_edge(s, out.pmc.sink, Polynomial(Rational(1 + q)));
    out.query_i = s;
    out.query_j = d.probe_state;
    out.reason = "monotone iff g'(probe) >= -beta/N everywhere";
    return out;
}

Verdict check_nwr(const PMC& pmc, std::uint32_t i, std::uint32_t j, std::uint64_t budget,
                  std::uint64_t seed) {
    if (!is_preprocessed(pmc))
        throw std::invalid_argument("check_nwr: model not in target=n / sink=n-1 normal form");
    if (i == 0 || j == 0 || i > pmc.n || j > pmc.n)
        throw std::invalid_argument("check_nwr: state out of range");
    Verdict out;
    if (i == j) {
        out.status = Status::CertifiedYes;
        out.certificate = "reflexivity";
        return out;
    }
    PMCKind kind = detect_kind(pmc);
    ValueEvaluator eval(pmc);
    std::mt19937_64 rng(seed ^ 0x6e777231u);
    for (std::uint64_t t = 0; t < budget; ++t) {
        Valuation v = sample_valuation(pmc, kind, rng());
        ++out.samples_used;
        auto g = eval.values(v);
        if (!g) continue;
        if ((*g)[i - 1] > (*g)[j - 1]) {
            // re-verify with the independent exact solver before reporting
            auto exact = state_values(pmc, v);
            if (exact[i - 1] > exact[j - 1]) {
                out.status = Status::RefutedNo;
                out.witness = {v};
                return out;
            }
        }
    }
    if (const auto* sym = eval.symbolic(); sym && kind.simple) {
        // g_j - g_i = (num_j - num_i) / D with a shared denominator D;
        // D has constant sign on the connected graph-preserving region
        Polynomial h = (*sym)[j - 1].num - (*sym)[i - 1].num;
        Valuation probe = sample_valuation(pmc, kind, rng());
        Rational dsign = (*sym)[i - 1].den.eval(probe);
        if (dsign != 0) {
            if (dsign < 0) h = -h;
            if (chonev_nonneg_certificate(h)) {
                out.status = Status::CertifiedYes;
                out.certificate = "chonev-nonneg on g_j - g_i";
                return out;
            }
        }
    }
    return out;
}

namespace {

std::optional<std::pair<Valuation, Valuation>> decrease_near(const PMC& pmc, std::uint32_t i,
                                                             std::uint32_t k,
                                                             const Valuation& v) {
    if (!is_graph_preserving(pmc, v)) return std::nullopt;
    Rational gv = state_values(pmc, v)[i - 1];
    for (int e = 2; e <= 48; ++e) {
        Valuation v2 = v;
        v2[k] += ratio(1, 1L << e);
        if (!is_graph_preserving(pmc, v2)) continue;
        if (state_values(pmc, v2)[i - 1] < gv) return std::make_pair(v, v2);
    }
    return std::nullopt;
}

Verdict monotone_by_sampling(const PMC& pmc, std::uint32_t i, std::uint32_t k,
                             std::uint64_t budget, std::uint64_t seed) {
    Verdict out;
    PMCKind kind = detect_kind(pmc);
    ValueEvaluator eval(pmc);
    std::mt19937_64 rng(seed ^ 0x6d6f6e6fu);
    std::uniform_int_distribution<int> expo(4, 12);
    for (std::uint64_t t = 0; t < budget; ++t) {
        Valuation v = sample_valuation(pmc, kind, rng());
        Valuation v2 = v;
        v2[k] += ratio(1, 1L << expo(rng));
        ++out.samples_used;
        if (!is_graph_preserving(pmc, v2)) continue;
        auto g = eval.values(v), g2 = eval.values(v2);
        if (!g || !g2) continue;
        if ((*g2)[i - 1] < (*g)[i - 1]) {
            auto e1 = state_values(pmc, v), e2 = state_values(pmc, v2);
            if (e2[i - 1] < e1[i - 1]) {
                out.status = Status::RefutedNo;
                out.witness = {v, v2};
                return out;
            }
        }
    }
    return out;
}

}  // namespace

Verdict any_state_decrease(const PMC& pmc, std::uint32_t k, std::uint64_t budget,
                           std::uint64_t seed) {
    if (k >= pmc.m) throw std::invalid_argument("any_state_decrease: parameter out of range");
    Verdict out;
    PMCKind kind = detect_kind(pmc);
    std::mt19937_64 rng(seed ^ 0x70726f66u);
    std::uniform_int_distribution<int> expo(4, 12);
    for (std::uint64_t t = 0; t < budget; ++t) {
        Valuation v = sample_valuation(pmc, kind, rng());
        Valuation v2 = v;
        v2[k] += ratio(1, 1L << expo(rng));
        ++out.samples_used;
        if (!is_graph_preserving(pmc, v2)) continue;
        auto g = state_values(pmc, v), g2 = state_values(pmc, v2);
        for (std::uint32_t i = 0; i < pmc.n; ++i)
            if (g2[i] < g[i]) {
                out.status = Status::RefutedNo;
                out.witness = {v, v2};
                return out;
            }
    }
    return out;
}

Verdict check_monotone(const PMC& pmc, std::uint32_t i, std::uint32_t k, std::uint64_t budget,
                       std::uint64_t seed, MonoMethod method) {
    if (i == 0 || i > pmc.n) throw std::invalid_argument("check_monotone: state out of range");
    if (k >= pmc.m) throw std::invalid_argument("check_monotone: parameter out of range");

    if (method == MonoMethod::Sampling) return monotone_by_sampling(pmc, i, k, budget, seed);

    if (method == MonoMethod::Certificate) {
        if (!detect_kind(pmc).simple)
            throw std::invalid_argument(
                "check_monotone: the certificate method requires a simple model");
        DiagonalSystem ds = bareiss_eliminate(build_system(pmc));
        const Polynomial& num = ds.b[i - 1];
        const Polynomial& den = ds.a[i - 1];
        // derivative = P / den^2 with den^2 >= 0, so certify P alone
        Polynomial p = num.partial_derivative(k) * den - num * den.partial_derivative(k);
        Verdict out;
        if (chonev_nonneg_certificate(p)) {
            out.status = Status::CertifiedYes;
            out.certificate = "chonev-nonneg on the derivative numerator";
        }
        return out;
    }

    // derivative-pmc method
    if (!detect_kind(pmc).simple)
        throw std::invalid_argument(
            "check_monotone: the derivative-pmc method requires a simple model");
    DerivativePMC d = derivative_pmc(pmc, i, k);
    MonoToNwr red = mono_to_nwr(d);
    Verdict out;
    switch (red.kind) {
        case MonoReduction::Monotone:
            out.status = Status::CertifiedYes;
            out.certificate = "derivative-encoding short circuit: " + red.reason;
            return out;
        case MonoReduction::Indeterminate:
            return out;
        case MonoReduction::NotMonotone: {
            Verdict s = monotone_by_sampling(pmc, i, k, budget, seed);
            s.certificate.clear();
            return s;  // RefutedNo with a concrete pair, or Unknown
        }
        case MonoReduction::Query: {
            Verdict sub = check_nwr(red.pmc, red.query_i, red.query_j, budget, seed);
            out.samples_used = sub.samples_used;
            if (sub.status == Status::CertifiedYes) {
                out.status = Status::CertifiedYes;
                out.certificate = "never-worse query on the derivative encoding: " +
                                  sub.certificate;
                return out;
            }
            if (sub.status == Status::RefutedNo) {
                // the witness valuation has a negative derivative; turn it
                // into a concrete decreasing pair on the original model
                if (auto pair = decrease_near(pmc, i, k, sub.witness.front())) {
                    out.status = Status::RefutedNo;
                    out.witness = {pair->first, pair->second};
                    return out;
                }
                Verdict s = monotone_by_sampling(pmc, i, k, budget, seed);
                s.samples_used += out.samples_used;
                return s;
            }
            return out;
        }
    }
    return out;
}

}  // namespace nwr
