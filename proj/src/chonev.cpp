#include "nwr/chonev.hpp"

namespace nwr {

Rational ChonevForm::eval(const Valuation& v) const {
    Rational acc = Rational(c) / Rational(d);
    for (auto& t : terms) {
        Rational q(1);
        for (auto& lit : t.lits) {
            Rational x = v.at(lit.param);
            q *= lit.flipped ? Rational(1 - x) : x;
        }
        acc += Rational(t.a) / Rational(t.b) * q;
    }
    return Rational(acc * N);
}

Polynomial ChonevForm::to_polynomial() const {
    Polynomial acc(Rational(Rational(c) / Rational(d)));
    for (auto& t : terms) {
        Polynomial q(Rational(Rational(t.a) / Rational(t.b)));
        for (auto& lit : t.lits) {
            Polynomial x = Polynomial::variable(lit.param);
            q = q * (lit.flipped ? Polynomial(1) - x : x);
        }
        acc = acc + q;
    }
    return acc.scaled(Rational(N));
}

namespace {

std::vector<ChonevLiteral> monomial_literals(const Monomial& mono) {
    std::vector<ChonevLiteral> lits;
    for (auto& [k, e] : mono.exps())
        for (std::uint32_t i = 0; i < e; ++i) lits.push_back({k, false});
    return lits;
}

}  // namespace

ChonevProducts chonev_products(const Polynomial& f) {
    Polynomial g = f;
    ChonevProducts out;
    auto& products = out.terms;

    // flip signs: the residual monomial is graded-lex smaller than the
    // one rewritten, so this terminates
    for (;;) {
        const Monomial* pick = nullptr;
        Rational coeff;
        for (auto it = g.terms().rbegin(); it != g.terms().rend(); ++it)
            if (!it->first.is_one() && it->second < 0) {
                pick = &it->first;
                coeff = it->second;
                break;
            }
        if (!pick) break;
        Monomial mono = *pick;
        std::uint32_t var = mono.exps().front().first;
        Monomial rest = Monomial::variable(var).divide_into(mono);
        std::vector<ChonevLiteral> lits = {{var, true}};
        for (auto& lit : monomial_literals(rest)) lits.push_back(lit);
        products.emplace_back(-coeff, std::move(lits));
        g.add_term(mono, -coeff);  // t x^a  ->  -t (1-x) x^(a-e) + t x^(a-e)
        g.add_term(rest, coeff);
    }
    for (auto& [mono, coeff] : g.terms())
        if (!mono.is_one()) products.emplace_back(coeff, monomial_literals(mono));
    out.c0 = g.constant_term();
    return out;
}

ChonevForm chonev_rewrite(const Polynomial& f) {
    ChonevProducts prods = chonev_products(f);
    auto& products = prods.terms;
    Rational c0 = prods.c0;

    ChonevForm form;
    Integer d0 = c0.get_den();
    for (auto& [q, lits] : products) d0 = lcm(d0, Integer(q.get_den()));
    Integer c_int = c0.get_num() * (d0 / c0.get_den());
    Integer total = abs(c_int);
    std::vector<Integer> nums;
    for (auto& [q, lits] : products) {
        nums.push_back(q.get_num() * (d0 / q.get_den()));
        total += nums.back();
    }
    form.N = total > 0 ? total : Integer(1);
    form.c = c_int;
    form.d = d0 * form.N;
    for (std::size_t i = 0; i < products.size(); ++i)
        form.terms.push_back({nums[i], form.d, std::move(products[i].second)});
    return form;
}

bool chonev_nonneg_certificate(const Polynomial& f) {
    std::uint32_t m = f.num_params();
    std::uint32_t patterns = m <= 12 ? (1u << m) : 1u;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
        Polynomial g = f;
        for (std::uint32_t k = 0; k < m; ++k)
            if (mask & (1u << k))
                g = g.substitute(k, Polynomial(1) - Polynomial::variable(k));
        if (chonev_rewrite(g).c >= 0) return true;
    }
    return false;
}

}  // namespace nwr
