#include "nwr/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace nwr {

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
    try {
        Rational q(text);
        if (q.get_den() == 0) throw std::invalid_argument("parse_rational: zero denominator");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_rational: malformed '" + text + "'");
    }
}

Monomial::Monomial(std::vector<std::pair<std::uint32_t, std::uint32_t>> exps)
    : exps_(std::move(exps)) {
    std::sort(exps_.begin(), exps_.end());
    // merge duplicates, drop zero exponents
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (auto& [k, e] : exps_) {
        if (e == 0) continue;
        if (!out.empty() && out.back().first == k)
            out.back().second += e;
        else
            out.emplace_back(k, e);
    }
    exps_ = std::move(out);
}

std::uint32_t Monomial::exponent(std::uint32_t k) const {
    for (auto& [i, e] : exps_)
        if (i == k) return e;
    return 0;
}

std::uint64_t Monomial::total_degree() const {
    std::uint64_t d = 0;
    for (auto& [i, e] : exps_) d += e;
    return d;
}

Monomial Monomial::times(const Monomial& other) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> merged = exps_;
    merged.insert(merged.end(), other.exps_.begin(), other.exps_.end());
    return Monomial(std::move(merged));
}

bool Monomial::divides(const Monomial& other) const {
    for (auto& [k, e] : exps_)
        if (other.exponent(k) < e) return false;
    return true;
}

Monomial Monomial::divide_into(const Monomial& other) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (auto& [k, e] : other.exps()) {
        std::uint32_t mine = exponent(k);
        if (mine > e) throw std::domain_error("Monomial::divide_into: not divisible");
        if (e - mine > 0) out.emplace_back(k, e - mine);
    }
    // ensure every exponent of *this was covered
    for (auto& [k, e] : exps_)
        if (other.exponent(k) < e) throw std::domain_error("Monomial::divide_into: not divisible");
    return Monomial(std::move(out));
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
    std::uint64_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    // lexicographic on the dense exponent vector: the monomial with the
    // larger exponent at the first differing variable is lex-greater.
    auto ia = a.exps().begin(), ea = a.exps().end();
    auto ib = b.exps().begin(), eb = b.exps().end();
    while (ia != ea || ib != eb) {
        std::uint32_t ka = (ia != ea) ? ia->first : UINT32_MAX;
        std::uint32_t kb = (ib != eb) ? ib->first : UINT32_MAX;
        if (ka < kb) return false;  // a has a positive exponent where b has 0
        if (kb < ka) return true;
        if (ia->second != ib->second) return ia->second < ib->second;
        ++ia;
        ++ib;
    }
    return false;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_term() const {
    auto it = terms_.find(Monomial());
    return it == terms_.end() ? Rational(0) : it->second;
}

std::uint64_t Polynomial::degree() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->first.total_degree();
}

Integer Polynomial::max_coeff() const {
    Integer best = 0;
    for (auto& [m, c] : terms_) {
        Integer num = abs(c.get_num());
        if (num > best) best = num;
        if (c.get_den() > best) best = c.get_den();
    }
    return best;
}

std::uint64_t Polynomial::reps() const {
    return static_cast<std::uint64_t>(support_size()) * degree() * ceil_log2_plus1(max_coeff());
}

std::uint32_t Polynomial::num_params() const {
    std::uint32_t n = 0;
    for (auto& [m, c] : terms_)
        for (auto& [k, e] : m.exps())
            if (k + 1 > n) n = k + 1;
    return n;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r;
    for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r;
    for (auto& [m1, c1] : terms_)
        for (auto& [m2, c2] : o.terms_) r.add_term(m1.times(m2), c1 * c2);
    return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
    Polynomial r;
    if (c == 0) return r;
    for (auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
    return r;
}

Rational Polynomial::eval(const Valuation& v) const {
    Rational acc = 0;
    for (auto& [m, c] : terms_) {
        Rational t = c;
        for (auto& [k, e] : m.exps()) {
            if (k >= v.size())
                throw std::invalid_argument("Polynomial::eval: valuation too short");
            Rational pw;
            mpz_pow_ui(pw.get_num_mpz_t(), v[k].get_num_mpz_t(), e);
            mpz_pow_ui(pw.get_den_mpz_t(), v[k].get_den_mpz_t(), e);
            t *= pw;
        }
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::partial_derivative(std::uint32_t k) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        std::uint32_t e = m.exponent(k);
        if (e == 0) continue;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> exps;
        for (auto& [i, ei] : m.exps())
            if (i != k)
                exps.emplace_back(i, ei);
            else if (ei > 1)
                exps.emplace_back(i, ei - 1);
        r.add_term(Monomial(std::move(exps)), c * e);
    }
    return r;
}

Polynomial Polynomial::exact_divide(const Polynomial& g) const {
    if (g.is_zero()) throw std::domain_error("exact_divide: division by zero polynomial");
    Polynomial q;
    Polynomial r = *this;
    const auto& glead = *g.terms_.rbegin();  // graded-lex leading term
    while (!r.is_zero()) {
        const auto& rlead = *r.terms_.rbegin();
        if (!glead.first.divides(rlead.first))
            throw std::domain_error("exact_divide: not exact");
        Monomial tm = glead.first.divide_into(rlead.first);
        Rational tc = rlead.second / glead.second;
        Polynomial t;
        t.add_term(tm, tc);
        q = q + t;
        r = r - t * g;
    }
    return q;
}

Polynomial Polynomial::substitute(std::uint32_t k, const Polynomial& r) const {
    Polynomial out;
    for (auto& [m, c] : terms_) {
        std::uint32_t e = m.exponent(k);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> rest;
        for (auto& [i, ei] : m.exps())
            if (i != k) rest.emplace_back(i, ei);
        Polynomial t;
        t.add_term(Monomial(std::move(rest)), c);
        for (std::uint32_t j = 0; j < e; ++j) t = t * r;
        out = out + t;
    }
    return out;
}

namespace {

std::string default_name(std::uint32_t k) { return "x" + std::to_string(k); }

std::string render_mono(const Monomial& m, const std::vector<std::string>& names) {
    std::string s;
    for (auto& [k, e] : m.exps()) {
        if (!s.empty()) s += " * ";
        s += (k < names.size() && !names[k].empty()) ? names[k] : default_name(k);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

}  // namespace

std::string Polynomial::str() const { return str({}); }

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    // descending graded-lex: leading term first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const Rational& c = it->second;
        bool neg = c < 0;
        Rational a = neg ? Rational(-c) : c;
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        std::string mono = render_mono(it->first, names);
        if (mono.empty())
            out += to_string(a);
        else if (a == 1)
            out += mono;
        else
            out += to_string(a) + " * " + mono;
    }
    return out;
}

namespace {

// Recursive-descent parser for the polynomial text grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := primary ['^' nat]
//   primary:= rational | name | '(' expr ')'
struct PolyParser {
    const std::string& s;
    std::size_t i = 0;
    const std::map<std::string, std::uint32_t>* names;  // null: x0, x1, ...

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("polynomial parse error at offset " + std::to_string(i) +
                                    ": " + what);
    }

    Polynomial expr() {
        skip();
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        Polynomial acc = term();
        if (neg) acc = -acc;
        for (;;) {
            skip();
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                break;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (eat('*')) acc = acc * factor();
        return acc;
    }

    Polynomial factor() {
        Polynomial base = primary();
        if (eat('^')) {
            skip();
            std::size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (start == i) fail("expected exponent");
            unsigned long e = std::stoul(s.substr(start, i - start));
            Polynomial acc = 1;
            for (unsigned long j = 0; j < e; ++j) acc = acc * base;
            return acc;
        }
        return base;
    }

    Polynomial primary() {
        skip();
        if (i >= s.size()) fail("unexpected end of input");
        if (eat('(')) {
            Polynomial p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i < s.size() && s[i] == '/') {
                ++i;
                std::size_t dstart = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (dstart == i) fail("expected denominator digits");
            }
            return Polynomial(parse_rational(s.substr(start, i - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            std::string name = s.substr(start, i - start);
            if (names) {
                auto it = names->find(name);
                if (it == names->end()) fail("unknown parameter '" + name + "'");
                return Polynomial::variable(it->second);
            }
            if (name.size() >= 2 && name[0] == 'x') {
                bool digits = true;
                for (std::size_t j = 1; j < name.size(); ++j)
                    if (!std::isdigit(static_cast<unsigned char>(name[j]))) digits = false;
                if (digits)
                    return Polynomial::variable(
                        static_cast<std::uint32_t>(std::stoul(name.substr(1))));
            }
            fail("unknown parameter '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text,
                             const std::map<std::string, std::uint32_t>& names) {
    PolyParser p{text, 0, &names};
    Polynomial r = p.expr();
    p.skip();
    if (p.i != text.size()) p.fail("trailing input");
    return r;
}

Polynomial Polynomial::parse(const std::string& text) {
    PolyParser p{text, 0, nullptr};
    Polynomial r = p.expr();
    p.skip();
    if (p.i != text.size()) p.fail("trailing input");
    return r;
}

RationalFunction::RationalFunction(Polynomial n, Polynomial d)
    : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("RationalFunction: zero denominator");
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return RationalFunction(num * o.den + o.num * den, den * o.den);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return RationalFunction(num * o.den - o.num * den, den * o.den);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    return RationalFunction(num * o.num, den * o.den);
}

bool ratfn_equal(const RationalFunction& a, const RationalFunction& b) {
    return a.num * b.den == b.num * a.den;
}

}  // namespace nwr
