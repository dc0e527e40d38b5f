#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nwr/rational.hpp"

namespace nwr {

/// Exponent vector, stored sparsely as (parameter index, exponent > 0)
/// pairs sorted by index. The empty monomial is 1.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<std::pair<std::uint32_t, std::uint32_t>> exps);

    static Monomial variable(std::uint32_t k) { return Monomial({{k, 1}}); }

    std::uint32_t exponent(std::uint32_t k) const;
    std::uint64_t total_degree() const;
    bool is_one() const { return exps_.empty(); }

    Monomial times(const Monomial& other) const;
    bool divides(const Monomial& other) const;
    /// other / this; requires divides(other).
    Monomial divide_into(const Monomial& other) const;

    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& exps() const { return exps_; }

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }

private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> exps_;
};

/// Graded lexicographic order: by total degree, ties broken
/// lexicographically on the (dense) exponent vector. This is the global
/// term order; it makes polynomial representations canonical.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial over Q. Invariant: no zero
/// coefficients stored; term order is graded-lex, so equal polynomials
/// have identical representations.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rational, GradedLexLess>;

    Polynomial() = default;
    /* implicit */ Polynomial(long c) { add_term(Monomial(), Rational(c)); }
    /* implicit */ Polynomial(const Rational& c) { add_term(Monomial(), c); }

    static Polynomial variable(std::uint32_t k) {
        Polynomial p;
        p.add_term(Monomial::variable(k), Rational(1));
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Constant term (0 if absent).
    Rational constant_term() const;

    /// max total degree over the support; 0 for the zero polynomial.
    std::uint64_t degree() const;
    std::size_t support_size() const { return terms_.size(); }
    /// max over |numerator|, denominator of all coefficients; 0 for zero.
    Integer max_coeff() const;
    /// |supp| * deg * ceil(log2(coeff+1)) representation size.
    std::uint64_t reps() const;
    /// 1 + highest parameter index occurring, 0 if none occur.
    std::uint32_t num_params() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Rational& c) const;

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    Rational eval(const Valuation& v) const;
    Polynomial partial_derivative(std::uint32_t k) const;
    /// Exact division: returns q with *this == q * g. Throws
    /// std::domain_error if g is zero or the division is not exact.
    Polynomial exact_divide(const Polynomial& g) const;

    /// Substitute x_k := r (a polynomial), other variables unchanged.
    Polynomial substitute(std::uint32_t k, const Polynomial& r) const;

    const TermMap& terms() const { return terms_; }
    void add_term(const Monomial& m, const Rational& c);

    /// Rendering with default names x0, x1, ... or caller-supplied names.
    std::string str() const;
    std::string str(const std::vector<std::string>& names) const;

    /// Parses the textual grammar produced by str(): +, -, *, ^,
    /// parentheses, rational constants and parameter names. Names not in
    /// the table are an error.
    static Polynomial parse(const std::string& text,
                            const std::map<std::string, std::uint32_t>& names);
    /// Convenience: names x0, x1, ...
    static Polynomial parse(const std::string& text);

private:
    TermMap terms_;
};

/// Quotient of polynomials; equality is by cross-multiplication.
struct RationalFunction {
    Polynomial num;
    Polynomial den;

    RationalFunction() : num(), den(1) {}
    RationalFunction(Polynomial n, Polynomial d);

    bool is_zero() const { return num.is_zero(); }
    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
};

/// True iff a.num * b.den == b.num * a.den as polynomials.
bool ratfn_equal(const RationalFunction& a, const RationalFunction& b);

}  // namespace nwr
