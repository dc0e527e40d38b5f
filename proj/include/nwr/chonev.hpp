#pragma once

#include <cstdint>
#include <vector>

#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr {

/// One factor of a product term: x_param or (1 - x_param).
struct ChonevLiteral {
    std::uint32_t param = 0;
    bool flipped = false;  // true: 1 - x
};

/// A product term (a/b) * Q with Q a product of literals and a/b > 0.
struct ChonevTerm {
    Integer a;
    Integer b;
    std::vector<ChonevLiteral> lits;
};

/// Normal form f = N * (c/d + sum_i (a_i/b_i) Q_i(x)) with
/// |c|/d + sum a_i/b_i <= 1. On the unit box every Q_i lies in [0, 1],
/// which makes the coefficients usable as transition probabilities.
struct ChonevForm {
    Integer N = 1;
    Integer c = 0;
    Integer d = 1;
    std::vector<ChonevTerm> terms;

    Rational eval(const Valuation& v) const;
    Polynomial to_polynomial() const;
};

/// Intermediate stage of the rewriting: f = c0 + sum_i q_i * Q_i with
/// every q_i > 0, before denominators are normalized and N factored out.
struct ChonevProducts {
    Rational c0;
    std::vector<std::pair<Rational, std::vector<ChonevLiteral>>> terms;
};

ChonevProducts chonev_products(const Polynomial& f);

/// Deterministic sign-flip rewriting: repeatedly take the graded-lex
/// largest negative non-constant monomial and replace its lowest-index
/// variable x by 1-(1-x), cancelling the residue, until only positive
/// products and a constant remain; then normalize denominators and
/// factor out N.
ChonevForm chonev_rewrite(const Polynomial& f);

/// Sufficient nonnegativity test on [0,1]^m: true when some orientation
/// of the variables (x or 1-x; exhaustive for m <= 12, identity only
/// beyond) rewrites to a form with c >= 0. True implies f >= 0 on the
/// unit box; false is inconclusive.
bool chonev_nonneg_certificate(const Polynomial& f);

}  // namespace nwr
