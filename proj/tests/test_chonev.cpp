#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nwr/chonev.hpp"
#include "testutil.hpp"

using namespace nwr;
using testutil::Rng;

static Rational sum_bound(const ChonevForm& f) {
    Rational s = Rational(Integer(abs(f.c))) / Rational(f.d);
    for (auto& t : f.terms) s += Rational(t.a) / Rational(t.b);
    return s;
}

TEST_CASE("the -2 x1 x2 x3 example") {
    Polynomial f = Polynomial(-2) * Polynomial::variable(0) * Polynomial::variable(1) *
                   Polynomial::variable(2);
    ChonevForm form = chonev_rewrite(f);
    // 2(1-x1)x2x3 + 2(1-x2)x3 + 2(1-x3) - 2, so N = 2+2+2+|-2| = 8
    CHECK(form.N == 8);
    CHECK(form.c == -2);
    CHECK(form.d == 8);
    REQUIRE(form.terms.size() == 3);
    for (auto& t : form.terms) {
        CHECK(t.a == 2);
        CHECK(t.b == 8);
        CHECK(t.lits[0].flipped);
        for (std::size_t i = 1; i < t.lits.size(); ++i) CHECK(!t.lits[i].flipped);
    }
    CHECK(form.terms[0].lits.size() == 3);
    CHECK(form.terms[1].lits.size() == 2);
    CHECK(form.terms[2].lits.size() == 1);
    CHECK(form.to_polynomial() == f);
    CHECK(sum_bound(form) == 1);
}

TEST_CASE("edge cases") {
    ChonevForm zero = chonev_rewrite(Polynomial());
    CHECK(zero.N == 1);
    CHECK(zero.c == 0);
    CHECK(zero.terms.empty());
    CHECK(zero.to_polynomial().is_zero());

    ChonevForm cst = chonev_rewrite(Polynomial(ratio(-3, 4)));
    CHECK(cst.to_polynomial() == Polynomial(ratio(-3, 4)));
    CHECK(sum_bound(cst) <= 1);

    // (1-p)^2 = 1 - 2p + p^2
    Polynomial p = Polynomial::variable(0), one(1);
    ChonevForm sq = chonev_rewrite((one - p) * (one - p));
    CHECK(sq.to_polynomial() == (one - p) * (one - p));
    CHECK(sum_bound(sq) <= 1);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Valuation v = testutil::random_point(rng, 1);
        CHECK(sq.eval(v) == ((one - p) * (one - p)).eval(v));
    }
}

TEST_CASE("nonnegativity certificate") {
    Polynomial p = Polynomial::variable(0), one(1);
    CHECK(chonev_nonneg_certificate((one - p) * (one - p)));
    CHECK(chonev_nonneg_certificate(p - p * p));  // p(1-p)
    CHECK(chonev_nonneg_certificate(Polynomial(0)));
    CHECK(!chonev_nonneg_certificate(Polynomial(-1)));
    CHECK(!chonev_nonneg_certificate(p * p - p));  // actually negative on (0,1)
}

TEST_CASE("property: identity and bounds on 500 random polynomials") {
    Rng rng(17);
    for (int iter = 0; iter < 500; ++iter) {
        Polynomial f = testutil::random_polynomial(rng, 3, 3, 5);
        ChonevForm form = chonev_rewrite(f);
        CHECK(form.N > 0);
        CHECK(form.d > 0);
        CHECK(sum_bound(form) <= 1);
        CHECK(form.terms.size() <= f.support_size() * std::max<std::uint64_t>(f.degree(), 1));
        for (auto& t : form.terms) {
            CHECK(t.a > 0);
            CHECK(t.b > 0);
            CHECK(t.lits.size() <= std::max<std::uint64_t>(f.degree(), 1));
        }
        CHECK(form.to_polynomial() == f);  // exact identity
        for (int pt = 0; pt < 100; ++pt) {
            Valuation v = testutil::random_point(rng, 3);
            CHECK(form.eval(v) == f.eval(v));
        }
    }
}

TEST_CASE("property: bitsize tracks the representation size") {
    // log of every integer in the form stays within a small multiple of
    // reps(f); checked loosely as the lemma only gives O(reps)
    Rng rng(19);
    for (int iter = 0; iter < 100; ++iter) {
        Polynomial f = testutil::random_polynomial(rng, 2, 3, 4);
        if (f.is_zero()) continue;
        ChonevForm form = chonev_rewrite(f);
        std::uint64_t budget = 8 * (f.reps() + 8);
        CHECK(ceil_log2_plus1(form.N) <= budget);
        CHECK(ceil_log2_plus1(form.d) <= budget);
        for (auto& t : form.terms) CHECK(ceil_log2_plus1(t.b) <= budget);
    }
}
