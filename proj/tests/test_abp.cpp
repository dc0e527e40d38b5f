#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nwr/abp.hpp"
#include "testutil.hpp"

using namespace nwr;
using testutil::Rng;

static ABP single_edge_x() {
    ABP a;
    a.m = 1;
    a.widths = {1, 1};
    a.layers = {{{0, 0, Polynomial::variable(0)}}};
    return a;
}

TEST_CASE("abp_eval and abp_expand on hand-built programs") {
    ABP a = single_edge_x();
    CHECK(validate_abp(a).empty());
    CHECK(abp_eval(a, {ratio(2, 3)}) == ratio(2, 3));
    CHECK(abp_expand(a) == Polynomial::variable(0));

    // two parallel paths labeled (x)(1) and (1)(y): path sum x + y
    ABP b;
    b.m = 2;
    b.widths = {1, 2, 1};
    Polynomial one(1);
    b.layers = {{{0, 0, Polynomial::variable(0)}, {0, 1, one}},
                {{0, 0, one}, {1, 0, Polynomial::variable(1)}}};
    CHECK(validate_abp(b).empty());
    CHECK(b.width() == 2);
    CHECK(abp_expand(b) == Polynomial::variable(0) + Polynomial::variable(1));
    CHECK(abp_eval(b, {ratio(1, 2), ratio(1, 3)}) == ratio(5, 6));
}

TEST_CASE("validate_abp flags structural violations") {
    ABP a = single_edge_x();
    a.layers[0][0].label = Polynomial::variable(0) * Polynomial::variable(0);
    REQUIRE(validate_abp(a).size() == 1);
    CHECK(validate_abp(a)[0].find("nonlinear") != std::string::npos);

    ABP two_sinks = single_edge_x();
    two_sinks.widths.back() = 2;
    CHECK(!validate_abp(two_sinks).empty());

    ABP out_of_range = single_edge_x();
    out_of_range.layers[0][0].to = 5;
    CHECK(!validate_abp(out_of_range).empty());

    ABP empty;
    CHECK(!validate_abp(empty).empty());
}

TEST_CASE("circuit_to_abp base cases") {
    CircuitBuilder b;
    std::uint32_t x = b.input(0);
    ABP a = circuit_to_abp(b.take({x}));
    CHECK(validate_abp(a).empty());
    CHECK(a.width() == 4);
    CHECK(abp_expand(a) == Polynomial::variable(0));

    CircuitBuilder b2;
    Circuit add = b2.take({b2.add(b2.input(0), b2.input(1))});
    ABP a2 = circuit_to_abp(add);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        Valuation v = testutil::random_point_general(rng, 2);
        CHECK(abp_eval(a2, v) == circuit_eval_single(add, v));
    }
}

TEST_CASE("circuit_to_abp: x1*x2 + x1") {
    CircuitBuilder b;
    std::uint32_t x1 = b.input(0), x2 = b.input(1);
    Circuit c = b.take({b.add(b.mul(x1, x2), x1)});
    ABP a = circuit_to_abp(c);
    CHECK(a.width() == 4);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        Valuation v = testutil::random_point_general(rng, 2);
        CHECK(abp_eval(a, v) == circuit_eval_single(c, v));
    }
    Polynomial expect = Polynomial::variable(0) * Polynomial::variable(1) +
                        Polynomial::variable(0);
    CHECK(abp_expand(a) == expect);
}

TEST_CASE("circuit_to_abp: power comb, symbolic oracle and layer bound") {
    CircuitBuilder b;
    std::uint32_t x = b.input(0);
    std::uint32_t x2 = b.mul(x, x);
    Circuit c = b.take({b.mul(x2, x2)});
    ABP a = circuit_to_abp(c);
    Polynomial x4 = Polynomial::variable(0);
    x4 = x4 * x4;
    x4 = x4 * x4;
    CHECK(abp_expand(a) == x4);
    // operations <= 4^depth, plus the source and sink layers
    CHECK(a.layers.size() <= (1ull << (2 * c.depth())) + 2);
}

TEST_CASE("property: evaluation-exact on random division-free circuits") {
    Rng rng(7);
    for (int iter = 0; iter < 25; ++iter) {
        Circuit c = testutil::random_circuit(rng, 3, 12, false);
        ABP a = circuit_to_abp(c);
        CHECK(validate_abp(a).empty());
        CHECK(a.width() <= 4);
        CHECK(a.layers.size() <= (1ull << (2 * c.depth())) + 2);
        for (int pt = 0; pt < 100; ++pt) {
            Valuation v = testutil::random_point(rng, 3);
            CHECK(abp_eval(a, v) == circuit_eval_single(c, v));
        }
        if (a.size() <= 20000) {
            Polynomial f = abp_expand(a);
            Valuation v = testutil::random_point_general(rng, 3);
            CHECK(f.eval(v) == abp_eval(a, v));
        }
    }
}

TEST_CASE("depth and structure guards") {
    // repeated squaring: depth 25 exceeds the explicit limit
    CircuitBuilder b;
    std::uint32_t g = b.input(0);
    for (int i = 0; i < 25; ++i) g = b.mul(g, g);
    CHECK_THROWS_AS(circuit_to_abp(b.take({g})), std::invalid_argument);

    CircuitBuilder b2;
    std::uint32_t q = b2.div(b2.input(0), b2.add(b2.input(0), b2.constant(1)));
    CHECK_THROWS_AS(circuit_to_abp(b2.take({q})), std::invalid_argument);

    CircuitBuilder b3;
    Circuit two_outputs = b3.take({b3.input(0), b3.input(1)});
    CHECK_THROWS_AS(circuit_to_abp(two_outputs), std::invalid_argument);
}

TEST_CASE("text format round-trip") {
    Rng rng(11);
    for (int iter = 0; iter < 10; ++iter) {
        ABP a = circuit_to_abp(testutil::random_circuit(rng, 2, 8, false));
        std::string text = emit_abp(a);
        ABP back = parse_abp(text);
        CHECK(emit_abp(back) == text);
        Valuation v = testutil::random_point(rng, 2);
        CHECK(abp_eval(back, v) == abp_eval(a, v));
    }
    CHECK_THROWS(parse_abp("nonsense"));
    CHECK_THROWS(parse_abp("abp 2 1\nwidths 1 2\n0 0 1 x0\n"));  // sink width 2
}
