#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nwr/valuefn.hpp"
#include "testutil.hpp"

using namespace nwr;
using testutil::Rng;

static PMC two_state() {
    PMC pmc;
    pmc.init(2, 0);
    pmc.sink = 1;
    pmc.target = 2;
    pmc.add_edge(1, 1, Polynomial(1));
    pmc.add_edge(2, 2, Polynomial(1));
    return pmc;
}

static const std::map<std::string, std::uint32_t> PR_NAMES = {{"p", 0}, {"r", 1}};
static Polynomial P(const std::string& s) { return Polynomial::parse(s, PR_NAMES); }

TEST_CASE("build_system shapes") {
    LinearSystem s5 = build_system(testutil::fig_nwr());
    CHECK(s5.n == 5);
    CHECK(s5.rhs[4] == Polynomial(1));
    for (int i = 0; i < 4; ++i) CHECK(s5.rhs[i].is_zero());
    // row of u (state 2): y_u - (1-p) y_target - p y_sink
    CHECK(s5.M[1][1] == Polynomial(1));
    CHECK(s5.M[1][4] == -P("1 - p"));
    CHECK(s5.M[1][3] == -P("p"));
    // sink and target rows are unit rows
    for (int j = 0; j < 5; ++j) {
        CHECK(s5.M[3][j] == (j == 3 ? Polynomial(1) : Polynomial()));
        CHECK(s5.M[4][j] == (j == 4 ? Polynomial(1) : Polynomial()));
    }

    CHECK(build_system(testutil::fig_mono()).n == 6);
    CHECK(build_system(two_state()).n == 2);
    PMC notnormal = testutil::fig_mono();
    std::swap(notnormal.target, notnormal.sink);
    CHECK_THROWS(build_system(notnormal));
}

TEST_CASE("bareiss on the trivial system") {
    DiagonalSystem d = bareiss_eliminate(build_system(two_state()));
    CHECK(d.a[0] == Polynomial(1));
    CHECK(d.a[1] == Polynomial(1));
    CHECK(d.b[0].is_zero());
    CHECK(d.b[1] == Polynomial(1));
}

TEST_CASE("closed-form value functions") {
    auto g = value_functions(testutil::fig_mono());
    CHECK(ratfn_equal(g[0], {P("p^2 + r - r*p"), 1}));  // g_s
    CHECK(ratfn_equal(g[1], {P("r*p + r - r^2"), 1}));  // g_t
    CHECK(ratfn_equal(g[2], {P("p"), 1}));              // g_u
    CHECK(ratfn_equal(g[3], {P("r"), 1}));              // g_v
    CHECK(ratfn_equal(g[4], {Polynomial(), 1}));        // sink
    CHECK(ratfn_equal(g[5], {Polynomial(1), 1}));       // target

    auto h = value_functions(testutil::fig_nwr());
    CHECK(ratfn_equal(h[0], {P("r*(1-p)^2 + p*(1-p)"), 1}));  // g_s
    CHECK(ratfn_equal(h[1], {P("1 - p"), 1}));                // g_u
    CHECK(ratfn_equal(h[2], {P("p - p^2"), 1}));              // g_v
}

TEST_CASE("traced circuits match closed forms") {
    Circuit c = value_function_circuits(testutil::fig_nwr());
    REQUIRE(c.outputs.size() == 10);
    Valuation v = {ratio(1, 2), ratio(1, 3)};
    auto vals = circuit_eval(c, v);
    CHECK(vals[0] / vals[1] == ratio(1, 3));  // g_s(1/2, 1/3) = (1/3)(1/4) + (1/2)(1/2)
    CHECK(vals[2] / vals[3] == ratio(1, 2));   // g_u = 1-p
    CHECK(vals[8] / vals[9] == 1);             // target

    Circuit t = value_function_circuits(two_state());
    auto tv = circuit_eval(t, {});
    CHECK(tv[2] == 1);
    CHECK(tv[3] == 1);
}

TEST_CASE("property: traced circuits agree with symbolic solutions") {
    Rng rng(19);
    int done = 0;
    for (int iter = 0; done < 12 && iter < 60; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 6, 2);
        auto [pp, rep] = qualitative_preprocess(pmc);
        if (pp.n < 4) continue;
        ++done;
        auto g = value_functions(pp);
        Circuit c = value_function_circuits(pp);
        for (int pt = 0; pt < 10; ++pt) {
            Valuation v = testutil::random_point(rng, 2);
            auto vals = circuit_eval_try(c, v);
            if (!vals) continue;
            for (std::uint32_t i = 0; i < pp.n; ++i) {
                Rational denom = g[i].den.eval(v);
                if (denom == 0) continue;
                CHECK((*vals)[2 * i] / (*vals)[2 * i + 1] == g[i].num.eval(v) / denom);
            }
        }
    }
    CHECK(done == 12);
}

TEST_CASE("property: fixed point g_i = sum_j p_ij g_j") {
    Rng rng(23);
    for (int iter = 0; iter < 60; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 7, 2, 2);
        auto [pp, rep] = qualitative_preprocess(pmc);
        auto g = value_functions(pp);
        for (std::uint32_t i = 1; i + 2 <= pp.n; ++i) {
            RationalFunction rhs{Polynomial(), Polynomial(1)};
            for (auto& [j, f] : pp.out[i])
                rhs = rhs + RationalFunction(*f, Polynomial(1)) * g[j - 1];
            CHECK(ratfn_equal(g[i - 1], rhs));
        }
    }
}

TEST_CASE("property: interior states have nontrivial value functions") {
    // after preprocessing, value 0 / value 1 states have been merged away
    Rng rng(29);
    int models = 0;
    for (int iter = 0; iter < 200; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 8, 3);
        auto [pp, rep] = qualitative_preprocess(pmc);
        ++models;
        auto g = value_functions(pp);
        for (std::uint32_t i = 1; i + 2 <= pp.n; ++i) {
            CHECK(!g[i - 1].num.is_zero());                  // g != 0
            CHECK(!ratfn_equal(g[i - 1], {Polynomial(1), 1}));  // g != 1
        }
        // and the states merged during preprocessing had extremal values:
        // every old prob1 state maps to target, prob0 to sink
        for (auto s : rep.prob0) CHECK(rep.mapping[s] == pp.sink);
        for (auto s : rep.prob1) CHECK(rep.mapping[s] == pp.target);
    }
    CHECK(models == 200);
}

TEST_CASE("property: degree bound O(n d)") {
    Rng rng(31);
    for (int iter = 0; iter < 40; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 7, 2, 2);
        auto [pp, rep] = qualitative_preprocess(pmc);
        std::uint64_t d = 0;
        for (std::uint32_t i = 1; i <= pp.n; ++i)
            for (auto& [j, f] : pp.out[i]) d = std::max(d, f->degree());
        DiagonalSystem ds = bareiss_eliminate(build_system(pp));
        for (std::uint32_t i = 0; i < pp.n; ++i) {
            CHECK(ds.a[i].degree() <= pp.n * std::max<std::uint64_t>(d, 1));
            CHECK(ds.b[i].degree() <= pp.n * std::max<std::uint64_t>(d, 1));
        }
    }
}

TEST_CASE("trivially parametric chain under the row-sum constraint") {
    // s -> t -> target and t -> sink, each edge its own variable; after
    // substituting the row-sum constraint, g_s = g_t
    PMC pmc;
    pmc.init(4, 3);
    pmc.sink = 3;
    pmc.target = 4;
    pmc.add_edge(1, 2, Polynomial::variable(0));
    pmc.add_edge(2, 4, Polynomial::variable(1));
    pmc.add_edge(2, 3, Polynomial::variable(2));
    Polynomial one(1);
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    auto g = value_functions(apply_row_sum_constraint(pmc));
    CHECK(ratfn_equal(g[0], g[1]));
}
