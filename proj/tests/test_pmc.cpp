#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nwr/pmc.hpp"
#include "testutil.hpp"

using namespace nwr;
using testutil::Rng;

TEST_CASE("validate: well-formed models") {
    CHECK(validate(testutil::fig_mono(), {.simple = true}).empty());
    CHECK(validate(testutil::fig_nwr(), {.simple = true}).empty());
    Rng rng(1);
    CHECK(validate(testutil::random_trivial_pmc(rng, 6), {.trivially_parametric = true}).empty());
}

TEST_CASE("validate: row sum violation") {
    PMC pmc;
    pmc.init(3, 1);
    pmc.sink = 2;
    pmc.target = 3;
    Polynomial p = Polynomial::variable(0), one(1);
    pmc.add_edge(1, 3, p);
    pmc.add_edge(1, 2, p);  // p + p != 1
    pmc.add_edge(2, 2, one);
    pmc.add_edge(3, 3, one);
    auto bad = validate(pmc, {});
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("row sum") != std::string::npos);
}

TEST_CASE("validate: reused variable breaks trivially parametric") {
    PMC pmc;
    pmc.init(4, 1);
    pmc.sink = 3;
    pmc.target = 4;
    Polynomial x = Polynomial::variable(0), one(1);
    pmc.add_edge(1, 4, x);
    pmc.add_edge(1, 3, x);  // x reused
    pmc.add_edge(2, 4, x);  // and again
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    CHECK(!validate(pmc, {.trivially_parametric = true}).empty());
}

TEST_CASE("validate: broken target self-loop") {
    PMC pmc = testutil::fig_mono();
    pmc.out[pmc.target].clear();
    pmc.add_edge(pmc.target, pmc.sink, Polynomial(1));
    CHECK(!validate(pmc, {}).empty());
}

TEST_CASE("is_graph_preserving") {
    PMC pmc = testutil::fig_mono();
    CHECK(is_graph_preserving(pmc, {ratio(1, 2), ratio(1, 2)}));
    CHECK(!is_graph_preserving(pmc, {Rational(0), ratio(1, 2)}));
    CHECK(!is_graph_preserving(pmc, {Rational(2), ratio(1, 2)}));
}

TEST_CASE("qualitative_preprocess: already-normal model unchanged in size") {
    auto [res, rep] = qualitative_preprocess(testutil::fig_nwr());
    CHECK(res.n == 5);
    CHECK(rep.prob0 == std::vector<std::uint32_t>{4});
    CHECK(rep.prob1 == std::vector<std::uint32_t>{5});
    CHECK(is_preprocessed(res));
    CHECK(validate(res, {.simple = true}).empty());
}

TEST_CASE("qualitative_preprocess: dead-end state merged into sink") {
    PMC pmc;
    pmc.init(4, 1);
    pmc.sink = 3;
    pmc.target = 4;
    Polynomial x = Polynomial::variable(0), one(1);
    pmc.add_edge(1, 4, x);
    pmc.add_edge(1, 2, one - x);
    pmc.add_edge(2, 3, one);  // only a path to the sink
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    auto [res, rep] = qualitative_preprocess(pmc);
    CHECK(res.n == 3);
    CHECK(rep.mapping[2] == rep.mapping[3]);  // 2 merged into sink
    CHECK(is_preprocessed(res));
}

TEST_CASE("qualitative_preprocess: certain-reach chain merged into target") {
    // s -> t -> target with no escape: both s and t reach with prob 1
    PMC pmc;
    pmc.init(4, 2);
    pmc.sink = 3;
    pmc.target = 4;
    Polynomial one(1);
    pmc.add_edge(1, 2, one);
    pmc.add_edge(2, 4, one);
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    auto [res, rep] = qualitative_preprocess(pmc);
    CHECK(res.n == 2);
    CHECK(rep.prob1 == std::vector<std::uint32_t>{1, 2, 4});
    CHECK(rep.prob0 == std::vector<std::uint32_t>{3});
}

TEST_CASE("qualitative_preprocess is idempotent") {
    Rng rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 8, 3);
        auto [once, rep1] = qualitative_preprocess(pmc);
        auto [twice, rep2] = qualitative_preprocess(once);
        CHECK(twice.n == once.n);
        CHECK(twice.edge_count() == once.edge_count());
        CHECK(emit_model(twice) == emit_model(once));
    }
}

TEST_CASE("sample_valuation: simple and trivially parametric") {
    PMC pmc = testutil::fig_mono();
    for (std::uint64_t seed : {1, 2, 3}) {
        Valuation v = sample_valuation(pmc, {.simple = true}, seed);
        CHECK(is_graph_preserving(pmc, v));
        CHECK(v == sample_valuation(pmc, {.simple = true}, seed));  // deterministic
    }
    Rng rng(11);
    PMC triv = testutil::random_trivial_pmc(rng, 7);
    for (std::uint64_t seed : {1, 2, 3}) {
        Valuation v = sample_valuation(triv, {.trivially_parametric = true}, seed);
        CHECK(is_graph_preserving(triv, v));
    }
    // general kind via rejection
    Valuation v = sample_valuation(pmc, {}, 5);
    CHECK(is_graph_preserving(pmc, v));
}

TEST_CASE("sample_valuation: unsatisfiable model errors out") {
    // row 2p + (1 - 2p) is fine symbolically, but row "2p to target only"
    // forces 2p = 1 while another row forces p != 1/2.
    PMC pmc;
    pmc.init(4, 1);
    pmc.sink = 3;
    pmc.target = 4;
    Polynomial p = Polynomial::variable(0), one(1);
    pmc.add_edge(1, 4, p + p);  // needs 2p = 1, i.e. p = 1/2
    pmc.add_edge(2, 4, p * p + ratio(3, 4));  // needs p^2 = 1/4 ... p = 1/2 again
    pmc.add_edge(2, 3, one - (p * p + ratio(3, 4)));
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    // p = 1/2 makes row 2 sum exactly 1 but row 2's second label zero:
    // 1 - (1/4 + 3/4) = 0, which graph preservation rejects.
    CHECK_THROWS_AS(sample_valuation(pmc, {}, 1), std::runtime_error);
}

TEST_CASE("model JSON round-trip") {
    PMC pmc = testutil::fig_mono();
    std::string text = emit_model(pmc);
    PMC back = parse_model(text);
    CHECK(emit_model(back) == text);
    CHECK(back.n == pmc.n);
    CHECK(back.target == pmc.target);
    CHECK(back.sink == pmc.sink);
    for (std::uint32_t i = 1; i <= pmc.n; ++i)
        for (auto& [j, f] : pmc.out[i]) CHECK(back.edge(i, j) == *f);
}

TEST_CASE("model JSON round-trip on random models") {
    Rng rng(13);
    for (int iter = 0; iter < 30; ++iter) {
        PMC pmc = testutil::random_pmc(rng, 7, 2, 2);
        std::string text = emit_model(pmc);
        CHECK(emit_model(parse_model(text)) == text);
    }
}

TEST_CASE("model JSON parse errors") {
    CHECK_THROWS(parse_model("not json"));
    CHECK_THROWS(parse_model("{\"parameters\": [], \"states\": 2, \"sink\": 1, "
                             "\"transitions\": []}"));  // missing target
    CHECK_THROWS(parse_model("{\"parameters\": [], \"states\": 2, \"target\": 2, \"sink\": 1, "
                             "\"transitions\": [{\"from\": 1, \"to\": 9, \"poly\": \"1\"}]}"));
}

TEST_CASE("parallel transitions are summed at parse time") {
    std::string text = R"({
      "parameters": ["p"], "states": 3, "target": 3, "sink": 2,
      "transitions": [
        {"from": 1, "to": 3, "poly": "p"},
        {"from": 1, "to": 3, "poly": "1 - p"},
        {"from": 2, "to": 2, "poly": "1"},
        {"from": 3, "to": 3, "poly": "1"}
      ]})";
    PMC pmc = parse_model(text);
    CHECK(pmc.out[1].size() == 1);
    CHECK(pmc.edge(1, 3) == Polynomial(1));
}

TEST_CASE("PRISM emitter") {
    PMC pmc = testutil::fig_nwr();
    std::string text = emit_prism(pmc);
    CHECK(text.find("dtmc") == 0);
    CHECK(text.find("const double p;") != std::string::npos);
    // v's command: p to u (state 2), 1-p to fail (state 4)
    // canonical polynomial rendering is graded-lex, leading term first
    CHECK(text.find("[] s=3 -> (p) : (s'=2) + (-p + 1) : (s'=4);") != std::string::npos);
    CHECK(text.find("label \"target\" = s=5;") != std::string::npos);
    CHECK(text.find("^") == std::string::npos);  // no power operator in PRISM
    // one command per state
    std::size_t cmds = 0, pos = 0;
    while ((pos = text.find("[] s=", pos)) != std::string::npos) {
        ++cmds;
        ++pos;
    }
    CHECK(cmds == pmc.n);
}

TEST_CASE("apply_row_sum_constraint") {
    // chain s -> t -> target, trivially parametric: x0 and x1 become 1
    PMC pmc;
    pmc.init(4, 2);
    pmc.sink = 3;
    pmc.target = 4;
    pmc.add_edge(1, 2, Polynomial::variable(0));
    pmc.add_edge(2, 4, Polynomial::variable(1));
    Polynomial one(1);
    pmc.add_edge(3, 3, one);
    pmc.add_edge(4, 4, one);
    PMC res = apply_row_sum_constraint(pmc);
    CHECK(res.edge(1, 2) == one);
    CHECK(res.edge(2, 4) == one);
    // two-edge row: second edge becomes 1 - first
    PMC nw = testutil::fig_nwr();
    PMC nw2 = apply_row_sum_constraint(nw);
    CHECK(nw2.edge(1, 3) == Polynomial(1) - nw.edge(1, 2));
}
