#pragma once

// Shared helpers for the test binaries: a deterministic RNG and seeded
// generators for rational points and random polynomials.

#include <cstdint>
#include <random>
#include <vector>

#include "nwr/circuit.hpp"
#include "nwr/pmc.hpp"
#include "nwr/polynomial.hpp"
#include "nwr/rational.hpp"

namespace nwr::testutil {

using Rng = std::mt19937_64;

/// Random rational with 16-bit numerator, denominator 2^16; lies in (0,1).
inline Rational unit_rational(Rng& rng) {
    std::uniform_int_distribution<int> d(1, (1 << 16) - 1);
    return ratio(d(rng), 1 << 16);
}

/// Random rational in roughly [-8, 8] with small denominator.
inline Rational small_rational(Rng& rng) {
    std::uniform_int_distribution<int> num(-64, 64);
    std::uniform_int_distribution<int> den(1, 8);
    return ratio(num(rng), den(rng));
}

inline Valuation random_point(Rng& rng, std::size_t m) {
    Valuation v;
    for (std::size_t k = 0; k < m; ++k) v.push_back(unit_rational(rng));
    return v;
}

inline Valuation random_point_general(Rng& rng, std::size_t m) {
    Valuation v;
    for (std::size_t k = 0; k < m; ++k) v.push_back(small_rational(rng));
    return v;
}

/// Random sparse polynomial in m parameters, total degree <= deg,
/// up to `terms` terms (possibly fewer after cancellation).
inline Polynomial random_polynomial(Rng& rng, std::uint32_t m, std::uint32_t deg,
                                    std::size_t terms) {
    std::uniform_int_distribution<std::uint32_t> var(0, m ? m - 1 : 0);
    std::uniform_int_distribution<std::uint32_t> d(0, deg);
    std::uniform_int_distribution<int> coef(-9, 9);
    Polynomial f;
    for (std::size_t t = 0; t < terms; ++t) {
        std::uint32_t total = d(rng);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> exps;
        for (std::uint32_t j = 0; j < total && m > 0; ++j) exps.emplace_back(var(rng), 1);
        int c = coef(rng);
        if (c == 0) c = 1;
        f.add_term(Monomial(std::move(exps)), Rational(c));
    }
    return f;
}

/// Two-lane 6-state model with parameters p (=x0) and r (=x1):
/// s=1, t=2, u=3, v=4, sink=5, target=6. Value functions:
/// g_s = p^2 + r - rp, g_t = rp + r - r^2, g_u = p, g_v = r.
inline PMC fig_mono() {
    PMC pmc;
    pmc.init(6, 2);
    pmc.param_names = {"p", "r"};
    Polynomial p = Polynomial::variable(0), r = Polynomial::variable(1), one(1);
    pmc.sink = 5;
    pmc.target = 6;
    pmc.add_edge(1, 3, p);
    pmc.add_edge(1, 4, one - p);
    pmc.add_edge(2, 3, r);
    pmc.add_edge(2, 4, one - r);
    pmc.add_edge(3, 6, p);
    pmc.add_edge(3, 5, one - p);
    pmc.add_edge(4, 6, r);
    pmc.add_edge(4, 5, one - r);
    pmc.add_edge(5, 5, one);
    pmc.add_edge(6, 6, one);
    return pmc;
}

/// 5-state model with parameters p (=x0) and r (=x1):
/// s=1, u=2, v=3, sink=4, target=5. Value functions:
/// g_s = r(1-p)^2 + p(1-p), g_u = 1-p, g_v = p - p^2.
inline PMC fig_nwr() {
    PMC pmc;
    pmc.init(5, 2);
    pmc.param_names = {"p", "r"};
    Polynomial p = Polynomial::variable(0), r = Polynomial::variable(1), one(1);
    pmc.sink = 4;
    pmc.target = 5;
    pmc.add_edge(1, 2, r);
    pmc.add_edge(1, 3, one - r);
    pmc.add_edge(2, 5, one - p);
    pmc.add_edge(2, 4, p);
    pmc.add_edge(3, 2, p);
    pmc.add_edge(3, 4, one - p);
    pmc.add_edge(4, 4, one);
    pmc.add_edge(5, 5, one);
    return pmc;
}

/// Random well-formed pMC over machine-generated structure: every
/// non-extremal state gets 2-3 outgoing edges with labels that sum to 1
/// symbolically, built from the pattern {f, 1-f} or {f, g, 1-f-g} with f,
/// g drawn from {x_k, c, c*x_k}. Sink = n-1, target = n.
inline PMC random_pmc(Rng& rng, std::uint32_t n, std::uint32_t m, std::uint32_t deg = 1) {
    PMC pmc;
    pmc.init(n, m);
    pmc.sink = n - 1;
    pmc.target = n;
    std::uniform_int_distribution<std::uint32_t> st(1, n);
    std::uniform_int_distribution<std::uint32_t> var(0, m - 1);
    std::uniform_int_distribution<int> cd(1, 7);
    Polynomial one(1);
    for (std::uint32_t i = 1; i + 2 <= n; ++i) {
        // f = c * x_k (or c * x_k * x_j at deg 2) with c in (0,1)
        Rational c = ratio(cd(rng), 8);
        Polynomial f = Polynomial(c) * Polynomial::variable(var(rng));
        if (deg >= 2 && cd(rng) <= 3) f = f * Polynomial::variable(var(rng));
        std::uint32_t a = st(rng), b2 = st(rng);
        if (a == i && b2 == i) b2 = n;  // avoid a state looping only to itself
        pmc.add_edge(i, a, f);
        pmc.add_edge(i, b2, one - f);
    }
    pmc.add_edge(n - 1, n - 1, one);
    pmc.add_edge(n, n, one);
    return pmc;
}

/// Random trivially parametric pMC: every edge its own variable.
inline PMC random_trivial_pmc(Rng& rng, std::uint32_t n) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t>> edges;
    std::uniform_int_distribution<std::uint32_t> st(1, n);
    std::uniform_int_distribution<int> fanout(2, 3);
    for (std::uint32_t i = 1; i + 2 <= n; ++i) {
        int k = fanout(rng);
        std::vector<std::uint32_t> dests;
        while ((int)dests.size() < k) {
            std::uint32_t d = st(rng);
            if (d == i) continue;
            bool dup = false;
            for (auto x : dests) dup |= (x == d);
            if (!dup) dests.push_back(d);
        }
        for (auto d : dests) edges.emplace_back(i, d);
    }
    PMC pmc;
    pmc.init(n, static_cast<std::uint32_t>(edges.size()));
    pmc.sink = n - 1;
    pmc.target = n;
    std::uint32_t k = 0;
    for (auto& [i, j] : edges) pmc.add_edge(i, j, Polynomial::variable(k++));
    Polynomial one(1);
    pmc.add_edge(n - 1, n - 1, one);
    pmc.add_edge(n, n, one);
    return pmc;
}

/// Random fanin-2 circuit over m parameters. Divisions (if allowed) use
/// denominator gates shifted away from zero to keep most points defined.
inline Circuit random_circuit(Rng& rng, std::uint32_t m, std::size_t ops, bool allow_div) {
    CircuitBuilder b;
    std::vector<std::uint32_t> pool;
    for (std::uint32_t k = 0; k < m; ++k) pool.push_back(b.input(k));
    pool.push_back(b.constant(small_rational(rng)));
    std::uniform_int_distribution<int> opd(0, allow_div ? 3 : 2);
    for (std::size_t i = 0; i < ops; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::uint32_t a = pool[pick(rng)], c = pool[pick(rng)];
        switch (opd(rng)) {
            case 0: pool.push_back(b.add(a, c)); break;
            case 1: pool.push_back(b.mul(a, c)); break;
            case 2: pool.push_back(b.sub(a, c)); break;
            case 3: {
                // denominator x_k + 2 stays nonzero on the unit box
                std::uniform_int_distribution<std::uint32_t> vk(0, m ? m - 1 : 0);
                std::uint32_t den = b.add(b.input(vk(rng)), b.constant(2));
                pool.push_back(b.div(a, den));
                break;
            }
        }
    }
    return b.take({pool.back()});
}

}  // namespace nwr::testutil
