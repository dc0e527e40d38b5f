#include "nwr/valuefn.hpp"

#include <random>
#include <stdexcept>

namespace nwr {

LinearSystem build_system(const PMC& pmc) {
    if (!is_preprocessed(pmc))
        throw std::invalid_argument("build_system: model not in target=n / sink=n-1 normal form");
    std::uint32_t n = pmc.n;
    LinearSystem sys;
    sys.n = n;
    sys.M.assign(n, std::vector<Polynomial>(n));
    sys.rhs.assign(n, Polynomial());
    for (std::uint32_t i = 0; i < n; ++i) sys.M[i][i] = Polynomial(1);
    for (std::uint32_t i = 1; i + 2 <= n; ++i)  // interior states only
        for (auto& [j, f] : pmc.out[i]) sys.M[i - 1][j - 1] = sys.M[i - 1][j - 1] - *f;
    sys.rhs[n - 1] = Polynomial(1);
    return sys;
}

static constexpr std::uint32_t kDenseLimit = 2000;

DiagonalSystem bareiss_eliminate(const LinearSystem& sys) {
    std::uint32_t n = sys.n;
    if (n > kDenseLimit)
        throw std::runtime_error("bareiss_eliminate: dense elimination limited to n <= 2000");
    std::vector<std::vector<Polynomial>> M = sys.M;
    std::vector<Polynomial> b = sys.rhs;

    // forward pass, one-step fraction-free updates
    Polynomial prev(1);
    for (std::uint32_t k = 0; k < n; ++k) {
        if (M[k][k].is_zero()) {
            std::uint32_t swap_row = k;
            for (std::uint32_t i = k + 1; i < n && swap_row == k; ++i)
                if (!M[i][k].is_zero()) swap_row = i;
            if (swap_row == k)
                throw std::runtime_error("bareiss_eliminate: singular system (zero pivot column)");
            std::swap(M[k], M[swap_row]);
            std::swap(b[k], b[swap_row]);
        }
        for (std::uint32_t i = k + 1; i < n; ++i) {
            for (std::uint32_t j = k + 1; j < n; ++j)
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]).exact_divide(prev);
            b[i] = (M[k][k] * b[i] - M[i][k] * b[k]).exact_divide(prev);
            M[i][k] = Polynomial();
        }
        prev = M[k][k];
    }

    // fraction-free back substitution: with D the final pivot, beta_i =
    // y_i * D is a polynomial (a Cramer determinant), recoverable by the
    // exact division beta_i = (b_i * D - sum_{j>i} M_ij * beta_j) / M_ii.
    const Polynomial& D = M[n - 1][n - 1];
    std::vector<Polynomial> beta(n);
    for (std::uint32_t i = n; i-- > 0;) {
        Polynomial acc = b[i] * D;
        for (std::uint32_t j = i + 1; j < n; ++j) acc = acc - M[i][j] * beta[j];
        beta[i] = acc.exact_divide(M[i][i]);
    }

    DiagonalSystem out;
    out.a.assign(n, D);
    out.b = std::move(beta);
    return out;
}

std::vector<RationalFunction> value_functions(const PMC& pmc) {
    DiagonalSystem d = bareiss_eliminate(build_system(pmc));
    std::vector<RationalFunction> g;
    for (std::uint32_t i = 0; i < pmc.n; ++i) g.emplace_back(d.b[i], d.a[i]);
    return g;
}

std::uint32_t emit_polynomial(CircuitBuilder& b, const Polynomial& f) {
    std::vector<std::uint32_t> terms;
    for (auto& [mono, c] : f.terms()) {
        std::uint32_t t = b.constant(c);
        for (auto& [k, e] : mono.exps()) {
            // power by repeated squaring: keeps both the depth and the
            // register-program blow-up of downstream transforms small
            std::uint32_t x = b.input(k);
            std::uint32_t pw = 0;
            bool have = false;
            std::uint32_t sq = x;
            for (std::uint32_t bit = e; bit; bit >>= 1) {
                if (bit & 1) {
                    pw = have ? b.mul(pw, sq) : sq;
                    have = true;
                }
                if (bit > 1) sq = b.mul(sq, sq);
            }
            t = b.mul(t, pw);
        }
        terms.push_back(t);
    }
    return b.sum(std::move(terms));
}

Circuit value_function_circuits(const PMC& pmc) {
    if (!is_preprocessed(pmc))
        throw std::invalid_argument(
            "value_function_circuits: model not in target=n / sink=n-1 normal form");
    std::uint32_t n = pmc.n;
    if (n > kDenseLimit)
        throw std::runtime_error("value_function_circuits: dense elimination limited to n <= 2000");
    CircuitBuilder bld;

    // Zero-pivot decisions cannot be made on gates; shadow-evaluate every
    // entry at fixed random points. A polynomial is treated as zero iff it
    // vanishes on all shadows (wrong only with negligible probability, and
    // the final self-checks in callers would catch it).
    constexpr int kShadows = 3;
    std::mt19937_64 rng(0xbadc0de);
    std::uniform_int_distribution<long> dist(1, (1 << 20) - 1);
    std::vector<Valuation> pts(kShadows);
    for (auto& v : pts)
        for (std::uint32_t k = 0; k < pmc.m; ++k) v.push_back(ratio(dist(rng), 1 << 20));

    struct Entry {
        std::uint32_t gate;
        std::vector<Rational> shadow;
    };
    auto lift = [&](const Polynomial& f) {
        Entry e;
        e.gate = emit_polynomial(bld, f);
        for (auto& v : pts) e.shadow.push_back(f.eval(v));
        return e;
    };
    auto is_zero = [](const Entry& e) {
        for (auto& s : e.shadow)
            if (s != 0) return false;
        return true;
    };
    auto combine = [&](const Entry& pivot, const Entry& x, const Entry& elim, const Entry& y,
                       const Entry& prev) {
        // (pivot*x - elim*y) / prev
        Entry e;
        e.gate = bld.div(bld.sub(bld.mul(pivot.gate, x.gate), bld.mul(elim.gate, y.gate)),
                         prev.gate);
        for (int s = 0; s < kShadows; ++s)
            e.shadow.push_back((pivot.shadow[s] * x.shadow[s] - elim.shadow[s] * y.shadow[s]) /
                               prev.shadow[s]);
        return e;
    };

    std::vector<std::vector<Entry>> M(n, std::vector<Entry>(n));
    std::vector<Entry> rhs(n);
    Polynomial zero, one(1);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) M[i][j] = lift(i == j ? one : zero);
    for (std::uint32_t i = 0; i < n; ++i) rhs[i] = lift(i == n - 1 ? one : zero);
    for (std::uint32_t i = 1; i + 2 <= n; ++i)
        for (auto& [j, f] : pmc.out[i]) {
            Entry e = lift(*f);
            Entry& slot = M[i - 1][j - 1];
            slot.gate = bld.sub(slot.gate, e.gate);
            for (int s = 0; s < kShadows; ++s) slot.shadow[s] -= e.shadow[s];
        }

    Entry prev = lift(one);
    for (std::uint32_t k = 0; k < n; ++k) {
        if (is_zero(M[k][k])) {
            std::uint32_t swap_row = k;
            for (std::uint32_t i = k + 1; i < n && swap_row == k; ++i)
                if (!is_zero(M[i][k])) swap_row = i;
            if (swap_row == k)
                throw std::runtime_error("value_function_circuits: singular system");
            std::swap(M[k], M[swap_row]);
            std::swap(rhs[k], rhs[swap_row]);
        }
        // every row is updated, even those with a zero elimination entry:
        // skipping would rescale rows, and the outputs must match the
        // expanded elimination's polynomials exactly, not just as ratios
        for (std::uint32_t i = k + 1; i < n; ++i) {
            for (std::uint32_t j = k + 1; j < n; ++j)
                M[i][j] = combine(M[k][k], M[i][j], M[i][k], M[k][j], prev);
            rhs[i] = combine(M[k][k], rhs[i], M[i][k], rhs[k], prev);
            M[i][k] = lift(zero);
        }
        prev = M[k][k];
    }

    // back substitution mirroring bareiss_eliminate
    const Entry& D = M[n - 1][n - 1];
    std::vector<Entry> beta(n);
    for (std::uint32_t i = n; i-- > 0;) {
        Entry acc;
        acc.gate = bld.mul(rhs[i].gate, D.gate);
        for (int s = 0; s < kShadows; ++s) acc.shadow.push_back(rhs[i].shadow[s] * D.shadow[s]);
        for (std::uint32_t j = i + 1; j < n; ++j) {
            acc.gate = bld.sub(acc.gate, bld.mul(M[i][j].gate, beta[j].gate));
            for (int s = 0; s < kShadows; ++s)
                acc.shadow[s] -= M[i][j].shadow[s] * beta[j].shadow[s];
        }
        beta[i].gate = bld.div(acc.gate, M[i][i].gate);
        for (int s = 0; s < kShadows; ++s)
            beta[i].shadow.push_back(acc.shadow[s] / M[i][i].shadow[s]);
    }

    std::vector<std::uint32_t> outs;
    for (std::uint32_t i = 0; i < n; ++i) {
        outs.push_back(beta[i].gate);
        outs.push_back(D.gate);
    }
    return bld.take(std::move(outs));
}

}  // namespace nwr
