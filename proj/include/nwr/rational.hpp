#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nwr {

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact rational a/b in lowest terms, denominator > 0.
inline Rational ratio(long a, long b) {
    if (b == 0) throw std::invalid_argument("ratio: zero denominator");
    Rational q(a, b);
    q.canonicalize();
    return q;
}

inline Rational ratio(const Integer& a, const Integer& b) {
    if (b == 0) throw std::invalid_argument("ratio: zero denominator");
    Rational q(a, b);
    q.canonicalize();
    return q;
}

/// Renders "a" for integers, "a/b" otherwise.
inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "a" or "a/b" (optionally signed). Throws on malformed input.
Rational parse_rational(const std::string& text);

/// A point in parameter space: one exact rational per parameter index.
using Valuation = std::vector<Rational>;

/// ceil(log2(n + 1)) for a nonnegative integer, used in size accounting.
inline std::uint64_t ceil_log2_plus1(const Integer& n) {
    if (n <= 0) return 0;
    Integer m = n + 1;
    // ceil(log2(m)) = bits(m - 1)
    Integer k = m - 1;
    return mpz_sizeinbase(k.get_mpz_t(), 2);
}

}  // namespace nwr
