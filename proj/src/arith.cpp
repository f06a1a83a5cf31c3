#include "avg/arith.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace avg {

i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

// ---------------------------------------------------------------------------
// Extended Euclid.  Works uniformly for any modulus c >= 1 (no primality
// assumption), so the same routine serves Kloosterman inversion mod c and
// CRT bookkeeping in the character module.
// ---------------------------------------------------------------------------
i64 mod_inverse(i64 x, i64 c) {
    if (c < 1) throw std::domain_error("mod_inverse: modulus must be >= 1");
    if (c == 1) return 0;
    i64 a = ((x % c) + c) % c;
    i64 r0 = c, r1 = a;
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        i64 r2 = r0 - q * r1;
        i64 t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1)
        throw std::domain_error("mod_inverse: " + std::to_string(x) +
                                " is not invertible mod " + std::to_string(c));
    return ((t0 % c) + c) % c;
}

Factorization factorize(i64 n) {
    if (n < 1) throw std::domain_error("factorize: argument must be >= 1");
    Factorization f;
    f.n = n;
    auto strip = [&](i64 p) {
        if (n % p != 0) return;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.factors.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    // 2-3 wheel: candidates 5, 7, 11, 13, ... (alternating steps +2, +4)
    for (i64 p = 5, step = 2; p * p <= n; p += step, step = 6 - step)
        strip(p);
    if (n > 1) f.factors.emplace_back(n, 1);
    return f;
}

i64 divisor_count(const Factorization& f) {
    i64 d = 1;
    for (auto [p, e] : f.factors) d *= (e + 1);
    return d;
}

i64 divisor_count(i64 n) { return divisor_count(factorize(n)); }

i64 euler_phi(const Factorization& f) {
    i64 phi = 1;
    for (auto [p, e] : f.factors) {
        phi *= (p - 1);
        for (int i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

i64 euler_phi(i64 n) { return euler_phi(factorize(n)); }

std::vector<i64> units_mod(i64 c) {
    if (c < 1) throw std::domain_error("units_mod: modulus must be >= 1");
    std::vector<i64> units;
    for (i64 x = 1; x <= c; ++x)
        if (std::gcd(x, c) == 1) units.push_back(x);
    return units;
}

// ---------------------------------------------------------------------------
// Divisor-count sieve: for each d <= B mark all multiples.  O(B log B); the
// uint16 cell is ample, since d(k) < 2^16 for all k < 2^64 territory we touch
// (max d(k) for k <= 2^26 is well under a thousand).
// ---------------------------------------------------------------------------
std::vector<std::uint16_t> divisor_table(i64 B) {
    if (B < 1) throw std::domain_error("divisor_table: bound must be >= 1");
    std::vector<std::uint16_t> d(static_cast<std::size_t>(B) + 1, 0);
    for (i64 k = 1; k <= B; ++k)
        for (i64 mult = k; mult <= B; mult += k)
            ++d[static_cast<std::size_t>(mult)];
    return d;
}

}  // namespace avg
