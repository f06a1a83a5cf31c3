#pragma once

// ---------------------------------------------------------------------------
// Exact integer arithmetic primitives: gcd, modular inverse, factorization,
// divisor count d(n), Euler totient phi(n), unit-group enumeration.
// All functions are pure and total over their stated domains; violations
// raise std::domain_error rather than returning a wrong value.
// ---------------------------------------------------------------------------

#include <cstdint>
#include <utility>
#include <vector>

namespace avg {

using i64 = std::int64_t;

// Prime factorization n = prod p_i^e_i with p_1 < p_2 < ... (trial division;
// intended for desk-scale inputs, n <= ~1e14).
struct Factorization {
    i64 n = 1;
    std::vector<std::pair<i64, int>> factors;  // (prime, exponent), ascending
};

i64 gcd(i64 a, i64 b);

// Multiplicative inverse of x mod c, in [0, c).  c = 1 returns 0 (the unique
// residue).  Throws std::domain_error if gcd(x, c) != 1 or c < 1.
i64 mod_inverse(i64 x, i64 c);

// Trial-division factorization (2, 3, then a 2-3 wheel).  Requires n >= 1.
Factorization factorize(i64 n);

// d(n): number of positive divisors.  Requires n >= 1.
i64 divisor_count(i64 n);
i64 divisor_count(const Factorization& f);

// phi(n): number of units mod n.  Requires n >= 1.
i64 euler_phi(i64 n);
i64 euler_phi(const Factorization& f);

// Ascending list of x in [1, c] with gcd(x, c) = 1.  units_mod(1) = [1]
// (the single residue class mod 1 is a unit).  Requires c >= 1.
std::vector<i64> units_mod(i64 c);

// Sieve of d(1), ..., d(B) computed by divisor marking.  Requires B >= 1.
// Entry [0] is unused (set to 0) so that table[k] = d(k).
std::vector<std::uint16_t> divisor_table(i64 B);

}  // namespace avg
