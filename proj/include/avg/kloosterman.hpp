#pragma once

// ---------------------------------------------------------------------------
// Exact Kloosterman sums S(m,n;c) = sum_{x in (Z/c)^*} cos(2 pi (m x + n xbar)/c),
// the Weil bound, and the character-twisted exponentially weighted sums
//
//   S(c) = sum_{n>0} chi(n) e^{-2 pi n / A} S(m,n;c),      A = sigma N log N,
//
// computed two independent ways: truncated n-series (with a rigorous Weil x
// geometric tail) and the exact geometric-series closed form over residues
//
//   S(c) = sum_{x in (Z/c)^*} e(m x / c) (1 - e^{q eps_y})^{-1}
//                     sum_{alpha=1}^{q} chi(alpha) e^{alpha eps_y},
//   eps_y = 2 pi (-1/A + i y/c),   y = xbar,
//
// whose denominator is evaluated stably through the signed residue
// f(y) = q y mod c in (-c/2, c/2] (nonzero whenever N does not divide q).
//
// Caching: per-modulus unit/inverse/cosine tables in one LRU; normalized
// (c, min, max) value keys in a sharded LRU so the m <-> n symmetry is
// bit-identical by construction.
// ---------------------------------------------------------------------------

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "avg/arith.hpp"
#include "avg/params.hpp"

namespace avg {

// S(m,n;c).  Real by the x <-> -x pairing; computed by compensated
// accumulation of table cosines, absolute error <= phi(c) * 1e-14.
// Requires 1 <= c <= 2^22 (per-modulus table guard); any integers m, n.
double kloosterman_sum(i64 m, i64 n, i64 c);

// Residue row: row[r] = S(m, r; c) for r = 0..c-1, one pass over units with
// per-entry compensated accumulation (cost phi(c) * c adds).  Rows are
// LRU-cached by (m mod c, c); the n-loops of the trace-formula engine read
// S(m, n mod c; c) straight from the row.
std::shared_ptr<const std::vector<double>> kloosterman_row(i64 m, i64 c);

// Weil bound (m,n,c)^(1/2) d(c) c^(1/2), evaluated as d(c) * sqrt(g*c) with
// the integer product g*c formed exactly.  Requires m, n >= 1, c >= 1.
double weil_bound(i64 m, i64 n, i64 c);

// sup over n >= 1 of the Weil bound at fixed (m, c): gcd(m,c)^(1/2) d(c) c^(1/2).
double weil_bound_sup(i64 m, i64 c);

// One twisted sum value; method records which evaluation produced it.
struct TwistedSumValue {
    i64 c = 0;
    std::complex<double> value{0.0, 0.0};
    enum class Method { direct, closed_form } method = Method::direct;
    double tail_radius = 0.0;  // 0 for closed_form (exact resummation)
};

// Truncated n-series: sum_{n=1}^{n_max} chi(n) e^{-2 pi n/A} S(m,n;c), with
// tail_radius = weil_bound_sup(m,c) * e^{-2 pi (n_max+1)/A} / (1 - e^{-2 pi/A}).
// Requires c a positive multiple of N; n_max >= 0 (0 = empty sum, full tail).
TwistedSumValue twisted_sum_direct(i64 c, const AveragingParams& params, i64 n_max);

// Exact resummation over residues (formula above); tail_radius = 0.
// Requires c a positive multiple of N and N not dividing q (guarantees a
// nonzero denominator); |1 - e^{q eps_y}| < 1e-15 raises an error.
TwistedSumValue twisted_sum_closed(i64 c, const AveragingParams& params);

// The two closed-form envelopes for |S(c)|:
//   small range: (2/pi) phi(q) c log c
//   large range: (1/6) A m^(1/2) c^(1/2) d(c)
// Requires c > 400 (validity window of the small-range derivation) and
// c = 0 mod N.
std::pair<double, double> twisted_sum_bounds(i64 c, const AveragingParams& params);

}  // namespace avg
