#pragma once

// ---------------------------------------------------------------------------
// Geometric side of the Petersson trace formula.
//
// The inner product of two coefficient functionals is *defined* here through
// the geometric expansion
//
//   (a_m, a_n) = 4 pi sqrt(mn) delta_mn
//                - 8 pi^2 sqrt(mn) sum_{N | c} c^-1 S(m,n;c) J_1(4 pi sqrt(mn)/c),
//
// and the exponentially averaged functional through
//
//   (a_m, A(x)) = sum_{n>0} chi(n) n^-1 e^{-2 pi n/x} (a_m, a_n),  x = A.
//
// Folding the two gives  (a_m, A) = main_term - G  with the double sum
//
//   G = 8 pi^2 sqrt(m) sum_{n>0} chi(n) e^{-2 pi n/A} n^{-1/2}
//         sum_{b>=1} (Nb)^{-1} S(m,n;Nb) J_1(4 pi sqrt(mn)/Nb).
//
// geometric_sums() evaluates G over the policy window (n <= n_max, b <= b_max)
// together with its split into the four error pieces, all on the *same* index
// set so that  G = E1 + E2 + (E3up - E3)  is an exact rearrangement:
//
//   per (n, b), c = Nb, with the linear Bessel term u = 16 pi^3 m c^-2 base:
//     n >= thresh(b) = ceil(c^2 / 4 pi^2 m)   (i.e. c <= 2 pi sqrt(mn)):
//         E1 += full term,  E3 += u
//     n <  thresh(b):                          E2 += full term - u
//   E3up (the all-n linear-term sum) accumulates u unconditionally.
//
// Every tail_radius is a rigorous envelope bound on the discarded terms,
// using |J_1(t)| <= min(1, t/2), |S(m,n;c)| <= min(phi(c), d(c) sqrt(gc)),
// and the divisor-sum tail  sum_{b>B} d(Nb) (Nb)^{-s} <= N^-s d(N) R_s(B),
// R_s(B) = zeta(s)^2 - sum_{b<=B} d(b) b^-s  (upper zeta enclosure endpoint).
// ---------------------------------------------------------------------------

#include <complex>

#include "avg/arith.hpp"
#include "avg/params.hpp"

namespace avg {

// The fused window evaluation of G and its pieces.  E3up here is the direct
// double sum over the shared window (the identity partner); the certified
// closed-form evaluation lives in the bounds module.
struct GeometricSums {
    SumWithTail G;     // full geometric correction; (a_m, A) = main - G
    SumWithTail E1;    // c <= 2 pi sqrt(mn) range, full Bessel factor
    SumWithTail E2;    // Bessel remainder J_1(t) - t/2 on c > 2 pi sqrt(mn)
    SumWithTail E3;    // linear term restricted to c <= 2 pi sqrt(mn)
    SumWithTail E3up;  // linear term over the whole window (direct form)
    i64 n_max = 0;     // resolved window actually used
    i64 b_max = 0;
    // true if n_max < ceil(N^2 / 4 pi^2 m): the E1/E3 support starts beyond
    // the window, so their computed values are exactly 0 by construction
    bool zero_coverage = false;
};

GeometricSums geometric_sums(const AveragingParams& params, const TruncationPolicy& policy);

// (a_m, a_n) via the c-sum over b <= b_max (default 64), with the
// divisor-tail radius 16 pi^3 m n sqrt(gcd(m,n)) N^{-3/2} d(N) R_{3/2}(b_max).
SumWithTail inner_product(i64 m, i64 n, i64 N, const TruncationPolicy& policy);

// Closed-form envelope for |(a_m,a_n) - 4 pi sqrt(mn) delta_mn|:
//   8 zeta(3/2)^2 pi^2 sqrt(gcd(m,n)) m n N^{-3/2} d(N)
// using the upper endpoint of the zeta(3/2) enclosure.
double inner_product_bound(i64 m, i64 n, i64 N);

// 4 pi chi(m) e^{-2 pi m / A}
std::complex<double> main_term(const AveragingParams& params);

// main_term - G over the policy window; tail_radius = G's tail.
SumWithTail approx_average(const AveragingParams& params, const TruncationPolicy& policy);

// Closed-form bound on the discrepancy functional |(a_m, B(A))|:
//   30 (400/399)^3 e^{2 pi} q^2 m^{3/2} N^{-1/2} d(N) N^{-2 pi sigma / q^2}.
// Requires N >= 400 and sigma > q^2 / (2 pi) (hard hypotheses).
double b_functional_bound(const AveragingParams& params);

}  // namespace avg
