#pragma once

// ---------------------------------------------------------------------------
// Floating-point special functions with controlled error:
//
//   bessel_j1          — J1(x) to absolute error <= 1e-12 on [0, 1e6]
//   bessel_j1_oracle   — independent quadrature evaluation of the integral
//                        representation (1/pi) int_0^pi cos(theta - x sin theta)
//   zeta_enclosure     — rigorous two-sided bracket of zeta(s), s > 1
//   expm1_complex      — e^z - 1 without cancellation near z = 0
//   one_minus_exp_ratio— |1 - e^z| / |z|
//
// plus process-wide memoized enclosures of the zeta constants the certified
// bounds consume.  Upper endpoints feed the bounds so overestimates stay
// rigorous.
// ---------------------------------------------------------------------------

#include <complex>

namespace avg {

// Two-sided bracket lower <= value <= upper.
struct Enclosure {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
    double mid() const { return lower + 0.5 * (upper - lower); }
    bool contains(double x) const { return lower <= x && x <= upper; }
};

// J1(x).  Power series (long double, compensated) for x <= 18; Hankel
// asymptotic expansion with first-omitted-term remainder control above.
// Requires 0 <= x <= 1e6.
double bessel_j1(double x);

// (1/pi) * int_0^pi cos(theta - x*sin(theta)) dtheta by adaptive Simpson
// quadrature with Richardson acceptance, absolute error <= tol.  Independent
// of bessel_j1; used as its cross-check oracle.  Requires x >= 0, tol > 0.
double bessel_j1_oracle(double x, double tol);

// Bracket of zeta(s) of width <= tol by partial sum + integral-test tail:
//   sum_{n<=B} n^-s + (B+1)^(1-s)/(s-1)  <=  zeta(s)
//   zeta(s)  <=  sum_{n<=B} n^-s + B^(1-s)/(s-1)
// endpoints padded outward for floating-point honesty.  Requires s > 1 and
// tol >= 1e-13 (below that double precision cannot certify the width).
Enclosure zeta_enclosure(double s, double tol);

// e^z - 1.  Taylor evaluation for |z| < 1e-3 (avoids cancellation), exact
// expm1/cos decomposition otherwise.
std::complex<double> expm1_complex(std::complex<double> z);

// |1 - e^z| / |z|.  Requires z != 0.
double one_minus_exp_ratio(std::complex<double> z);

// Memoized enclosures at tolerance 1e-12, initialized on first use
// (thread-safe function-local statics).
const Enclosure& zeta_3_2();
const Enclosure& zeta_7_2();
const Enclosure& zeta_3();

}  // namespace avg
