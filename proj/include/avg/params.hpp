#pragma once

// ---------------------------------------------------------------------------
// Parameter bundles shared by the trace-formula engine and the bound
// certificates.
//
// AveragingParams carries (N, m, chi, sigma) with the derived averaging
// length A = sigma * N * ln N (natural log throughout: the tail inequalities
// such as (1 - e^{-2 pi/A})^{-1} <= A/6 are only valid with ln) and
// M = q^2 N.  Theorem mode imposes the hypothesis window
//   N >= 400,  N does not divide q,  q^2/(2 pi) <= sigma <= N q / ln N,
// under which A >= 300.
//
// TruncationPolicy fixes the shared finite index window (n <= n_max, b <=
// b_max with c = N b).  In `shared` mode every sum of the decomposition
// identity is evaluated on the identical window, making the identity exact
// up to floating-point rounding.  `adaptive` keeps that window for the
// identity but lets the certified E^(3) evaluation extend its b-range.
// ---------------------------------------------------------------------------

#include <cmath>
#include <complex>
#include <string>

#include "avg/characters.hpp"

namespace avg {

struct AveragingParams {
    i64 N = 400;              // level
    i64 m = 1;                // coefficient index
    DirichletCharacter chi;   // character mod q
    double sigma = 1.0;

    i64 q() const { return chi.modulus(); }
    double A() const { return sigma * static_cast<double>(N) * std::log(static_cast<double>(N)); }
    i64 M() const { return q() * q() * N; }

    // Basic validity (any mode): N >= 1, m >= 1, sigma > 0.
    void validate_basic() const;

    // Theorem-mode hypothesis window; returns false and names the violated
    // hypothesis in *why (if non-null).
    bool theorem_mode_ok(std::string* why = nullptr) const;
    // Throws std::domain_error naming the hypothesis on violation.
    void validate_theorem_mode() const;
};

struct TruncationPolicy {
    enum class Mode { shared, adaptive };
    i64 n_max = 0;          // 0 = derive from rel_tol: smallest n with e^{-2 pi n/A} < rel_tol (and >= m)
    i64 b_max = 0;          // 0 = mode default (4 theorem, 8 scan, 64 inner product)
    Mode mode = Mode::shared;
    double rel_tol = 1e-18;
    int workers = 1;

    i64 resolve_n_max(const AveragingParams& p) const;
    i64 resolve_b_max(i64 fallback) const { return b_max > 0 ? b_max : fallback; }
};

// A computed sum plus a rigorous radius covering everything discarded: the
// exact infinite-sum value lies within tail_radius of value.
struct SumWithTail {
    std::complex<double> value{0.0, 0.0};
    double tail_radius = 0.0;
};

}  // namespace avg
