#pragma once

// ---------------------------------------------------------------------------
// Dirichlet characters mod q: construction, enumeration, evaluation, and
// conductor computation.
//
// The unit group (Z/q)^* is decomposed by CRT into cyclic components:
//   * odd p^k: cyclic of order phi(p^k), generated by a primitive root;
//   * 2^1: trivial;  2^2: cyclic of order 2 (gen 3);
//   * 2^k, k >= 3: {+-1} x <5>, orders 2 and 2^(k-2).
// A character is an exponent tuple (t_1, ..., t_r) with 0 <= t_j < d_j; its
// value at a unit n with discrete logs (e_1, ..., e_r) is
//   chi(n) = e( sum_j t_j e_j / d_j )  =  e( num / D ),   D = phi(q),
// stored as the exact integer numerator num in [0, D) (sentinel -1 for
// chi(n) = 0).  Conversion to floating complex happens only at evaluation,
// so long twisted sums accumulate no phase error.
//
// Characters are addressed by a stable lexicographic index over the exponent
// tuple (first component most significant); index 0 is principal.
// ---------------------------------------------------------------------------

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "avg/arith.hpp"

namespace avg {

class DirichletCharacter {
  public:
    // Character of the given lexicographic index mod q.  Requires q >= 1,
    // q <= 1e6, 0 <= index < phi(q).
    static DirichletCharacter make(i64 q, i64 index);

    // All phi(q) characters mod q in index order (index 0 = principal).
    // Guards: q <= 1e6 and q*phi(q) <= 2^27 (table memory).
    static std::vector<DirichletCharacter> enumerate(i64 q);

    i64 modulus() const { return q_; }
    i64 index() const { return index_; }
    // Smallest q* | q such that the character is induced by one mod q*.
    i64 conductor() const { return conductor_; }
    bool is_principal() const { return index_ == 0; }
    // True when every value is real (0, 1, or -1).
    bool is_real() const { return real_; }

    // chi(n) for any integer n (reduced mod q).
    std::complex<double> operator()(i64 n) const;

    // Exact value exponent: chi(n) = e(num/D) with D = phi(q); -1 when
    // chi(n) = 0.  Exposed for exact-comparison tests and serialization.
    i64 value_exponent_num(i64 n) const;
    i64 value_exponent_den() const { return D_; }

  private:
    DirichletCharacter() = default;

    i64 q_ = 1;
    i64 index_ = 0;
    i64 D_ = 1;           // phi(q), common exponent denominator
    i64 conductor_ = 1;
    bool real_ = true;
    // num_table_[n] for n in [0, q): numerator of the exponent, or -1
    std::shared_ptr<const std::vector<std::int32_t>> num_table_;
};

// Convenience wrapper matching the library-wide free-function style.
std::vector<DirichletCharacter> enumerate_characters(i64 q);

}  // namespace avg
