#pragma once

// ---------------------------------------------------------------------------
// Compensated summation utilities.  Two layers:
//
//   KahanSum       — running Kahan–Neumaier accumulator for a single stream;
//   block reduce   — fixed-size blocks summed with Kahan, then combined by a
//                    pairwise tree whose shape depends only on the block
//                    count.  Because the block boundaries are fixed by the
//                    problem size (never by the worker count), the result is
//                    bit-identical no matter how many threads computed the
//                    blocks.
// ---------------------------------------------------------------------------

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace avg {

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;  // running compensation (Neumaier variant)

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct KahanSumC {
    KahanSum re, im;
    void add(std::complex<double> z) { re.add(z.real()); im.add(z.imag()); }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

// Pairwise tree reduction over a vector of partial results.  The tree shape
// is a function of v.size() alone, so the rounding pattern is reproducible.
template <typename T>
T pairwise_reduce(std::vector<T> v) {
    if (v.empty()) return T{};
    std::size_t n = v.size();
    while (n > 1) {
        std::size_t h = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) v[h++] = v[i] + v[i + 1];
        if (n % 2 == 1) v[h++] = v[n - 1];
        n = h;
    }
    return v[0];
}

}  // namespace avg
