// ---------------------------------------------------------------------------
// Exact integer arithmetic: every multiplicative function is checked against
// a from-scratch brute-force oracle, plus algebraic laws (multiplicativity
// on coprime arguments) on a seeded random sample.
// ---------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>
#include <stdexcept>

#include "avg/arith.hpp"

using namespace avg;

namespace {

i64 divisor_count_brute(i64 n) {
    i64 d = 0;
    for (i64 k = 1; k <= n; ++k)
        if (n % k == 0) ++d;
    return d;
}

i64 euler_phi_brute(i64 n) {
    i64 phi = 0;
    for (i64 k = 1; k <= n; ++k)
        if (std::gcd(k, n) == 1) ++phi;
    return phi;
}

}  // namespace

TEST_CASE("gcd basics") {
    CHECK_EQ(gcd(0, 5), 5);
    CHECK_EQ(gcd(12, 18), 6);
    CHECK_EQ(gcd(35, 64), 1);
    CHECK_EQ(gcd(400, 1000), 200);
}

TEST_CASE("factorize reconstructs n with ascending prime powers") {
    for (i64 n = 1; n <= 5000; ++n) {
        Factorization f = factorize(n);
        i64 prod = 1;
        i64 last_p = 0;
        for (auto [p, e] : f.factors) {
            CHECK_GT(p, last_p);
            last_p = p;
            CHECK_GE(e, 1);
            for (int i = 0; i < e; ++i) prod *= p;
        }
        CHECK_EQ(prod, n);
        CHECK_EQ(f.n, n);
    }
    Factorization f600 = factorize(600);
    REQUIRE_EQ(f600.factors.size(), 3);
    CHECK_EQ(f600.factors[0], std::pair<i64, int>{2, 3});
    CHECK_EQ(f600.factors[1], std::pair<i64, int>{3, 1});
    CHECK_EQ(f600.factors[2], std::pair<i64, int>{5, 2});
    CHECK_THROWS_AS(factorize(0), std::domain_error);
    CHECK_THROWS_AS(factorize(-7), std::domain_error);
}

TEST_CASE("divisor count and totient match brute force up to 10^4") {
    for (i64 n = 1; n <= 10000; ++n) {
        CHECK_EQ(divisor_count(n), divisor_count_brute(n));
        CHECK_EQ(euler_phi(n), euler_phi_brute(n));
    }
}

TEST_CASE("divisor count and totient: known values") {
    CHECK_EQ(divisor_count(1), 1);
    CHECK_EQ(divisor_count(400), 15);   // 2^4 * 5^2 -> 5 * 3
    CHECK_EQ(divisor_count(800), 18);   // 2^5 * 5^2 -> 6 * 3
    CHECK_EQ(divisor_count(997), 2);    // prime
    CHECK_EQ(euler_phi(1), 1);
    CHECK_EQ(euler_phi(400), 160);
    CHECK_EQ(euler_phi(997), 996);
    CHECK_THROWS_AS(divisor_count(0), std::domain_error);
    CHECK_THROWS_AS(euler_phi(0), std::domain_error);
}

TEST_CASE("multiplicativity on coprime pairs (seeded sample)") {
    std::mt19937 rng(987654321u);
    std::uniform_int_distribution<i64> dist(1, 100000);
    int tested = 0;
    while (tested < 1000) {
        i64 a = dist(rng), b = dist(rng);
        if (std::gcd(a, b) != 1) continue;
        ++tested;
        CHECK_EQ(divisor_count(a * b), divisor_count(a) * divisor_count(b));
        CHECK_EQ(euler_phi(a * b), euler_phi(a) * euler_phi(b));
    }
}

TEST_CASE("modular inverse: round trip over every unit, c <= 500") {
    for (i64 c = 1; c <= 500; ++c) {
        for (i64 x : units_mod(c)) {
            i64 inv = mod_inverse(x, c);
            CHECK_GE(inv, 0);
            CHECK_LT(inv, c == 1 ? 1 : c);
            CHECK_EQ((inv * (x % c)) % c, 1 % c);
        }
    }
    CHECK_EQ(mod_inverse(3, 10), 7);
    CHECK_EQ(mod_inverse(1, 1), 0);
    CHECK_EQ(mod_inverse(-3, 10), 3);  // -3 = 7 mod 10, and 7 * 3 = 21 = 1
    CHECK_THROWS_AS(mod_inverse(2, 4), std::domain_error);
    CHECK_THROWS_AS(mod_inverse(5, 0), std::domain_error);
}

TEST_CASE("unit group enumeration") {
    CHECK_EQ(units_mod(1), std::vector<i64>{1});
    CHECK_EQ(units_mod(12), std::vector<i64>{1, 5, 7, 11});
    for (i64 c = 1; c <= 300; ++c) {
        auto u = units_mod(c);
        CHECK_EQ(static_cast<i64>(u.size()), euler_phi(c));
        for (std::size_t i = 1; i < u.size(); ++i) CHECK_LT(u[i - 1], u[i]);
    }
    CHECK_THROWS_AS(units_mod(0), std::domain_error);
}

TEST_CASE("divisor-count sieve agrees with divisor_count") {
    auto table = divisor_table(10000);
    REQUIRE_EQ(table.size(), 10001);
    CHECK_EQ(table[0], 0);
    for (i64 k = 1; k <= 10000; ++k)
        CHECK_EQ(static_cast<i64>(table[static_cast<std::size_t>(k)]), divisor_count(k));
    CHECK_THROWS_AS(divisor_table(0), std::domain_error);
}
