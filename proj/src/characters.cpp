#include "avg/characters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace avg {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

i64 pow_mod(i64 base, i64 exp, i64 mod) {
    if (mod == 1) return 0;
    i64 result = 1;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) result = result * base % mod;  // mod <= 1e6, no overflow
        base = base * base % mod;
        exp >>= 1;
    }
    return result;
}

// Smallest primitive root mod an odd prime p (exists; checked by verifying
// g^((p-1)/r) != 1 for every prime r | p-1).
i64 primitive_root_mod_p(i64 p) {
    if (p == 2) return 1;
    Factorization f = factorize(p - 1);
    for (i64 g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [r, e] : f.factors)
            if (pow_mod(g, (p - 1) / r, p) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw std::logic_error("primitive_root_mod_p: no root found (not prime?)");
}

// Primitive root mod p^k for odd p: a primitive root g mod p works mod p^k
// unless g^(p-1) = 1 mod p^2, in which case g + p does.
i64 primitive_root_mod_pk(i64 p, i64 pk) {
    i64 g = primitive_root_mod_p(p);
    if (pk == p) return g;
    if (pow_mod(g, p - 1, p * p) == 1) g += p;
    return g;
}

// One cyclic component of (Z/q)^*: a generator (lifted to mod q via CRT so
// it is = 1 modulo every other prime-power factor) and its order.
struct Component {
    i64 gen;    // generator mod q
    i64 order;  // component order d_j
};

struct GroupData {
    i64 q = 1;
    i64 D = 1;  // phi(q)
    std::vector<Component> components;
    // exps[j][n] = discrete log of unit n in component j (garbage off units)
    std::vector<std::vector<std::int32_t>> exps;
    std::vector<bool> is_unit;  // gcd(n, q) = 1, indexed by n in [0, q)
};

// CRT lift: value v mod p^k, 1 mod q/p^k.
i64 crt_lift(i64 v, i64 pk, i64 q) {
    i64 rest = q / pk;
    if (rest == 1) return ((v % q) + q) % q;
    // x = v + pk * t with x = 1 mod rest  =>  t = (1 - v) * inv(pk) mod rest
    i64 inv = mod_inverse(pk % rest, rest);
    i64 t = ((1 - v) % rest * inv % rest + rest) % rest;
    i64 x = ((v % q) + q) % q;
    x = (x + (pk % q) * (t % q)) % q;
    return x;
}

GroupData build_group(i64 q) {
    GroupData g;
    g.q = q;
    Factorization fq = factorize(q);
    g.D = euler_phi(fq);

    // components, 2-part first then odd primes ascending (factors are sorted)
    for (auto [p, e] : fq.factors) {
        i64 pk = 1;
        for (int i = 0; i < e; ++i) pk *= p;
        if (p == 2) {
            if (e == 1) continue;  // (Z/2)^* trivial
            if (e == 2) {
                g.components.push_back({crt_lift(3, pk, q), 2});
            } else {
                g.components.push_back({crt_lift(pk - 1, pk, q), 2});       // -1
                g.components.push_back({crt_lift(5, pk, q), pk / 4});        // <5>, order 2^(e-2)
            }
        } else {
            i64 root = primitive_root_mod_pk(p, pk);
            g.components.push_back({crt_lift(root, pk, q), euler_phi(pk)});
        }
    }

    g.is_unit.assign(static_cast<std::size_t>(q), false);
    for (i64 n = 0; n < q; ++n) g.is_unit[static_cast<std::size_t>(n)] = (gcd(n, q) == 1);
    if (q == 1) g.is_unit[0] = true;

    // discrete logs: walk the whole group as a mixed-radix odometer over the
    // component exponents, multiplying by one generator per step
    std::size_t r = g.components.size();
    g.exps.assign(r, std::vector<std::int32_t>(static_cast<std::size_t>(q), 0));
    std::vector<i64> e(r, 0);
    i64 val = 1 % q;
    for (;;) {
        for (std::size_t j = 0; j < r; ++j)
            g.exps[j][static_cast<std::size_t>(val)] = static_cast<std::int32_t>(e[j]);
        // increment odometer (last component fastest)
        std::size_t j = r;
        while (j > 0) {
            --j;
            ++e[j];
            val = val * (g.components[j].gen % q) % q;
            if (e[j] < g.components[j].order) break;
            // wrap: multiply gen once more per remaining step is wrong; we
            // instead note gen^order = 1 mod q, so val is already back in
            // sync after the final multiply of the cycle
            e[j] = 0;
            if (j == 0) return g;
        }
        if (r == 0) return g;  // trivial group: only the identity tuple
    }
}

// Group cache: small, keyed by q.  Groups are immutable after construction.
std::shared_ptr<const GroupData> get_group(i64 q) {
    // build fresh each call is wasteful for enumerate(); callers that need
    // many characters share through enumerate(), which builds once
    return std::make_shared<const GroupData>(build_group(q));
}

}  // namespace

// ---------------------------------------------------------------------------
// Character construction
// ---------------------------------------------------------------------------

namespace {

struct CharBuild {
    i64 D;
    bool real_;
    std::shared_ptr<const std::vector<std::int32_t>> table;
    i64 conductor;
};

// Assemble the exact numerator table for exponent tuple t over group g.
CharBuild build_character(const GroupData& g, const std::vector<i64>& t) {
    auto table = std::make_shared<std::vector<std::int32_t>>(
        static_cast<std::size_t>(g.q), -1);
    i64 D = g.D;
    bool real = true;
    for (i64 n = 0; n < g.q; ++n) {
        if (!g.is_unit[static_cast<std::size_t>(n)]) continue;
        i64 num = 0;
        for (std::size_t j = 0; j < g.components.size(); ++j) {
            i64 ej = g.exps[j][static_cast<std::size_t>(n)];
            num = (num + t[j] * ej % D * (D / g.components[j].order)) % D;
        }
        (*table)[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(num);
        if (num != 0 && 2 * num != D) real = false;
    }

    // conductor: smallest divisor d of q with chi(n) = 1 for every unit
    // n = 1 (mod d)
    Factorization fq = factorize(g.q);
    std::vector<i64> divisors{1};
    for (auto [p, e] : fq.factors) {
        std::size_t sz = divisors.size();
        i64 pe = 1;
        for (int i = 0; i < e; ++i) {
            pe *= p;
            for (std::size_t k = 0; k < sz; ++k) divisors.push_back(divisors[k] * pe);
        }
    }
    std::sort(divisors.begin(), divisors.end());
    i64 conductor = g.q;
    for (i64 d : divisors) {
        bool induced = true;
        for (i64 n = 1; n <= g.q && induced; n += d) {
            i64 nr = n % g.q;
            if (!g.is_unit[static_cast<std::size_t>(nr)]) continue;
            if ((*table)[static_cast<std::size_t>(nr)] != 0) induced = false;
        }
        if (induced) { conductor = d; break; }
    }
    return {D, real, std::move(table), conductor};
}

std::vector<i64> index_to_tuple(const GroupData& g, i64 index) {
    std::vector<i64> t(g.components.size(), 0);
    for (std::size_t j = g.components.size(); j-- > 0;) {
        t[j] = index % g.components[j].order;
        index /= g.components[j].order;
    }
    if (index != 0) throw std::domain_error("character index out of range");
    return t;
}

}  // namespace

DirichletCharacter DirichletCharacter::make(i64 q, i64 index) {
    if (q < 1) throw std::domain_error("DirichletCharacter: modulus must be >= 1");
    if (q > 1000000) throw std::domain_error("DirichletCharacter: modulus exceeds 1e6 guard");
    auto group = get_group(q);
    if (index < 0 || index >= group->D)
        throw std::domain_error("DirichletCharacter: index must lie in [0, phi(q))");
    CharBuild cb = build_character(*group, index_to_tuple(*group, index));
    DirichletCharacter chi;
    chi.q_ = q;
    chi.index_ = index;
    chi.D_ = cb.D;
    chi.conductor_ = cb.conductor;
    chi.real_ = cb.real_;
    chi.num_table_ = std::move(cb.table);
    return chi;
}

std::vector<DirichletCharacter> DirichletCharacter::enumerate(i64 q) {
    if (q < 1) throw std::domain_error("enumerate_characters: modulus must be >= 1");
    if (q > 1000000) throw std::domain_error("enumerate_characters: modulus exceeds 1e6 guard");
    i64 phi = euler_phi(q);
    if (q * phi > (i64{1} << 27))
        throw std::domain_error(
            "enumerate_characters: q * phi(q) exceeds the 2^27 table-memory guard; "
            "construct single characters with make(q, index) instead");
    GroupData group = build_group(q);
    std::vector<DirichletCharacter> out;
    out.reserve(static_cast<std::size_t>(phi));
    for (i64 idx = 0; idx < phi; ++idx) {
        CharBuild cb = build_character(group, index_to_tuple(group, idx));
        DirichletCharacter chi;
        chi.q_ = q;
        chi.index_ = idx;
        chi.D_ = cb.D;
        chi.conductor_ = cb.conductor;
        chi.real_ = cb.real_;
        chi.num_table_ = std::move(cb.table);
        out.push_back(std::move(chi));
    }
    return out;
}

std::vector<DirichletCharacter> enumerate_characters(i64 q) {
    return DirichletCharacter::enumerate(q);
}

i64 DirichletCharacter::value_exponent_num(i64 n) const {
    i64 r = n % q_;
    if (r < 0) r += q_;
    return (*num_table_)[static_cast<std::size_t>(r)];
}

std::complex<double> DirichletCharacter::operator()(i64 n) const {
    i64 num = value_exponent_num(n);
    if (num < 0) return {0.0, 0.0};
    if (num == 0) return {1.0, 0.0};
    if (2 * num == D_) return {-1.0, 0.0};
    double theta = kTwoPi * static_cast<double>(num) / static_cast<double>(D_);
    return {std::cos(theta), std::sin(theta)};
}

}  // namespace avg
