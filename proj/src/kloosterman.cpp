#include "avg/kloosterman.hpp"

#include <cmath>
#include <cstddef>
#include <list>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "avg/special.hpp"
#include "avg/summation.hpp"

namespace avg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
constexpr i64 kMaxModulus = i64{1} << 22;

// ---------------------------------------------------------------------------
// Minimal LRU cache: list for recency + map into it.  Values are shared_ptr
// (or small PODs) so eviction never invalidates data a reader already holds.
// ---------------------------------------------------------------------------
template <typename K, typename V, typename Hash>
class LruCache {
  public:
    LruCache(std::size_t max_entries, std::size_t max_weight)
        : max_entries_(max_entries), max_weight_(max_weight) {}

    bool get(const K& key, V* out) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) return false;
        order_.splice(order_.begin(), order_, it->second);
        *out = it->second->value;
        return true;
    }

    void put(const K& key, V value, std::size_t weight) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second);
            return;  // keep the first insert; duplicates are identical
        }
        order_.push_front(Node{key, std::move(value), weight});
        index_[key] = order_.begin();
        weight_ += weight;
        while ((index_.size() > max_entries_ || weight_ > max_weight_) && index_.size() > 1) {
            Node& victim = order_.back();
            weight_ -= victim.weight;
            index_.erase(victim.key);
            order_.pop_back();
        }
    }

  private:
    struct Node {
        K key;
        V value;
        std::size_t weight;
    };
    std::mutex mu_;
    std::list<Node> order_;
    std::unordered_map<K, typename std::list<Node>::iterator, Hash> index_;
    std::size_t max_entries_, max_weight_, weight_ = 0;
};

// ---------------------------------------------------------------------------
// Per-modulus tables: units, inverses, cos/sin of 2 pi k / c.
// ---------------------------------------------------------------------------
struct ModulusTables {
    i64 c = 1;
    std::vector<std::int32_t> units;  // ascending units mod c (1 <= x <= c)
    std::vector<std::int32_t> inv;    // inv[x] for unit x, -1 otherwise
    std::vector<double> cos_tab;      // cos(2 pi k / c), k in [0, c)
    std::vector<double> sin_tab;
};

struct I64Hash {
    std::size_t operator()(i64 v) const {
        return std::hash<std::uint64_t>()(static_cast<std::uint64_t>(v) * 0x9e3779b97f4a7c15ull);
    }
};

std::shared_ptr<const ModulusTables> get_tables(i64 c) {
    if (c < 1) throw std::domain_error("kloosterman: modulus must be >= 1");
    if (c > kMaxModulus)
        throw std::domain_error("kloosterman: modulus exceeds the 2^22 table guard");
    using Ptr = std::shared_ptr<const ModulusTables>;
    static LruCache<i64, Ptr, I64Hash> cache(1024, std::size_t{1} << 25);  // ~256 MB of doubles

    Ptr hit;
    if (cache.get(c, &hit)) return hit;

    auto t = std::make_shared<ModulusTables>();
    t->c = c;
    t->inv.assign(static_cast<std::size_t>(c), -1);
    for (i64 x = 1; x <= c; ++x) {
        if (gcd(x, c) != 1) continue;
        t->units.push_back(static_cast<std::int32_t>(x));
    }
    // batch inverses would need products; extended Euclid per unit is cheap
    for (std::int32_t x : t->units) {
        i64 xr = x % c;  // x = c only when c = 1 (unit list holds x in [1, c])
        t->inv[static_cast<std::size_t>(xr)] = static_cast<std::int32_t>(mod_inverse(xr, c));
    }
    t->cos_tab.resize(static_cast<std::size_t>(c));
    t->sin_tab.resize(static_cast<std::size_t>(c));
    for (i64 k = 0; k < c; ++k) {
        double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(c);
        t->cos_tab[static_cast<std::size_t>(k)] = std::cos(theta);
        t->sin_tab[static_cast<std::size_t>(k)] = std::sin(theta);
    }
    cache.put(c, t, static_cast<std::size_t>(4 * c));
    return t;
}

// value-cache key, normalized so S(m,n;c) = S(n,m;c) is bit-identical
struct VKey {
    i64 c, lo, hi;
    bool operator==(const VKey& o) const { return c == o.c && lo == o.lo && hi == o.hi; }
};
struct VKeyHash {
    std::size_t operator()(const VKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.c) * 0x9e3779b97f4a7c15ull;
        h ^= static_cast<std::uint64_t>(k.lo) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.hi) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

constexpr int kValueShards = 64;
constexpr std::size_t kValueCapacity = std::size_t{1} << 20;

LruCache<VKey, double, VKeyHash>& value_shard(const VKey& k) {
    static LruCache<VKey, double, VKeyHash>* shards[kValueShards];
    static std::once_flag once;
    std::call_once(once, [] {
        for (int i = 0; i < kValueShards; ++i)
            shards[i] = new LruCache<VKey, double, VKeyHash>(kValueCapacity / kValueShards,
                                                             std::size_t{1} << 40);
    });
    return *shards[VKeyHash{}(k) % kValueShards];
}

i64 reduce_mod(i64 v, i64 c) {
    i64 r = v % c;
    return r < 0 ? r + c : r;
}

}  // namespace

// ---------------------------------------------------------------------------
// S(m,n;c)
// ---------------------------------------------------------------------------
double kloosterman_sum(i64 m, i64 n, i64 c) {
    auto tables = get_tables(c);  // validates c
    i64 a = reduce_mod(m, c), b = reduce_mod(n, c);
    if (a > b) std::swap(a, b);  // S(m,n;c) = S(n,m;c): canonical order
    VKey key{c, a, b};
    auto& shard = value_shard(key);
    double cached;
    if (shard.get(key, &cached)) return cached;

    KahanSum acc;
    const auto& cos_tab = tables->cos_tab;
    const auto& inv = tables->inv;
    for (std::int32_t x : tables->units) {
        i64 xr = x % c;
        i64 k = (a * xr + b * static_cast<i64>(inv[static_cast<std::size_t>(xr)])) % c;
        acc.add(cos_tab[static_cast<std::size_t>(k)]);
    }
    double v = acc.value();
    shard.put(key, v, 1);
    return v;
}

// ---------------------------------------------------------------------------
// Residue row S(m, . ; c)
// ---------------------------------------------------------------------------
std::shared_ptr<const std::vector<double>> kloosterman_row(i64 m, i64 c) {
    auto tables = get_tables(c);
    i64 a = reduce_mod(m, c);

    struct RKey {
        i64 c, a;
        bool operator==(const RKey& o) const { return c == o.c && a == o.a; }
    };
    struct RKeyHash {
        std::size_t operator()(const RKey& k) const {
            return VKeyHash{}(VKey{k.c, k.a, 0});
        }
    };
    using Row = std::shared_ptr<const std::vector<double>>;
    static LruCache<RKey, Row, RKeyHash> cache(512, std::size_t{1} << 23);  // ~64 MB

    RKey key{c, a};
    Row hit;
    if (cache.get(key, &hit)) return hit;

    std::vector<double> sum(static_cast<std::size_t>(c), 0.0);
    std::vector<double> comp(static_cast<std::size_t>(c), 0.0);
    const auto& cos_tab = tables->cos_tab;
    const auto& inv = tables->inv;
    for (std::int32_t x : tables->units) {
        i64 xr = x % c;
        i64 y = inv[static_cast<std::size_t>(xr)];
        i64 idx = (a * xr) % c;  // angle index of (m x + r y)/c at r = 0
        for (i64 r = 0; r < c; ++r) {
            double v = cos_tab[static_cast<std::size_t>(idx)];
            double& s = sum[static_cast<std::size_t>(r)];
            double& cc = comp[static_cast<std::size_t>(r)];
            double t = s + v;
            cc += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            s = t;
            idx += y;
            if (idx >= c) idx -= c;
        }
    }
    auto row = std::make_shared<std::vector<double>>(std::move(sum));
    for (i64 r = 0; r < c; ++r)
        (*row)[static_cast<std::size_t>(r)] += comp[static_cast<std::size_t>(r)];
    cache.put(key, row, static_cast<std::size_t>(c));
    return row;
}

// ---------------------------------------------------------------------------
// Weil bound
// ---------------------------------------------------------------------------
double weil_bound(i64 m, i64 n, i64 c) {
    if (m < 1 || n < 1) throw std::domain_error("weil_bound: requires m, n >= 1");
    if (c < 1) throw std::domain_error("weil_bound: requires c >= 1");
    i64 g = gcd(gcd(m, n), c);
    return static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(g * c));
}

double weil_bound_sup(i64 m, i64 c) {
    if (m < 1) throw std::domain_error("weil_bound_sup: requires m >= 1");
    if (c < 1) throw std::domain_error("weil_bound_sup: requires c >= 1");
    i64 g = gcd(m, c);
    return static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(g * c));
}

// ---------------------------------------------------------------------------
// Twisted sums
// ---------------------------------------------------------------------------
namespace {

void check_c_multiple(i64 c, const AveragingParams& params, const char* who) {
    if (c < 1 || c % params.N != 0)
        throw std::domain_error(std::string(who) + ": c must be a positive multiple of the level N");
}

}  // namespace

TwistedSumValue twisted_sum_direct(i64 c, const AveragingParams& params, i64 n_max) {
    params.validate_basic();
    check_c_multiple(c, params, "twisted_sum_direct");
    if (n_max < 0) throw std::domain_error("twisted_sum_direct: n_max must be >= 0");

    const double A = params.A();
    const double r = -kTwoPi / A;
    TwistedSumValue out;
    out.c = c;
    out.method = TwistedSumValue::Method::direct;

    if (n_max > 0) {
        auto row = kloosterman_row(params.m, c);
        KahanSumC acc;
        for (i64 n = 1; n <= n_max; ++n) {
            std::complex<double> chi_n = params.chi(n);
            if (chi_n.real() == 0.0 && chi_n.imag() == 0.0) continue;
            double w = std::exp(r * static_cast<double>(n));
            acc.add(chi_n * (w * (*row)[static_cast<std::size_t>(n % c)]));
        }
        out.value = acc.value();
    }
    // tail: sup_n |S| * sum_{n > n_max} e^{-2 pi n / A} (exact geometric tail)
    double one_minus_x = -std::expm1(r);
    out.tail_radius =
        weil_bound_sup(params.m, c) * std::exp(r * static_cast<double>(n_max + 1)) / one_minus_x;
    return out;
}

TwistedSumValue twisted_sum_closed(i64 c, const AveragingParams& params) {
    params.validate_basic();
    check_c_multiple(c, params, "twisted_sum_closed");
    const i64 q = params.q();
    if (q % params.N == 0)
        throw std::domain_error(
            "twisted_sum_closed: requires the hypothesis that N does not divide q "
            "(otherwise the resummation denominator can vanish)");

    auto tables = get_tables(c);
    const double A = params.A();
    const i64 mr = reduce_mod(params.m, c);
    const i64 qr = reduce_mod(q, c);

    // w_alpha = chi(alpha) e^{-2 pi alpha / A}, alpha = 1..q
    std::vector<std::complex<double>> w_alpha(static_cast<std::size_t>(q) + 1);
    for (i64 alpha = 1; alpha <= q; ++alpha)
        w_alpha[static_cast<std::size_t>(alpha)] =
            params.chi(alpha) * std::exp(-kTwoPi * static_cast<double>(alpha) / A);

    const auto& cos_tab = tables->cos_tab;
    const auto& sin_tab = tables->sin_tab;
    const auto& inv = tables->inv;

    KahanSumC acc;
    for (std::int32_t y32 : tables->units) {
        i64 y = y32 % c;
        i64 x = inv[static_cast<std::size_t>(y)];  // y = xbar <=> x = ybar

        // signed residue f = q y mod c in (-c/2, c/2]; nonzero unless q y = 0 (c)
        i64 t = (qr * y) % c;
        i64 f = 2 * t > c ? t - c : t;

        // denominator 1 - e^w, w = 2 pi (-q/A + i f/c)
        std::complex<double> w(-kTwoPi * static_cast<double>(q) / A,
                               kTwoPi * static_cast<double>(f) / static_cast<double>(c));
        std::complex<double> denom = -expm1_complex(w);
        if (std::abs(denom) < 1e-15)
            throw std::runtime_error("twisted_sum_closed: resummation denominator below 1e-15");

        // T(y) = sum_alpha w_alpha e(alpha y / c)
        std::complex<double> T(0.0, 0.0);
        i64 idx = y;  // alpha * y mod c, walked incrementally
        for (i64 alpha = 1; alpha <= q; ++alpha) {
            const std::complex<double>& wa = w_alpha[static_cast<std::size_t>(alpha)];
            if (wa.real() != 0.0 || wa.imag() != 0.0)
                T += wa * std::complex<double>(cos_tab[static_cast<std::size_t>(idx)],
                                               sin_tab[static_cast<std::size_t>(idx)]);
            idx += y;
            if (idx >= c) idx -= c;
        }

        i64 num_idx = (mr * x) % c;  // e(m x / c)
        std::complex<double> numer(cos_tab[static_cast<std::size_t>(num_idx)],
                                   sin_tab[static_cast<std::size_t>(num_idx)]);
        acc.add(numer * T / denom);
    }

    TwistedSumValue out;
    out.c = c;
    out.method = TwistedSumValue::Method::closed_form;
    out.value = acc.value();
    out.tail_radius = 0.0;
    return out;
}

std::pair<double, double> twisted_sum_bounds(i64 c, const AveragingParams& params) {
    params.validate_basic();
    check_c_multiple(c, params, "twisted_sum_bounds");
    if (c <= 400)
        throw std::domain_error(
            "twisted_sum_bounds: requires c > 400 (validity window of the small-range bound)");
    double cd = static_cast<double>(c);
    double small_range =
        (2.0 / kPi) * static_cast<double>(euler_phi(params.q())) * cd * std::log(cd);
    double large_range = params.A() / 6.0 * std::sqrt(static_cast<double>(params.m)) *
                         std::sqrt(cd) * static_cast<double>(divisor_count(c));
    return {small_range, large_range};
}

}  // namespace avg
