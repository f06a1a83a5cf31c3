#include "avg/petersson.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "avg/kloosterman.hpp"
#include "avg/parallel.hpp"
#include "avg/special.hpp"
#include "avg/summation.hpp"

namespace avg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kFourPi = 12.5663706143591729539;
constexpr std::size_t kBlockSize = 4096;  // fixed n-block, independent of workers

double pi3() { return kPi * kPi * kPi; }
double pi5() { return pi3() * kPi * kPi; }

// sum_{b<=B} d(b) b^{-s} by direct divisor counting (B is a window size,
// never more than ~1e6)
double divisor_partial_sum(i64 B, double s) {
    KahanSum acc;
    for (i64 b = 1; b <= B; ++b)
        acc.add(static_cast<double>(divisor_count(b)) * std::pow(static_cast<double>(b), -s));
    return acc.value();
}

// Upper bound on sum_{b>B} d(b) b^{-s} for s = 3/2 or 7/2: zeta(s)^2 upper
// endpoint minus the exact partial sum, padded outward.
double divisor_tail_32(i64 B) {
    double z = zeta_3_2().upper;
    double partial = divisor_partial_sum(B, 1.5);
    double r = z * z - partial * (1.0 - 1e-12);
    return r > 0.0 ? r : 0.0;
}

double divisor_tail_72(i64 B) {
    double z = zeta_7_2().upper;
    double partial = divisor_partial_sum(B, 3.5);
    double r = z * z - partial * (1.0 - 1e-12);
    return r > 0.0 ? r : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter bundle methods
// ---------------------------------------------------------------------------
void AveragingParams::validate_basic() const {
    if (N < 1) throw std::domain_error("params: level N must be >= 1");
    if (m < 1) throw std::domain_error("params: coefficient index m must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("params: sigma must be a positive finite real");
    if (q() < 1) throw std::domain_error("params: character modulus must be >= 1");
}

bool AveragingParams::theorem_mode_ok(std::string* why) const {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (N < 400) {
        std::ostringstream os;
        os << "theorem hypothesis violated: N >= 400 (got N = " << N << ")";
        return fail(os.str());
    }
    if (q() % N == 0) {
        std::ostringstream os;
        os << "theorem hypothesis violated: N does not divide q (got N = " << N
           << ", q = " << q() << ")";
        return fail(os.str());
    }
    double qd = static_cast<double>(q());
    double lo = qd * qd / kTwoPi;
    double hi = static_cast<double>(N) * qd / std::log(static_cast<double>(N));
    if (!(sigma >= lo)) {
        std::ostringstream os;
        os << "theorem hypothesis violated: sigma >= q^2/(2 pi) (got sigma = " << sigma
           << ", q^2/(2 pi) = " << lo << ")";
        return fail(os.str());
    }
    if (!(sigma <= hi)) {
        std::ostringstream os;
        os << "theorem hypothesis violated: sigma <= N q / ln N (got sigma = " << sigma
           << ", N q / ln N = " << hi << ")";
        return fail(os.str());
    }
    return true;
}

void AveragingParams::validate_theorem_mode() const {
    validate_basic();
    std::string why;
    if (!theorem_mode_ok(&why)) throw std::domain_error(why);
}

i64 TruncationPolicy::resolve_n_max(const AveragingParams& p) const {
    if (n_max > 0) return n_max;
    if (!(rel_tol > 0.0) || rel_tol >= 1.0)
        throw std::domain_error("policy: rel_tol must lie in (0, 1)");
    double A = p.A();
    // smallest n with e^{-2 pi n / A} < rel_tol
    i64 n = static_cast<i64>(std::floor(A * std::log(1.0 / rel_tol) / kTwoPi)) + 1;
    if (n < p.m) n = p.m;
    if (n > (i64{1} << 31))
        throw std::domain_error("policy: resolved n_max exceeds 2^31; raise rel_tol");
    return n;
}

// ---------------------------------------------------------------------------
// Fused window engine
// ---------------------------------------------------------------------------
namespace {

struct BlockResult {
    std::complex<double> g{0.0, 0.0}, e1{0.0, 0.0}, e2{0.0, 0.0}, e3{0.0, 0.0}, e3up{0.0, 0.0};
    BlockResult operator+(const BlockResult& o) const {
        return {g + o.g, e1 + o.e1, e2 + o.e2, e3 + o.e3, e3up + o.e3up};
    }
};

// chi(n) lookup accelerated by a precomputed root-of-unity table
struct CharTable {
    const DirichletCharacter* chi;
    std::vector<std::complex<double>> roots;
    explicit CharTable(const DirichletCharacter& c) : chi(&c) {
        i64 D = c.value_exponent_den();
        roots.resize(static_cast<std::size_t>(D));
        for (i64 r = 0; r < D; ++r) {
            double t = kTwoPi * static_cast<double>(r) / static_cast<double>(D);
            roots[static_cast<std::size_t>(r)] = {std::cos(t), std::sin(t)};
        }
    }
    std::complex<double> operator()(i64 n) const {
        i64 num = chi->value_exponent_num(n);
        return num < 0 ? std::complex<double>(0.0, 0.0) : roots[static_cast<std::size_t>(num)];
    }
};

}  // namespace

GeometricSums geometric_sums(const AveragingParams& params, const TruncationPolicy& policy) {
    params.validate_basic();
    const i64 N = params.N, m = params.m;
    const double A = params.A();
    const i64 n_max = policy.resolve_n_max(params);
    const i64 b_max = policy.resolve_b_max(4);
    if (b_max < 1 || b_max > (i64{1} << 20))
        throw std::domain_error("policy: b_max must lie in [1, 2^20]");

    // per-b tables: residue rows and the E1/E3 support threshold
    std::vector<std::shared_ptr<const std::vector<double>>> rows;
    std::vector<i64> thresh(static_cast<std::size_t>(b_max) + 1, 0);
    rows.reserve(static_cast<std::size_t>(b_max) + 1);
    rows.push_back(nullptr);
    for (i64 b = 1; b <= b_max; ++b) {
        i64 c = N * b;
        rows.push_back(kloosterman_row(m, c));
        double cd = static_cast<double>(c);
        thresh[static_cast<std::size_t>(b)] =
            static_cast<i64>(std::ceil(cd * cd / (4.0 * kPi * kPi * static_cast<double>(m))));
    }

    const CharTable chi(params.chi);
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    const double gconst = 8.0 * kPi * kPi * sqrt_m;
    const double uconst = 16.0 * pi3() * static_cast<double>(m);
    const double decay = -kTwoPi / A;

    auto block_fn = [&](std::size_t lo, std::size_t hi) -> BlockResult {
        KahanSumC g, e1, e2, e3, e3up;
        for (std::size_t i = lo; i < hi; ++i) {
            i64 n = static_cast<i64>(i) + 1;
            std::complex<double> chi_n = chi(n);
            if (chi_n.real() == 0.0 && chi_n.imag() == 0.0) continue;
            double weight = std::exp(decay * static_cast<double>(n));
            std::complex<double> wchi = chi_n * weight;
            double sqrt_n = std::sqrt(static_cast<double>(n));
            double arg_num = kFourPi * sqrt_m * sqrt_n;
            for (i64 b = 1; b <= b_max; ++b) {
                i64 c = N * b;
                double S = (*rows[static_cast<std::size_t>(b)])[static_cast<std::size_t>(n % c)];
                if (S == 0.0) continue;
                double cd = static_cast<double>(c);
                double gfac = gconst / (sqrt_n * cd) * bessel_j1(arg_num / cd);
                double ufac = uconst / (cd * cd);
                std::complex<double> base = wchi * S;
                std::complex<double> gterm = gfac * base;
                std::complex<double> uterm = ufac * base;
                g.add(gterm);
                e3up.add(uterm);
                if (n >= thresh[static_cast<std::size_t>(b)]) {
                    e1.add(gterm);
                    e3.add(uterm);
                } else {
                    e2.add((gfac - ufac) * base);
                }
            }
        }
        return {g.value(), e1.value(), e2.value(), e3.value(), e3up.value()};
    };

    BlockResult total = parallel_block_sum<BlockResult>(static_cast<std::size_t>(n_max),
                                                        kBlockSize, policy.workers, block_fn);

    // ---- rigorous tails ------------------------------------------------
    const double dN = static_cast<double>(divisor_count(N));
    const double Nd = static_cast<double>(N);
    const double x = std::exp(decay);
    const double one_minus_x = -std::expm1(decay);
    const double md = static_cast<double>(m);

    auto geom_tail = [&](i64 n0) {  // sum_{n > n0} x^n
        return std::exp(decay * static_cast<double>(n0 + 1)) / one_minus_x;
    };
    auto geom_tail_linear = [&](i64 n0) {  // sum_{n > n0} n x^n
        double head = std::exp(decay * static_cast<double>(n0 + 1));
        return head * (static_cast<double>(n0 + 1) - static_cast<double>(n0) * x) /
               (one_minus_x * one_minus_x);
    };

    const double z32_sq = zeta_3_2().upper * zeta_3_2().upper;
    const double r32 = divisor_tail_32(b_max);
    const double r72 = divisor_tail_72(b_max);
    const double k32 = 16.0 * pi3() * md * sqrt_m * std::pow(Nd, -1.5) * dN;
    const double k72 = 32.0 * pi5() * md * md * sqrt_m * std::pow(Nd, -3.5) * dN;

    // largest n whose full c-range fits inside b <= b_max:
    // 2 pi sqrt(mn) <= N b_max  <=>  n <= (N b_max / 2 pi)^2 / m
    double nb = static_cast<double>(N * b_max) / kTwoPi;
    i64 n2 = static_cast<i64>(std::floor(nb * nb / md));
    i64 n_star = n2 < n_max ? n2 : n_max;

    GeometricSums out;
    out.n_max = n_max;
    out.b_max = b_max;
    out.zero_coverage = n_max < thresh[1];

    out.G.value = total.g;
    out.G.tail_radius = k32 * (z32_sq * geom_tail(n_max) + r32 * x / one_minus_x);

    out.E1.value = total.e1;
    // missed terms have n > n_star; per n at most 2 pi sqrt(mn)/N moduli,
    // each term <= 8 pi^2 sqrt(m/n) e^{-2 pi n/A} via |S| <= c, |J_1| <= 1
    out.E1.tail_radius = 16.0 * pi3() * md / Nd * geom_tail(n_star);

    out.E2.value = total.e2;
    // Bessel remainder |J_1(t) - t/2| <= t^3/16 and the Weil bound give
    // 32 pi^5 m^{5/2} n d(c) c^{-7/2} e^{-2 pi n/A} per term
    out.E2.tail_radius =
        k72 * (zeta_7_2().upper * zeta_7_2().upper * geom_tail_linear(n_max) +
               r72 * x / (one_minus_x * one_minus_x));

    out.E3.value = total.e3;
    out.E3.tail_radius = k32 * z32_sq * geom_tail(n_star);

    out.E3up.value = total.e3up;
    out.E3up.tail_radius = out.G.tail_radius;  // same envelope covers both
    return out;
}

// ---------------------------------------------------------------------------
// Inner products
// ---------------------------------------------------------------------------
SumWithTail inner_product(i64 m, i64 n, i64 N, const TruncationPolicy& policy) {
    if (m < 1 || n < 1 || N < 1)
        throw std::domain_error("inner_product: requires m, n, N >= 1");
    const i64 b_max = policy.resolve_b_max(64);
    const double root_mn = std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    const double arg_num = kFourPi * root_mn;

    KahanSum acc;
    for (i64 b = 1; b <= b_max; ++b) {
        i64 c = N * b;
        double S = kloosterman_sum(m, n, c);
        double cd = static_cast<double>(c);
        acc.add(S / cd * bessel_j1(arg_num / cd));
    }
    SumWithTail out;
    double diag = (m == n) ? kFourPi * root_mn : 0.0;
    out.value = diag - 8.0 * kPi * kPi * root_mn * acc.value();
    // tail: |J_1(t)| <= t/2 and Weil give 16 pi^3 m n sqrt(g) c^{-3/2} d(c)
    double g = static_cast<double>(gcd(m, n));
    out.tail_radius = 16.0 * pi3() * static_cast<double>(m) * static_cast<double>(n) *
                      std::sqrt(g) * std::pow(static_cast<double>(N), -1.5) *
                      static_cast<double>(divisor_count(N)) * divisor_tail_32(b_max);
    return out;
}

double inner_product_bound(i64 m, i64 n, i64 N) {
    if (m < 1 || n < 1 || N < 1)
        throw std::domain_error("inner_product_bound: requires m, n, N >= 1");
    double z = zeta_3_2().upper;
    return 8.0 * z * z * kPi * kPi * std::sqrt(static_cast<double>(gcd(m, n))) *
           static_cast<double>(m) * static_cast<double>(n) *
           std::pow(static_cast<double>(N), -1.5) * static_cast<double>(divisor_count(N));
}

std::complex<double> main_term(const AveragingParams& params) {
    params.validate_basic();
    return kFourPi * params.chi(params.m) *
           std::exp(-kTwoPi * static_cast<double>(params.m) / params.A());
}

SumWithTail approx_average(const AveragingParams& params, const TruncationPolicy& policy) {
    GeometricSums sums = geometric_sums(params, policy);
    SumWithTail out;
    out.value = main_term(params) - sums.G.value;
    out.tail_radius = sums.G.tail_radius;
    return out;
}

double b_functional_bound(const AveragingParams& params) {
    params.validate_basic();
    if (params.N < 400)
        throw std::domain_error(
            "discrepancy bound hypothesis violated: N >= 400 (got N = " +
            std::to_string(params.N) + ")");
    double qd = static_cast<double>(params.q());
    if (!(params.sigma > qd * qd / kTwoPi))
        throw std::domain_error(
            "discrepancy bound hypothesis violated: sigma > q^2/(2 pi)");
    double Nd = static_cast<double>(params.N);
    double md = static_cast<double>(params.m);
    double ratio = 400.0 / 399.0;
    return 30.0 * ratio * ratio * ratio * std::exp(kTwoPi) * qd * qd * md * std::sqrt(md) /
           std::sqrt(Nd) * static_cast<double>(divisor_count(params.N)) *
           std::pow(Nd, -kTwoPi * params.sigma / (qd * qd));
}

}  // namespace avg
