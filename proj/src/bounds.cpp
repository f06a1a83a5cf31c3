#include "avg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "avg/kloosterman.hpp"
#include "avg/special.hpp"
#include "avg/summation.hpp"

namespace avg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kFourPi = 12.5663706143591729539;

double pi3() { return kPi * kPi * kPi; }
double pi5() { return pi3() * kPi * kPi; }

// ---------------------------------------------------------------------------
// Global divisor-count sieve, grown on demand (the E^(3) enclosure walks b up
// to ~2^26; many certificates share one table).
// ---------------------------------------------------------------------------
std::shared_ptr<const std::vector<std::uint16_t>> divisor_sieve_at_least(i64 B) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<std::uint16_t>> current;
    std::lock_guard<std::mutex> lock(mu);
    if (current && static_cast<i64>(current->size()) > B) return current;
    i64 target = i64{1} << 20;
    while (target < B) target <<= 1;
    current = std::make_shared<const std::vector<std::uint16_t>>(divisor_table(target));
    return current;
}

// d(N*b) from d(b) and the factorization of N: for each prime power p^e || N
// with p^f || b, replace the (f+1) factor of d(b) by (e+f+1).
struct DivisorMerger {
    std::vector<std::pair<i64, int>> np;  // prime, exponent of N
    explicit DivisorMerger(i64 N) : np(factorize(N).factors) {}
    double operator()(i64 b, double db) const {
        for (const auto& [p, e] : np) {
            if (b % p != 0) {
                db *= static_cast<double>(e + 1);
                continue;
            }
            int f = 0;
            i64 t = b;
            while (t % p == 0) {
                t /= p;
                ++f;
            }
            db *= static_cast<double>(e + f + 1) / static_cast<double>(f + 1);
        }
        return db;
    }
};

void require_bound_hypotheses(const AveragingParams& p) {
    p.validate_basic();
    if (p.N < 400)
        throw std::domain_error("bound hypothesis violated: N >= 400 (got N = " +
                                std::to_string(p.N) + ")");
    double qd = static_cast<double>(p.q());
    if (!(p.sigma > qd * qd / kTwoPi))
        throw std::domain_error("bound hypothesis violated: sigma > q^2/(2 pi)");
    if (p.q() % p.N == 0)
        throw std::domain_error("bound hypothesis violated: N does not divide q");
}

struct Eu3Key {
    i64 N, m, q, window;
    std::uint64_t sigma_bits;
    bool operator<(const Eu3Key& o) const {
        if (N != o.N) return N < o.N;
        if (m != o.m) return m < o.m;
        if (q != o.q) return q < o.q;
        if (window != o.window) return window < o.window;
        return sigma_bits < o.sigma_bits;
    }
};

Eu3Certificate compute_eu3(const AveragingParams& params, i64 b_window) {
    const i64 N = params.N, m = params.m;
    const double A = params.A();
    const double md = static_cast<double>(m);
    const double lead = 16.0 * pi3() * md;
    const double phi_q = static_cast<double>(euler_phi(params.q()));
    const double small_scale = (2.0 / kPi) * phi_q;
    const double large_scale = (A / 6.0) * std::sqrt(md);
    const DivisorMerger merge(N);

    auto min_term = [&](i64 b, double db) {
        double c = static_cast<double>(N) * static_cast<double>(b);
        double log_c = std::log(c);
        double small = small_scale * log_c / c;
        double large = large_scale * merge(b, db) / (c * std::sqrt(c));
        return small < large ? small : large;
    };

    Eu3Certificate cert;
    cert.b_window = b_window;

    KahanSum head;
    for (i64 b = 1; b <= b_window; ++b)
        head.add(min_term(b, static_cast<double>(divisor_count(b))));
    cert.head = lead * head.value();

    // zeta-tail constant: sum_{b>B1} d(Nb) (Nb)^{-3/2} <= N^{-3/2} d(N) R(B1)
    const double tail_const = lead * large_scale *
                              std::pow(static_cast<double>(N), -1.5) *
                              static_cast<double>(divisor_count(N));
    const double z32_sq = zeta_3_2().upper * zeta_3_2().upper;
    const i64 kCap = i64{1} << 26;

    KahanSum mid;      // exact min terms past the window
    KahanSum s32;      // sum_{b <= B} d(b) b^{-3/2}
    auto sieve = divisor_sieve_at_least(i64{1} << 20);
    i64 b = 1;
    i64 checkpoint = i64{1} << 20;
    for (;;) {
        if (static_cast<i64>(sieve->size()) <= checkpoint)
            sieve = divisor_sieve_at_least(checkpoint);
        for (; b <= checkpoint; ++b) {
            double db = static_cast<double>((*sieve)[static_cast<std::size_t>(b)]);
            double bd = static_cast<double>(b);
            s32.add(db / (bd * std::sqrt(bd)));
            if (b > b_window) mid.add(min_term(b, db));
        }
        double r32 = z32_sq - s32.value() * (1.0 - 1e-12);
        if (r32 < 0.0) r32 = 0.0;
        cert.B1 = checkpoint;
        cert.mid = lead * mid.value();
        cert.zeta_tail = tail_const * r32;
        if (cert.zeta_tail <= 0.6 * cert.head || checkpoint >= kCap) break;
        checkpoint <<= 1;
    }
    return cert;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------
const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

Verdict judge(double magnitude, double tail, double bound_lo, double bound_hi) {
    if (magnitude + tail <= bound_lo * (1.0 - 1e-12)) return Verdict::pass;
    if (magnitude - tail > bound_hi * (1.0 + 1e-12)) return Verdict::fail;
    return Verdict::inconclusive;
}

Eu3Certificate eu3_certificate(const AveragingParams& params, i64 b_window) {
    require_bound_hypotheses(params);
    if (b_window < 1 || b_window > (i64{1} << 20))
        throw std::domain_error("eu3_certificate: b_window must lie in [1, 2^20]");

    static std::mutex mu;
    static std::map<Eu3Key, Eu3Certificate> cache;
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(params.sigma));
    std::memcpy(&bits, &params.sigma, sizeof(bits));
    Eu3Key key{params.N, params.m, params.q(), b_window, bits};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Eu3Certificate cert = compute_eu3(params, b_window);
    {
        std::lock_guard<std::mutex> lock(mu);
        cache.emplace(key, cert);
        if (cache.size() > 512) cache.erase(cache.begin());
    }
    return cert;
}

TermBounds closed_form_bounds(const AveragingParams& params, i64 e3up_window) {
    require_bound_hypotheses(params);
    const double Nd = static_cast<double>(params.N);
    const double md = static_cast<double>(params.m);
    const double log_n = std::log(Nd);
    const double sigma = params.sigma;
    const double dN = static_cast<double>(divisor_count(params.N));
    const double x = std::exp(-kTwoPi / params.A());
    const double one_minus_x = -std::expm1(-kTwoPi / params.A());
    const double z72 = zeta_7_2().upper;
    const double z32 = zeta_3_2().upper;

    TermBounds out;
    out.discrepancy = b_functional_bound(params);
    out.e1 = (16.0 / 3.0) * pi3() * md * std::sqrt(md) * sigma * log_n *
             std::exp(-Nd / (kTwoPi * md * sigma * log_n));
    out.e2 = (8.0 / 9.0) * pi5() * z72 * z72 * md * md * std::sqrt(md) * sigma * sigma *
             std::pow(Nd, -1.5) * log_n * log_n;
    out.e2_variant = 32.0 * pi5() * std::sqrt(3.0) * zeta_3().upper * md * md * std::sqrt(md) *
                     std::pow(Nd, -3.5) * x / (one_minus_x * one_minus_x);
    out.e3 = (8.0 / 3.0) * z32 * z32 * pi3() * sigma * md * std::sqrt(md) / std::sqrt(Nd) *
             log_n * dN * std::exp(-Nd / (kTwoPi * md * sigma * log_n));
    out.e3up = eu3_certificate(params, e3up_window);
    return out;
}

ErrorTermReport error_terms(const AveragingParams& params, const TruncationPolicy& policy) {
    params.validate_theorem_mode();
    ErrorTermReport report;
    report.window = geometric_sums(params, policy);
    report.e3up_window = policy.mode == TruncationPolicy::Mode::adaptive
                             ? std::max<i64>(report.window.b_max, 32)
                             : report.window.b_max;

    KahanSumC closed;
    const double lead = 16.0 * pi3() * static_cast<double>(params.m);
    for (i64 b = 1; b <= report.e3up_window; ++b) {
        i64 c = params.N * b;
        double cd = static_cast<double>(c);
        closed.add(lead / (cd * cd) * twisted_sum_closed(c, params).value);
    }
    report.e3up_cert = eu3_certificate(params, report.e3up_window);
    report.e3up_closed.value = closed.value();
    report.e3up_closed.tail_radius = report.e3up_cert.mid + report.e3up_cert.zeta_tail;

    const GeometricSums& w = report.window;
    report.e2_algebraic = (w.G.value - w.E1.value) - (w.E3up.value - w.E3.value);
    return report;
}

BoundCertificate verify_theorem(const AveragingParams& params, const TruncationPolicy& policy) {
    params.validate_theorem_mode();

    BoundCertificate cert;
    cert.N = params.N;
    cert.m = params.m;
    cert.q = params.q();
    cert.chi_index = params.chi.index();
    cert.sigma = params.sigma;

    cert.terms = error_terms(params, policy);
    const GeometricSums& w = cert.terms.window;
    cert.n_max = w.n_max;
    cert.b_max = w.b_max;
    cert.e3up_window = cert.terms.e3up_window;
    cert.zero_coverage = w.zero_coverage;
    cert.bounds = closed_form_bounds(params, cert.e3up_window);
    cert.main = main_term(params);

    std::complex<double> approx = cert.main - w.G.value;
    std::complex<double> resid =
        w.G.value - (w.E1.value + w.E2.value + w.E3up.value - w.E3.value);
    cert.identity_residual = std::abs(resid);
    cert.identity_rel = cert.identity_residual / (1.0 + std::abs(approx));
    cert.identity_ok = cert.identity_rel <= 1e-9;

    auto push = [&](const char* name, const SumWithTail& term, double lo, double hi) {
        TermVerdict tv;
        tv.name = name;
        tv.magnitude = std::abs(term.value);
        tv.tail = term.tail_radius;
        tv.bound_lo = lo;
        tv.bound_hi = hi;
        tv.verdict = judge(tv.magnitude, tv.tail, lo, hi);
        cert.verdicts.push_back(tv);
    };
    push("E1", w.E1, cert.bounds.e1, cert.bounds.e1);
    push("E2", w.E2, cert.bounds.e2, cert.bounds.e2);
    push("E3", w.E3, cert.bounds.e3, cert.bounds.e3);
    push("E3_upper", cert.terms.e3up_closed, cert.bounds.e3up.lower(),
         cert.bounds.e3up.upper());

    cert.center = cert.main - (w.E1.value + w.E2.value +
                               cert.terms.e3up_closed.value - w.E3.value);
    cert.radius = w.E1.tail_radius + w.E2.tail_radius + w.E3.tail_radius +
                  cert.terms.e3up_closed.tail_radius + cert.bounds.discrepancy;
    double gap = std::abs(cert.center - kFourPi * params.chi(params.m)) - cert.radius;
    cert.duke_gap = gap > 0.0 ? gap : 0.0;

    bool any_fail = !cert.identity_ok;
    bool any_inconclusive = false;
    for (const auto& tv : cert.verdicts) {
        if (tv.verdict == Verdict::fail) any_fail = true;
        if (tv.verdict == Verdict::inconclusive) any_inconclusive = true;
    }
    cert.overall = any_fail ? Verdict::fail
                            : (any_inconclusive ? Verdict::inconclusive : Verdict::pass);
    return cert;
}

double SigmaRule::resolve(i64 N, i64 q) const {
    switch (kind) {
        case Kind::fixed: return fixed_value;
        case Kind::q_squared: return static_cast<double>(q) * static_cast<double>(q);
        default:
            return static_cast<double>(N) * static_cast<double>(q) /
                   std::log(static_cast<double>(N));
    }
}

std::vector<ScanRow> scan_levels(const std::vector<i64>& levels, i64 m,
                                 const DirichletCharacter& chi, const SigmaRule& rule,
                                 const TruncationPolicy& policy) {
    std::vector<ScanRow> rows;
    rows.reserve(levels.size());
    for (i64 N : levels) {
        ScanRow row;
        row.N = N;
        try {
            AveragingParams params{N, m, chi, rule.resolve(N, chi.modulus())};
            row.sigma = params.sigma;
            BoundCertificate cert = verify_theorem(params, policy);
            row.deviation = std::abs(cert.terms.window.G.value);
            row.bound_total = cert.bounds.e1 + cert.bounds.e2 + cert.bounds.e3 +
                              cert.bounds.e3up.upper() + cert.bounds.discrepancy;
            row.n_times_dev = static_cast<double>(N) * row.deviation;
            row.identity_rel = cert.identity_rel;
            row.overall = cert.overall;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

FDeltaResult f_delta_scan(i64 N, double delta, const DirichletCharacter& chi,
                          const SigmaRule& rule, const TruncationPolicy& policy,
                          i64 m_limit) {
    if (!(delta > 0.0)) throw std::domain_error("f_delta_scan: delta must be > 0");
    if (m_limit < 1) throw std::domain_error("f_delta_scan: m_limit must be >= 1");

    FDeltaResult result;
    for (i64 m = 1; m <= m_limit; ++m) {
        AveragingParams params{N, m, chi, rule.resolve(N, chi.modulus())};
        BoundCertificate cert = verify_theorem(params, policy);
        FDeltaRow row;
        row.m = m;
        row.center_gap = std::abs(cert.center - kFourPi * params.chi(m));
        row.radius = cert.radius;
        if (row.center_gap + row.radius <= delta)
            row.status = Verdict::pass;
        else if (row.center_gap - row.radius > delta)
            row.status = Verdict::fail;
        else
            row.status = Verdict::inconclusive;
        result.rows.push_back(row);
        if (row.status != Verdict::pass) {
            result.inconclusive_beyond = row.status == Verdict::inconclusive;
            return result;
        }
        result.m_star = m;
    }
    result.exhausted = true;
    return result;
}

}  // namespace avg
