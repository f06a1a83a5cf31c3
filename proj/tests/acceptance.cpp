// ---------------------------------------------------------------------------
// Acceptance battery.  Each criterion prints exactly one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.  Criteria are evaluated
// honestly: tolerances come from the certified tail radii and closed-form
// bounds themselves, never from observed values.
// ---------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "avg/arith.hpp"
#include "avg/bounds.hpp"
#include "avg/characters.hpp"
#include "avg/cli.hpp"
#include "avg/kloosterman.hpp"
#include "avg/petersson.hpp"
#include "avg/special.hpp"
#include "json.hpp"

using namespace avg;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : ("  (" + detail + ")").c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int idx, const std::string& name, bool (*fn)(std::string&)) {
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    report(idx, name, ok, detail);
}

// shared grid of full certificates, built once for criteria 1 and 2
struct GridPoint {
    i64 N, m, q, idx;
    BoundCertificate cert;
};

const std::vector<GridPoint>& certificate_grid() {
    static std::vector<GridPoint> grid = [] {
        std::vector<GridPoint> g;
        TruncationPolicy pol;
        pol.rel_tol = 1e-12;
        for (i64 N : {i64{400}, i64{401}, i64{500}, i64{997}}) {
            for (i64 q : {i64{1}, i64{3}, i64{4}, i64{5}}) {
                double sigma = std::max(1.01 * static_cast<double>(q * q) / kTwoPi, 1.0);
                for (const auto& chi : enumerate_characters(q)) {
                    for (i64 m : {i64{1}, i64{2}, i64{5}}) {
                        AveragingParams p{N, m, chi, sigma};
                        g.push_back({N, m, q, chi.index(), verify_theorem(p, pol)});
                    }
                }
            }
        }
        return g;
    }();
    return grid;
}

std::string point_label(const GridPoint& gp) {
    std::ostringstream os;
    os << "N=" << gp.N << " m=" << gp.m << " q=" << gp.q << " chi=" << gp.idx;
    return os.str();
}

// ---------------------------------------------------------------------------
// criterion 1: every grid certificate passes all verdicts with an exact
// window identity
// ---------------------------------------------------------------------------
bool criterion_bounds_grid(std::string& detail) {
    int points = 0;
    for (const auto& gp : certificate_grid()) {
        ++points;
        if (!gp.cert.identity_ok) {
            detail = "identity residual too large at " + point_label(gp);
            return false;
        }
        if (gp.cert.overall != Verdict::pass) {
            for (const auto& tv : gp.cert.verdicts)
                if (tv.verdict != Verdict::pass) {
                    detail = tv.name + " " + to_string(tv.verdict) + " at " + point_label(gp);
                    return false;
                }
            detail = "overall " + std::string(to_string(gp.cert.overall)) + " at " +
                     point_label(gp);
            return false;
        }
    }
    detail = std::to_string(points) + " parameter points, all verdicts pass";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 2: the rigorous enclosure center +/- radius stays within 0.1 of
// the predicted average 4 pi chi(m) e^{-2 pi m / A} at every grid point
// ---------------------------------------------------------------------------
bool criterion_enclosure(std::string& detail) {
    double worst = 0.0;
    std::string worst_at;
    for (const auto& gp : certificate_grid()) {
        if (gp.cert.duke_gap > worst) {
            worst = gp.cert.duke_gap;
            worst_at = point_label(gp);
        }
        if (gp.cert.duke_gap > 0.1) {
            detail = "gap " + std::to_string(gp.cert.duke_gap) + " at " + point_label(gp);
            return false;
        }
    }
    std::ostringstream os;
    os << "largest certified gap " << worst;
    detail = os.str();
    return true;
}

// ---------------------------------------------------------------------------
// criterion 3: along N = 400, 600, 800, 1200, 1600 the deviation decreases
// strictly and N * deviation stays within one order of magnitude
// ---------------------------------------------------------------------------
bool criterion_level_scan(std::string& detail) {
    TruncationPolicy pol;
    pol.rel_tol = 1e-12;
    auto chi = DirichletCharacter::make(1, 0);
    SigmaRule rule{SigmaRule::Kind::q_squared, 0.0};
    auto rows = scan_levels({400, 600, 800, 1200, 1600}, 1, chi, rule, pol);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.error.empty()) {
            detail = "row N=" + std::to_string(r.N) + " errored: " + r.error;
            return false;
        }
        // The decay exhibit is a property of the measured deviation; a row may
        // legitimately report "inconclusive" when a window term has no
        // coverage at this tolerance (e.g. the first large-n threshold exceeds
        // n_max at N = 1600), so only hard errors disqualify it.
        if (r.overall == Verdict::fail) {
            detail = "row N=" + std::to_string(r.N) + " verdict " + to_string(r.overall);
            return false;
        }
        if (i > 0 && !(r.deviation < rows[i - 1].deviation)) {
            detail = "deviation did not decrease at N=" + std::to_string(r.N);
            return false;
        }
        lo = std::min(lo, r.n_times_dev);
        hi = std::max(hi, r.n_times_dev);
    }
    if (hi > 10.0 * lo) {
        std::ostringstream os;
        os << "N * deviation spans " << lo << " .. " << hi << ", beyond a factor 10";
        detail = os.str();
        return false;
    }
    std::ostringstream os;
    os << "deviation " << rows.front().deviation << " -> " << rows.back().deviation
       << ", N * deviation in [" << lo << ", " << hi << "]";
    detail = os.str();
    return true;
}

// ---------------------------------------------------------------------------
// criterion 4: the truncated twisted sums agree with the exact resummation
// within the certified tail, and both respect the closed-form envelopes
// ---------------------------------------------------------------------------
bool criterion_twisted(std::string& detail) {
    struct Case { i64 N, q, idx, c; };
    int cases = 0;
    for (auto [N, q, idx, c] : std::vector<Case>{{401, 1, 0, 401},
                                                 {401, 1, 0, 802},
                                                 {405, 4, 1, 405},
                                                 {500, 3, 1, 500}}) {
        AveragingParams p{N, 1, DirichletCharacter::make(q, idx), 1.0};
        TruncationPolicy pol;
        pol.rel_tol = 1e-16;
        i64 n_max = pol.resolve_n_max(p);
        TwistedSumValue direct = twisted_sum_direct(c, p, n_max);
        TwistedSumValue closed = twisted_sum_closed(c, p);
        double diff = std::abs(direct.value - closed.value);
        if (diff > direct.tail_radius + 1e-9) {
            std::ostringstream os;
            os << "methods differ by " << diff << " > tail " << direct.tail_radius
               << " at N=" << N << " q=" << q << " c=" << c;
            detail = os.str();
            return false;
        }
        auto [small_range, large_range] = twisted_sum_bounds(c, p);
        double envelope = std::min(small_range, large_range);
        if (std::abs(closed.value) > envelope * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "value " << std::abs(closed.value) << " exceeds envelope " << envelope
               << " at c=" << c;
            detail = os.str();
            return false;
        }
        ++cases;
    }
    detail = std::to_string(cases) + " cases, two methods agree within certified tails";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 5: Weil bound, symmetry, periodicity on a wide exact grid
// ---------------------------------------------------------------------------
bool criterion_weil(std::string& detail) {
    long checked = 0;
    for (i64 c = 1; c <= 300; ++c) {
        for (i64 m = 1; m <= 20; ++m) {
            for (i64 n = m; n <= 20; ++n) {
                double s = kloosterman_sum(m, n, c);
                if (std::abs(s) > weil_bound(m, n, c) + 1e-8) {
                    std::ostringstream os;
                    os << "Weil bound violated at S(" << m << "," << n << ";" << c << ")";
                    detail = os.str();
                    return false;
                }
                if (s != kloosterman_sum(n, m, c)) {
                    detail = "symmetry not bit-identical at (" + std::to_string(m) + "," +
                             std::to_string(n) + ";" + std::to_string(c) + ")";
                    return false;
                }
                if (s != kloosterman_sum(m + c, n, c)) {
                    detail = "periodicity not exact at (" + std::to_string(m) + "," +
                             std::to_string(n) + ";" + std::to_string(c) + ")";
                    return false;
                }
                ++checked;
            }
        }
    }
    detail = std::to_string(checked) + " triples checked";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 6: Bessel evaluator against its envelopes and the quadrature
// oracle
// ---------------------------------------------------------------------------
bool criterion_bessel(std::string& detail) {
    for (int i = 0; i <= 20000; ++i) {
        double x = 0.05 * i;  // [0, 1000]
        if (std::abs(bessel_j1(x)) > std::min(1.0, x / 2) + 1e-12) {
            detail = "envelope |J1| <= min(1, x/2) violated at x = " + std::to_string(x);
            return false;
        }
    }
    for (int i = 1; i <= 4000; ++i) {
        double a = 4.0 * i / 4000.0;  // (0, 4]
        if (std::abs(bessel_j1(a) - a / 2) > a * a * a / 16.0 + 1e-15) {
            detail = "linear remainder bound violated at x = " + std::to_string(a);
            return false;
        }
    }
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double x = 0.5 * i;  // [0, 200]
        worst = std::max(worst, std::abs(bessel_j1(x) - bessel_j1_oracle(x, 1e-12)));
    }
    if (worst > 1e-10) {
        std::ostringstream os;
        os << "oracle disagreement " << worst;
        detail = os.str();
        return false;
    }
    // first zero bracketed where it belongs
    if (!(bessel_j1(3.8317) > 0.0 && bessel_j1(3.8318) < 0.0)) {
        detail = "first zero not bracketed by [3.8317, 3.8318]";
        return false;
    }
    std::ostringstream os;
    os << "oracle max deviation " << worst;
    detail = os.str();
    return true;
}

// ---------------------------------------------------------------------------
// criterion 7: zeta brackets are ordered, tight, and contain an independent
// Euler-Maclaurin evaluation
// ---------------------------------------------------------------------------
bool criterion_zeta(std::string& detail) {
    auto euler_maclaurin = [](double s) {
        const int B = 100;
        double sum = 0.0;
        for (int n = 1; n <= B; ++n) sum += std::pow(n, -s);
        double Bd = B;
        sum += std::pow(Bd, 1.0 - s) / (s - 1.0);
        sum -= 0.5 * std::pow(Bd, -s);
        sum += s / 12.0 * std::pow(Bd, -s - 1.0);
        sum -= s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(Bd, -s - 3.0);
        return sum;
    };
    Enclosure z2 = zeta_enclosure(2.0, 1e-10);
    if (!z2.contains(kPi * kPi / 6.0)) {
        detail = "zeta(2) bracket misses pi^2/6";
        return false;
    }
    for (double s : {1.5, 2.0, 3.0, 3.5}) {
        Enclosure z = zeta_enclosure(s, 1e-10);
        double oracle = euler_maclaurin(s);
        if (!(z.lower <= z.upper) || z.width() > 1e-10 || !z.contains(oracle)) {
            detail = "bracket at s = " + std::to_string(s) + " fails";
            return false;
        }
    }
    if (zeta_3_2().width() > 1e-12 || zeta_7_2().width() > 1e-12 || zeta_3().width() > 1e-12) {
        detail = "memoized constants wider than 1e-12";
        return false;
    }
    detail = "brackets contain the independent evaluation at s = 3/2, 2, 3, 7/2";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 8: inner products equal the diagonal term up to the certified
// closed-form correction
// ---------------------------------------------------------------------------
bool criterion_inner_product(std::string& detail) {
    TruncationPolicy pol;  // default window b <= 64
    int points = 0;
    double slack_min = 1e300;
    for (i64 N : {i64{401}, i64{500}, i64{997}}) {
        for (i64 m : {i64{1}, i64{2}, i64{3}, i64{5}}) {
            for (i64 n : {i64{1}, i64{2}, i64{3}, i64{5}}) {
                SumWithTail v = inner_product(m, n, N, pol);
                double diag =
                    m == n ? kFourPi * std::sqrt(static_cast<double>(m * n)) : 0.0;
                double corr = std::abs(v.value - cd{diag, 0.0});
                double budget = inner_product_bound(m, n, N) + v.tail_radius;
                if (corr > budget) {
                    std::ostringstream os;
                    os << "correction " << corr << " > budget " << budget << " at (m,n,N)=("
                       << m << "," << n << "," << N << ")";
                    detail = os.str();
                    return false;
                }
                slack_min = std::min(slack_min, budget - corr);
                ++points;
            }
        }
    }
    std::ostringstream os;
    os << points << " points, smallest remaining budget " << slack_min;
    detail = os.str();
    return true;
}

// ---------------------------------------------------------------------------
// criterion 9: results and verdicts are byte-identical across worker counts
// and across repeated runs
// ---------------------------------------------------------------------------
bool criterion_determinism(std::string& detail) {
    auto run_cli = [](const std::string& workers) {
        std::ostringstream out, err;
        std::vector<std::string> args{"theorem",   "--level", "400",     "--m",
                                      "1",         "--q",     "1",       "--sigma",
                                      "1",         "--format", "json",   "--rel-tol",
                                      "1e-12",     "--workers", workers};
        int code = avg::cli::run(args, out, err);
        return std::pair<int, std::string>{code, out.str()};
    };
    auto [code1, payload1] = run_cli("1");
    auto [code8, payload8] = run_cli("8");
    auto [code1b, payload1b] = run_cli("1");
    if (code1 != 0 || code8 != 0) {
        detail = "certificate run exited " + std::to_string(code1) + " / " +
                 std::to_string(code8);
        return false;
    }
    if (payload1 != payload1b) {
        detail = "identical configurations produced different bytes";
        return false;
    }
    nlohmann::json j1 = nlohmann::json::parse(payload1);
    nlohmann::json j8 = nlohmann::json::parse(payload8);
    if (j1["results"] != j8["results"]) {
        detail = "results differ between 1 and 8 workers";
        return false;
    }
    if (j1["verdicts"] != j8["verdicts"]) {
        detail = "verdicts differ between 1 and 8 workers";
        return false;
    }
    // the engine itself must agree bit for bit as well
    AveragingParams p{400, 1, DirichletCharacter::make(1, 0), 1.0};
    TruncationPolicy a, b;
    a.rel_tol = b.rel_tol = 1e-12;
    a.workers = 1;
    b.workers = 8;
    GeometricSums sa = geometric_sums(p, a);
    GeometricSums sb = geometric_sums(p, b);
    if (sa.G.value != sb.G.value || sa.E1.value != sb.E1.value ||
        sa.E2.value != sb.E2.value || sa.E3.value != sb.E3.value ||
        sa.E3up.value != sb.E3up.value) {
        detail = "window sums differ bitwise across worker counts";
        return false;
    }
    detail = "JSON results/verdicts and window sums identical for 1 and 8 workers";
    return true;
}

}  // namespace

int main() {
    run(1, "certified error bounds hold across the reference grid", criterion_bounds_grid);
    run(2, "enclosure stays within 0.1 of the predicted average", criterion_enclosure);
    run(3, "deviation decreases along the level scan, N x deviation stable",
        criterion_level_scan);
    run(4, "twisted sums: independent methods agree within certified tails",
        criterion_twisted);
    run(5, "Kloosterman sums: Weil bound, exact symmetry and periodicity", criterion_weil);
    run(6, "Bessel evaluator: envelopes and quadrature oracle", criterion_bessel);
    run(7, "zeta brackets: rigorous and independently confirmed", criterion_zeta);
    run(8, "inner products: diagonal plus certified correction", criterion_inner_product);
    run(9, "deterministic output across worker counts", criterion_determinism);

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
