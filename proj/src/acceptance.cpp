#include "pitlab/acceptance.hpp"

#include "pitlab/coeffs.hpp"
#include "pitlab/eval.hpp"
#include "pitlab/growth.hpp"
#include "pitlab/panto.hpp"
#include "pitlab/zeros.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pitlab {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

// Uniform points in the disc |z| <= radius from a fixed seed.
std::vector<std::complex<double>> disc_points(std::uint64_t seed, std::size_t n, double radius) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::complex<double>> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = radius * std::sqrt(u(rng));
        const double t = 2.0 * M_PI * u(rng) - M_PI;
        pts.push_back(std::polar(r, t));
    }
    return pts;
}

double hp_distance(const HPComplex& a, const HPComplex& b) {
    HPComplex d(std::max(a.precision(), b.precision()) + 64);
    sub(d, a, b);
    return static_cast<double>(d.abs_ld());
}

CoefficientSequence sqrt2_family() { return make_quadratic_phase(AlphaSpec::parse("sqrt2")); }

struct Scale {
    std::size_t panto_points;
    double panto_radius;
    std::int64_t trig_max_q;
    std::size_t trig_points;
    std::vector<double> count_radii;
    double zero_radius;
    std::pair<double, double> indicator_window;
    std::vector<double> band_radii;
    double decay_r_max;
    std::size_t mb_points;
    std::size_t est_pairs;
    std::pair<double, double> pit_annulus;
};

Scale scale_for(Suite s) {
    if (s == Suite::Full) {
        return {200, 30.0, 24, 100, {15.0, 22.0, 30.0}, 30.0, {20.0, 40.0}, {10.0, 20.0, 40.0}, 30.0, 10, 50,
                {25.0, 30.0}};
    }
    return {50, 15.0, 12, 20, {8.0, 11.0, 15.0}, 15.0, {10.0, 20.0}, {10.0, 20.0}, 15.0, 4, 10, {12.0, 15.0}};
}

struct Context {
    AcceptanceOptions opts;
    Scale sc{};
    CoefficientSequence s2 = sqrt2_family();
    std::optional<ZeroSet> zeros;

    const ZeroSet& zero_set() {
        if (!zeros) zeros = locate_zeros(s2, SectorBox::disc(sc.zero_radius));
        return *zeros;
    }
};

struct Outcome {
    bool pass;
    std::string detail;
};

// 1. Pantograph identity at random points.
Outcome pantograph(Context& cx) {
    const Bits P = cx.opts.precision_bits.value_or(160);
    const auto pts = disc_points(101, cx.sc.panto_points, cx.sc.panto_radius);
    double worst = 0.0;
    std::size_t failed = 0;
    for (const auto& z : pts) {
        const Residual r = pantograph_residual(cx.s2, HPComplex(z, P), P);
        worst = std::max(worst, r.residual / r.bound);
        if (!r.ok()) ++failed;
    }
    return {failed == 0, std::to_string(pts.size()) + " points |z|<=" + g(cx.sc.panto_radius) + " at P=" +
                             std::to_string(P) + ", worst residual/bound " + g(worst) + ", failures " +
                             std::to_string(failed)};
}

bool single_exact_term(const TrigSum& ts, int sign) {
    if (ts.terms.size() != 1) return false;
    const TrigTerm& t = ts.terms.front();
    return mpfr_cmp_ui(t.c.re.get(), 1) == 0 && t.c.im.is_zero() &&
           mpfr_cmp_si(t.b.re.get(), sign) == 0 && t.b.im.is_zero();
}

// 2. Series against trigonometric sums for every reduced p/q.
Outcome rational_oracle(Context& cx) {
    std::size_t pairs = 0, points = 0, failed = 0;
    double worst = 0.0;
    std::uint64_t seed = 200;
    for (std::int64_t q = 1; q <= cx.sc.trig_max_q; ++q) {
        for (std::int64_t p = 0; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            ++pairs;
            const CoefficientSequence seq = make_rational_phase(p, q);
            const TrigSum ts = trig_sum_reduction(p, q);
            for (const auto& z : disc_points(++seed, cx.sc.trig_points, 15.0)) {
                const HPComplex zh(z, seq.precision_bits());
                const EvalResult a = eval_f(seq, zh, grid_epsilon(seq, std::abs(z), 0x1p-100));
                const EvalResult b = eval_trig_sum(ts, zh);
                const double d = hp_distance(a.value, b.value);
                const double bound = a.total_bound() + b.total_bound();
                worst = std::max(worst, d / bound);
                if (!(d <= bound)) ++failed;
                ++points;
            }
        }
    }
    const bool exp_plus = single_exact_term(trig_sum_reduction(0, 1), 1);
    const bool exp_minus = single_exact_term(trig_sum_reduction(1, 2), -1);
    return {failed == 0 && exp_plus && exp_minus,
            std::to_string(pairs) + " fractions, " + std::to_string(points) + " points, worst diff/bound " + g(worst) +
                ", failures " + std::to_string(failed) + "; q=1 exact e^z " + (exp_plus ? "yes" : "no") +
                ", q=2 exact e^-z " + (exp_minus ? "yes" : "no")};
}

// 3. Zero counts against n(r) ~ r.
Outcome zero_count(Context& cx) {
    std::vector<ZeroCount> counts;
    for (double r : cx.sc.count_radii) counts.push_back(count_zeros(cx.s2, r));
    bool pass = std::abs(counts.back().count - cx.sc.count_radii.back()) <= 6.0;
    std::string detail;
    double prev_dev = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double r = counts[i].radius;
        const double dev = std::abs(counts[i].count / r - 1.0);
        if (i > 0 && dev > prev_dev + 1.0 / r) pass = false;
        prev_dev = dev;
        detail += (i ? ", " : "") + std::string("n(") + g(r) + ")=" + std::to_string(counts[i].count);
    }
    return {pass, detail};
}

// 4. Quadrant counts.
Outcome angular(Context& cx) {
    const double R = cx.sc.zero_radius;
    const AngularDensity ad = angular_density(cx.zero_set(), R, 4);
    bool pass = true;
    std::string detail = "quadrants";
    for (const SectorCount& s : ad.sectors) {
        if (std::abs(s.count - R / 4.0) > 5.0) pass = false;
        detail += " " + std::to_string(s.count);
    }
    return {pass, detail + " (expected " + g(R / 4.0) + " +- 5)"};
}

// 5. Reciprocal sum against -q.
Outcome reciprocal(Context& cx) {
    const std::complex<double> q = std::polar(1.0, 2.0 * M_PI * std::sqrt(2.0));
    const double R = cx.sc.zero_radius;
    const double d_small = std::abs(reciprocal_sum(cx.zero_set(), 10.0) + q);
    const double d_large = std::abs(reciprocal_sum(cx.zero_set(), R) + q);
    return {d_large <= 0.3 && d_large < d_small,
            "|sum 1/z_k + q| = " + g(d_small) + " at R=10, " + g(d_large) + " at R=" + g(R)};
}

// 6. Indicator of the sqrt2 family, and the sign probe for non-exponential families.
Outcome indicator(Context& cx) {
    const auto [lo, hi] = cx.sc.indicator_window;
    const auto theta = uniform_angles(128);
    const IndicatorProfile p = indicator_estimate(cx.s2, theta, lo, hi, 1.0);
    const double dev = p.max_abs_deviation(1.0);
    bool pass = dev <= 0.15 && std::none_of(p.indeterminate.begin(), p.indeterminate.end(), [](bool b) { return b; });
    std::string detail = "sqrt2 max|h-1| " + g(dev) + "; min h:";

    const CoefficientSequence golden = make_quadratic_phase(AlphaSpec::parse("golden"));
    const CoefficientSequence hardy = make_hardy(0.0, 1.0, 1.0);
    const std::vector<std::pair<std::string, CoefficientSequence>> families{
        {"sqrt2", cx.s2},
        {"golden", golden},
        {"pi", make_quadratic_phase(AlphaSpec::parse("pi"))},
        {"hardy(i,1)", hardy},
        {"psi(e^-n)", make_psi_phase({1.0}, {1.0})},
        {"psi(2e^-n-e^-2n)", make_psi_phase({2.0, -1.0}, {1.0, 2.0})},
        {"Q(sqrt2,golden)", combine_Q(cx.s2, golden, 0.0, M_PI / 3.0)},
        {"Q(hardy,hardy)", combine_Q(hardy, hardy, M_PI / 3.0, M_PI / 3.0)},
    };
    for (const auto& [name, seq] : families) {
        const double m = indicator_estimate(seq, theta, lo, hi, 1.0).min_value();
        if (!(m >= -0.05)) pass = false;
        detail += " " + name + " " + g(m);
    }
    return {pass, detail};
}

// 7. Maximum modulus band.
Outcome max_band(Context& cx) {
    bool pass = true;
    std::string detail = "r - log M:";
    for (double r : cx.sc.band_radii) {
        const double gap = r - max_modulus(cx.s2, r).log_M;
        if (!(gap >= 0.0 && gap <= 0.35 * std::log(r) + 1.0)) pass = false;
        detail += " " + g(gap) + " (r=" + g(r) + ", cap " + g(0.35 * std::log(r) + 1.0) + ")";
    }
    return {pass, detail};
}

// 8. Ratio of maximum modulus to quadratic mean, and the Parseval cross-check.
Outcome levy(Context& cx) {
    const std::vector<double> radii{10.0, 20.0, 40.0, 80.0};
    const RatioSeries third = levy_ratio(make_rational_phase(1, 3), radii);
    const RatioSeries irr = levy_ratio(cx.s2, radii);
    bool pass = third.ratio.back() / third.ratio.front() >= 1.5;
    for (std::size_t i = 1; i < radii.size(); ++i) pass = pass && third.ratio[i] > third.ratio[i - 1];
    const double irr_max = *std::max_element(irr.ratio.begin(), irr.ratio.end());
    pass = pass && irr_max <= 10.0;
    const ParsevalCheck pc = parseval_quadrature_check(cx.s2, 10.0, 2048);
    pass = pass && pc.relative_discrepancy <= 1e-8;
    std::string detail = "1/3 ratios";
    for (double v : third.ratio) detail += " " + g(v);
    return {pass, detail + "; sqrt2 max ratio " + g(irr_max) + "; Parseval discrepancy " + g(pc.relative_discrepancy)};
}

// 9. Decay in the left half-plane and the line-integral representation.
Outcome decay(Context& cx) {
    const CoefficientSequence f = make_psi_phase({1.0}, {1.0});
    bool pass = true;
    std::string detail = "max r^2|f|/C:";
    for (double phi : {M_PI, M_PI - 1.3, M_PI + 1.3}) {
        auto scaled = [&](double r) {
            return r * r * std::exp(eval_f(f, std::polar(r, phi), 1e-40).value.log_abs());
        };
        const double C = scaled(5.0);
        double worst = 0.0;
        for (double r = 5.0; r <= cx.sc.decay_r_max + 1e-9; r += 0.5) worst = std::max(worst, scaled(r) / C);
        if (worst > 1.0) pass = false;
        detail += " " + g(worst) + " (phi=pi" + (phi < M_PI ? "-1.3" : phi > M_PI ? "+1.3" : "") + ")";
    }
    const double tol = std::max(cx.opts.tolerance.value_or(1e-8), 1e-8);
    std::mt19937_64 rng(900);
    std::uniform_real_distribution<double> mod(1.0, 10.0), ang(-M_PI / 2 + 0.1, M_PI / 2 - 0.1);
    double worst_mb = 0.0;
    for (std::size_t i = 0; i < cx.sc.mb_points; ++i) {
        const std::complex<double> z = std::polar(mod(rng), ang(rng));
        const std::complex<double> line = mellin_barnes_eval(f, z, 0.5, tol);
        const std::complex<double> series = eval_f(f, -z, 1e-30).approx();
        worst_mb = std::max(worst_mb, std::abs(line - series));
    }
    pass = pass && worst_mb <= 1e-5;
    return {pass, detail + "; line integral vs series " + g(worst_mb) + " over " + std::to_string(cx.sc.mb_points) +
                      " points"};
}

// 10. Hadamard composition, the multiplication estimate and the composed functional equation.
Outcome hadamard(Context& cx) {
    constexpr double s_H = 0.5;
    const double tol = cx.opts.tolerance.value_or(1e-12);
    double worst_path = 0.0;
    for (const auto& z : disc_points(1001, 20, 5.0)) {
        const EvalResult c = hadamard_compose(cx.s2, s_H, z, contour_for(z, 1.5, 64), tol);
        const EvalResult d = hadamard_direct(cx.s2, s_H, z);
        worst_path = std::max(worst_path, hp_distance(c.value, d.value));
    }
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> rp(0.05, 0.5);
    std::size_t est_fail = 0;
    double worst_ratio = 0.0;
    for (const auto& z : disc_points(1003, cx.sc.est_pairs, 5.0)) {
        const EstimateReport e = hadamard_estimate_check(cx.s2, s_H, z, rp(rng));
        worst_ratio = std::max(worst_ratio, e.lhs / e.rhs);
        if (!e.pass) ++est_fail;
    }
    const CoefficientSequence pm = make_product_moduli(s_H, AlphaSpec::parse("sqrt2"));
    double worst_comp = 0.0;
    auto pts = disc_points(1004, 20, 3.0);
    pts.push_back({0.0, 0.0});
    for (const auto& z : pts) worst_comp = std::max(worst_comp, composition_residual(pm, z).direct.residual);
    return {worst_path <= 1e-10 && est_fail == 0 && worst_comp <= 1e-15,
            "contour vs direct " + g(worst_path) + "; estimate " + std::to_string(cx.sc.est_pairs - est_fail) + "/" +
                std::to_string(cx.sc.est_pairs) + " (worst lhs/rhs " + g(worst_ratio) + "); functional equation " +
                g(worst_comp)};
}

// 11. Growth of the product-moduli family.
Outcome product_moduli_growth(Context&) {
    const ModulusFit fit = product_modulus_fit(0.5, 100000);
    const CoefficientSequence pm = make_product_moduli(0.5, AlphaSpec::parse("sqrt2"));
    const double lm = max_modulus(pm, 6.0).log_M / 36.0;
    const double rel = std::abs(lm / fit.sigma - 1.0);
    return {fit.slope >= 0.475 && fit.slope <= 0.525 && rel <= 0.25,
            "slope " + fmt("%.5f", fit.slope) + ", c " + fmt("%.5f", fit.c) + ", sigma " + fmt("%.5f", fit.sigma) +
                ", log M(6)/36 " + fmt("%.5f", lm) + " (relative gap " + g(rel) + ")"};
}

// 12. Pits against zeros in an annulus.
Outcome pits(Context& cx) {
    const auto [lo, hi] = cx.sc.pit_annulus;
    GridSpec grid;
    for (double r = lo; r <= hi + 1e-9; r += 0.1) grid.r_values.push_back(r);
    grid.n_theta = 1024;
    const PitReport rep = pit_detect(cx.s2, grid, 0.3, 1.0, 1.0, ReferenceIndicator::constant(1.0));
    const int n_pits = rep.count_in(lo, hi);
    int n_zeros = 0;
    for (const Zero& z : cx.zero_set().zeros) {
        const double r = std::abs(z.z());
        if (r >= lo && r <= hi) n_zeros += z.multiplicity;
    }
    return {std::abs(n_pits - n_zeros) <= 0.5 * n_zeros,
            std::to_string(n_pits) + " pits (" + std::to_string(rep.grid_components) + " grid components), " +
                std::to_string(n_zeros) + " zeros in [" + g(lo) + ", " + g(hi) + "]"};
}

struct Criterion {
    const char* name;
    double time_limit;  // seconds, 0 for none
    std::function<Outcome(Context&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {"pantograph identity", 30.0, pantograph},
        {"rational trig-sum oracle", 60.0, rational_oracle},
        {"zero count", 300.0, zero_count},
        {"angular uniformity", 0.0, angular},
        {"reciprocal zero sum", 0.0, reciprocal},
        {"indicator constancy", 0.0, indicator},
        {"max-modulus band", 0.0, max_band},
        {"Levy ratio dichotomy", 0.0, levy},
        {"left half-plane decay", 0.0, decay},
        {"Hadamard composition", 0.0, hadamard},
        {"product-moduli growth", 0.0, product_moduli_growth},
        {"pit/zero correspondence", 0.0, pits},
    };
    return list;
}

}  // namespace

Suite parse_suite(const std::string& name) {
    if (name == "quick") return Suite::Quick;
    if (name == "full") return Suite::Full;
    throw std::invalid_argument("suite must be quick or full");
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, const std::vector<int>& ids) {
    std::vector<int> todo = ids;
    if (todo.empty()) {
        todo.resize(kCriterionCount);
        std::iota(todo.begin(), todo.end(), 1);
    }
    for (int id : todo) {
        if (id < 1 || id > kCriterionCount) throw std::invalid_argument("no criterion " + std::to_string(id));
    }
    Context cx;
    cx.opts = opts;
    cx.sc = scale_for(opts.suite);
    std::vector<CriterionResult> out;
    for (int id : todo) {
        const Criterion& c = criteria()[static_cast<std::size_t>(id - 1)];
        CriterionResult res;
        res.id = id;
        res.name = c.name;
        const auto t0 = Clock::now();
        try {
            const Outcome o = c.run(cx);
            res.pass = o.pass;
            res.detail = o.detail;
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("error: ") + e.what();
        }
        res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.time_limit > 0.0 && res.seconds > c.time_limit) {
            res.pass = false;
            res.detail += "; over the " + g(c.time_limit) + " s limit";
        }
        out.push_back(res);
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d  %-26s (%7.2f s)  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds);
    return head + r.detail;
}

nlohmann::json results_to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}, {"detail", r.detail}});
    }
    return arr;
}

}  // namespace pitlab
