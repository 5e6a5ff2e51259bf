#include "pitlab/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pitlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxTerms = 10'000'000;

double log_tail(const CoefficientSequence& seq, double log_r, std::size_t N, double r) {
    const double q = seq.ratio_bound(N + 1) * r;
    if (!(q < 1.0)) return kInf;
    const double lm = seq.log_majorant(N + 1);
    if (std::isinf(lm) && lm < 0) {
        // a zero coefficient at N+1 says nothing about later ones; bound from N+2
        const double q2 = seq.ratio_bound(N + 2) * r;
        if (!(q2 < 1.0)) return kInf;
        return seq.log_majorant(N + 2) + static_cast<double>(N + 2) * log_r - std::log1p(-q2);
    }
    return lm + static_cast<double>(N + 1) * log_r - std::log1p(-q);
}

long double magnitude(const HPComplex& v) {
    return std::hypot(v.re.to_long_double(), v.im.to_long_double());
}

}  // namespace

std::size_t choose_truncation(const CoefficientSequence& seq, double r, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("choose_truncation: eps must be positive");
    if (!(r >= 0.0)) throw std::invalid_argument("choose_truncation: r must be nonnegative");
    if (r == 0.0) return 0;
    const double log_r = std::log(r);
    const double log_eps = std::log(eps);
    for (std::size_t N = 0; N <= kMaxTerms; ++N) {
        if (log_tail(seq, log_r, N, r) <= log_eps) return N;
    }
    throw std::runtime_error("choose_truncation: no N <= 1e7 meets the tail bound");
}

Bits choose_precision(double r, double eps, std::size_t N) {
    const double headroom = std::ceil(1.4427 * r);
    const double sum_bits = N <= 1 ? 0.0 : std::ceil(std::log2(static_cast<double>(N)));
    const double eps_bits = std::ceil(std::log2(1.0 / eps));
    const double p = headroom + sum_bits + eps_bits + 32.0;
    return static_cast<Bits>(std::max(64.0, p));
}

double log_majorant_sum(const CoefficientSequence& seq, double r) {
    if (r == 0.0) return seq.log_majorant(0);
    const double log_r = std::log(r);
    double lmax = -kInf;
    long double acc = 0.0L;
    for (std::size_t n = 0; n <= kMaxTerms; ++n) {
        const double lt = seq.log_majorant(n) + static_cast<double>(n) * log_r;
        if (lt > lmax) {
            acc = acc * std::exp(static_cast<long double>(lmax - lt)) + 1.0L;
            lmax = lt;
        } else if (!std::isinf(lt)) {
            acc += std::exp(static_cast<long double>(lt - lmax));
        }
        if (seq.ratio_bound(n) * r < 0.5 && lt < lmax - 40.0) break;
    }
    return lmax + std::log(static_cast<double>(acc));
}

EvalResult eval_series(const CoefficientSequence& seq, const HPComplex& z, double eps, const EvalOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("eval: eps must be positive");
    const double r = static_cast<double>(z.abs_ld());
    const double log_r = r > 0.0 ? std::log(r) : -kInf;

    const std::size_t N = opts.terms ? *opts.terms : choose_truncation(seq, r, 0.5 * eps);

    Bits P;
    if (opts.precision) {
        P = *opts.precision;
    } else {
        P = choose_precision(r, eps, std::max<std::size_t>(N, 1));
        // Families growing faster than e^r need more cancellation headroom.
        double log_max_term = -kInf;
        for (std::size_t n = 0; n <= N; ++n) {
            log_max_term = std::max(log_max_term, seq.log_majorant(n) + (n ? static_cast<double>(n) * log_r : 0.0));
        }
        const double extra = std::ceil(log_max_term / std::log(2.0)) - std::ceil(1.4427 * r);
        if (extra > 0) P += static_cast<Bits>(extra);
    }

    const CoefficientTable table = seq.table(N + 1, P);

    HPComplex zp(P), power(P), term(P), sum(P);
    Real t1(P), t2(P);
    set(zp, z);
    mpfr_set_ui(power.re.get(), 1, MPFR_RNDN);

    // a priori rounding model, u = 2^{1-P}; term n carries relative error <= (3n + 12) u
    const long double u = std::ldexp(1.0L, 1 - static_cast<int>(P));
    long double rounding = 0.0L;
    for (std::size_t n = 0; n <= N; ++n) {
        if (n > 0) {
            mul(term, power, zp, t1, t2);
            power.re.swap(term.re);
            power.im.swap(term.im);
        }
        const HPComplex& a = table[n];
        if (a.re.is_zero() && a.im.is_zero()) continue;
        mul(term, a, power, t1, t2);
        add(sum, sum, term);
        rounding += (3.0L * static_cast<long double>(n) + 12.0L) * u * magnitude(term) + u * magnitude(sum);
    }

    EvalResult out;
    out.value = std::move(sum);
    out.rounding_bound = static_cast<double>(rounding * 1.01L);
    out.truncation_bound = r == 0.0 ? 0.0 : std::exp(log_tail(seq, log_r, N, r));
    out.terms_used = N + 1;
    out.precision_bits = P;
    return out;
}

EvalResult eval_f(const CoefficientSequence& seq, const HPComplex& z, double eps, const EvalOptions& opts) {
    return eval_series(seq, z, eps, opts);
}

EvalResult eval_f(const CoefficientSequence& seq, std::complex<double> z, double eps, const EvalOptions& opts) {
    return eval_series(seq, HPComplex(z, 64), eps, opts);
}

EvalResult eval_fprime(const CoefficientSequence& seq, const HPComplex& z, double eps, const EvalOptions& opts) {
    return eval_series(derivative(seq), z, eps, opts);
}

EvalResult eval_fprime(const CoefficientSequence& seq, std::complex<double> z, double eps,
                       const EvalOptions& opts) {
    return eval_series(derivative(seq), HPComplex(z, 64), eps, opts);
}

EvalResult eval_G(const CoefficientSequence& seq, std::complex<double> w, double eps, const EvalOptions& opts) {
    if (std::abs(w) > 0.999) throw std::domain_error("eval_G requires |w| <= 0.999");
    return eval_series(disc_series(seq), HPComplex(w, 64), eps, opts);
}

double grid_epsilon(const CoefficientSequence& seq, double r, double rel) {
    return rel * std::exp(log_majorant_sum(seq, r));
}

Sample sample_f(const CoefficientSequence& seq, std::complex<double> z, double eps) {
    const EvalResult res = eval_f(seq, z, eps);
    Sample s;
    s.z = z;
    s.log_abs = res.value.log_abs();
    s.arg = res.value.arg();
    s.log_bound = std::log(res.total_bound());
    s.flagged = !(s.log_abs > s.log_bound);
    return s;
}

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
    if (n_theta < 8) throw std::invalid_argument("grid needs n_theta >= 8");
    if (r_values.empty()) throw std::invalid_argument("grid needs at least one radius");
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        if (!(r_values[i] > 0.0)) throw std::invalid_argument("grid radii must be positive");
        if (i && !(r_values[i] > r_values[i - 1])) throw std::invalid_argument("grid radii must increase");
    }
}

double GridSpec::theta(int j) const { return M_PI * (2.0 * j / n_theta - 1.0); }

namespace {

GridPoint grid_point(const CoefficientSequence& seq, const GridSpec& grid, std::size_t idx, double eps,
                     const GridOptions& opts) {
    const std::size_t ir = idx / static_cast<std::size_t>(grid.n_theta);
    const int jt = static_cast<int>(idx % static_cast<std::size_t>(grid.n_theta));
    const double r = grid.r_values[ir];

    // theta = pi (2j/n - 1) at extended precision, one per point
    const Bits wp = 160;
    Real theta(wp), pi(wp);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    mpfr_set_si(theta.get(), 2 * jt - grid.n_theta, MPFR_RNDN);
    mpfr_div_si(theta.get(), theta.get(), grid.n_theta, MPFR_RNDN);
    mpfr_mul(theta.get(), theta.get(), pi.get(), MPFR_RNDN);
    HPComplex z(wp);
    expi(z, theta);
    mpfr_mul_d(z.re.get(), z.re.get(), r, MPFR_RNDN);
    mpfr_mul_d(z.im.get(), z.im.get(), r, MPFR_RNDN);

    EvalOptions eo;
    eo.precision = opts.precision;
    const EvalResult res = eval_f(seq, z, eps, eo);
    GridPoint p;
    p.r = r;
    p.theta = theta.to_double();
    p.log_abs_f = res.value.log_abs();
    p.trunc_bound = res.truncation_bound;
    p.round_bound = res.rounding_bound;
    p.flag = !(p.log_abs_f > std::log(res.total_bound()));
    return p;
}

std::vector<double> grid_eps(const CoefficientSequence& seq, const GridSpec& grid, const GridOptions& opts) {
    std::vector<double> eps;
    eps.reserve(grid.r_values.size());
    for (double r : grid.r_values) {
        eps.push_back(opts.rel_eps * std::exp((1.0 - opts.resolve_depth) * log_majorant_sum(seq, r)));
    }
    return eps;
}

}  // namespace

GridTable eval_grid(const CoefficientSequence& seq, const GridSpec& grid, const GridOptions& opts) {
    grid.validate();
    const std::vector<double> eps = grid_eps(seq, grid, opts);
    GridTable out{grid, std::vector<GridPoint>(grid.size())};
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
    const auto nt = static_cast<std::size_t>(grid.n_theta);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out.points[idx] = grid_point(seq, grid, idx, eps[idx / nt], opts);
    }
    return out;
}

GridTable eval_grid_serial(const CoefficientSequence& seq, const GridSpec& grid, const GridOptions& opts) {
    grid.validate();
    const std::vector<double> eps = grid_eps(seq, grid, opts);
    GridTable out{grid, std::vector<GridPoint>(grid.size())};
    const auto nt = static_cast<std::size_t>(grid.n_theta);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        out.points[idx] = grid_point(seq, grid, idx, eps[idx / nt], opts);
    }
    return out;
}

std::string fmt17(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string grid_to_csv(const GridTable& table) {
    std::ostringstream os;
    os << "r,theta,log_abs_f,flag,trunc_bound,round_bound\n";
    for (const GridPoint& p : table.points) {
        os << fmt17(p.r) << ',' << fmt17(p.theta) << ',' << fmt17(p.log_abs_f) << ',' << (p.flag ? 1 : 0) << ','
           << fmt17(p.trunc_bound) << ',' << fmt17(p.round_bound) << '\n';
    }
    return os.str();
}

}  // namespace pitlab
