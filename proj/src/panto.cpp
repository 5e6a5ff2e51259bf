#include "pitlab/panto.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pitlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Poly = std::vector<std::int64_t>;

// Exact quotient of a by the monic polynomial b.
Poly poly_div_exact(Poly a, const Poly& b) {
    const std::size_t db = b.size() - 1;
    Poly quot(a.size() - db, 0);
    for (std::size_t i = a.size(); i-- > db;) {
        const std::int64_t c = a[i];
        quot[i - db] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
    }
    return quot;
}

// a mod b for monic b, in place; returns true when the remainder vanishes.
bool reduces_to_zero(Poly a, const Poly& b) {
    const std::size_t db = b.size() - 1;
    for (std::size_t i = a.size(); i-- > db;) {
        const std::int64_t c = a[i];
        if (c == 0) continue;
        for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
    }
    for (std::size_t i = 0; i < std::min(db, a.size()); ++i) {
        if (a[i] != 0) return false;
    }
    return true;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// e_j = j^2 p mod q
std::int64_t square_phase(std::int64_t j, std::int64_t p, std::int64_t q) {
    const __int128 v = static_cast<__int128>(j) * j % q * p % q;
    return mod(static_cast<std::int64_t>(v), q);
}

// Q * c_k as an element of Z[x]/(x^q - 1): exponent histogram of zeta_q.
Poly dft_element(std::int64_t p, std::int64_t q, std::int64_t Q, std::int64_t k) {
    Poly counts(static_cast<std::size_t>(q), 0);
    const std::int64_t step = q / Q;
    for (std::int64_t j = 0; j < Q; ++j) {
        const __int128 shift = static_cast<__int128>(k) * j % Q * step;
        const std::int64_t e = mod(square_phase(j, p, q) - static_cast<std::int64_t>(shift % q), q);
        ++counts[static_cast<std::size_t>(e)];
    }
    return counts;
}

void validate_pq(std::int64_t p, std::int64_t q) {
    if (q <= 0) throw std::invalid_argument("trig sum: q must be positive");
    if (std::gcd(p < 0 ? -p : p, q) != 1) throw std::invalid_argument("trig sum: gcd(p, q) must be 1");
}

// log sum_n n majorant(n) r^{n-1}: bounds |f'| on |z| <= r.
double log_derivative_majorant_sum(const CoefficientSequence& seq, double r) {
    const double log_r = std::log(std::max(r, 1e-300));
    double lmax = -kInf;
    long double acc = 0.0L;
    for (std::size_t n = 1; n < 10'000'000; ++n) {
        const double lt = seq.log_majorant(n) + std::log(static_cast<double>(n)) + static_cast<double>(n - 1) * log_r;
        if (lt > lmax) {
            acc = acc * std::exp(static_cast<long double>(lmax - lt)) + 1.0L;
            lmax = lt;
        } else if (!std::isinf(lt)) {
            acc += std::exp(static_cast<long double>(lt - lmax));
        }
        const double q = seq.ratio_bound(n) * r * (n + 1.0) / n;
        if (q < 0.5 && lt < lmax - 40.0) break;
    }
    return lmax + std::log(static_cast<double>(acc));
}

// Turns alpha (in [0,1)) of a quadratic or rational phase at the requested precision.
Real phase_turns(const CoefficientSequence& seq, Bits prec) {
    Real t(prec);
    if (const auto* qp = std::get_if<QuadraticPhase>(&seq.phase().kind)) {
        Real a = qp->alpha.value(prec);
        mpfr_frac(t.get(), a.get(), MPFR_RNDN);
    } else if (const auto* rp = std::get_if<RationalPhase>(&seq.phase().kind)) {
        mpfr_set_si(t.get(), static_cast<long>(mod(rp->p, rp->q)), MPFR_RNDN);
        mpfr_div_si(t.get(), t.get(), static_cast<long>(rp->q), MPFR_RNDN);
    } else {
        throw std::invalid_argument("sequence does not have a quadratic phase");
    }
    if (mpfr_sgn(t.get()) < 0) mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
    return t;
}

// q = e^{2 pi i alpha} and rot = e^{i beta}, beta = 4 pi alpha.
void phase_units(const CoefficientSequence& seq, Bits prec, HPComplex& q, HPComplex& rot) {
    const Real alpha = phase_turns(seq, prec + 64);
    unit_from_turns(q, alpha);
    Real two(prec + 64);
    mpfr_mul_2ui(two.get(), alpha.get(), 1, MPFR_RNDN);
    mpfr_frac(two.get(), two.get(), MPFR_RNDN);
    unit_from_turns(rot, two);
}

long double mag(const HPComplex& v) { return std::hypot(v.re.to_long_double(), v.im.to_long_double()); }

double relative_eps(const CoefficientSequence& seq, double r, Bits prec) {
    return std::ldexp(std::exp(log_majorant_sum(seq, r)), 8 - static_cast<int>(prec));
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::int64_t> cyclotomic_polynomial(std::int64_t q) {
    if (q <= 0) throw std::invalid_argument("cyclotomic_polynomial: q must be positive");
    Poly num(static_cast<std::size_t>(q) + 1, 0);
    num[0] = -1;
    num[static_cast<std::size_t>(q)] = 1;
    for (std::int64_t d = 1; d < q; ++d) {
        if (q % d == 0) num = poly_div_exact(num, cyclotomic_polynomial(d));
    }
    return num;
}

bool TrigSum::roots_of_unity_ok() const {
    if (period <= 0 || q % period != 0) return false;
    return std::all_of(terms.begin(), terms.end(), [&](const TrigTerm& t) { return t.k >= 0 && t.k < period; });
}

TrigSum trig_sum_reduction(std::int64_t p, std::int64_t q, Bits precision) {
    validate_pq(p, q);
    TrigSum ts;
    ts.p = mod(p, q);
    ts.q = q;
    ts.precision = precision;
    ts.period = quadratic_residue_period(ts.p, q);
    const std::int64_t Q = ts.period;
    const Poly phi = cyclotomic_polynomial(q);
    const Bits wp = precision + 32;
    const double u = std::ldexp(1.0, 1 - static_cast<int>(precision));

    HPComplex root(wp);
    for (std::int64_t k = 0; k < Q; ++k) {
        const Poly counts = dft_element(ts.p, q, Q, k);
        if (reduces_to_zero(counts, phi)) continue;
        HPComplex acc(wp);
        for (std::int64_t e = 0; e < q; ++e) {
            const std::int64_t n = counts[static_cast<std::size_t>(e)];
            if (n == 0) continue;
            root_of_unity(root, e, q);
            mpfr_mul_si(root.re.get(), root.re.get(), static_cast<long>(n), MPFR_RNDN);
            mpfr_mul_si(root.im.get(), root.im.get(), static_cast<long>(n), MPFR_RNDN);
            add(acc, acc, root);
        }
        mpfr_div_si(acc.re.get(), acc.re.get(), static_cast<long>(Q), MPFR_RNDN);
        mpfr_div_si(acc.im.get(), acc.im.get(), static_cast<long>(Q), MPFR_RNDN);
        TrigTerm term{HPComplex(precision), HPComplex(precision), k, 0.0};
        set(term.c, acc);
        root_of_unity(term.b, k, Q);
        // working-precision sum error is below 2^{-precision}; final rounding adds u|c|
        term.c_error = u * (1.0 + static_cast<double>(mag(term.c)));
        ts.terms.push_back(std::move(term));
    }
    return ts;
}

bool trig_sum_roundtrip_exact(std::int64_t p, std::int64_t q) {
    validate_pq(p, q);
    p = mod(p, q);
    const std::int64_t Q = quadratic_residue_period(p, q);
    const Poly phi = cyclotomic_polynomial(q);
    const std::int64_t step = q / Q;

    std::vector<Poly> coeffs;
    std::vector<std::int64_t> freq;
    for (std::int64_t k = 0; k < Q; ++k) {
        Poly c = dft_element(p, q, Q, k);
        if (reduces_to_zero(c, phi)) continue;
        coeffs.push_back(std::move(c));
        freq.push_back(k);
    }
    // sum_k (Q c_k) zeta_q^{k j q/Q} - Q zeta_q^{e_j} must vanish mod Phi_q for every j.
    for (std::int64_t j = 0; j < Q; ++j) {
        Poly acc(static_cast<std::size_t>(q), 0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const std::int64_t shift = mod(freq[i] * j % Q * step, q);
            for (std::int64_t e = 0; e < q; ++e) {
                acc[static_cast<std::size_t>(mod(e + shift, q))] += coeffs[i][static_cast<std::size_t>(e)];
            }
        }
        acc[static_cast<std::size_t>(square_phase(j, p, q))] -= Q;
        if (!reduces_to_zero(acc, phi)) return false;
    }
    return true;
}

EvalResult eval_trig_sum(const TrigSum& ts, const HPComplex& z) {
    const Bits P = ts.precision;
    const long double u = std::ldexp(1.0L, 1 - static_cast<int>(P));
    HPComplex zp(P), w(P), e(P), t(P), sum(P);
    Real t1(P), t2(P);
    set(zp, z);
    const long double zabs = mag(zp);

    long double bound = 0.0L, max_term = 0.0L;
    for (const TrigTerm& term : ts.terms) {
        mul(w, term.b, zp, t1, t2);
        exp(e, w, t1);
        mul(t, term.c, e, t1, t2);
        add(sum, sum, t);
        const long double te = mag(t), ee = mag(e);
        max_term = std::max(max_term, te);
        // b z carries ~4u|z| absolute error, exp and the product ~8u relative
        bound += static_cast<long double>(term.c_error) * ee + (8.0L + 4.0L * zabs) * u * te + u * mag(sum);
    }
    const long double floor = static_cast<long double>(ts.terms.size()) * 2.0L * u * max_term;

    EvalResult out;
    out.value = std::move(sum);
    out.rounding_bound = static_cast<double>(std::max(bound, floor) * 1.01L);
    out.truncation_bound = 0.0;
    out.terms_used = ts.terms.size();
    out.precision_bits = P;
    return out;
}

// ---------------------------------------------------------------------------

Residual pantograph_residual(const CoefficientSequence& seq, const HPComplex& z, std::optional<Bits> precision) {
    if (seq.kind() != CoefficientSequence::Kind::Primary || !seq.factorial_modulus()) {
        throw std::invalid_argument("pantograph_residual needs a primary factorial-modulus sequence");
    }
    const Bits P = precision ? *precision : seq.precision_bits();
    HPComplex q(P), rot(P);
    phase_units(seq, P, q, rot);

    HPComplex zp(P), w(P), rhs(P), diff(P);
    Real t1(P), t2(P);
    set(zp, z);
    mul(w, zp, rot, t1, t2);
    const double r = static_cast<double>(mag(zp));

    EvalOptions opts;
    opts.precision = P;
    const double eps = relative_eps(seq, r, P);
    const EvalResult lhs = eval_fprime(seq, zp, eps, opts);
    const EvalResult fw = eval_f(seq, w, eps, opts);
    mul(rhs, q, fw.value, t1, t2);
    sub(diff, lhs.value, rhs);

    const long double u = std::ldexp(1.0L, 1 - static_cast<int>(P));
    // |w - z e^{i beta}| <= 8u|z| moves f(w) by at most max|f'| times that
    const double dw = static_cast<double>(8.0L * u * static_cast<long double>(r));
    const double rotation = dw > 0 ? std::exp(log_derivative_majorant_sum(seq, r + dw)) * dw : 0.0;

    Residual res;
    res.residual = static_cast<double>(mag(diff));
    res.bound = lhs.total_bound() + fw.total_bound() + rotation +
                static_cast<double>(4.0L * u * (mag(rhs) + mag(lhs.value)));
    return res;
}

// ---------------------------------------------------------------------------

void ContourSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("contour radius must be positive");
    if (nodes < 64 || (nodes & (nodes - 1)) != 0) throw std::invalid_argument("contour nodes must be a power of two >= 64");
}

ContourSpec contour_for(std::complex<double> z, double s, int nodes) {
    if (!(s > 1.0 && s <= 2.0)) throw std::invalid_argument("contour scale s must lie in (1, 2]");
    return ContourSpec{{0.0, 0.0}, s * std::abs(z), nodes};
}

EvalResult hadamard_compose(const CoefficientSequence& f, double s_H, std::complex<double> z,
                            const ContourSpec& contour, double tol) {
    contour.validate();
    if (z == 0.0) throw std::invalid_argument("hadamard_compose needs z != 0");
    if (std::abs(contour.center) >= contour.radius) throw std::invalid_argument("contour must enclose the origin");
    if (std::abs(z) >= contour.radius - std::abs(contour.center)) {
        throw std::invalid_argument("contour must keep |z/zeta| < 1");
    }
    const double reach = std::abs(contour.center) + contour.radius;
    const double eps_f = std::ldexp(std::exp(log_majorant_sum(f, reach)), -70);
    constexpr int kMaxNodes = 1 << 16;

    std::vector<std::complex<double>> g;  // integrand samples on the finest grid seen so far
    std::vector<double> gbound;
    auto integrand = [&](int j, int N, double& bnd) {
        const double th = 2.0 * M_PI * j / N;
        const std::complex<double> e(std::cos(th), std::sin(th));
        const std::complex<double> zeta = contour.center + contour.radius * e;
        const EvalResult fr = eval_f(f, zeta, eps_f);
        const std::complex<double> H = std::pow(1.0 - z / zeta, -s_H);
        const std::complex<double> jac = (zeta - contour.center) / zeta;
        bnd = fr.total_bound() * std::abs(H * jac);
        return fr.approx() * H * jac;
    };

    int N = contour.nodes;
    g.resize(static_cast<std::size_t>(N));
    gbound.resize(static_cast<std::size_t>(N));
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < N; ++j) g[j] = integrand(j, N, gbound[j]);

    auto trapezoid = [&]() {
        std::complex<double> s = 0.0;
        double mag_sum = 0.0, eval_err = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            s += g[j];
            mag_sum += std::abs(g[j]);
            eval_err = std::max(eval_err, gbound[j]);
        }
        const double n = static_cast<double>(g.size());
        return std::tuple{s / n, mag_sum / n, eval_err};
    };

    auto [prev, prev_mag, prev_err] = trapezoid();
    while (true) {
        if (2 * N > kMaxNodes) throw std::runtime_error("hadamard_compose: no convergence within 2^16 nodes");
        std::vector<std::complex<double>> fine(static_cast<std::size_t>(2 * N));
        std::vector<double> fine_bound(static_cast<std::size_t>(2 * N));
        for (int j = 0; j < N; ++j) {
            fine[2 * j] = g[j];
            fine_bound[2 * j] = gbound[j];
        }
#pragma omp parallel for schedule(dynamic, 4)
        for (int j = 0; j < N; ++j) fine[2 * j + 1] = integrand(2 * j + 1, 2 * N, fine_bound[2 * j + 1]);
        g.swap(fine);
        gbound.swap(fine_bound);
        N *= 2;

        auto [cur, cur_mag, cur_err] = trapezoid();
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * cur_mag;
        const double diff = std::abs(cur - prev);
        if (diff < std::max(tol, noise)) {
            EvalResult out;
            out.value = HPComplex(cur, 64);
            out.truncation_bound = diff;
            out.rounding_bound = noise + cur_err;
            out.terms_used = static_cast<std::size_t>(N);
            out.precision_bits = 53;
            return out;
        }
        prev = cur;
    }
}

EvalResult hadamard_direct(const CoefficientSequence& f, double s_H, std::complex<double> z, double eps) {
    return eval_f(hadamard_product(f, s_H), z, eps);
}

CompositionReport composition_residual(const CoefficientSequence& seq, std::complex<double> z, double contour_s) {
    if (seq.kind() != CoefficientSequence::Kind::Primary || seq.modulus().kind != ModulusRule::Kind::Product) {
        throw std::invalid_argument("composition_residual needs a product-moduli sequence");
    }
    const double s_H = seq.modulus().s_hadamard;
    const Bits P = seq.precision_bits();
    const long double u = std::ldexp(1.0L, 1 - static_cast<int>(P));

    HPComplex q(P), rot(P), zp(z, P), w(P), zq(P), rhs(P), diff(P);
    Real t1(P), t2(P);
    phase_units(seq, P, q, rot);
    mul(w, zp, rot, t1, t2);
    mul(zq, zp, q, t1, t2);
    const double r = std::abs(z);

    const EvalResult lhs = eval_f(seq, zp, relative_eps(seq, r, P));
    const CoefficientSequence fh = hadamard_product(seq, s_H);
    const EvalResult comp = eval_f(fh, w, relative_eps(fh, r, P));

    const double dw = static_cast<double>(8.0L * u * static_cast<long double>(r));
    const double rotation = r > 0 ? r * std::exp(log_derivative_majorant_sum(fh, r + dw)) * dw : 0.0;
    const double common = lhs.total_bound() + rotation;

    auto residual_with = [&](const HPComplex& composed, double comp_bound) {
        mul(rhs, zq, composed, t1, t2);
        mpfr_add_ui(rhs.re.get(), rhs.re.get(), 1, MPFR_RNDN);
        sub(diff, lhs.value, rhs);
        Residual res;
        res.residual = static_cast<double>(mag(diff));
        res.bound = common + r * comp_bound + static_cast<double>(4.0L * u * (mag(rhs) + mag(lhs.value)));
        return res;
    };

    CompositionReport rep;
    rep.direct = residual_with(comp.value, comp.total_bound());
    if (r == 0.0) {
        rep.contour = rep.direct;
        return rep;
    }
    const std::complex<double> wd = w.to_complex();
    const EvalResult cc = hadamard_compose(seq, s_H, wd, contour_for(wd, contour_s));
    HPComplex ccp(cc.value);
    ccp.round_to(P);
    rep.contour = residual_with(ccp, cc.total_bound());
    rep.path_difference = std::abs(cc.approx() - comp.approx());
    return rep;
}

EstimateReport hadamard_estimate_check(const CoefficientSequence& f, double s_H, std::complex<double> z,
                                       double r_param) {
    if (!(r_param > 0.0 && r_param < 1.0)) throw std::invalid_argument("r_param must lie in (0, 1)");
    EstimateReport rep;
    const double R = std::abs(z);
    const double eps = std::ldexp(std::exp(log_majorant_sum(f, R * (1.0 + r_param))), -60);
    const EvalResult lhs = hadamard_direct(f, s_H, z, eps);
    rep.lhs = std::abs(lhs.approx());
    // |1 - zeta| is constant on the circle, so |H| = (r/(1-r))^{-s} there
    rep.K = std::pow(r_param / (1.0 - r_param), -s_H);

    constexpr int kSamples = 256;
    std::vector<double> mags(kSamples);
    double worst_bound = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : worst_bound)
    for (int j = 0; j < kSamples; ++j) {
        const double th = 2.0 * M_PI * j / kSamples;
        const std::complex<double> zeta = z + r_param * R * std::complex<double>(std::cos(th), std::sin(th));
        const EvalResult fr = eval_f(f, zeta, eps);
        mags[j] = std::abs(fr.approx());
        worst_bound = std::max(worst_bound, fr.total_bound());
    }
    rep.max_f = *std::max_element(mags.begin(), mags.end());
    rep.rhs = rep.K * rep.max_f;
    rep.pass = rep.lhs - lhs.total_bound() <= rep.rhs + rep.K * worst_bound;
    return rep;
}

// ---------------------------------------------------------------------------

std::complex<double> log_gamma(std::complex<double> w) {
    std::complex<double> shift = 0.0;
    while (w.real() < 8.0) {
        shift += std::log(w);
        w += 1.0;
    }
    static constexpr double kB[] = {1.0 / 6,   -1.0 / 30, 1.0 / 42,     -1.0 / 30,
                                    5.0 / 66,  -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    const std::complex<double> inv = 1.0 / w;
    const std::complex<double> inv2 = inv * inv;
    std::complex<double> series = 0.0, pw = inv;
    for (int k = 1; k <= 8; ++k) {
        series += kB[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
        pw *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * M_PI) + series - shift;
}

std::complex<double> mellin_barnes_eval(const CoefficientSequence& seq, std::complex<double> z, double A,
                                        double tol) {
    const auto* psi = std::get_if<PsiExpPhase>(&seq.phase().kind);
    if (!psi || !seq.factorial_modulus()) throw std::invalid_argument("mellin_barnes_eval needs a psi_exp family");
    if (!(tol >= 1e-8)) throw std::invalid_argument("mellin_barnes_eval: tolerance below 1e-8 is not supported");
    if (!(A > 0.0)) throw std::invalid_argument("mellin_barnes_eval: A must be positive");
    if (z == 0.0 || std::abs(std::arg(z)) > M_PI / 2 - 0.1) {
        throw std::invalid_argument("mellin_barnes_eval needs |arg z| <= pi/2 - 0.1");
    }
    const std::complex<double> log_z = std::log(z);
    const double kappa = M_PI / 2 - std::abs(std::arg(z));

    // |e^{i psi}| <= exp(sum |c_k| e^{lambda_k A}) on the line
    double psi_cap = 0.0;
    for (std::size_t k = 0; k < psi->c.size(); ++k) psi_cap += std::abs(psi->c[k]) * std::exp(psi->lambda[k] * A);

    auto g = [&](double t) {
        const std::complex<double> zeta(-A, t);
        std::complex<double> ps = 0.0;
        for (std::size_t k = 0; k < psi->c.size(); ++k) ps += psi->c[k] * std::exp(-psi->lambda[k] * zeta);
        return std::exp(std::complex<double>(0.0, 1.0) * ps + zeta * log_z + log_gamma(-zeta));
    };
    auto envelope = [&](double t) {
        return std::exp(psi_cap - A * std::log(std::abs(z)) + std::abs(t) * std::abs(std::arg(z)) +
                        log_gamma({A, t}).real());
    };

    // Tail beyond T: |Gamma(A + it)| decays like t^{A-1/2} e^{-pi t/2}.
    double T = 4.0;
    while (true) {
        const double rate = kappa - std::max(0.0, A - 0.5) / T;
        if (rate > 0.0 && envelope(T) / rate / M_PI < tol / 4) break;
        T *= 1.25;
        if (T > 1e5) throw std::runtime_error("mellin_barnes_eval: integrand tail does not decay");
    }

    auto trapezoid = [&](double h) {
        const int n = static_cast<int>(std::ceil(T / h));
        std::complex<double> s = g(0.0);
        for (int j = 1; j <= n; ++j) s += g(j * h) + g(-j * h);
        return s * h / (2.0 * M_PI);
    };
    double h = std::min(0.25, A / 2);
    std::complex<double> prev = trapezoid(h);
    for (int it = 0; it < 12; ++it) {
        h /= 2;
        const std::complex<double> cur = trapezoid(h);
        if (std::abs(cur - prev) < tol / 4) return cur;
        prev = cur;
    }
    throw std::runtime_error("mellin_barnes_eval: quadrature did not converge");
}

}  // namespace pitlab
