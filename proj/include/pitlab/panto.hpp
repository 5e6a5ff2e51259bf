#pragma once

// Functional equations and transforms of the coefficient families:
//   f'(z) = q f(z e^{i beta})                   (quadratic phase, q = e^{2 pi i alpha}, beta = 4 pi alpha)
//   f = sum_k c_k e^{b_k z}                     (rational alpha, b_k roots of unity)
//   (f * H)(z) = (1/2 pi i) \oint f(zeta) H(z/zeta) dzeta/zeta
//   f(z) = 1 + z q (f * H)(z e^{i beta})        (product moduli c_{n+1} = c_n b_n)
//   f(-z) = (1/2 pi i) \int_{Re zeta = -A} e^{i psi(zeta)} z^zeta Gamma(-zeta) dzeta

#include "pitlab/eval.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace pitlab {

// ---------------------------------------------------------------------------
// Trigonometric sums for rational alpha

struct TrigTerm {
    HPComplex c;             // DFT coefficient
    HPComplex b;             // omega^k, a Q-th root of unity
    std::int64_t k = 0;      // frequency index, b = exp(2 pi i k / Q)
    double c_error = 0.0;    // absolute error bound on c
};

struct TrigSum {
    std::vector<TrigTerm> terms;
    std::int64_t period = 1;  // Q
    std::int64_t p = 0;
    std::int64_t q = 1;
    Bits precision = kDefaultPrecision;

    /// True when every b_k^Q = 1 holds exactly (checked on the integer frequencies).
    bool roots_of_unity_ok() const;
};

/// DFT of the periodic unit phases e^{2 pi i n^2 p / q}. Zero coefficients are
/// detected exactly in the cyclotomic field and dropped.
/// Throws std::invalid_argument when gcd(p, q) != 1 or q <= 0.
TrigSum trig_sum_reduction(std::int64_t p, std::int64_t q, Bits precision = kDefaultPrecision);

/// sum_k c_k exp(b_k z) with a rounding bound.
EvalResult eval_trig_sum(const TrigSum& ts, const HPComplex& z);

/// Exact check, in Z[zeta_q] modulo the cyclotomic polynomial, that the inverse DFT
/// of the coefficients reproduces every phase a_j, j < Q.
bool trig_sum_roundtrip_exact(std::int64_t p, std::int64_t q);

/// Integer coefficients of the q-th cyclotomic polynomial, lowest degree first.
std::vector<std::int64_t> cyclotomic_polynomial(std::int64_t q);

// ---------------------------------------------------------------------------
// Pantograph identity

struct Residual {
    double residual = 0.0;
    double bound = 0.0;  // combined evaluation bounds
    bool ok() const { return residual <= bound; }
};

/// |f'(z) - e^{2 pi i alpha} f(z e^{i beta})| for a quadratic or rational phase family
/// with factorial moduli. Both sides are evaluated at `precision` bits (sequence
/// precision by default). Throws std::invalid_argument for other families.
Residual pantograph_residual(const CoefficientSequence& seq, const HPComplex& z,
                             std::optional<Bits> precision = std::nullopt);

// ---------------------------------------------------------------------------
// Hadamard composition

struct ContourSpec {
    std::complex<double> center{0.0, 0.0};
    double radius = 1.0;
    int nodes = 64;

    /// nodes must be a power of two >= 64 and radius positive.
    void validate() const;
};

/// Origin-centred circle |zeta| = s |z| with the given starting node count.
ContourSpec contour_for(std::complex<double> z, double s, int nodes = 64);

/// Trapezoidal quadrature of the composition integral with H(w) = (1 - w)^{-s_H}.
/// Nodes are doubled until successive values differ by less than tol; the last
/// difference is reported as truncation_bound. Throws std::runtime_error past 2^16 nodes.
EvalResult hadamard_compose(const CoefficientSequence& f, double s_H, std::complex<double> z,
                            const ContourSpec& contour, double tol = 1e-12);

/// Direct series (f * H)(z) = sum a_n b_n z^n.
EvalResult hadamard_direct(const CoefficientSequence& f, double s_H, std::complex<double> z, double eps = 1e-30);

struct CompositionReport {
    Residual direct;          // (f * H) from the direct Hadamard-product series
    Residual contour;         // (f * H) from contour quadrature
    double path_difference = 0.0;  // |direct - contour| for the composition value
};

/// Residual of f(z) = 1 + z e^{2 pi i alpha} (f * H)(z e^{i beta}) for a product-moduli sequence.
CompositionReport composition_residual(const CoefficientSequence& seq, std::complex<double> z, double contour_s = 1.5);

struct EstimateReport {
    double lhs = 0.0;   // |(f * H)(z)|
    double K = 0.0;     // max of |H| on |zeta - 1| = r/(1-r)
    double max_f = 0.0; // max |f| on |zeta - z| = r|z|, 256 samples
    double rhs = 0.0;   // K * max_f
    bool pass = false;
};

/// Checks |(f * H)(z)| <= K max_{|zeta - z| <= r|z|} |f(zeta)| by sampling. r_param in (0, 1).
EstimateReport hadamard_estimate_check(const CoefficientSequence& f, double s_H, std::complex<double> z,
                                       double r_param);

// ---------------------------------------------------------------------------
// Line-integral representation for psi phases

/// Complex log Gamma by Stirling's series after shifting Re w >= 8. Imaginary part
/// is correct modulo 2 pi. Double precision.
std::complex<double> log_gamma(std::complex<double> w);

/// f(-z) for a psi_exp family from the vertical-line integral at Re zeta = -A.
/// Requires |arg z| <= pi/2 - 0.1, A > 0 and tol >= 1e-8.
std::complex<double> mellin_barnes_eval(const CoefficientSequence& seq, std::complex<double> z, double A,
                                        double tol = 1e-8);

}  // namespace pitlab
