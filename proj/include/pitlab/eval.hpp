#pragma once

// Certified evaluation of power series from a CoefficientSequence.
//
// Every result carries a truncation bound (from the coefficient majorant, never
// from observed term decay) and a rounding bound (a priori error analysis of
// the summation at the working precision):
//
//     |true value - value| <= truncation_bound + rounding_bound.

#include "pitlab/coeffs.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pitlab {

struct EvalResult {
    HPComplex value;
    double truncation_bound = 0.0;
    double rounding_bound = 0.0;
    std::size_t terms_used = 0;
    Bits precision_bits = 0;

    double total_bound() const { return truncation_bound + rounding_bound; }
    std::complex<double> approx() const { return value.to_complex(); }
};

struct EvalOptions {
    std::optional<Bits> precision;       // overrides choose_precision
    std::optional<std::size_t> terms;    // overrides choose_truncation (last index summed)
};

/// Smallest N such that the majorant tail sum_{n>N} majorant(n) r^n <= eps.
/// Throws std::runtime_error when no N <= 10^7 works.
std::size_t choose_truncation(const CoefficientSequence& seq, double r, double eps);

/// P = ceil(1.4427 r) + ceil(log2 N) + ceil(log2(1/eps)) + 32, at least 64.
Bits choose_precision(double r, double eps, std::size_t N);

/// log sum_n majorant(n) r^n; equals r for factorial moduli.
double log_majorant_sum(const CoefficientSequence& seq, double r);

/// Sum of the series at z with absolute accuracy target eps.
EvalResult eval_series(const CoefficientSequence& seq, const HPComplex& z, double eps, const EvalOptions& opts = {});

EvalResult eval_f(const CoefficientSequence& seq, const HPComplex& z, double eps, const EvalOptions& opts = {});
EvalResult eval_f(const CoefficientSequence& seq, std::complex<double> z, double eps, const EvalOptions& opts = {});
EvalResult eval_fprime(const CoefficientSequence& seq, const HPComplex& z, double eps,
                       const EvalOptions& opts = {});
EvalResult eval_fprime(const CoefficientSequence& seq, std::complex<double> z, double eps,
                       const EvalOptions& opts = {});
/// G(w) = sum_{n>=1} a_{n-1} w^n with unit-scaled a_n; requires |w| <= 0.999.
EvalResult eval_G(const CoefficientSequence& seq, std::complex<double> w, double eps, const EvalOptions& opts = {});

/// Default grid accuracy: rel * exp(log_majorant_sum(r)), rel = 2^-64.
double grid_epsilon(const CoefficientSequence& seq, double r, double rel = 0x1p-64);

/// Compact view of one evaluation used by the scanning algorithms.
struct Sample {
    std::complex<double> z;
    double log_abs = 0.0;   // log |f(z)| (computed value)
    double arg = 0.0;       // arg f(z)
    double log_bound = 0.0; // log of the total error bound
    bool flagged = false;   // |f| <= total bound: value unresolvable
};

Sample sample_f(const CoefficientSequence& seq, std::complex<double> z, double eps);

struct GridSpec {
    std::vector<double> r_values;
    int n_theta = 64;

    /// Throws std::invalid_argument unless n_theta >= 8 and r_values is nonempty and increasing.
    void validate() const;
    double theta(int j) const;
    std::size_t size() const { return r_values.size() * static_cast<std::size_t>(n_theta); }
};

struct GridPoint {
    double r = 0.0;
    double theta = 0.0;
    double log_abs_f = 0.0;
    bool flag = false;
    double trunc_bound = 0.0;
    double round_bound = 0.0;
};

/// Row-major (r outer, theta inner) table of log|f(r e^{i theta})|.
struct GridTable {
    GridSpec grid;
    std::vector<GridPoint> points;

    const GridPoint& at(std::size_t ir, int jt) const {
        return points[ir * static_cast<std::size_t>(grid.n_theta) + static_cast<std::size_t>(jt)];
    }
};

struct GridOptions {
    double rel_eps = 0x1p-64;
    /// Accuracy per radius is rel_eps * S^{1 - resolve_depth}, S = exp(log_majorant_sum(r)).
    /// Depth 0 is relative to the maximum; depth 2 resolves values down to rel_eps / S.
    double resolve_depth = 0.0;
    std::optional<Bits> precision;
};

/// OpenMP-parallel grid evaluation. Bit-identical to eval_grid_serial.
GridTable eval_grid(const CoefficientSequence& seq, const GridSpec& grid, const GridOptions& opts = {});
/// Serial reference implementation.
GridTable eval_grid_serial(const CoefficientSequence& seq, const GridSpec& grid, const GridOptions& opts = {});

/// CSV with header r,theta,log_abs_f,flag,trunc_bound,round_bound (17 significant digits).
std::string grid_to_csv(const GridTable& table);

/// Formats a double with 17 significant digits.
std::string fmt17(double v);

}  // namespace pitlab
