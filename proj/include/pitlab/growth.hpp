#pragma once

// Growth diagnostics on circles and polar grids: maximum modulus, indicator
// estimates, deviation from completely regular growth, pits and their covering
// sums, rescaling frames, and the ratio of maximum modulus to quadratic mean.

#include "pitlab/eval.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <string>
#include <vector>

namespace pitlab {

/// Reference indicator h_ref(theta) used for deviations.
struct ReferenceIndicator {
    enum class Kind { Constant, Cosine, NegCosine };
    Kind kind = Kind::Constant;
    double value = 1.0;  // Constant only

    static ReferenceIndicator constant(double v) { return {Kind::Constant, v}; }
    static ReferenceIndicator cosine() { return {Kind::Cosine, 0.0}; }
    static ReferenceIndicator neg_cosine() { return {Kind::NegCosine, 0.0}; }
    /// "cos", "-cos" or a number.
    static ReferenceIndicator parse(const std::string& text);

    double operator()(double theta) const;
    std::string to_string() const;
};

struct MaxModulus {
    double log_M = 0.0;
    double theta = 0.0;     // maximizing angle
    double accuracy = 0.0;  // spread of log|f| over the final refinement bracket plus evaluation error
};

/// 1024-angle scan followed by golden-section refinement around the 8 best angles.
MaxModulus max_modulus(const CoefficientSequence& seq, double r);

struct IndicatorProfile {
    std::vector<double> theta;
    std::vector<double> h_est;       // NaN where indeterminate
    std::vector<int> n_samples;      // unflagged samples used per angle
    std::vector<bool> indeterminate;
    double r_min = 0.0;
    double r_max = 0.0;
    double rho = 1.0;

    double max_abs_deviation(double target) const;
    double min_value() const;
};

struct IndicatorOptions {
    int n_r = 16;               // geometric radii in the window
    double rel_eps = 0x1p-30;
    double resolve_depth = 2.0; // accuracy rel_eps * S^{1 - depth}, as in GridOptions
};

/// h_est(theta) = max over the r-window of log|f(r e^{i theta})| / r^rho, skipping
/// samples that cannot be resolved. Needs r_max/r_min >= 2 and at least 64 angles.
IndicatorProfile indicator_estimate(const CoefficientSequence& seq, const std::vector<double>& theta,
                                    double r_min, double r_max, double rho, const IndicatorOptions& opts = {});

/// Single-threaded reference for indicator_estimate; results are identical.
IndicatorProfile indicator_estimate_serial(const CoefficientSequence& seq, const std::vector<double>& theta,
                                           double r_min, double r_max, double rho, const IndicatorOptions& opts = {});

/// n angles spaced as in GridSpec: -pi + 2 pi j / n.
std::vector<double> uniform_angles(int n);

struct CrgReport {
    GridTable table;
    std::vector<double> deviation;        // log|f|/r^rho - h_ref, per grid point (-inf when flagged)
    std::vector<double> bad_fraction;     // per radius: fraction of |d| > delta
};

/// Grid evaluation is done with resolve depth 2 so that small values are resolved.
CrgReport crg_deviation(const CoefficientSequence& seq, const GridSpec& grid, double delta, double rho,
                        const ReferenceIndicator& h_ref, double rel_eps = 0x1p-30);

struct Pit {
    std::complex<double> center;
    double angular_extent = 0.0;  // arc length
    double radial_extent = 0.0;
    double depth = 0.0;           // min deviation found
    double radius = 0.0;
    int cells = 0;                // grid points in the component (0 when found by refinement only)
    bool refined = false;         // located by descent from a grid minimum
};

struct PitReport {
    std::vector<Pit> pits;
    int grid_components = 0;      // components of the thresholded grid alone
    double covering_sum = 0.0;    // sum radius^eta
    double eta = 1.0;
    double delta = 0.0;

    /// Pits with r_lo <= |center| <= r_hi.
    int count_in(double r_lo, double r_hi) const;
};

/// Pits of {log|f|/r^rho < h_ref - delta} on the grid, merged with pits reached by
/// Newton descent from strict grid minima of |f| inside the grid annulus.
PitReport pit_detect(const CoefficientSequence& seq, const GridSpec& grid, double delta, double eta, double rho,
                     const ReferenceIndicator& h_ref, double rel_eps = 0x1p-30);

struct RatioSeries {
    std::vector<double> r;
    std::vector<double> log_M;
    std::vector<double> m2;
    std::vector<double> ratio;
};

/// m2 from the coefficient side (parseval_m2 with relative tolerance rel_tol), M from max_modulus.
RatioSeries levy_ratio(const CoefficientSequence& seq, const std::vector<double>& r_values, double rel_tol = 1e-15);

struct AzarinFrame {
    double t = 1.0;
    std::vector<double> radii;    // on the unit disc
    std::vector<double> theta;
    std::vector<double> u;        // t^{-rho} log|f(t z)|, row-major (radius outer)
    std::vector<bool> flagged;
    double sup_deviation = 0.0;   // sup |u - h_ref |z|^rho| over unflagged points
    double mean_deviation = 0.0;
};

AzarinFrame azarin_rescale(const CoefficientSequence& seq, double t, const std::vector<double>& radii,
                           const std::vector<double>& theta, double rho, const ReferenceIndicator& h_ref,
                           double rel_eps = 0x1p-30);

struct ParsevalCheck {
    double exact = 0.0;       // coefficient-side m2
    double quadrature = 0.0;  // trapezoidal m2
    double relative_discrepancy = 0.0;
};

/// n_nodes must be a power of two >= 256.
ParsevalCheck parseval_quadrature_check(const CoefficientSequence& seq, double r, int n_nodes);

struct ModulusFit {
    std::size_t n = 0;
    double slope = 0.0;   // -log c_n / (n log n)
    double c = 0.0;       // (log c_n + n log n / rho) / n
    double rho = 1.0;
    double sigma = 0.0;   // e^{c rho} / (e rho)
};

/// Partial-product fit of the product moduli c_n = b_0 ... b_{n-1} at index n.
ModulusFit product_modulus_fit(double s_hadamard, std::size_t n);

// Output helpers
std::string indicator_to_csv(const IndicatorProfile& p);
nlohmann::json pits_to_json(const PitReport& p);
std::string ratio_to_csv(const RatioSeries& s);

}  // namespace pitlab
