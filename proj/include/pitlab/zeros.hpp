#pragma once

// Zero counting and localization by the argument principle.
//
// Winding numbers are accumulated along the positively oriented boundary of a
// polar box from sampled values of arg f. A step is accepted only when its
// argument increment and both half-step increments are below pi/2 in modulus
// and consistent; otherwise the step is halved. Samples whose computed |f| does
// not exceed the evaluation error bound abort the contour.

#include "pitlab/eval.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitlab {

/// Polar box {r_lo <= |z| <= r_hi, theta_lo <= arg z <= theta_hi}. r_lo = 0 gives a
/// disc or a pie slice; theta_hi - theta_lo = 2 pi gives a full annulus or disc.
struct SectorBox {
    double r_lo = 0.0;
    double r_hi = 1.0;
    double theta_lo = -M_PI;
    double theta_hi = M_PI;

    static SectorBox disc(double r) { return {0.0, r, -M_PI, M_PI}; }

    /// Throws std::invalid_argument on an empty or over-wide box.
    void validate() const;
    bool full_circle() const;
    bool contains(std::complex<double> z) const;
    std::complex<double> center() const;
    /// Diameter of the smallest disc around center() covering the box.
    double diameter() const;
};

class BoundaryTooClose : public std::runtime_error {
public:
    explicit BoundaryTooClose(const std::string& what) : std::runtime_error(what) {}
};

struct WindingOptions {
    double rel_eps = 0x1p-96;  // evaluation accuracy relative to the majorant sum
    double step_scale = 1.0;   // initial step multiplier; 0.5 doubles the sampling density
    int max_depth = 12;        // step halvings before giving up on a segment
    int min_segments = 8;      // per boundary piece
};

struct WindingResult {
    int winding = 0;
    double snap_distance = 0.0;   // |total/(2 pi) - winding|
    std::size_t samples = 0;
};

/// Winding number of f around the boundary of `box`.
/// Throws BoundaryTooClose when a sample is unresolvable or refinement exceeds max_depth.
WindingResult winding_number(const CoefficientSequence& seq, const SectorBox& box, const WindingOptions& opts = {});

/// Winding number of f around the circle |z - center| = radius.
WindingResult winding_on_circle(const CoefficientSequence& seq, std::complex<double> center, double radius,
                                const WindingOptions& opts = {});

struct NewtonResult {
    HPComplex x{192};
    double residual = 0.0;     // |f(x)|
    double bound = 0.0;        // evaluation error bound at x
    double last_step = 0.0;
    double abs_fprime = 0.0;   // |f'(x)|
    int iterations = 0;
    bool escaped = false;      // an iterate reached |x| >= escape_radius
};

/// Newton iteration x <- x - f(x)/f'(x) at 192 bits with evaluation accuracy eps.
/// Stops when |f| is below its error bound, the step stalls, or max_iter is reached.
NewtonResult newton_polish(const CoefficientSequence& seq, std::complex<double> start, double eps, int max_iter,
                           double escape_radius);

struct Zero {
    HPComplex location{192};
    int multiplicity = 1;
    double newton_residual = 0.0;  // |f(location)|
    double eval_bound = 0.0;       // evaluation error bound at location
    double enclosure_radius = 0.0; // circle with winding = multiplicity
    bool unresolved = false;       // cluster kept at minimum box size, not Newton-certified

    std::complex<double> z() const { return location.to_complex(); }
};

struct ZeroSet {
    std::vector<Zero> zeros;
    SectorBox search_box;
    int box_winding = 0;
    bool completeness_certificate = false;  // sum of multiplicities == box_winding

    int total_multiplicity() const;
};

struct LocateOptions {
    WindingOptions winding;
    int max_newton = 60;
    double min_diameter_rel = 0x1p-20;  // relative to the search box r_hi
};

/// Subdivides until every box has winding 0, or winding 1 with a Newton-certified zero.
/// Boxes whose winding stays >= 2 at minimum size are kept as clusters. When the
/// outer boundary is too close to a zero the search radius is perturbed by up to 0.5%.
ZeroSet locate_zeros(const CoefficientSequence& seq, const SectorBox& box, const LocateOptions& opts = {});

struct SectorCount {
    int count = 0;
    double expected = 0.0;
};

struct AngularDensity {
    std::vector<SectorCount> sectors;
    double max_relative_deviation = 0.0;
};

/// Zero counts in `sectors` equal angular sectors of |z| <= r against (theta2 - theta1) r / 2 pi.
/// Throws std::invalid_argument unless zs is complete on a disc of radius >= r.
AngularDensity angular_density(const ZeroSet& zs, double r, int sectors);

/// sum over |z_k| <= R of multiplicity / z_k. Same completeness requirement.
std::complex<double> reciprocal_sum(const ZeroSet& zs, double R);

struct SeparationReport {
    double min_distance = 0.0;                 // over distinct pairs; +inf with fewer than 2 zeros
    std::vector<double> nearest_normalized;    // nearest-neighbour distance / sqrt(2 pi), per zero
    std::vector<int> histogram;                // bins of width 0.25 over [0, 4), last bin open
    std::vector<std::size_t> multiple;         // indices of multiplicity >= 2 or unresolved entries
};

SeparationReport separation_report(const ZeroSet& zs);

struct ZeroCount {
    int count = 0;
    double radius = 0.0;  // radius actually used after perturbation
    double snap_distance = 0.0;
};

/// Number of zeros in |z| < r, perturbing r by up to 0.5% (8 attempts) when the
/// circle passes too close to a zero. Throws std::runtime_error if every attempt fails.
ZeroCount count_zeros(const CoefficientSequence& seq, double r, const WindingOptions& opts = {});

/// CSV with header re,im,multiplicity,newton_residual,enclosure_radius.
std::string zeros_to_csv(const ZeroSet& zs);
nlohmann::json zeros_to_json(const ZeroSet& zs);

}  // namespace pitlab
