#include "pitlab/zeros.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

namespace pitlab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap(double a) {
    a = std::remainder(a, kTwoPi);
    return a;
}

// One boundary piece, parametrized on [0, 1] with exactly reproducible endpoints.
struct Piece {
    std::function<std::complex<double>(double)> at;
    double length = 0.0;
};

Piece arc(double r, double a, double b, bool closed) {
    const std::complex<double> start = std::polar(r, a);
    const std::complex<double> end = closed ? start : std::polar(r, b);
    return {[=](double t) {
                if (t == 0.0) return start;
                if (t == 1.0) return end;
                return std::polar(r, a + t * (b - a));
            },
            r * std::abs(b - a)};
}

Piece radial(double theta, double ra, double rb) {
    const std::complex<double> start = std::polar(ra, theta);
    const std::complex<double> end = std::polar(rb, theta);
    return {[=](double t) {
                if (t == 0.0) return start;
                if (t == 1.0) return end;
                return std::polar(ra + t * (rb - ra), theta);
            },
            std::abs(rb - ra)};
}

Piece circle(std::complex<double> c, double rho) {
    const std::complex<double> start = c + rho;
    return {[=](double t) {
                if (t == 0.0 || t == 1.0) return start;
                return c + std::polar(rho, kTwoPi * t);
            },
            kTwoPi * rho};
}

// Rate of change of log|f| along the boundary, estimated from the majorant.
double growth_rate(const CoefficientSequence& seq, double r) {
    const double a = log_majorant_sum(seq, r);
    const double b = log_majorant_sum(seq, r + 0.5);
    const double d = (std::isfinite(a) && std::isfinite(b)) ? (b - a) / 0.5 : 1.0;
    return std::max(1.0, d);
}

class Walker {
public:
    Walker(const CoefficientSequence& seq, double r_max, const WindingOptions& opts)
        : seq_(seq), opts_(opts), eps_(grid_epsilon(seq, std::max(r_max, 1e-3), opts.rel_eps)),
          h0_(0.5 * opts.step_scale / growth_rate(seq, r_max)) {}

    WindingResult run(const std::vector<Piece>& pieces) {
        double total = 0.0;
        for (const Piece& pc : pieces) total += walk(pc);
        WindingResult res;
        const double turns = total / kTwoPi;
        res.winding = static_cast<int>(std::lround(turns));
        res.snap_distance = std::abs(turns - res.winding);
        res.samples = samples_;
        if (res.snap_distance >= 0.25) throw BoundaryTooClose("winding snap distance >= 0.25");
        return res;
    }

private:
    Sample eval(std::complex<double> z) {
        Sample s = sample_f(seq_, z, eps_);
        if (s.flagged) throw BoundaryTooClose("|f| below its error bound on the contour");
        return s;
    }

    double walk(const Piece& pc) {
        if (pc.length == 0.0) return 0.0;
        const int n = std::max(opts_.min_segments, static_cast<int>(std::ceil(pc.length / h0_)));
        std::vector<Sample> s(static_cast<std::size_t>(n) + 1);
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8) if (n > 64)
        for (int j = 0; j <= n; ++j) {
            try {
                s[static_cast<std::size_t>(j)] = eval(pc.at(j == n ? 1.0 : static_cast<double>(j) / n));
            } catch (...) {
#pragma omp critical(pitlab_walker_err)
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        samples_ += static_cast<std::size_t>(n) + 1;
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            total += refine(pc, static_cast<double>(j) / n, j + 1 == n ? 1.0 : static_cast<double>(j + 1) / n,
                            s[static_cast<std::size_t>(j)], s[static_cast<std::size_t>(j) + 1], 0);
        }
        return total;
    }

    double refine(const Piece& pc, double ta, double tb, const Sample& a, const Sample& b, int depth) {
        const double d = wrap(b.arg - a.arg);
        const double tm = 0.5 * (ta + tb);
        const Sample m = eval(pc.at(tm));
        ++samples_;
        const double d1 = wrap(m.arg - a.arg);
        const double d2 = wrap(b.arg - m.arg);
        const double quarter = 0.5 * M_PI;
        if (std::abs(d) < quarter && std::abs(d1) < quarter && std::abs(d2) < quarter &&
            std::abs(d1 + d2 - d) < 1e-9) {
            return d1 + d2;
        }
        if (depth >= opts_.max_depth) throw BoundaryTooClose("argument refinement exceeded the depth limit");
        return refine(pc, ta, tm, a, m, depth + 1) + refine(pc, tm, tb, m, b, depth + 1);
    }

    const CoefficientSequence& seq_;
    WindingOptions opts_;
    double eps_;
    double h0_;
    std::size_t samples_ = 0;
};

std::vector<Piece> boundary(const SectorBox& box) {
    std::vector<Piece> pieces;
    const bool full = box.full_circle();
    pieces.push_back(arc(box.r_hi, box.theta_lo, box.theta_hi, full));
    if (!full) pieces.push_back(radial(box.theta_hi, box.r_hi, box.r_lo));
    if (box.r_lo > 0.0) pieces.push_back(arc(box.r_lo, box.theta_hi, box.theta_lo, full));
    if (!full) pieces.push_back(radial(box.theta_lo, box.r_lo, box.r_hi));
    return pieces;
}

// Offsets used when a split line or a radius has to be moved off a zero.
constexpr double kJitter[8] = {0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0};

std::vector<SectorBox> split(const SectorBox& box, int attempt) {
    const double jr = 0.037 * kJitter[attempt];
    const double jt = 0.029 * kJitter[attempt];
    const double span = box.theta_hi - box.theta_lo;
    if (box.full_circle() && box.r_lo == 0.0) {
        const double rm = box.r_hi * (0.5 + jr);
        const double t0 = box.theta_lo + jt * span;
        const double third = span / 3.0;
        return {SectorBox{0.0, rm, box.theta_lo, box.theta_hi}, SectorBox{rm, box.r_hi, t0, t0 + third},
                SectorBox{rm, box.r_hi, t0 + third, t0 + 2 * third}, SectorBox{rm, box.r_hi, t0 + 2 * third, t0 + span}};
    }
    const double rm = box.r_lo + (box.r_hi - box.r_lo) * (0.5 + jr);
    const double tm = box.theta_lo + span * (0.5 + jt);
    if (box.full_circle()) {
        const double t1 = tm + 0.5 * span;
        return {SectorBox{box.r_lo, rm, tm - 0.5 * span, tm}, SectorBox{box.r_lo, rm, tm, t1},
                SectorBox{rm, box.r_hi, tm - 0.5 * span, tm}, SectorBox{rm, box.r_hi, tm, t1}};
    }
    return {SectorBox{box.r_lo, rm, box.theta_lo, tm}, SectorBox{box.r_lo, rm, tm, box.theta_hi},
            SectorBox{rm, box.r_hi, box.theta_lo, tm}, SectorBox{rm, box.r_hi, tm, box.theta_hi}};
}

double radius_factor(int attempt) { return 1.0 + 0.005 * kJitter[attempt] / 4.0; }

long double mag(const HPComplex& v) { return std::hypot(v.re.to_long_double(), v.im.to_long_double()); }

class Locator {
public:
    Locator(const CoefficientSequence& seq, const SectorBox& root, const LocateOptions& opts)
        : seq_(seq), opts_(opts), min_diam_(opts.min_diameter_rel * root.r_hi),
          eps_(grid_epsilon(seq, root.r_hi, opts.winding.rel_eps)) {}

    std::vector<Zero> process(const SectorBox& box, int w) {
        if (w == 0) return {};
        if (w == 1) {
            Zero z;
            if (newton(box, z)) return {std::move(z)};
        }
        if (box.diameter() < min_diam_) return {cluster(box, w)};

        std::vector<SectorBox> kids;
        std::vector<int> kw;
        for (int attempt = 0; attempt < 8 && kids.empty(); ++attempt) {
            std::vector<SectorBox> cand = split(box, attempt);
            std::vector<int> wins;
            try {
                int sum = 0;
                for (const SectorBox& c : cand) {
                    wins.push_back(winding_number(seq_, c, opts_.winding).winding);
                    sum += wins.back();
                }
                if (sum != w) continue;
            } catch (const BoundaryTooClose&) {
                continue;
            }
            kids = std::move(cand);
            kw = std::move(wins);
        }
        if (kids.empty()) return {cluster(box, w)};

        std::vector<std::vector<Zero>> found(kids.size());
        std::vector<std::exception_ptr> errors(kids.size());
        for (std::size_t i = 0; i < kids.size(); ++i) {
#pragma omp task default(shared) firstprivate(i)
            {
                try {
                    found[i] = process(kids[i], kw[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        }
#pragma omp taskwait
        std::vector<Zero> out;
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (errors[i]) std::rethrow_exception(errors[i]);
            for (Zero& z : found[i]) out.push_back(std::move(z));
        }
        return out;
    }

private:
    Zero cluster(const SectorBox& box, int w) {
        Zero z;
        const std::complex<double> c = box.center();
        z.location = HPComplex(c, 192);
        z.multiplicity = w;
        const EvalResult fr = eval_f(seq_, c, eps_);
        z.newton_residual = std::abs(fr.approx());
        z.eval_bound = fr.total_bound();
        z.enclosure_radius = 0.5 * box.diameter();
        z.unresolved = true;
        return z;
    }

    bool newton(const SectorBox& box, Zero& out) {
        NewtonResult nr = newton_polish(seq_, box.center(), eps_, opts_.max_newton, 2.0 * box.r_hi + 1.0);
        if (nr.escaped) return false;
        const std::complex<double> xd = nr.x.to_complex();
        if (!box.contains(xd)) return false;
        if (!(nr.residual <= 1e3 * nr.bound)) return false;

        const double dabs = nr.abs_fprime;
        double rho = std::max({std::isfinite(nr.last_step) ? 10.0 * nr.last_step : 0.0,
                               dabs > 0 ? 1e4 * nr.bound / dabs : 0.0, 1e-10 * std::max(1.0, std::abs(xd))});
        for (int grow = 0; grow < 4 && rho < box.diameter(); ++grow, rho *= 10.0) {
            try {
                if (winding_on_circle(seq_, xd, rho, opts_.winding).winding == 1) {
                    out.location = std::move(nr.x);
                    out.multiplicity = 1;
                    out.newton_residual = nr.residual;
                    out.eval_bound = nr.bound;
                    out.enclosure_radius = rho;
                    out.unresolved = false;
                    return true;
                }
            } catch (const BoundaryTooClose&) {
            }
        }
        return false;
    }
    const CoefficientSequence& seq_;
    LocateOptions opts_;
    double min_diam_;
    double eps_;
};

void require_complete_disc(const ZeroSet& zs, double r, const char* what) {
    if (!zs.completeness_certificate) throw std::invalid_argument(std::string(what) + ": zero set is incomplete");
    const SectorBox& b = zs.search_box;
    if (b.r_lo != 0.0 || !b.full_circle() || b.r_hi < r) {
        throw std::invalid_argument(std::string(what) + ": zero set does not cover the disc");
    }
}

}  // namespace

// ---------------------------------------------------------------------------

NewtonResult newton_polish(const CoefficientSequence& seq, std::complex<double> start, double eps, int max_iter,
                           double escape_radius) {
    const Bits P = 192;
    NewtonResult res;
    HPComplex x(start, P), step(P), nx(P), fv(P), dv(P);
    Real t1(P), t2(P), t3(P);
    res.last_step = kInf;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        const EvalResult fr = eval_f(seq, x, eps);
        if (mag(fr.value) <= fr.total_bound()) break;
        const EvalResult fp = eval_fprime(seq, x, eps);
        if (fp.value.re.is_zero() && fp.value.im.is_zero()) break;
        set(fv, fr.value);
        set(dv, fp.value);
        div(step, fv, dv, t1, t2, t3);
        sub(nx, x, step);
        x.re.swap(nx.re);
        x.im.swap(nx.im);
        res.last_step = static_cast<double>(mag(step));
        if (!(static_cast<double>(mag(x)) < escape_radius)) {
            res.escaped = true;
            break;
        }
        if (res.last_step <= 1e-40 * (1.0 + static_cast<double>(mag(x)))) break;
    }
    const EvalResult fr = eval_f(seq, x, eps);
    res.residual = static_cast<double>(mag(fr.value));
    res.bound = fr.total_bound();
    res.abs_fprime = std::abs(eval_fprime(seq, x, eps).approx());
    res.x = std::move(x);
    return res;
}

void SectorBox::validate() const {
    if (!(r_lo >= 0.0 && r_hi > r_lo)) throw std::invalid_argument("sector box needs 0 <= r_lo < r_hi");
    const double span = theta_hi - theta_lo;
    if (!(span > 0.0 && span <= kTwoPi + 1e-12)) throw std::invalid_argument("sector box needs 0 < theta span <= 2 pi");
}

bool SectorBox::full_circle() const { return theta_hi - theta_lo >= kTwoPi - 1e-12; }

bool SectorBox::contains(std::complex<double> z) const {
    const double r = std::abs(z);
    if (r < r_lo || r > r_hi) return false;
    if (full_circle() || r == 0.0) return true;
    double t = std::arg(z) - theta_lo;
    t -= kTwoPi * std::floor(t / kTwoPi);
    return t <= theta_hi - theta_lo;
}

std::complex<double> SectorBox::center() const {
    if (full_circle() && r_lo == 0.0) return {0.0, 0.0};
    return std::polar(0.5 * (r_lo + r_hi), 0.5 * (theta_lo + theta_hi));
}

double SectorBox::diameter() const {
    if (full_circle()) return 2.0 * r_hi;
    const std::complex<double> c = center();
    double far = 0.0;
    for (int j = 0; j <= 16; ++j) {
        const double t = theta_lo + (theta_hi - theta_lo) * j / 16.0;
        far = std::max({far, std::abs(std::polar(r_hi, t) - c), std::abs(std::polar(r_lo, t) - c)});
    }
    return 2.0 * far;
}

WindingResult winding_number(const CoefficientSequence& seq, const SectorBox& box, const WindingOptions& opts) {
    box.validate();
    Walker w(seq, box.r_hi, opts);
    return w.run(boundary(box));
}

WindingResult winding_on_circle(const CoefficientSequence& seq, std::complex<double> center, double radius,
                                const WindingOptions& opts) {
    if (!(radius > 0.0)) throw std::invalid_argument("winding_on_circle needs a positive radius");
    Walker w(seq, std::abs(center) + radius, opts);
    return w.run({circle(center, radius)});
}

int ZeroSet::total_multiplicity() const {
    int s = 0;
    for (const Zero& z : zeros) s += z.multiplicity;
    return s;
}

ZeroSet locate_zeros(const CoefficientSequence& seq, const SectorBox& box, const LocateOptions& opts) {
    box.validate();
    ZeroSet zs;
    bool have = false;
    for (int attempt = 0; attempt < 8 && !have; ++attempt) {
        SectorBox b = box;
        b.r_hi = box.r_hi * radius_factor(attempt);
        try {
            zs.box_winding = winding_number(seq, b, opts.winding).winding;
            zs.search_box = b;
            have = true;
        } catch (const BoundaryTooClose&) {
        }
    }
    if (!have) throw std::runtime_error("locate_zeros: search boundary stays too close to a zero");

    Locator loc(seq, zs.search_box, opts);
    std::exception_ptr err;
#pragma omp parallel
#pragma omp single
    {
        try {
            zs.zeros = loc.process(zs.search_box, zs.box_winding);
        } catch (...) {
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    std::sort(zs.zeros.begin(), zs.zeros.end(), [](const Zero& a, const Zero& b) {
        const double ra = std::abs(a.z()), rb = std::abs(b.z());
        if (ra != rb) return ra < rb;
        return std::arg(a.z()) < std::arg(b.z());
    });
    zs.completeness_certificate = zs.total_multiplicity() == zs.box_winding;
    return zs;
}

AngularDensity angular_density(const ZeroSet& zs, double r, int sectors) {
    if (sectors < 1) throw std::invalid_argument("angular_density needs at least one sector");
    require_complete_disc(zs, r, "angular_density");
    AngularDensity out;
    out.sectors.assign(static_cast<std::size_t>(sectors), SectorCount{0, r / sectors});
    for (const Zero& z : zs.zeros) {
        const std::complex<double> p = z.z();
        if (std::abs(p) > r) continue;
        double t = (std::arg(p) + M_PI) / kTwoPi;
        auto j = static_cast<int>(std::floor(t * sectors));
        j = std::clamp(j, 0, sectors - 1);
        out.sectors[static_cast<std::size_t>(j)].count += z.multiplicity;
    }
    for (const SectorCount& s : out.sectors) {
        out.max_relative_deviation = std::max(out.max_relative_deviation, std::abs(s.count - s.expected) / s.expected);
    }
    return out;
}

std::complex<double> reciprocal_sum(const ZeroSet& zs, double R) {
    require_complete_disc(zs, R, "reciprocal_sum");
    std::complex<double> s = 0.0;
    for (const Zero& z : zs.zeros) {
        const std::complex<double> p = z.z();
        if (std::abs(p) > R) continue;
        if (p == 0.0) throw std::domain_error("reciprocal_sum: zero at the origin");
        s += static_cast<double>(z.multiplicity) / p;
    }
    return s;
}

SeparationReport separation_report(const ZeroSet& zs) {
    SeparationReport rep;
    rep.min_distance = kInf;
    rep.histogram.assign(16, 0);
    const std::size_t n = zs.zeros.size();
    const double unit = std::sqrt(kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
        if (zs.zeros[i].multiplicity >= 2 || zs.zeros[i].unresolved) rep.multiple.push_back(i);
        double nn = kInf;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) nn = std::min(nn, std::abs(zs.zeros[i].z() - zs.zeros[j].z()));
        }
        rep.min_distance = std::min(rep.min_distance, nn);
        if (std::isfinite(nn)) {
            rep.nearest_normalized.push_back(nn / unit);
            const auto bin = std::min<std::size_t>(15, static_cast<std::size_t>(nn / unit / 0.25));
            ++rep.histogram[bin];
        }
    }
    return rep;
}

ZeroCount count_zeros(const CoefficientSequence& seq, double r, const WindingOptions& opts) {
    if (!(r > 0.0)) throw std::invalid_argument("count_zeros needs r > 0");
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double rr = r * radius_factor(attempt);
        try {
            const WindingResult w = winding_number(seq, SectorBox::disc(rr), opts);
            return ZeroCount{w.winding, rr, w.snap_distance};
        } catch (const BoundaryTooClose&) {
        }
    }
    throw std::runtime_error("count_zeros: circle stays too close to a zero after 8 perturbations");
}

std::string zeros_to_csv(const ZeroSet& zs) {
    std::ostringstream os;
    os << "re,im,multiplicity,newton_residual,enclosure_radius\n";
    for (const Zero& z : zs.zeros) {
        os << fmt17(z.location.re.to_double()) << ',' << fmt17(z.location.im.to_double()) << ',' << z.multiplicity
           << ',' << fmt17(z.newton_residual) << ',' << fmt17(z.enclosure_radius) << '\n';
    }
    return os.str();
}

nlohmann::json zeros_to_json(const ZeroSet& zs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Zero& z : zs.zeros) {
        arr.push_back({{"re", z.location.re.to_double()},
                       {"im", z.location.im.to_double()},
                       {"multiplicity", z.multiplicity},
                       {"newton_residual", z.newton_residual},
                       {"enclosure_radius", z.enclosure_radius},
                       {"unresolved", z.unresolved}});
    }
    const SectorBox& b = zs.search_box;
    return {{"search_box", {{"r_lo", b.r_lo}, {"r_hi", b.r_hi}, {"theta_lo", b.theta_lo}, {"theta_hi", b.theta_hi}}},
            {"box_winding", zs.box_winding},
            {"completeness_certificate", zs.completeness_certificate},
            {"zeros", arr}};
}

}  // namespace pitlab
