#include "pitlab/growth.hpp"

#include "pitlab/zeros.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pitlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_abs_at(const CoefficientSequence& seq, double r, double theta, double eps, double* bound = nullptr) {
    const EvalResult res = eval_f(seq, std::polar(r, theta), eps);
    if (bound) *bound = res.total_bound();
    return res.value.log_abs();
}

double deep_eps(const CoefficientSequence& seq, double r, double rel, double depth) {
    return rel * std::exp((1.0 - depth) * log_majorant_sum(seq, r));
}

// Maximizes g on [a, b] by golden-section search; returns (argmax, value, spread over final bracket).
template <class G>
std::tuple<double, double, double> golden_max(G&& g, double a, double b, int iters) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int i = 0; i < iters; ++i) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return gc > gd ? std::tuple{c, gc, std::abs(gc - gd)} : std::tuple{d, gd, std::abs(gc - gd)};
}

}  // namespace

// ---------------------------------------------------------------------------

ReferenceIndicator ReferenceIndicator::parse(const std::string& text) {
    if (text == "cos") return cosine();
    if (text == "-cos") return neg_cosine();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw std::invalid_argument("h_ref must be cos, -cos or a number");
    return constant(v);
}

double ReferenceIndicator::operator()(double theta) const {
    switch (kind) {
        case Kind::Cosine: return std::cos(theta);
        case Kind::NegCosine: return -std::cos(theta);
        case Kind::Constant: break;
    }
    return value;
}

std::string ReferenceIndicator::to_string() const {
    switch (kind) {
        case Kind::Cosine: return "cos";
        case Kind::NegCosine: return "-cos";
        case Kind::Constant: break;
    }
    return fmt17(value);
}

MaxModulus max_modulus(const CoefficientSequence& seq, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("max_modulus needs r > 0");
    constexpr int kScan = 1024;
    constexpr int kTop = 8;
    const double eps = grid_epsilon(seq, r);
    const double h = 2.0 * M_PI / kScan;

    std::vector<double> v(kScan), bnd(kScan);
#pragma omp parallel for schedule(dynamic, 16)
    for (int j = 0; j < kScan; ++j) v[j] = log_abs_at(seq, r, -M_PI + h * j, eps, &bnd[j]);

    std::vector<int> idx(kScan);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + kTop, idx.end(), [&](int a, int b) {
        return v[a] != v[b] ? v[a] > v[b] : a < b;
    });

    std::vector<std::tuple<double, double, double>> refined(kTop);
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < kTop; ++k) {
        const double t0 = -M_PI + h * idx[k];
        refined[k] = golden_max([&](double t) { return log_abs_at(seq, r, t, eps); }, t0 - h, t0 + h, 40);
    }

    MaxModulus out;
    out.log_M = v[idx[0]];
    out.theta = -M_PI + h * idx[0];
    out.accuracy = 0.0;
    for (int k = 0; k < kTop; ++k) {  // index order keeps ties deterministic
        const auto [t, val, spread] = refined[k];
        if (val > out.log_M) {
            out.log_M = val;
            out.theta = std::remainder(t, 2.0 * M_PI);
            out.accuracy = spread;
        }
    }
    out.accuracy += bnd[idx[0]] / std::exp(out.log_M);
    return out;
}

std::vector<double> uniform_angles(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = M_PI * (2.0 * j / n - 1.0);
    return t;
}

double IndicatorProfile::max_abs_deviation(double target) const {
    double m = 0.0;
    for (std::size_t i = 0; i < h_est.size(); ++i) {
        if (!indeterminate[i]) m = std::max(m, std::abs(h_est[i] - target));
    }
    return m;
}

double IndicatorProfile::min_value() const {
    double m = kInf;
    for (std::size_t i = 0; i < h_est.size(); ++i) {
        if (!indeterminate[i]) m = std::min(m, h_est[i]);
    }
    return m;
}

namespace {

struct IndicatorPlan {
    std::vector<double> radii;
    std::vector<double> eps;
};

IndicatorPlan indicator_plan(const CoefficientSequence& seq, const std::vector<double>& theta, double r_min,
                             double r_max, const IndicatorOptions& opts) {
    if (!(r_min > 0.0 && r_max >= 2.0 * r_min)) throw std::invalid_argument("indicator window needs r_max/r_min >= 2");
    if (theta.size() < 64) throw std::invalid_argument("indicator needs at least 64 angles");
    if (opts.n_r < 2) throw std::invalid_argument("indicator needs at least 2 radii");
    IndicatorPlan plan;
    for (int k = 0; k < opts.n_r; ++k) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (opts.n_r - 1));
        plan.radii.push_back(r);
        plan.eps.push_back(deep_eps(seq, r, opts.rel_eps, opts.resolve_depth));
    }
    return plan;
}

IndicatorProfile indicator_shell(const std::vector<double>& theta, double r_min, double r_max, double rho) {
    IndicatorProfile p;
    p.theta = theta;
    p.r_min = r_min;
    p.r_max = r_max;
    p.rho = rho;
    p.h_est.assign(theta.size(), kNaN);
    p.n_samples.assign(theta.size(), 0);
    p.indeterminate.assign(theta.size(), true);
    return p;
}

// Max of log|f|/r^rho over the window at one angle; returns the number of resolved samples.
int indicator_at(const CoefficientSequence& seq, const IndicatorPlan& plan, double theta, double rho, double& best) {
    best = -kInf;
    int used = 0;
    for (std::size_t k = 0; k < plan.radii.size(); ++k) {
        double bound = 0.0;
        const double la = log_abs_at(seq, plan.radii[k], theta, plan.eps[k], &bound);
        if (!(la > std::log(bound))) continue;  // unresolved: a pit at this sample
        best = std::max(best, la / std::pow(plan.radii[k], rho));
        ++used;
    }
    return used;
}

}  // namespace

IndicatorProfile indicator_estimate(const CoefficientSequence& seq, const std::vector<double>& theta, double r_min,
                                    double r_max, double rho, const IndicatorOptions& opts) {
    const IndicatorPlan plan = indicator_plan(seq, theta, r_min, r_max, opts);
    IndicatorProfile p = indicator_shell(theta, r_min, r_max, rho);
    const auto n = static_cast<int>(theta.size());
    std::vector<double> best(theta.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < n; ++j) p.n_samples[j] = indicator_at(seq, plan, theta[j], rho, best[j]);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (p.n_samples[j] == 0) continue;
        p.h_est[j] = best[j];
        p.indeterminate[j] = false;
    }
    return p;
}

IndicatorProfile indicator_estimate_serial(const CoefficientSequence& seq, const std::vector<double>& theta,
                                           double r_min, double r_max, double rho, const IndicatorOptions& opts) {
    const IndicatorPlan plan = indicator_plan(seq, theta, r_min, r_max, opts);
    IndicatorProfile p = indicator_shell(theta, r_min, r_max, rho);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        double best = 0.0;
        p.n_samples[j] = indicator_at(seq, plan, theta[j], rho, best);
        if (p.n_samples[j] == 0) continue;
        p.h_est[j] = best;
        p.indeterminate[j] = false;
    }
    return p;
}

CrgReport crg_deviation(const CoefficientSequence& seq, const GridSpec& grid, double delta, double rho,
                        const ReferenceIndicator& h_ref, double rel_eps) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("crg_deviation needs delta in (0, 1)");
    GridOptions go;
    go.rel_eps = rel_eps;
    go.resolve_depth = 2.0;
    CrgReport rep{eval_grid(seq, grid, go), {}, {}};
    rep.deviation.resize(rep.table.points.size());
    rep.bad_fraction.assign(grid.r_values.size(), 0.0);
    for (std::size_t ir = 0; ir < grid.r_values.size(); ++ir) {
        int bad = 0;
        for (int jt = 0; jt < grid.n_theta; ++jt) {
            const GridPoint& gp = rep.table.at(ir, jt);
            const double d = gp.flag ? -kInf : gp.log_abs_f / std::pow(gp.r, rho) - h_ref(gp.theta);
            rep.deviation[ir * static_cast<std::size_t>(grid.n_theta) + static_cast<std::size_t>(jt)] = d;
            if (std::abs(d) > delta) ++bad;
        }
        rep.bad_fraction[ir] = static_cast<double>(bad) / grid.n_theta;
    }
    return rep;
}

// ---------------------------------------------------------------------------

int PitReport::count_in(double r_lo, double r_hi) const {
    return static_cast<int>(std::count_if(pits.begin(), pits.end(), [&](const Pit& p) {
        const double r = std::abs(p.center);
        return r >= r_lo && r <= r_hi;
    }));
}

PitReport pit_detect(const CoefficientSequence& seq, const GridSpec& grid, double delta, double eta, double rho,
                     const ReferenceIndicator& h_ref, double rel_eps) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("pit_detect needs eta in (0, 1]");
    const CrgReport crg = crg_deviation(seq, grid, delta, rho, h_ref, rel_eps);
    const std::size_t nr = grid.r_values.size();
    const int nt = grid.n_theta;
    const double dtheta = 2.0 * M_PI / nt;
    auto id = [nt](std::size_t ir, int jt) { return ir * static_cast<std::size_t>(nt) + static_cast<std::size_t>(jt); };
    auto dr_at = [&](std::size_t ir) {
        if (nr == 1) return 0.0;
        const std::size_t a = ir == 0 ? 0 : ir - 1, b = std::min(nr - 1, ir + 1);
        return (grid.r_values[b] - grid.r_values[a]) / static_cast<double>(b - a);
    };

    PitReport rep;
    rep.eta = eta;
    rep.delta = delta;

    // 8-neighbour components of {d < -delta}, periodic in theta.
    std::vector<int> label(crg.deviation.size(), -1);
    for (std::size_t ir0 = 0; ir0 < nr; ++ir0) {
        for (int jt0 = 0; jt0 < nt; ++jt0) {
            if (!(crg.deviation[id(ir0, jt0)] < -delta) || label[id(ir0, jt0)] >= 0) continue;
            const int comp = rep.grid_components++;
            std::vector<std::pair<std::size_t, int>> stack{{ir0, jt0}}, cells;
            label[id(ir0, jt0)] = comp;
            while (!stack.empty()) {
                auto [ir, jt] = stack.back();
                stack.pop_back();
                cells.push_back({ir, jt});
                for (int di = -1; di <= 1; ++di) {
                    for (int dj = -1; dj <= 1; ++dj) {
                        if (!di && !dj) continue;
                        const long ni = static_cast<long>(ir) + di;
                        if (ni < 0 || ni >= static_cast<long>(nr)) continue;
                        const int nj = (jt + dj + nt) % nt;
                        const std::size_t k = id(static_cast<std::size_t>(ni), nj);
                        if (label[k] < 0 && crg.deviation[k] < -delta) {
                            label[k] = comp;
                            stack.push_back({static_cast<std::size_t>(ni), nj});
                        }
                    }
                }
            }
            Pit pit;
            pit.cells = static_cast<int>(cells.size());
            pit.depth = kInf;
            std::vector<char> cols(static_cast<std::size_t>(nt), 0);
            std::size_t ir_lo = nr, ir_hi = 0;
            for (auto [ir, jt] : cells) {
                cols[static_cast<std::size_t>(jt)] = 1;
                ir_lo = std::min(ir_lo, ir);
                ir_hi = std::max(ir_hi, ir);
                const double d = crg.deviation[id(ir, jt)];
                if (d < pit.depth) {
                    pit.depth = d;
                    pit.center = std::polar(grid.r_values[ir], grid.theta(jt));
                }
            }
            const double rc = std::abs(pit.center);
            const int ncols = static_cast<int>(std::count(cols.begin(), cols.end(), 1));
            pit.angular_extent = ncols * dtheta * rc;
            pit.radial_extent = (grid.r_values[ir_hi] - grid.r_values[ir_lo]) + dr_at(ir_lo);
            pit.radius = 0.5 * std::max(pit.angular_extent, pit.radial_extent);
            rep.pits.push_back(pit);
        }
    }

    // Strict local minima of log|f| on the grid, refined by Newton descent.
    std::vector<std::size_t> minima;
    for (std::size_t ir = 0; ir < nr; ++ir) {
        for (int jt = 0; jt < nt; ++jt) {
            const double v = crg.table.at(ir, jt).log_abs_f;
            bool strict = true;
            for (int di = -1; di <= 1 && strict; ++di) {
                for (int dj = -1; dj <= 1 && strict; ++dj) {
                    if (!di && !dj) continue;
                    const long ni = static_cast<long>(ir) + di;
                    if (ni < 0 || ni >= static_cast<long>(nr)) continue;
                    if (crg.table.at(static_cast<std::size_t>(ni), (jt + dj + nt) % nt).log_abs_f <= v) strict = false;
                }
            }
            if (strict) minima.push_back(id(ir, jt));
        }
    }

    const double r_lo = grid.r_values.front(), r_hi = grid.r_values.back();
    const double eps = deep_eps(seq, r_hi, rel_eps * 0x1p-30, 2.0);
    std::vector<Pit> refined(minima.size());
    std::vector<char> keep(minima.size(), 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t m = 0; m < minima.size(); ++m) {
        const GridPoint& gp = crg.table.points[minima[m]];
        const NewtonResult nr_ = newton_polish(seq, std::polar(gp.r, gp.theta), eps, 40, 2.0 * r_hi);
        if (nr_.escaped) continue;
        const std::complex<double> x = nr_.x.to_complex();
        const double r = std::abs(x);
        if (r < r_lo || r > r_hi) continue;
        const double level = (h_ref(std::arg(x)) - delta) * std::pow(r, rho);
        const double la = nr_.residual > 0 ? std::log(nr_.residual) : -kInf;
        if (!(la < level)) continue;
        Pit pit;
        pit.center = x;
        pit.depth = la / std::pow(r, rho) - h_ref(std::arg(x));
        // first-order radius of {|f| < e^{level}} around the descent point
        pit.radius = nr_.abs_fprime > 0 ? std::max(0.0, std::exp(level) - nr_.residual) / nr_.abs_fprime : 0.0;
        pit.angular_extent = pit.radial_extent = 2.0 * pit.radius;
        pit.refined = true;
        refined[m] = pit;
        keep[m] = 1;
    }

    // Merge refined pits, in grid order, into grid components or earlier refined pits.
    for (std::size_t m = 0; m < minima.size(); ++m) {
        if (!keep[m]) continue;
        const Pit& cand = refined[m];
        bool merged = false;
        for (Pit& p : rep.pits) {
            const double tol = p.refined && p.cells == 0 ? std::max(p.radius + cand.radius, 1e-9 * std::abs(p.center))
                                                        : p.radius + 0.5 * dtheta * std::abs(p.center);
            if (std::abs(p.center - cand.center) <= tol) {
                if (cand.depth < p.depth) p.depth = cand.depth;
                p.refined = true;
                merged = true;
                break;
            }
        }
        if (!merged) rep.pits.push_back(cand);
    }

    for (const Pit& p : rep.pits) rep.covering_sum += std::pow(p.radius, eta);
    return rep;
}

RatioSeries levy_ratio(const CoefficientSequence& seq, const std::vector<double>& r_values, double rel_tol) {
    for (std::size_t i = 1; i < r_values.size(); ++i) {
        if (!(r_values[i] > r_values[i - 1])) throw std::invalid_argument("levy_ratio needs increasing radii");
    }
    RatioSeries s;
    for (double r : r_values) {
        const MaxModulus mm = max_modulus(seq, r);
        const BoundedValue m2 = parseval_m2(seq, r, rel_tol);
        s.r.push_back(r);
        s.log_M.push_back(mm.log_M);
        s.m2.push_back(m2.value);
        s.ratio.push_back(std::exp(mm.log_M - std::log(m2.value)));
    }
    return s;
}

AzarinFrame azarin_rescale(const CoefficientSequence& seq, double t, const std::vector<double>& radii,
                           const std::vector<double>& theta, double rho, const ReferenceIndicator& h_ref,
                           double rel_eps) {
    if (!(t >= 1.0)) throw std::invalid_argument("azarin_rescale needs t >= 1");
    AzarinFrame fr;
    fr.t = t;
    fr.radii = radii;
    fr.theta = theta;
    const std::size_t n = radii.size() * theta.size();
    fr.u.assign(n, 0.0);
    std::vector<char> flagged(n, 0);
    const double scale = std::pow(t, -rho);
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long k = 0; k < count; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) / theta.size(), j = static_cast<std::size_t>(k) % theta.size();
        const double R = t * radii[i];
        double bound = 0.0;
        const double la = log_abs_at(seq, R, theta[j], deep_eps(seq, R, rel_eps, 2.0), &bound);
        fr.u[static_cast<std::size_t>(k)] = scale * la;
        flagged[static_cast<std::size_t>(k)] = !(la > std::log(bound));
    }
    fr.flagged.assign(flagged.begin(), flagged.end());
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (fr.flagged[k]) continue;
        const std::size_t i = k / theta.size(), j = k % theta.size();
        const double dev = std::abs(fr.u[k] - h_ref(theta[j]) * std::pow(radii[i], rho));
        fr.sup_deviation = std::max(fr.sup_deviation, dev);
        sum += dev;
        ++used;
    }
    fr.mean_deviation = used ? sum / static_cast<double>(used) : kNaN;
    return fr;
}

ParsevalCheck parseval_quadrature_check(const CoefficientSequence& seq, double r, int n_nodes) {
    if (n_nodes < 256 || (n_nodes & (n_nodes - 1)) != 0) {
        throw std::invalid_argument("parseval_quadrature_check needs a power of two >= 256 nodes");
    }
    const double eps = grid_epsilon(seq, r);
    std::vector<long double> sq(static_cast<std::size_t>(n_nodes));
    const double lref = log_majorant_sum(seq, r);
#pragma omp parallel for schedule(dynamic, 16)
    for (int j = 0; j < n_nodes; ++j) {
        const EvalResult res = eval_f(seq, std::polar(r, 2.0 * M_PI * j / n_nodes), eps);
        const double la = res.value.log_abs() - lref;  // scaled to avoid overflow
        sq[static_cast<std::size_t>(j)] = std::exp(2.0L * la);
    }
    long double acc = 0.0L;
    for (long double v : sq) acc += v;
    ParsevalCheck out;
    out.quadrature = std::exp(0.5 * std::log(static_cast<double>(acc / n_nodes)) + lref);
    out.exact = parseval_m2(seq, r).value;
    out.relative_discrepancy = std::abs(out.quadrature - out.exact) / out.exact;
    return out;
}

ModulusFit product_modulus_fit(double s, std::size_t n) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("product_modulus_fit needs s in (0, 1)");
    if (n < 2) throw std::invalid_argument("product_modulus_fit needs n >= 2");
    // log c_n = sum_{k<n} log b_k, b_k = Gamma(k+s) / (Gamma(s) k!)
    long double log_c = 0.0L, comp = 0.0L;
    const long double lgs = std::lgamma(static_cast<long double>(s));
    for (std::size_t k = 0; k < n; ++k) {
        const long double kk = static_cast<long double>(k);
        const long double term = std::lgamma(kk + s) - lgs - std::lgamma(kk + 1.0L) - comp;
        const long double next = log_c + term;
        comp = (next - log_c) - term;
        log_c = next;
    }
    ModulusFit fit;
    fit.n = n;
    fit.rho = 1.0 / (1.0 - s);
    const double nn = static_cast<double>(n);
    const double nlogn = nn * std::log(nn);
    fit.slope = static_cast<double>(-log_c) / nlogn;
    fit.c = (static_cast<double>(log_c) + nlogn / fit.rho) / nn;
    fit.sigma = std::exp(fit.c * fit.rho) / (M_E * fit.rho);
    return fit;
}

// ---------------------------------------------------------------------------

std::string indicator_to_csv(const IndicatorProfile& p) {
    std::ostringstream os;
    os << "theta,h_est,n_samples,indeterminate\n";
    for (std::size_t i = 0; i < p.theta.size(); ++i) {
        os << fmt17(p.theta[i]) << ',' << fmt17(p.h_est[i]) << ',' << p.n_samples[i] << ','
           << (p.indeterminate[i] ? 1 : 0) << '\n';
    }
    return os.str();
}

nlohmann::json pits_to_json(const PitReport& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Pit& pit : p.pits) {
        arr.push_back({{"center_re", pit.center.real()},
                       {"center_im", pit.center.imag()},
                       {"r", std::abs(pit.center)},
                       {"theta", std::arg(pit.center)},
                       {"angular_extent", pit.angular_extent},
                       {"radial_extent", pit.radial_extent},
                       {"depth", std::isfinite(pit.depth) ? nlohmann::json(pit.depth) : nlohmann::json("-inf")},
                       {"radius", pit.radius},
                       {"cells", pit.cells},
                       {"refined", pit.refined}});
    }
    return arr;
}

std::string ratio_to_csv(const RatioSeries& s) {
    std::ostringstream os;
    os << "r,logM,m2,ratio\n";
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        os << fmt17(s.r[i]) << ',' << fmt17(s.log_M[i]) << ',' << fmt17(s.m2[i]) << ',' << fmt17(s.ratio[i]) << '\n';
    }
    return os.str();
}

}  // namespace pitlab
