// Command-line front end.
//
// Exit status: 0 on success, 1 when a check or invariant fails, 2 on usage or
// configuration errors. Failures are reported as one JSON object on stderr.

#include "pitlab/acceptance.hpp"
#include "pitlab/config.hpp"
#include "pitlab/eval.hpp"
#include "pitlab/growth.hpp"
#include "pitlab/panto.hpp"
#include "pitlab/zeros.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using nlohmann::json;
using namespace pitlab;

class CheckFailed : public std::runtime_error {
public:
    explicit CheckFailed(const std::string& what) : std::runtime_error(what) {}
};

void report_error(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
}

// Flag value when given on the command line, else the config parameter, else the default.
template <class T>
T pick(const CLI::Option* opt, const T& flag, const json& params, const char* key) {
    if (opt->count() > 0 || !params.contains(key)) return flag;
    try {
        return params.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("params.") + key + ": " + e.what());
    }
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    std::istringstream in(text);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof()) {
        throw CLI::ValidationError(what, "expected two numbers separated by a comma");
    }
    return {a, b};
}

std::string pair_param(const CLI::Option* opt, const std::string& flag, const json& params, const char* key) {
    if (opt->count() > 0 || !params.contains(key)) return flag;
    const json& v = params.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("params.") + key + " must be [a, b]");
    return std::to_string(v[0].get<double>()) + "," + std::to_string(v[1].get<double>());
}

void emit(const ExperimentConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw ConfigError("cannot write " + cfg.out);
    f << text;
}

bool wants_json(const ExperimentConfig& cfg) {
    return cfg.out.size() >= 5 && cfg.out.compare(cfg.out.size() - 5, 5, ".json") == 0;
}

std::string family_kind(const json& family) {
    return family.value("modulus", json{{"kind", "factorial"}}).value("kind", "factorial") == "product"
               ? "product"
               : family.at("phase").at("kind").get<std::string>();
}

// Reference indicator: explicit flag, else a documented default for families whose
// indicator is known in closed form. Anything else must be given explicitly.
ReferenceIndicator reference_for(const ExperimentConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return ReferenceIndicator::parse(flag);
    const std::string kind = family_kind(cfg.family);
    const json& ph = cfg.family.at("phase");
    if (kind == "quadratic") return ReferenceIndicator::constant(1.0);
    if (kind == "rational" && ph.at("q").get<std::int64_t>() == 1) return ReferenceIndicator::cosine();
    if (kind == "rational" && ph.at("q").get<std::int64_t>() == 2) return ReferenceIndicator::neg_cosine();
    if (kind == "product") {
        const double s = cfg.family.at("modulus").at("s_H").get<double>();
        return ReferenceIndicator::constant(product_modulus_fit(s, 100000).sigma);
    }
    throw ConfigError("no default h_ref for family kind '" + kind + "'; pass --href");
}

std::string href_note(const ReferenceIndicator& h) { return json{{"info", "h_ref"}, {"value", h.to_string()}}.dump(); }

json hp_json(const HPComplex& v) { return {{"re", v.re.to_string(40)}, {"im", v.im.to_string(40)}}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pitlab: zeros, pits and growth of entire functions with unimodular Taylor phases"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, alpha, out;
    double tolerance = 0.0;
    Bits precision_bits = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    auto* o_alpha = app.add_option("--alpha", alpha, "sqrt2, golden, pi, a decimal literal or p/q");
    auto* o_out = app.add_option("--out", out, "output file (default: standard output)");
    auto* o_tol = app.add_option("--tolerance", tolerance, "evaluation accuracy override")->check(CLI::PositiveNumber);
    auto* o_prec = app.add_option("--precision-bits", precision_bits, "working precision override")
                       ->check(CLI::Range(64, 1 << 20));
    auto* o_threads = app.add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);

    // eval
    auto* c_eval = app.add_subcommand("eval", "value of f at one point, with error bounds");
    std::string z_text = "0,0";
    auto* o_z = c_eval->add_option("--z", z_text, "RE,IM");

    // grid
    auto* c_grid = app.add_subcommand("grid", "log|f| on a polar grid (CSV)");
    double g_rmin = 1.0, g_rmax = 10.0;
    int g_nr = 10, g_ntheta = 64;
    auto* o_grmin = c_grid->add_option("--rmin", g_rmin, "smallest radius");
    auto* o_grmax = c_grid->add_option("--rmax", g_rmax, "largest radius");
    auto* o_gnr = c_grid->add_option("--nr", g_nr, "number of radii");
    auto* o_gnt = c_grid->add_option("--ntheta", g_ntheta, "number of angles");

    // zeros
    auto* c_zeros = app.add_subcommand("zeros", "certified zeros in a disc or sector (CSV, or JSON for *.json)");
    double z_rmax = 10.0;
    std::string z_sector;
    auto* o_zrmax = c_zeros->add_option("--rmax", z_rmax, "search radius");
    auto* o_zsec = c_zeros->add_option("--sector", z_sector, "LO,HI angles in radians");

    // indicator
    auto* c_ind = app.add_subcommand("indicator", "indicator estimate over an r-window (CSV)");
    std::string i_window = "20,40";
    int i_ntheta = 128;
    double i_rho = 0.0;
    auto* o_iwin = c_ind->add_option("--rwindow", i_window, "LO,HI");
    auto* o_int = c_ind->add_option("--ntheta", i_ntheta, "number of angles");
    auto* o_irho = c_ind->add_option("--rho", i_rho, "order (default: declared order of the family)");

    // pits
    auto* c_pits = app.add_subcommand("pits", "pits of log|f|/r^rho below h_ref - delta (JSON)");
    double p_delta = 0.3, p_eta = 1.0, p_rmin = 25.0, p_rmax = 30.0, p_rho = 0.0;
    int p_nr = 51, p_ntheta = 1024;
    std::string p_href;
    auto* o_pdelta = c_pits->add_option("--delta", p_delta, "threshold below h_ref");
    auto* o_peta = c_pits->add_option("--eta", p_eta, "covering-sum exponent");
    auto* o_prmin = c_pits->add_option("--rmin", p_rmin, "inner radius of the annulus grid");
    auto* o_prmax = c_pits->add_option("--rmax", p_rmax, "outer radius of the annulus grid");
    auto* o_pnr = c_pits->add_option("--nr", p_nr, "number of radii");
    auto* o_pnt = c_pits->add_option("--ntheta", p_ntheta, "number of angles");
    auto* o_phref = c_pits->add_option("--href", p_href, "reference indicator: cos, -cos or a number");
    auto* o_prho = c_pits->add_option("--rho", p_rho, "order (default: declared order of the family)");

    // ratio
    auto* c_ratio = app.add_subcommand("ratio", "max modulus over quadratic mean (CSV)");
    std::vector<double> r_list{10.0, 20.0, 40.0, 80.0};
    auto* o_rlist = c_ratio->add_option("--r", r_list, "increasing radii")->delimiter(',');

    // trigsum
    auto* c_trig = app.add_subcommand("trigsum", "exponential-sum form for rational alpha (JSON)");
    std::int64_t t_p = 1, t_q = 2;
    int t_check = 0;
    auto* o_tp = c_trig->add_option("--p", t_p, "numerator");
    auto* o_tq = c_trig->add_option("--q", t_q, "denominator")->check(CLI::PositiveNumber);
    auto* o_tcheck = c_trig->add_option("--check-points", t_check, "random points |z| <= 15 checked against the series")
                         ->check(CLI::NonNegativeNumber);

    // verify
    auto* c_verify = app.add_subcommand("verify", "run the acceptance criteria");
    std::string v_suite = "quick";
    c_verify->add_option("--suite", v_suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what(), 2);
        return 2;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
        if (o_alpha->count()) cfg.set_alpha(alpha);
        if (o_out->count()) cfg.out = out;
        if (o_tol->count()) cfg.tolerance = tolerance;
        if (o_prec->count()) cfg.precision_bits = precision_bits;
        if (o_threads->count()) cfg.threads = threads;
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
        const json& P = cfg.params;

        if (c_eval->parsed()) {
            const auto [re, im] = parse_pair(pair_param(o_z, z_text, P, "z"), "--z");
            const CoefficientSequence seq = cfg.sequence();
            EvalOptions eo;
            eo.precision = cfg.precision_bits;
            const EvalResult r = eval_f(seq, std::complex<double>(re, im), cfg.tolerance.value_or(1e-30), eo);
            const std::complex<double> v = r.approx();
            json j{{"z", {re, im}},
                   {"value", {v.real(), v.imag()}},
                   {"value_hp", hp_json(r.value)},
                   {"log_abs", r.value.log_abs()},
                   {"truncation_bound", r.truncation_bound},
                   {"rounding_bound", r.rounding_bound},
                   {"terms", r.terms_used},
                   {"precision_bits", r.precision_bits}};
            emit(cfg, j.dump(2) + "\n");
        } else if (c_grid->parsed()) {
            const double rmin = pick(o_grmin, g_rmin, P, "rmin"), rmax = pick(o_grmax, g_rmax, P, "rmax");
            const int nr = pick(o_gnr, g_nr, P, "nr");
            GridSpec grid;
            grid.n_theta = pick(o_gnt, g_ntheta, P, "ntheta");
            if (nr < 1) throw ConfigError("nr must be >= 1");
            for (int i = 0; i < nr; ++i) grid.r_values.push_back(nr == 1 ? rmin : rmin + (rmax - rmin) * i / (nr - 1));
            GridOptions go;
            if (cfg.tolerance) go.rel_eps = *cfg.tolerance;
            go.precision = cfg.precision_bits;
            emit(cfg, grid_to_csv(eval_grid(cfg.sequence(), grid, go)));
        } else if (c_zeros->parsed()) {
            SectorBox box = SectorBox::disc(pick(o_zrmax, z_rmax, P, "rmax"));
            const std::string sec = pair_param(o_zsec, z_sector, P, "sector");
            if (!sec.empty()) std::tie(box.theta_lo, box.theta_hi) = parse_pair(sec, "--sector");
            LocateOptions lo;
            if (cfg.tolerance) lo.winding.rel_eps = *cfg.tolerance;
            const ZeroSet zs = locate_zeros(cfg.sequence(), box, lo);
            emit(cfg, wants_json(cfg) ? zeros_to_json(zs).dump(2) + "\n" : zeros_to_csv(zs));
            if (!zs.completeness_certificate) throw CheckFailed("zero set is not certified complete");
        } else if (c_ind->parsed()) {
            const auto [lo, hi] = parse_pair(pair_param(o_iwin, i_window, P, "rwindow"), "--rwindow");
            const CoefficientSequence seq = cfg.sequence();
            const double rho = pick(o_irho, i_rho, P, "rho");
            IndicatorOptions io;
            if (cfg.tolerance) io.rel_eps = *cfg.tolerance;
            const IndicatorProfile prof = indicator_estimate(seq, uniform_angles(pick(o_int, i_ntheta, P, "ntheta")), lo,
                                                             hi, rho > 0.0 ? rho : seq.rho(), io);
            emit(cfg, indicator_to_csv(prof));
        } else if (c_pits->parsed()) {
            const CoefficientSequence seq = cfg.sequence();
            const ReferenceIndicator h = reference_for(cfg, pick(o_phref, p_href, P, "href"));
            std::cerr << href_note(h) << std::endl;
            const double rmin = pick(o_prmin, p_rmin, P, "rmin"), rmax = pick(o_prmax, p_rmax, P, "rmax");
            const int nr = pick(o_pnr, p_nr, P, "nr");
            if (nr < 1) throw ConfigError("nr must be >= 1");
            GridSpec grid;
            grid.n_theta = pick(o_pnt, p_ntheta, P, "ntheta");
            for (int i = 0; i < nr; ++i) grid.r_values.push_back(nr == 1 ? rmin : rmin + (rmax - rmin) * i / (nr - 1));
            const double rho = pick(o_prho, p_rho, P, "rho");
            const PitReport rep = pit_detect(seq, grid, pick(o_pdelta, p_delta, P, "delta"), pick(o_peta, p_eta, P, "eta"),
                                             rho > 0.0 ? rho : seq.rho(), h, cfg.tolerance.value_or(0x1p-30));
            emit(cfg, pits_to_json(rep).dump(2) + "\n");
        } else if (c_ratio->parsed()) {
            const auto radii = pick(o_rlist, r_list, P, "r");
            const RatioSeries s = levy_ratio(cfg.sequence(), radii, cfg.tolerance.value_or(1e-15));
            emit(cfg, ratio_to_csv(s));
            for (double v : s.ratio) {
                if (!(v >= 1.0 - 1e-12)) throw CheckFailed("ratio below 1: maximum modulus under the quadratic mean");
            }
        } else if (c_trig->parsed()) {
            const std::int64_t p = pick(o_tp, t_p, P, "p"), q = pick(o_tq, t_q, P, "q");
            const int n_check = pick(o_tcheck, t_check, P, "check_points");
            const Bits prec = cfg.precision_bits.value_or(kDefaultPrecision);
            const TrigSum ts = trig_sum_reduction(p, q, prec);
            json terms = json::array();
            for (const TrigTerm& t : ts.terms) {
                terms.push_back({{"k", t.k}, {"c", hp_json(t.c)}, {"b", hp_json(t.b)}, {"c_error", t.c_error}});
            }
            json j{{"p", p}, {"q", q}, {"period", ts.period}, {"terms", terms},
                   {"roots_of_unity_exact", ts.roots_of_unity_ok()}, {"roundtrip_exact", trig_sum_roundtrip_exact(p, q)}};
            bool ok = j["roots_of_unity_exact"].get<bool>() && j["roundtrip_exact"].get<bool>();
            if (n_check > 0) {
                const CoefficientSequence seq = make_rational_phase(p, q, prec);
                std::mt19937_64 rng(static_cast<std::uint64_t>(q) * 1000003u + static_cast<std::uint64_t>(p));
                std::uniform_real_distribution<double> u(0.0, 1.0);
                double worst = 0.0;
                int failed = 0;
                for (int i = 0; i < n_check; ++i) {
                    const std::complex<double> z = std::polar(15.0 * std::sqrt(u(rng)), 2.0 * M_PI * u(rng) - M_PI);
                    const HPComplex zh(z, prec);
                    const EvalResult a = eval_f(seq, zh, cfg.tolerance.value_or(grid_epsilon(seq, std::abs(z), 0x1p-100)));
                    const EvalResult b = eval_trig_sum(ts, zh);
                    HPComplex d(prec + 64);
                    sub(d, a.value, b.value);
                    const double ratio = static_cast<double>(d.abs_ld()) / (a.total_bound() + b.total_bound());
                    worst = std::max(worst, ratio);
                    if (!(ratio <= 1.0)) ++failed;
                }
                j["check"] = {{"points", n_check}, {"worst_diff_over_bound", worst}, {"failures", failed}};
                ok = ok && failed == 0;
            }
            emit(cfg, j.dump(2) + "\n");
            if (!ok) throw CheckFailed("trigonometric sum disagrees with the series");
        } else if (c_verify->parsed()) {
            AcceptanceOptions ao;
            ao.suite = parse_suite(v_suite);
            ao.precision_bits = cfg.precision_bits;
            ao.tolerance = cfg.tolerance;
            const auto results = run_acceptance(ao);
            std::ostringstream os;
            int failed = 0;
            for (const auto& r : results) {
                os << format_result(r) << '\n';
                failed += r.pass ? 0 : 1;
            }
            emit(cfg, wants_json(cfg) ? results_to_json(results).dump(2) + "\n" : os.str());
            if (!cfg.out.empty()) std::cout << os.str();
            if (failed > 0) throw CheckFailed(std::to_string(failed) + " acceptance criteria failed");
        }
    } catch (const CheckFailed& e) {
        report_error("check_failed", e.what(), 1);
        return 1;
    } catch (const CLI::Error& e) {
        report_error("usage", e.what(), 2);
        return 2;
    } catch (const ConfigError& e) {
        report_error("config", e.what(), 2);
        return 2;
    } catch (const std::invalid_argument& e) {
        report_error("usage", e.what(), 2);
        return 2;
    } catch (const std::exception& e) {
        report_error("runtime", e.what(), 1);
        return 1;
    }
    return 0;
}
