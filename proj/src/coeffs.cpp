#include "pitlab/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>

namespace pitlab {

namespace detail {

struct TableState {
    std::vector<std::shared_ptr<const CoefficientTable::Chunk>> chunks;
    std::size_t size = 0;
    // Running values for sequential recurrences, kept at extra precision.
    Real running{64};   // 1/n!, c_n, b_n or (n-1)! depending on the kind
    Real running2{64};  // b_n for product moduli
    Real alpha{64};     // quadratic phase parameter at high precision
    bool started = false;
};

struct TableKey {
    CoefficientSequence::Kind kind;
    double s;
    Bits prec;
    auto operator<=>(const TableKey&) const = default;
};

// Primary sequence state; derived series keep their tables here too.
struct SequenceState {
    PhaseRule phase;
    ModulusRule modulus;
    Bits precision = kDefaultPrecision;

    mutable std::shared_mutex mutex;
    mutable std::map<TableKey, TableState> tables;

    mutable std::mutex log_mutex;
    mutable std::vector<double> log_c;  // product-moduli log prefix, log_c[n] = log c_n
};

}  // namespace detail

namespace {

using detail::SequenceState;
using detail::TableState;
using detail::TableKey;

constexpr double kInf = std::numeric_limits<double>::infinity();

unsigned bit_length(std::uint64_t v) {
    unsigned b = 0;
    while (v) {
        ++b;
        v >>= 1;
    }
    return b;
}

void unit_from_angle(HPComplex& out, const Real& angle) {
    if (angle.is_zero()) {
        mpfr_set_ui(out.re.get(), 1, MPFR_RNDN);
        mpfr_set_ui(out.im.get(), 0, MPFR_RNDN);
        return;
    }
    expi(out, angle);
}

double lfact(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_b(double s, std::size_t n) {
    return std::lgamma(static_cast<double>(n) + s) - std::lgamma(s) - lfact(n);
}

std::shared_ptr<SequenceState> new_primary(PhaseRule phase, ModulusRule modulus, Bits precision) {
    if (precision < 64) throw std::invalid_argument("precision must be at least 64 bits");
    auto st = std::make_shared<SequenceState>();
    st->phase = std::move(phase);
    st->modulus = modulus;
    st->precision = precision;
    return st;
}

CoefficientTable snapshot(const TableState& ts) { return CoefficientTable(ts.chunks, ts.size); }

using Kind = CoefficientSequence::Kind;

CoefficientTable table_of(const SequenceState& st, Kind kind, double s, std::size_t count, Bits prec);
CoefficientTable extend_locked(const SequenceState& st, const TableKey& key, std::size_t count);

// Fills entries [from, to) of a primary sequence table.
void fill_primary(const SequenceState& st, TableState& ts, std::size_t from, std::size_t to, Bits prec,
                  std::vector<HPComplex>& out) {
    const Bits wp = prec + 16;
    const Bits mp = prec + 40;
    if (!ts.started) {
        ts.running = Real(1.0, mp);
        ts.running2 = Real(1.0, mp);
        if (auto* q = std::get_if<QuadraticPhase>(&st.phase.kind)) ts.alpha = q->alpha.value(prec + 160);
        ts.started = true;
    }
    HPComplex unit(wp);
    Real turns(wp);
    Real angle(wp);
    Real tmp(mp);
    for (std::size_t n = from; n < to; ++n) {
        // phase
        std::visit(
            [&](const auto& rule) {
                using T = std::decay_t<decltype(rule)>;
                if constexpr (std::is_same_v<T, QuadraticPhase>) {
                    const std::uint64_t nn = static_cast<std::uint64_t>(n) * n;
                    Real prod(wp + bit_length(nn));
                    mpfr_mul_ui(prod.get(), ts.alpha.get(), nn, MPFR_RNDN);
                    mpfr_frac(prod.get(), prod.get(), MPFR_RNDN);
                    mpfr_set(turns.get(), prod.get(), MPFR_RNDN);
                    unit_from_turns(unit, turns);
                } else if constexpr (std::is_same_v<T, RationalPhase>) {
                    const __int128 nn = static_cast<__int128>(n % static_cast<std::size_t>(rule.q));
                    const std::int64_t k = static_cast<std::int64_t>((nn * nn % rule.q) * rule.p % rule.q);
                    const std::int64_t kk = (k + rule.q) % rule.q;
                    mpfr_set_si(turns.get(), kk, MPFR_RNDN);
                    mpfr_div_si(turns.get(), turns.get(), rule.q, MPFR_RNDN);
                    if ((4 * kk) % rule.q == 0) mpfr_set_si_2exp(turns.get(), 4 * kk / rule.q, -2, MPFR_RNDN);
                    unit_from_turns(unit, turns);
                } else if constexpr (std::is_same_v<T, PsiExpPhase>) {
                    mpfr_set_zero(angle.get(), 1);
                    Real e(wp + 64);
                    for (std::size_t k = 0; k < rule.c.size(); ++k) {
                        mpfr_set_d(e.get(), -rule.lambda[k], MPFR_RNDN);
                        mpfr_mul_ui(e.get(), e.get(), n, MPFR_RNDN);
                        mpfr_exp(e.get(), e.get(), MPFR_RNDN);
                        mpfr_mul_d(e.get(), e.get(), rule.c[k], MPFR_RNDN);
                        mpfr_add(angle.get(), angle.get(), e.get(), MPFR_RNDN);
                    }
                    unit_from_angle(unit, angle);
                } else if constexpr (std::is_same_v<T, HardyPhase>) {
                    Real base(wp);
                    mpfr_set_d(base.get(), rule.a, MPFR_RNDN);
                    mpfr_add_ui(base.get(), base.get(), n, MPFR_RNDN);
                    mpfr_log(base.get(), base.get(), MPFR_RNDN);
                    mpfr_mul_d(angle.get(), base.get(), rule.s_imag, MPFR_RNDN);
                    unit_from_angle(unit, angle);
                } else if constexpr (std::is_same_v<T, ExplicitPhase>) {
                    mpfr_set_d(angle.get(), rule.phases[n % rule.phases.size()], MPFR_RNDN);
                    unit_from_angle(unit, angle);
                } else {
                    throw std::logic_error("combined phases are filled separately");
                }
            },
            st.phase.kind);

        HPComplex& dst = out.emplace_back(prec);
        const bool zero_coefficient = std::holds_alternative<HardyPhase>(st.phase.kind) && n == 0;
        if (zero_coefficient) {
            mpfr_set_zero(dst.re.get(), 1);
            mpfr_set_zero(dst.im.get(), 1);
        } else {
            mul_real(dst, unit, ts.running);
        }

        // advance modulus n -> n+1
        switch (st.modulus.kind) {
            case ModulusRule::Kind::Factorial:
                mpfr_div_ui(ts.running.get(), ts.running.get(), n + 1, MPFR_RNDN);
                break;
            case ModulusRule::Kind::Product:
                // running = c_n, running2 = b_n
                mpfr_mul(ts.running.get(), ts.running.get(), ts.running2.get(), MPFR_RNDN);
                mpfr_set_d(tmp.get(), st.modulus.s_hadamard, MPFR_RNDN);
                mpfr_add_ui(tmp.get(), tmp.get(), n, MPFR_RNDN);
                mpfr_mul(ts.running2.get(), ts.running2.get(), tmp.get(), MPFR_RNDN);
                mpfr_div_ui(ts.running2.get(), ts.running2.get(), n + 1, MPFR_RNDN);
                break;
            case ModulusRule::Kind::Unit:
                break;
        }
    }
}

void fill_combined(const SequenceState& st, TableState&, std::size_t from, std::size_t to, Bits prec,
                   std::vector<HPComplex>& out) {
    const auto& rule = std::get<CombinedPhase>(st.phase.kind);
    const CoefficientTable t1 = table_of(*rule.f1, Kind::Primary, 0.0, to, prec);
    const CoefficientTable t2 = table_of(*rule.f2, Kind::Primary, 0.0, to, prec);
    HPComplex rot(prec + 16);
    Real angle(prec + 80);
    Real s1(prec + 16), s2(prec + 16);
    for (std::size_t n = from; n < to; ++n) {
        const bool even = n % 2 == 0;
        const double theta = even ? rule.theta1 : rule.theta2;
        mpfr_set_d(angle.get(), -theta, MPFR_RNDN);
        mpfr_mul_ui(angle.get(), angle.get(), n, MPFR_RNDN);
        unit_from_angle(rot, angle);
        HPComplex& dst = out.emplace_back(prec);
        mul(dst, even ? t1[n] : t2[n], rot, s1, s2);
    }
}

void fill_derived(const SequenceState& st, Kind kind, double s, TableState& ts, std::size_t from,
                  std::size_t to, Bits prec, std::vector<HPComplex>& out) {
    const Bits mp = prec + 40;
    if (!ts.started) {
        ts.running = Real(1.0, mp);
        ts.started = true;
    }
    switch (kind) {
        case Kind::Derivative: {
            const CoefficientTable bt = extend_locked(st, {Kind::Primary, 0.0, prec}, to + 1);
            for (std::size_t n = from; n < to; ++n) mul_ui(out.emplace_back(prec), bt[n + 1], n + 1);
            break;
        }
        case Kind::Hadamard: {
            // running = b_n
            const CoefficientTable bt = extend_locked(st, {Kind::Primary, 0.0, prec}, to);
            Real tmp(mp);
            for (std::size_t n = from; n < to; ++n) {
                mul_real(out.emplace_back(prec), bt[n], ts.running);
                mpfr_set_d(tmp.get(), s, MPFR_RNDN);
                mpfr_add_ui(tmp.get(), tmp.get(), n, MPFR_RNDN);
                mpfr_mul(ts.running.get(), ts.running.get(), tmp.get(), MPFR_RNDN);
                mpfr_div_ui(ts.running.get(), ts.running.get(), n + 1, MPFR_RNDN);
            }
            break;
        }
        case Kind::Disc: {
            // running = (n-1)! for factorial moduli
            const CoefficientTable bt = extend_locked(st, {Kind::Primary, 0.0, prec}, to);
            const bool unscale = st.modulus.kind == ModulusRule::Kind::Factorial;
            for (std::size_t n = from; n < to; ++n) {
                HPComplex& dst = out.emplace_back(prec);
                if (n == 0) continue;  // zero-initialized
                if (unscale) {
                    if (n >= 2) mpfr_mul_ui(ts.running.get(), ts.running.get(), n - 1, MPFR_RNDN);
                    mul_real(dst, bt[n - 1], ts.running);
                } else {
                    set(dst, bt[n - 1]);
                }
            }
            break;
        }
        case Kind::Primary:
            throw std::logic_error("not a derived sequence");
    }
}

// Caller holds st.mutex exclusively.
CoefficientTable extend_locked(const SequenceState& st, const TableKey& key, std::size_t count) {
    TableState& ts = st.tables[key];
    while (ts.size < count) {
        const std::size_t from = ts.size;
        const std::size_t to = from + CoefficientTable::kChunk;
        auto chunk = std::make_shared<CoefficientTable::Chunk>();
        chunk->reserve(CoefficientTable::kChunk);
        if (key.kind != Kind::Primary) {
            fill_derived(st, key.kind, key.s, ts, from, to, key.prec, *chunk);
        } else if (std::holds_alternative<CombinedPhase>(st.phase.kind)) {
            fill_combined(st, ts, from, to, key.prec, *chunk);
        } else {
            fill_primary(st, ts, from, to, key.prec, *chunk);
        }
        ts.chunks.push_back(std::move(chunk));
        ts.size = to;
    }
    return snapshot(ts);
}

CoefficientTable table_of(const SequenceState& st, Kind kind, double s, std::size_t count, Bits prec) {
    const TableKey key{kind, s, CoefficientSequence::bucket(prec)};
    {
        std::shared_lock lock(st.mutex);
        auto it = st.tables.find(key);
        if (it != st.tables.end() && it->second.size >= count) return snapshot(it->second);
    }
    std::unique_lock lock(st.mutex);
    return extend_locked(st, key, count);
}

double product_log_c(const SequenceState& st, std::size_t n) {
    std::lock_guard lock(st.log_mutex);
    auto& v = st.log_c;
    if (v.empty()) v.push_back(0.0);
    while (v.size() <= n) {
        const std::size_t k = v.size() - 1;
        v.push_back(v.back() + log_b(st.modulus.s_hadamard, k));
    }
    return v[n];
}

double primary_log_modulus(const SequenceState& st, std::size_t n) {
    if (std::holds_alternative<HardyPhase>(st.phase.kind) && n == 0) return -kInf;
    switch (st.modulus.kind) {
        case ModulusRule::Kind::Factorial: return -lfact(n);
        case ModulusRule::Kind::Product: return product_log_c(st, n);
        case ModulusRule::Kind::Unit: return 0.0;
    }
    return 0.0;
}

double primary_ratio(const SequenceState& st, std::size_t n) {
    switch (st.modulus.kind) {
        case ModulusRule::Kind::Factorial: return 1.0 / static_cast<double>(n + 1);
        case ModulusRule::Kind::Product: return std::exp(log_b(st.modulus.s_hadamard, n));
        case ModulusRule::Kind::Unit: return 1.0;
    }
    return 1.0;
}

// Slack added to double-precision log majorants so they remain upper bounds.
double slack(double log_value, std::size_t n) {
    return 1e-12 + 1e-13 * static_cast<double>(n) + 1e-14 * std::abs(log_value);
}

double log_majorant_of(const SequenceState& st, Kind kind, double s, std::size_t n) {
    switch (kind) {
        case Kind::Primary: {
            const double v = primary_log_modulus(st, n);
            return std::isinf(v) ? v : v + slack(v, n);
        }
        case Kind::Derivative:
            return std::log(static_cast<double>(n + 1)) + log_majorant_of(st, Kind::Primary, 0.0, n + 1) + 1e-15;
        case Kind::Hadamard:
            return log_majorant_of(st, Kind::Primary, 0.0, n) + log_b(s, n) + slack(0.0, n);
        case Kind::Disc:
            return n == 0 ? -kInf : 1e-12;
    }
    return 0.0;
}

double ratio_bound_of(const SequenceState& st, Kind kind, double s, std::size_t n) {
    const double pad = 1.0 + 1e-12;
    switch (kind) {
        case Kind::Primary: return primary_ratio(st, n) * pad;
        case Kind::Derivative:
            return static_cast<double>(n + 2) / static_cast<double>(n + 1) * primary_ratio(st, n + 1) * pad;
        case Kind::Hadamard: {
            const double g = (static_cast<double>(n) + s) / static_cast<double>(n + 1);
            return primary_ratio(st, n) * std::max(1.0, g) * pad;
        }
        case Kind::Disc: return 1.0 * pad;
    }
    return 1.0;
}

std::int64_t explicit_period(const std::vector<double>& phases) {
    const auto len = static_cast<std::int64_t>(phases.size());
    for (std::int64_t p = 1; p < len; ++p) {
        if (len % p) continue;
        bool ok = true;
        for (std::int64_t i = p; i < len && ok; ++i) ok = phases[i] == phases[i - p];
        if (ok) return p;
    }
    return len;
}

}  // namespace

// ---------------------------------------------------------------------------

AlphaSpec AlphaSpec::parse(const std::string& token) {
    AlphaSpec a;
    a.token_ = token;
    if (token == "sqrt2") {
        a.kind_ = Kind::Sqrt2;
    } else if (token == "golden") {
        a.kind_ = Kind::Golden;
    } else if (token == "pi") {
        a.kind_ = Kind::PiFrac;
    } else {
        a.kind_ = Kind::Decimal;
        Real probe = Real::from_string(token, 64);  // validates
        if (!std::isfinite(probe.to_double())) throw std::invalid_argument("alpha must be finite");
    }
    a.binary_ = a.value(64).to_double();
    return a;
}

AlphaSpec AlphaSpec::from_double(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("alpha must be finite");
    AlphaSpec a;
    a.kind_ = Kind::Double;
    a.binary_ = value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    a.token_ = buf;
    return a;
}

Real AlphaSpec::value(Bits prec) const {
    Real r(prec);
    switch (kind_) {
        case Kind::Decimal: return Real::from_string(token_, prec);
        case Kind::Double: mpfr_set_d(r.get(), binary_, MPFR_RNDN); break;
        case Kind::Sqrt2: mpfr_sqrt_ui(r.get(), 2, MPFR_RNDN); break;
        case Kind::Golden: {
            Real t(prec + 8);
            mpfr_sqrt_ui(t.get(), 5, MPFR_RNDN);
            mpfr_sub_ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_div_2ui(r.get(), t.get(), 1, MPFR_RNDN);
            break;
        }
        case Kind::PiFrac: {
            Real t(prec + 8);
            mpfr_const_pi(t.get(), MPFR_RNDN);
            mpfr_sub_ui(r.get(), t.get(), 3, MPFR_RNDN);
            break;
        }
    }
    return r;
}

double AlphaSpec::approx() const { return binary_; }

double ModulusRule::rho() const {
    switch (kind) {
        case Kind::Factorial: return 1.0;
        case Kind::Product: return 1.0 / (1.0 - s_hadamard);
        case Kind::Unit: return 0.0;
    }
    return 1.0;
}

// ---------------------------------------------------------------------------

CoefficientSequence::CoefficientSequence(std::shared_ptr<const detail::SequenceState> state, Kind kind,
                                         double derived_s)
    : state_(std::move(state)), kind_(kind), derived_s_(derived_s) {}

CoefficientSequence::Kind CoefficientSequence::kind() const { return kind_; }

const PhaseRule& CoefficientSequence::phase() const { return state_->phase; }

const ModulusRule& CoefficientSequence::modulus() const { return state_->modulus; }

Bits CoefficientSequence::precision_bits() const { return state_->precision; }

std::optional<std::int64_t> CoefficientSequence::period() const {
    return kind_ == Kind::Primary ? state_->phase.period : std::nullopt;
}

double CoefficientSequence::rho() const { return modulus().rho(); }

bool CoefficientSequence::unit_phase() const { return kind_ == Kind::Primary; }

bool CoefficientSequence::factorial_modulus() const {
    return kind_ == Kind::Primary && state_->modulus.kind == ModulusRule::Kind::Factorial;
}

HPComplex CoefficientSequence::coefficient(std::size_t n) const { return coefficient(n, state_->precision); }

HPComplex CoefficientSequence::coefficient(std::size_t n, Bits prec) const {
    HPComplex out = table(n + 1, prec)[n];
    out.round_to(prec);
    return out;
}

CoefficientTable CoefficientSequence::table(std::size_t count, Bits prec) const {
    return table_of(*state_, kind_, derived_s_, count, prec);
}

double CoefficientSequence::log_majorant(std::size_t n) const {
    return log_majorant_of(*state_, kind_, derived_s_, n);
}

double CoefficientSequence::ratio_bound(std::size_t n) const {
    return ratio_bound_of(*state_, kind_, derived_s_, n);
}

Bits CoefficientSequence::bucket(Bits prec) { return std::max<Bits>(64, (prec + 31) / 32 * 32); }

// ---------------------------------------------------------------------------

CoefficientSequence make_quadratic_phase(const AlphaSpec& alpha, Bits precision) {
    PhaseRule phase{QuadraticPhase{alpha}, std::nullopt};
    return CoefficientSequence(new_primary(std::move(phase), ModulusRule{}, precision));
}

CoefficientSequence make_quadratic_phase(double alpha, Bits precision) {
    return make_quadratic_phase(AlphaSpec::from_double(alpha), precision);
}

std::int64_t quadratic_residue_period(std::int64_t p, std::int64_t q) {
    if (q < 1) throw std::invalid_argument("q must be positive");
    for (std::int64_t period = 1; period <= q; ++period) {
        if (q % period) continue;
        const __int128 sq = static_cast<__int128>(period) * period % q * p % q;
        const __int128 lin = static_cast<__int128>(2) * period % q * p % q;
        if (sq == 0 && lin == 0) return period;
    }
    return q;
}

CoefficientSequence make_rational_phase(std::int64_t p, std::int64_t q, Bits precision) {
    if (q < 1) throw std::invalid_argument("q must be a positive integer");
    const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) {
        p /= g;
        q /= g;
    }
    p = ((p % q) + q) % q;
    PhaseRule phase{RationalPhase{p, q}, quadratic_residue_period(p, q)};
    return CoefficientSequence(new_primary(std::move(phase), ModulusRule{}, precision));
}

CoefficientSequence make_psi_phase(std::vector<double> c, std::vector<double> lambda, Bits precision) {
    if (c.empty() || c.size() != lambda.size()) {
        throw std::invalid_argument("psi_exp needs equal-length, nonempty c and lambda");
    }
    for (double l : lambda) {
        if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("psi_exp requires every lambda > 0");
    }
    for (double v : c) {
        if (!std::isfinite(v)) throw std::invalid_argument("psi_exp coefficients must be finite");
    }
    PhaseRule phase{PsiExpPhase{std::move(c), std::move(lambda)}, std::nullopt};
    return CoefficientSequence(new_primary(std::move(phase), ModulusRule{}, precision));
}

CoefficientSequence make_hardy(double s_real, double s_imag, double a, Bits precision) {
    if (s_real != 0.0) throw std::invalid_argument("Hardy family requires purely imaginary s");
    if (!(a > 0.0)) throw std::invalid_argument("Hardy family requires a > 0");
    PhaseRule phase{HardyPhase{s_imag, a}, std::nullopt};
    return CoefficientSequence(new_primary(std::move(phase), ModulusRule{}, precision));
}

CoefficientSequence make_explicit_phase(std::vector<double> phases, Bits precision) {
    if (phases.empty()) throw std::invalid_argument("explicit phase list must be nonempty");
    const std::int64_t period = explicit_period(phases);
    PhaseRule phase{ExplicitPhase{std::move(phases)}, period};
    return CoefficientSequence(new_primary(std::move(phase), ModulusRule{}, precision));
}

CoefficientSequence make_product_moduli(double s_hadamard, const AlphaSpec& alpha, Bits precision) {
    if (!(s_hadamard > 0.0 && s_hadamard < 1.0)) throw std::invalid_argument("s_H must lie in (0,1)");
    PhaseRule phase{QuadraticPhase{alpha}, std::nullopt};
    ModulusRule mod{ModulusRule::Kind::Product, s_hadamard};
    return CoefficientSequence(new_primary(std::move(phase), mod, precision));
}

CoefficientSequence make_product_moduli(double s_hadamard, double alpha, Bits precision) {
    return make_product_moduli(s_hadamard, AlphaSpec::from_double(alpha), precision);
}

CoefficientSequence make_exponential(Bits precision) { return make_rational_phase(0, 1, precision); }

CoefficientSequence combine_Q(const CoefficientSequence& f1, const CoefficientSequence& f2, double theta1,
                              double theta2) {
    if (!f1.factorial_modulus() || !f2.factorial_modulus()) {
        throw std::invalid_argument("combine_Q requires unit-phase sequences with factorial moduli");
    }
    PhaseRule phase{CombinedPhase{f1.state(), f2.state(), theta1, theta2}, std::nullopt};
    return CoefficientSequence(
        new_primary(std::move(phase), ModulusRule{}, std::max(f1.precision_bits(), f2.precision_bits())));
}

CoefficientSequence derivative(const CoefficientSequence& f) {
    if (f.kind() != Kind::Primary) throw std::invalid_argument("derivative is defined for primary sequences");
    return CoefficientSequence(f.state(), Kind::Derivative);
}

CoefficientSequence hadamard_product(const CoefficientSequence& f, double s) {
    if (f.kind() != Kind::Primary) throw std::invalid_argument("Hadamard product needs a primary sequence");
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("Hadamard exponent must be positive");
    return CoefficientSequence(f.state(), Kind::Hadamard, s);
}

CoefficientSequence disc_series(const CoefficientSequence& f) {
    if (f.kind() != Kind::Primary) throw std::invalid_argument("disc series is defined for primary sequences");
    return CoefficientSequence(f.state(), Kind::Disc);
}

std::vector<Real> hadamard_multipliers(double s, std::size_t count, Bits prec) {
    std::vector<Real> b;
    b.reserve(count);
    Real run(1.0, prec + 40);
    Real tmp(prec + 40);
    for (std::size_t n = 0; n < count; ++n) {
        Real v(prec);
        mpfr_set(v.get(), run.get(), MPFR_RNDN);
        b.push_back(std::move(v));
        mpfr_set_d(tmp.get(), s, MPFR_RNDN);
        mpfr_add_ui(tmp.get(), tmp.get(), n, MPFR_RNDN);
        mpfr_mul(run.get(), run.get(), tmp.get(), MPFR_RNDN);
        mpfr_div_ui(run.get(), run.get(), n + 1, MPFR_RNDN);
    }
    return b;
}

BoundedValue parseval_m2(const CoefficientSequence& seq, double r, double rel_tol) {
    if (!(r > 0.0)) throw std::invalid_argument("parseval_m2 requires r > 0");
    const double log_r = std::log(r);
    // log-sum-exp accumulation of |a_n|^2 r^{2n}
    double log_max = -kInf;
    long double scaled = 0.0L;
    auto log_total = [&] { return log_max + std::log(static_cast<double>(scaled)); };
    std::size_t n = 0;
    std::size_t block = 64;
    for (;;) {
        const CoefficientTable t = seq.table(n + block, 64);
        for (const std::size_t end = n + block; n < end; ++n) {
            const double la = t[n].log_abs();
            if (std::isinf(la)) continue;
            const double lt = 2.0 * (la + static_cast<double>(n) * log_r);
            if (lt > log_max) {
                scaled = scaled * std::exp(static_cast<long double>(log_max - lt)) + 1.0L;
                log_max = lt;
            } else {
                scaled += std::exp(static_cast<long double>(lt - log_max));
            }
        }
        // tail over k >= n: majorant(n)^2 r^{2n} / (1 - (ratio r)^2)
        const double q = seq.ratio_bound(n) * r;
        if (q < 1.0 && !std::isinf(log_max)) {
            const double log_tail =
                2.0 * (seq.log_majorant(n) + static_cast<double>(n) * log_r) - std::log1p(-q * q);
            const double rel_tail = std::exp(log_tail - log_total());
            if (rel_tail <= rel_tol * 0.1) {
                const double value = std::exp(0.5 * log_total());
                const double err = value * (0.5 * rel_tail + 4.0 * static_cast<double>(n) * 0x1p-53);
                return {value, err};
            }
        }
        if (n > 10'000'000) throw std::runtime_error("parseval_m2: series did not converge");
        block *= 2;
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json phase_json(const SequenceState& st);

nlohmann::json state_json(const SequenceState& st) {
    nlohmann::json mod;
    switch (st.modulus.kind) {
        case ModulusRule::Kind::Factorial: mod = {{"kind", "factorial"}}; break;
        case ModulusRule::Kind::Product: mod = {{"kind", "product"}, {"s_H", st.modulus.s_hadamard}}; break;
        case ModulusRule::Kind::Unit: mod = {{"kind", "unit"}}; break;
    }
    return {{"phase", phase_json(st)}, {"modulus", mod}, {"precision_bits", st.precision}};
}

nlohmann::json alpha_json(const AlphaSpec& a) {
    if (a.kind() == AlphaSpec::Kind::Double) return a.approx();
    return a.token();
}

nlohmann::json phase_json(const SequenceState& st) {
    return std::visit(
        [](const auto& rule) -> nlohmann::json {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, QuadraticPhase>) {
                return {{"kind", "quadratic"}, {"alpha", alpha_json(rule.alpha)}};
            } else if constexpr (std::is_same_v<T, RationalPhase>) {
                return {{"kind", "rational"}, {"p", rule.p}, {"q", rule.q}};
            } else if constexpr (std::is_same_v<T, PsiExpPhase>) {
                return {{"kind", "psi_exp"}, {"c", rule.c}, {"lambda", rule.lambda}};
            } else if constexpr (std::is_same_v<T, HardyPhase>) {
                return {{"kind", "hardy"}, {"s_imag", rule.s_imag}, {"a", rule.a}};
            } else if constexpr (std::is_same_v<T, ExplicitPhase>) {
                return {{"kind", "explicit"}, {"phases", rule.phases}};
            } else {
                return {{"kind", "combined"},
                        {"theta1", rule.theta1},
                        {"theta2", rule.theta2},
                        {"f1", state_json(*rule.f1)},
                        {"f2", state_json(*rule.f2)}};
            }
        },
        st.phase.kind);
}

AlphaSpec alpha_from_json(const nlohmann::json& j) {
    if (j.is_number()) return AlphaSpec::from_double(j.get<double>());
    return AlphaSpec::parse(j.get<std::string>());
}

}  // namespace

nlohmann::json to_json(const CoefficientSequence& seq) {
    if (seq.kind() != Kind::Primary) throw std::invalid_argument("derived sequences are not serializable");
    return state_json(*seq.state());
}

CoefficientSequence sequence_from_json(const nlohmann::json& j) {
    const Bits prec = j.value("precision_bits", static_cast<Bits>(kDefaultPrecision));
    const nlohmann::json& ph = j.at("phase");
    const nlohmann::json mod = j.value("modulus", nlohmann::json{{"kind", "factorial"}});
    const std::string kind = ph.at("kind").get<std::string>();
    const std::string mkind = mod.at("kind").get<std::string>();

    if (mkind == "product") {
        if (kind != "quadratic") throw std::invalid_argument("product modulus requires a quadratic phase");
        return make_product_moduli(mod.at("s_H").get<double>(), alpha_from_json(ph.at("alpha")), prec);
    }
    if (mkind == "unit") {
        throw std::invalid_argument("unit modulus is only available for derived disc series");
    }
    if (mkind != "factorial") throw std::invalid_argument("unknown modulus kind: " + mkind);

    if (kind == "quadratic") return make_quadratic_phase(alpha_from_json(ph.at("alpha")), prec);
    if (kind == "rational") return make_rational_phase(ph.at("p").get<std::int64_t>(), ph.at("q").get<std::int64_t>(), prec);
    if (kind == "psi_exp") {
        return make_psi_phase(ph.at("c").get<std::vector<double>>(), ph.at("lambda").get<std::vector<double>>(), prec);
    }
    if (kind == "hardy") return make_hardy(0.0, ph.at("s_imag").get<double>(), ph.at("a").get<double>(), prec);
    if (kind == "explicit") return make_explicit_phase(ph.at("phases").get<std::vector<double>>(), prec);
    if (kind == "combined") {
        return combine_Q(sequence_from_json(ph.at("f1")), sequence_from_json(ph.at("f2")),
                         ph.at("theta1").get<double>(), ph.at("theta2").get<double>());
    }
    throw std::invalid_argument("unknown phase kind: " + kind);
}

}  // namespace pitlab
