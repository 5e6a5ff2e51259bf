#include "pitlab/mp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pitlab {

Real::Real(Bits prec) {
    mpfr_init2(value_, prec);
    mpfr_set_zero(value_, 1);
}

Real::Real(double v, Bits prec) {
    mpfr_init2(value_, prec);
    mpfr_set_d(value_, v, MPFR_RNDN);
}

Real::Real(const Real& other) {
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    // Leave `other` as a valid minimal-precision zero.
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::from_string(const std::string& text, Bits prec) {
    Real r(prec);
    char* end = nullptr;
    mpfr_strtofr(r.value_, text.c_str(), &end, 10, MPFR_RNDN);
    if (end == text.c_str() || *end != '\0' || !mpfr_number_p(r.value_)) {
        throw std::invalid_argument("not a number: " + text);
    }
    return r;
}

void Real::round_to(Bits prec) { mpfr_prec_round(value_, prec, MPFR_RNDN); }

std::string Real::to_string(int digits) const {
    std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, value_);
    return std::string(buf.data());
}

long double HPComplex::abs_ld() const {
    Real t(std::max<Bits>(precision(), 64));
    mpfr_hypot(t.get(), re.get(), im.get(), MPFR_RNDN);
    return t.to_long_double();
}

double HPComplex::log_abs() const {
    if (re.is_zero() && im.is_zero()) return -std::numeric_limits<double>::infinity();
    Real t(std::max<Bits>(precision(), 64));
    mpfr_hypot(t.get(), re.get(), im.get(), MPFR_RNDN);
    mpfr_log(t.get(), t.get(), MPFR_RNDN);
    return t.to_double();
}

double HPComplex::arg() const {
    Real t(64);
    mpfr_atan2(t.get(), im.get(), re.get(), MPFR_RNDN);
    return t.to_double();
}

void set(HPComplex& out, const HPComplex& a) {
    mpfr_set(out.re.get(), a.re.get(), MPFR_RNDN);
    mpfr_set(out.im.get(), a.im.get(), MPFR_RNDN);
}

void add(HPComplex& out, const HPComplex& a, const HPComplex& b) {
    mpfr_add(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void sub(HPComplex& out, const HPComplex& a, const HPComplex& b) {
    mpfr_sub(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(out.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void mul(HPComplex& out, const HPComplex& a, const HPComplex& b, Real& t1, Real& t2) {
    mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(out.re.get(), t1.get(), t2.get(), MPFR_RNDN);
    mpfr_mul(t1.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), t1.get(), t2.get(), MPFR_RNDN);
}

void mul_real(HPComplex& out, const HPComplex& a, const Real& s) {
    mpfr_mul(out.re.get(), a.re.get(), s.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), a.im.get(), s.get(), MPFR_RNDN);
}

void mul_ui(HPComplex& out, const HPComplex& a, unsigned long k) {
    mpfr_mul_ui(out.re.get(), a.re.get(), k, MPFR_RNDN);
    mpfr_mul_ui(out.im.get(), a.im.get(), k, MPFR_RNDN);
}

void div(HPComplex& out, const HPComplex& a, const HPComplex& b, Real& t1, Real& t2, Real& t3) {
    // (a.re + i a.im)(b.re - i b.im) / |b|^2
    mpfr_sqr(t3.get(), b.re.get(), MPFR_RNDN);
    mpfr_fma(t3.get(), b.im.get(), b.im.get(), t3.get(), MPFR_RNDN);
    if (mpfr_zero_p(t3.get())) throw std::domain_error("complex division by zero");
    mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_fma(t1.get(), a.im.get(), b.im.get(), t1.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_fms(t2.get(), a.re.get(), b.im.get(), t2.get(), MPFR_RNDN);
    mpfr_neg(t2.get(), t2.get(), MPFR_RNDN);
    mpfr_div(out.re.get(), t1.get(), t3.get(), MPFR_RNDN);
    mpfr_div(out.im.get(), t2.get(), t3.get(), MPFR_RNDN);
}

void expi(HPComplex& out, const Real& angle) {
    mpfr_sin_cos(out.im.get(), out.re.get(), angle.get(), MPFR_RNDN);
}

void exp(HPComplex& out, const HPComplex& a, Real& t1) {
    mpfr_exp(t1.get(), a.re.get(), MPFR_RNDN);
    mpfr_sin_cos(out.im.get(), out.re.get(), a.im.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), out.re.get(), t1.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), out.im.get(), t1.get(), MPFR_RNDN);
}

void two_pi_times(Real& out, const Real& x) {
    Real pi(out.precision() + 8);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    mpfr_mul_2ui(pi.get(), pi.get(), 1, MPFR_RNDN);
    mpfr_mul(out.get(), pi.get(), x.get(), MPFR_RNDN);
}

void unit_from_turns(HPComplex& out, const Real& turns) {
    Real four(turns.precision() + 4);
    mpfr_mul_2ui(four.get(), turns.get(), 2, MPFR_RNDN);
    if (mpfr_integer_p(four.get())) {
        long k = mpfr_get_si(four.get(), MPFR_RNDN);
        k = ((k % 4) + 4) % 4;
        static constexpr int kRe[4] = {1, 0, -1, 0};
        static constexpr int kIm[4] = {0, 1, 0, -1};
        mpfr_set_si(out.re.get(), kRe[k], MPFR_RNDN);
        mpfr_set_si(out.im.get(), kIm[k], MPFR_RNDN);
        return;
    }
    Real angle(out.precision() + 16);
    two_pi_times(angle, turns);
    expi(out, angle);
}

void root_of_unity(HPComplex& out, std::int64_t k, std::int64_t q) {
    Real turns(out.precision() + 64);
    mpfr_set_si(turns.get(), static_cast<long>(((k % q) + q) % q), MPFR_RNDN);
    mpfr_div_si(turns.get(), turns.get(), static_cast<long>(q), MPFR_RNDN);
    // k/q rounded; exact whenever 4k/q is an integer since q | 4k makes it a dyadic rational
    unit_from_turns(out, turns);
}

}  // namespace pitlab
