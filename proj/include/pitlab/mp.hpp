#pragma once

// Thin RAII layer over MPFR. Values carry their own precision; arithmetic is
// done through the in-place free functions below so that hot loops can reuse
// preallocated registers.

#include <mpfr.h>

#include <complex>
#include <cstdint>
#include <string>
#include <utility>

namespace pitlab {

using Bits = mpfr_prec_t;

class Real {
public:
    explicit Real(Bits prec = 128);
    explicit Real(double v, Bits prec);
    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    static Real from_string(const std::string& text, Bits prec);

    mpfr_ptr get() { return value_; }
    mpfr_srcptr get() const { return value_; }

    Bits precision() const { return mpfr_get_prec(value_); }
    /// Changes precision, rounding the current value.
    void round_to(Bits prec);

    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
    long double to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }
    std::string to_string(int digits = 40) const;

    bool is_zero() const { return mpfr_zero_p(value_) != 0; }

    void swap(Real& other) noexcept { mpfr_swap(value_, other.value_); }

private:
    mpfr_t value_;
};

struct HPComplex {
    Real re;
    Real im;

    explicit HPComplex(Bits prec = 128) : re(prec), im(prec) {}
    explicit HPComplex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    explicit HPComplex(std::complex<double> z, Bits prec) : re(z.real(), prec), im(z.imag(), prec) {}

    Bits precision() const { return re.precision(); }
    void round_to(Bits prec) {
        re.round_to(prec);
        im.round_to(prec);
    }

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
    std::complex<long double> to_complex_ld() const { return {re.to_long_double(), im.to_long_double()}; }

    /// |z| rounded to long double (no overflow for any finite MPFR exponent we produce).
    long double abs_ld() const;
    /// log|z|, -inf for zero.
    double log_abs() const;
    /// Principal argument.
    double arg() const;
};

// In-place complex kernels. `out` may alias inputs only where noted.
void set(HPComplex& out, const HPComplex& a);
void add(HPComplex& out, const HPComplex& a, const HPComplex& b);  // aliasing ok
void sub(HPComplex& out, const HPComplex& a, const HPComplex& b);  // aliasing ok
/// out = a * b; uses t1, t2 as scratch. out must not alias a or b.
void mul(HPComplex& out, const HPComplex& a, const HPComplex& b, Real& t1, Real& t2);
void mul_real(HPComplex& out, const HPComplex& a, const Real& s);  // aliasing ok
void mul_ui(HPComplex& out, const HPComplex& a, unsigned long k);   // aliasing ok
/// out = a / b. out must not alias a or b.
void div(HPComplex& out, const HPComplex& a, const HPComplex& b, Real& t1, Real& t2, Real& t3);
/// out = exp(i * angle); angle in radians.
void expi(HPComplex& out, const Real& angle);
/// out = exp(a).
void exp(HPComplex& out, const HPComplex& a, Real& t1);

/// 2*pi*x at the precision of `out`.
void two_pi_times(Real& out, const Real& x);

/// exp(2 pi i turns). Exact when turns is a multiple of 1/4.
void unit_from_turns(HPComplex& out, const Real& turns);
/// exp(2 pi i k / q), exact on quarter turns. Requires q > 0.
void root_of_unity(HPComplex& out, std::int64_t k, std::int64_t q);

}  // namespace pitlab
