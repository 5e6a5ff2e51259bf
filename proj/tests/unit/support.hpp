#pragma once

#include "pitlab/mp.hpp"

#include <algorithm>
#include <complex>
#include <concepts>
#include <string>

namespace testing {

// Decimal strings held at high precision, for comparing against frozen reference values.
inline pitlab::HPComplex hp(const std::string& re, const std::string& im, pitlab::Bits prec = 320) {
    return pitlab::HPComplex(pitlab::Real::from_string(re, prec), pitlab::Real::from_string(im, prec));
}

// |a - b| with the subtraction done at high precision. The template keeps braced
// literals such as {0.5, 0.0} bound to the std::complex overload below.
template <class T>
    requires std::same_as<T, pitlab::HPComplex>
double hp_dist(const pitlab::HPComplex& a, const T& b) {
    pitlab::HPComplex d(std::max(a.precision(), b.precision()) + 64);
    pitlab::sub(d, a, b);
    return static_cast<double>(d.abs_ld());
}

inline double hp_dist(const pitlab::HPComplex& a, std::complex<double> b) {
    return hp_dist(a, pitlab::HPComplex(b, 64));
}

}  // namespace testing
