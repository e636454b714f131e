#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

namespace imex {

/// 113-bit binary floating point, used where double round-off would mask
/// the quantity being measured (high-order error constants, EOC at tiny
/// step sizes).
using Quad = boost::multiprecision::float128;

template <class Real>
inline Real pi() {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::numbers::pi_v<Real>;
  } else {
    return boost::math::constants::pi<Real>();
  }
}

template <class Real>
inline std::complex<Real> complex_exp(const std::complex<Real>& z) {
  using std::cos;
  using std::exp;
  using std::sin;
  const Real m = exp(z.real());
  return {m * cos(z.imag()), m * sin(z.imag())};
}

template <class Real>
inline Real complex_abs(const std::complex<Real>& z) {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::hypot(z.real(), z.imag());
  } else {
    using std::sqrt;
    return sqrt(z.real() * z.real() + z.imag() * z.imag());
  }
}

}  // namespace imex
