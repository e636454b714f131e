#include <algorithm>
#include <cmath>

#include "imex/kernels/kernels.hpp"

namespace imex::kernels {

namespace {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void multiply(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_modes(std::size_t n, const double* s, cplx* z) {
  for (std::size_t i = 0; i < n; ++i) z[i] *= s[i];
}

void ik_accumulate(std::size_t n, const double* k, double sign, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = sign * k[i];
    y[i] += cplx(-f * x[i].imag(), f * x[i].real());
  }
}

double weighted_dot(std::size_t n, const double* w, const cplx* x, const cplx* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
  return s;
}

void viscosity(std::size_t n, const double* u, const double* v, const double* w, double nu0, double c,
               double* out) {
  if (w) {
    for (std::size_t i = 0; i < n; ++i) out[i] = nu0 + c * (u[i] * u[i] + v[i] * v[i] + w[i] * w[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = nu0 + c * (u[i] * u[i] + v[i] * v[i]);
  }
}

double max_abs(std::size_t n, const double* x) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m || std::isnan(a)) m = a;
    if (std::isnan(m)) return m;
  }
  return m;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{axpy, axpby, multiply, scale_modes, ik_accumulate, weighted_dot, viscosity, max_abs};
  return t;
}

}  // namespace imex::kernels
