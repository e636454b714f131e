#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace imex::kernels {

using cplx = std::complex<double>;

/// Inner loops of the spectral solver. Every entry has a scalar reference
/// and, on x86-64, an AVX2/FMA variant picked at run time. Reductions are
/// deterministic for a fixed backend but may differ in the last bits
/// between backends.
struct Table {
  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // y = a * x + b * y
  void (*axpby)(std::size_t n, double a, const double* x, double b, double* y);
  // out = x * y
  void (*multiply)(std::size_t n, const double* x, const double* y, double* out);
  // z[k] *= s[k]
  void (*scale_modes)(std::size_t n, const double* s, cplx* z);
  // y[k] += sign * i * k[k] * x[k]
  void (*ik_accumulate)(std::size_t n, const double* k, double sign, const cplx* x, cplx* y);
  // sum_k w[k] * Re(conj(x[k]) y[k])
  double (*weighted_dot)(std::size_t n, const double* w, const cplx* x, const cplx* y);
  // out = nu0 + c * (u^2 + v^2 + w^2); w may be null
  void (*viscosity)(std::size_t n, const double* u, const double* v, const double* w, double nu0, double c,
                    double* out);
  // max |x|
  double (*max_abs)(std::size_t n, const double* x);
};

enum class Backend { Scalar, Avx2 };

const Table& scalar_table();
/// Throws std::runtime_error when the AVX2 variant was not compiled in.
const Table& avx2_table();

bool avx2_available();

/// Active table; defaults to AVX2 when the CPU has AVX2 and FMA.
const Table& active();
Backend active_backend();
/// Throws std::runtime_error if the backend is not usable on this machine.
void set_backend(Backend b);
std::string to_string(Backend b);

}  // namespace imex::kernels
