#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <vector>

namespace imex::flow {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(kAlign))); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t(kAlign)); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

/// Fourier coefficients of one real field (half spectrum along the last axis).
using Coeffs = std::vector<cplx, AlignedAllocator<cplx>>;
/// Point values of one real field.
using Values = std::vector<double, AlignedAllocator<double>>;
/// One entry per velocity component.
using VectorCoeffs = std::vector<Coeffs>;
using VectorValues = std::vector<Values>;

/// Periodic box [origin, origin + L) in 2D or 3D with a Fourier basis.
///
/// Coefficients are normalized (the mean mode holds the mean) and the
/// Nyquist modes are kept at zero, so every stored field is a real
/// trigonometric polynomial of degree < n/2 per axis. The padded grid has
/// 3n/2 points per axis and is used for dealiased products.
///
/// Holds FFT plans and scratch buffers: one instance per thread.
class SpectralGrid {
 public:
  SpectralGrid(int dim, std::array<int, 3> n, std::array<double, 3> length, std::array<double, 3> origin = {});
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int dim() const { return dim_; }
  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  int padded_n(int axis) const { return np_[static_cast<std::size_t>(axis)]; }
  double length(int axis) const { return len_[static_cast<std::size_t>(axis)]; }
  double origin(int axis) const { return org_[static_cast<std::size_t>(axis)]; }
  /// Coordinate of grid index i along axis.
  double coordinate(int axis, int i) const { return org_[static_cast<std::size_t>(axis)] + len_[static_cast<std::size_t>(axis)] * i / n(axis); }

  std::size_t physical_size() const { return nphys_; }
  std::size_t padded_size() const { return npad_; }
  std::size_t spectral_size() const { return nspec_; }

  /// Wavenumber 2*pi*m/L along `axis` for every stored coefficient (0 on Nyquist modes).
  const std::vector<double>& k(int axis) const { return k_[static_cast<std::size_t>(axis)]; }
  const std::vector<double>& k2() const { return k2_; }
  /// Parseval weights: sum w |c|^2 is the mean square of the field.
  const std::vector<double>& weights() const { return w_; }
  /// Integer mode numbers of a stored coefficient.
  std::array<int, 3> mode(std::size_t idx) const;
  /// Storage index of mode m, and whether it is stored conjugated.
  /// Returns false if the mode is not representable.
  bool locate(std::array<int, 3> m, std::size_t& idx, bool& conjugated) const;

  Coeffs zero_coeffs() const { return Coeffs(nspec_, cplx(0)); }
  Values zero_values() const { return Values(nphys_, 0.0); }
  VectorCoeffs zero_vector() const { return VectorCoeffs(static_cast<std::size_t>(dim_), zero_coeffs()); }

  void forward(const double* values, cplx* coeffs);
  void backward(const cplx* coeffs, double* values);
  /// Zero-pads to the 3/2 grid and transforms back.
  void backward_padded(const cplx* coeffs, double* values);
  /// Transforms padded values and truncates to the stored modes.
  void forward_padded(const double* values, cplx* coeffs);

  /// Dealiased product of two fields.
  void multiply(const cplx* a, const cplx* b, cplx* out);

  Coeffs forward(const Values& v) {
    Coeffs c(nspec_);
    forward(v.data(), c.data());
    return c;
  }
  Values backward(const Coeffs& c) {
    Values v(nphys_);
    backward(c.data(), v.data());
    return v;
  }

 private:
  struct Plans;

  int dim_;
  std::array<int, 3> n_{1, 1, 1}, np_{1, 1, 1};
  std::array<double, 3> len_{1, 1, 1}, org_{0, 0, 0};
  std::size_t nphys_ = 0, npad_ = 0, nspec_ = 0, nspec_pad_ = 0;
  std::array<std::vector<double>, 3> k_;
  std::vector<double> k2_, w_;
  std::vector<unsigned char> nyquist_;
  std::vector<std::size_t> pad_map_;
  Coeffs scratch_, scratch_pad_;
  Values prod_a_, prod_b_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace imex::flow
