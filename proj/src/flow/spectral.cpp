#include "imex/flow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace imex::flow {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// n/2 and 3n/4 must be integers for the Nyquist and padded-grid bookkeeping
bool admissible(int n) { return n >= 4 && n % 4 == 0; }

}  // namespace

struct SpectralGrid::Plans {
  fftw_plan r2c = nullptr, c2r = nullptr, r2c_pad = nullptr, c2r_pad = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto p : {r2c, c2r, r2c_pad, c2r_pad}) {
      if (p) fftw_destroy_plan(p);
    }
  }
};

SpectralGrid::SpectralGrid(int dim, std::array<int, 3> n, std::array<double, 3> length, std::array<double, 3> origin)
    : dim_(dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("SpectralGrid: dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    if (!admissible(n[sa])) {
      throw std::invalid_argument("SpectralGrid: grid sizes must be multiples of 4, got " + std::to_string(n[sa]));
    }
    if (!(length[sa] > 0)) throw std::invalid_argument("SpectralGrid: lengths must be positive");
    n_[sa] = n[sa];
    np_[sa] = 3 * n[sa] / 2;
    len_[sa] = length[sa];
    org_[sa] = origin[sa];
  }
  const int la = dim - 1;
  const auto sla = static_cast<std::size_t>(la);
  nphys_ = npad_ = 1;
  nspec_ = nspec_pad_ = 1;
  for (int a = 0; a < dim; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    nphys_ *= static_cast<std::size_t>(n_[sa]);
    npad_ *= static_cast<std::size_t>(np_[sa]);
    nspec_ *= static_cast<std::size_t>(a == la ? n_[sa] / 2 + 1 : n_[sa]);
    nspec_pad_ *= static_cast<std::size_t>(a == la ? np_[sa] / 2 + 1 : np_[sa]);
  }

  for (int a = 0; a < dim; ++a) k_[static_cast<std::size_t>(a)].assign(nspec_, 0.0);
  k2_.assign(nspec_, 0.0);
  w_.assign(nspec_, 0.0);
  nyquist_.assign(nspec_, 0);
  pad_map_.assign(nspec_, 0);
  for (std::size_t idx = 0; idx < nspec_; ++idx) {
    const auto m = mode(idx);
    bool nyq = false;
    for (int a = 0; a < dim; ++a) {
      const auto sa = static_cast<std::size_t>(a);
      if (std::abs(m[sa]) == n_[sa] / 2) nyq = true;
    }
    nyquist_[idx] = nyq ? 1 : 0;
    w_[idx] = (m[sla] == 0 || m[sla] == n_[sla] / 2) ? 1.0 : 2.0;
    std::size_t p = 0;
    for (int a = 0; a < dim; ++a) {
      const auto sa = static_cast<std::size_t>(a);
      const int extent = a == la ? np_[sa] / 2 + 1 : np_[sa];
      const int ip = m[sa] >= 0 ? m[sa] : m[sa] + np_[sa];
      p = p * static_cast<std::size_t>(extent) + static_cast<std::size_t>(ip);
    }
    pad_map_[idx] = p;
    if (nyq) continue;
    for (int a = 0; a < dim; ++a) {
      const auto sa = static_cast<std::size_t>(a);
      const double kk = 2.0 * std::numbers::pi * m[sa] / len_[sa];
      k_[sa][idx] = kk;
      k2_[idx] += kk * kk;
    }
  }

  scratch_.assign(nspec_, cplx(0));
  scratch_pad_.assign(nspec_pad_, cplx(0));
  Values phys(nphys_), phys_pad(npad_);
  plans_ = std::make_unique<Plans>();
  int dims[3], dims_pad[3];
  for (int a = 0; a < dim; ++a) {
    dims[a] = n_[static_cast<std::size_t>(a)];
    dims_pad[a] = np_[static_cast<std::size_t>(a)];
  }
  auto* spec = reinterpret_cast<fftw_complex*>(scratch_.data());
  auto* spec_pad = reinterpret_cast<fftw_complex*>(scratch_pad_.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c(dim, dims, phys.data(), spec, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r(dim, dims, spec, phys.data(), FFTW_ESTIMATE);
  plans_->r2c_pad = fftw_plan_dft_r2c(dim, dims_pad, phys_pad.data(), spec_pad, FFTW_ESTIMATE);
  plans_->c2r_pad = fftw_plan_dft_c2r(dim, dims_pad, spec_pad, phys_pad.data(), FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r || !plans_->r2c_pad || !plans_->c2r_pad) {
    throw std::runtime_error("SpectralGrid: FFTW planning failed");
  }
}

SpectralGrid::~SpectralGrid() = default;

std::array<int, 3> SpectralGrid::mode(std::size_t idx) const {
  std::array<int, 3> m{0, 0, 0};
  const int la = dim_ - 1;
  for (int a = la; a >= 0; --a) {
    const auto sa = static_cast<std::size_t>(a);
    const auto extent = static_cast<std::size_t>(a == la ? n_[sa] / 2 + 1 : n_[sa]);
    const int i = static_cast<int>(idx % extent);
    idx /= extent;
    m[sa] = (a == la || i < n_[sa] / 2) ? i : i - n_[sa];
  }
  return m;
}

bool SpectralGrid::locate(std::array<int, 3> m, std::size_t& idx, bool& conjugated) const {
  const int la = dim_ - 1;
  conjugated = m[static_cast<std::size_t>(la)] < 0;
  if (conjugated) {
    for (auto& x : m) x = -x;
  }
  idx = 0;
  for (int a = 0; a < dim_; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    if (std::abs(m[sa]) >= n_[sa] / 2) return false;
    const int extent = a == la ? n_[sa] / 2 + 1 : n_[sa];
    const int i = m[sa] >= 0 ? m[sa] : m[sa] + n_[sa];
    idx = idx * static_cast<std::size_t>(extent) + static_cast<std::size_t>(i);
  }
  for (int a = dim_; a < 3; ++a) {
    if (m[static_cast<std::size_t>(a)] != 0) return false;
  }
  return true;
}

void SpectralGrid::forward(const double* values, cplx* coeffs) {
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(values), reinterpret_cast<fftw_complex*>(coeffs));
  const double s = 1.0 / static_cast<double>(nphys_);
  for (std::size_t i = 0; i < nspec_; ++i) coeffs[i] = nyquist_[i] ? cplx(0) : coeffs[i] * s;
}

void SpectralGrid::backward(const cplx* coeffs, double* values) {
  std::memcpy(static_cast<void*>(scratch_.data()), coeffs, nspec_ * sizeof(cplx));
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch_.data()), values);
}

void SpectralGrid::backward_padded(const cplx* coeffs, double* values) {
  std::fill(scratch_pad_.begin(), scratch_pad_.end(), cplx(0));
  for (std::size_t i = 0; i < nspec_; ++i) {
    if (!nyquist_[i]) scratch_pad_[pad_map_[i]] = coeffs[i];
  }
  fftw_execute_dft_c2r(plans_->c2r_pad, reinterpret_cast<fftw_complex*>(scratch_pad_.data()), values);
}

void SpectralGrid::forward_padded(const double* values, cplx* coeffs) {
  fftw_execute_dft_r2c(plans_->r2c_pad, const_cast<double*>(values),
                       reinterpret_cast<fftw_complex*>(scratch_pad_.data()));
  const double s = 1.0 / static_cast<double>(npad_);
  for (std::size_t i = 0; i < nspec_; ++i) coeffs[i] = nyquist_[i] ? cplx(0) : scratch_pad_[pad_map_[i]] * s;
}

void SpectralGrid::multiply(const cplx* a, const cplx* b, cplx* out) {
  prod_a_.resize(npad_);
  prod_b_.resize(npad_);
  backward_padded(a, prod_a_.data());
  backward_padded(b, prod_b_.data());
  for (std::size_t i = 0; i < npad_; ++i) prod_a_[i] *= prod_b_[i];
  forward_padded(prod_a_.data(), out);
}

}  // namespace imex::flow
