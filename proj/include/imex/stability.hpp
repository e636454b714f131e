#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "imex/method.hpp"

namespace imex {

/// How z = dt (lambda_im + lambda_ex) is distributed over the split parts.
enum class SplitMode { Implicit, Explicit, SemiImplicit };

SplitMode parse_split_mode(std::string_view text);
std::string to_string(SplitMode mode);

template <class Real>
struct SplitLambdas {
  std::complex<Real> im;
  std::complex<Real> ex;
};

/// implicit: (z, 0); explicit: (0, z); semi-implicit: (Re z, i Im z).
template <class Real>
SplitLambdas<Real> split_lambdas(std::complex<Real> z, SplitMode mode) {
  switch (mode) {
    case SplitMode::Implicit:
      return {z, {}};
    case SplitMode::Explicit:
      return {{}, z};
    case SplitMode::SemiImplicit:
      return {{z.real(), Real(0)}, {Real(0), z.imag()}};
  }
  return {};
}

/// Evaluates R(z) by running one step of the method with dt = 1 on the
/// scalar split problem from u = 1. Built once per method.
template <class Real>
class StabilityEvaluator {
 public:
  explicit StabilityEvaluator(MethodSpec spec) : spec_(std::move(spec)) {
    if (!spec_.one_step()) {
      throw std::invalid_argument("stability analysis needs a one-step method; " + spec_.name() +
                                  " is a multistep method");
    }
  }

  /// Throws SolverError at poles.
  std::complex<Real> R(std::complex<Real> z, SplitMode mode) const {
    const auto l = split_lambdas(z, mode);
    const auto sys = linear_scalar_system<Real>(l.ex, l.im);
    OdeStepper<Real> stepper(spec_);
    typename SplitSystem<Real>::State u(std::complex<Real>(1), 1);
    return stepper.step(sys, u, Real(0), Real(1))[0];
  }

  /// R(z) - exp(z)
  std::complex<Real> error(std::complex<Real> z, SplitMode mode) const {
    return R(z, mode) - complex_exp(z);
  }

  const MethodSpec& spec() const { return spec_; }

 private:
  MethodSpec spec_;
};

struct StabilityValue {
  std::complex<double> R;
  std::complex<double> error;
  bool pole = false;
};

StabilityValue eval_R(const MethodSpec& method, std::complex<double> z, SplitMode mode);

/// z divided by the method's number of nontrivial substeps.
std::complex<double> scaled_argument(const MethodSpec& method, std::complex<double> z);

struct GridSpec {
  double re_min = -1, re_max = 1;
  double im_min = -1, im_max = 1;
  int nx = 2, ny = 2;
};

/// |R| and |eps| on a lattice, row-major with imaginary rows outermost.
/// With `scaled`, the axes are z_s and the evaluation point is z_s times
/// the substep count.
struct DomainScan {
  GridSpec grid;
  bool scaled = false;
  int substeps = 1;
  std::vector<double> re;  // axis values, size nx
  std::vector<double> im;  // axis values, size ny
  std::vector<double> abs_R;
  std::vector<double> abs_err;
  std::vector<char> pole;

  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy * grid.nx + ix); }
};

/// `jobs` > 1 evaluates rows in parallel; output order is fixed.
DomainScan scan_domain(const MethodSpec& method, SplitMode mode, const GridSpec& grid, bool scaled,
                       int jobs = 1);

struct CriticalImag {
  enum class Status { Bounded, Unbounded, Marginal };
  double y_star = 0.0;
  Status status = Status::Bounded;
};

/// Smallest y > 0 with |R(re + i y)| = 1, bracketed by doubling from
/// y = 0.01, checked for earlier crossings on a fine sweep, then bisected
/// to 1e-4. With `scaled`, both re and the returned y are per-substep values.
CriticalImag critical_imag(const MethodSpec& method, SplitMode mode, double re_part, bool scaled = false);

struct ConsistencyResult {
  double order = 0.0;  // slope - 1
  double slope = 0.0;
  double fit_residual = 0.0;  // RMS of log10 residuals about the fitted line
  bool determinate = false;
  std::vector<double> radii;
  std::vector<double> errors;
};

/// Fits log|eps(z)| against log|z| for z = r exp(3 i pi / 4) with eight
/// log-spaced r in [1e-3, 1e-1], evaluated in 113-bit precision.
ConsistencyResult consistency_order(const MethodSpec& method, SplitMode mode);

}  // namespace imex
