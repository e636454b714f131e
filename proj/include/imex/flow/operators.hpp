#pragma once

#include <functional>
#include <string>

#include "imex/flow/spectral.hpp"
#include "imex/split_system.hpp"

namespace imex::flow {

/// nu = nu0 + nu1 (|v| / v_scale)^2; nu1 = 0 is the constant-viscosity case.
struct ViscosityModel {
  double nu0 = 0.0;
  double nu1 = 0.0;
  double v_scale = 2.0;
  bool variable() const { return nu1 != 0.0; }
};

/// Prescribed body force sampled at the grid points, one array per component.
using ForcingFn = std::function<void(double t, const SpectralGrid& grid, VectorValues& out)>;

/// Viscosity either as a constant or as point values on the padded grid.
struct Viscosity {
  bool constant = true;
  double value = 0.0;  // constant value, or the volume mean
  Values padded;
};

/// The tendency split F = F_c + F_d1 + F_d2 + F_d3 + F_s (pressure excluded).
struct TendencyTerms {
  VectorCoeffs c, d1, d2, d3, s;
};

struct HelmholtzStats {
  int iterations = 0;
  double residual = 0.0;
};

struct FlowState {
  VectorCoeffs v;
  double t = 0.0;
  /// Potential of the last projection correction.
  Coeffs psi;
};

/// Spatial operators of the periodic incompressible problem. Owns its grid,
/// so an instance must not be shared between threads.
class FlowOperators {
 public:
  FlowOperators(int dim, std::array<int, 3> n, std::array<double, 3> length, ViscosityModel nu,
                ForcingFn forcing = {}, std::array<double, 3> origin = {});

  SpectralGrid& grid() { return grid_; }
  const SpectralGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const ViscosityModel& viscosity_model() const { return model_; }
  bool has_forcing() const { return static_cast<bool>(forcing_); }

  // --- transforms of vector fields
  VectorCoeffs to_coeffs(const VectorValues& v);
  VectorValues to_values(const VectorCoeffs& v);

  // --- tendency pieces
  Viscosity viscosity(const VectorCoeffs& v);
  Viscosity constant_viscosity(double nu) const;
  /// F_c = -div(v v), dealiased.
  void convection(const VectorCoeffs& v, VectorCoeffs& out);
  /// F_d1 = div(nu grad v), F_d2 = div(nu (grad v)^T), F_d3 = -grad(nu div v);
  /// null outputs are skipped.
  void viscous(const Viscosity& nu, const VectorCoeffs& v, VectorCoeffs* d1, VectorCoeffs* d2, VectorCoeffs* d3);
  /// F_s at time t (zero without forcing).
  void forcing(double t, VectorCoeffs& out);
  TendencyTerms tendency_terms(const FlowState& s);

  // --- solvers
  /// Removes the gradient part of v in place; returns psi with lap psi = div v.
  Coeffs project(VectorCoeffs& v);
  /// Solves v - gamma div(nu grad v) = g. Constant viscosity is a diagonal
  /// solve; otherwise preconditioned conjugate gradients on the dealiased
  /// operator until the relative RMS residual is <= tol. Throws SolverError
  /// after max_iterations.
  HelmholtzStats helmholtz(const Viscosity& nu, double gamma, const VectorCoeffs& g, VectorCoeffs& v,
                           double tol = 1e-12, int max_iterations = 500);
  /// out = v - gamma div(nu grad v)
  void apply_helmholtz(const Viscosity& nu, double gamma, const VectorCoeffs& v, VectorCoeffs& out);

  // --- diagnostics
  /// max_k |k . v(k)|
  double divergence_max(const VectorCoeffs& v) const;
  /// max_k |v(k)| over all components
  double coeff_max(const VectorCoeffs& v) const;
  /// RMS over points and components.
  double rms(const VectorCoeffs& v) const;
  /// max |v| over the grid points (Euclidean norm per point); NaN if any value is not finite.
  double speed_max(const VectorCoeffs& v);
  /// Largest max|k.v|/max|v| seen right after a projection since the last reset.
  double projected_divergence() const { return projected_div_; }
  void reset_projected_divergence() { projected_div_ = 0.0; }

  long helmholtz_solves() const { return solves_; }
  long helmholtz_iterations() const { return iterations_; }

 private:
  /// d_j c on the padded grid into out[0..dim)
  void gradient_values(const Coeffs& c, Values* out);
  double dot(const VectorCoeffs& a, const VectorCoeffs& b) const;

  SpectralGrid grid_;
  ViscosityModel model_;
  ForcingFn forcing_;
  VectorValues force_values_;
  std::vector<Values> pad_v_, pad_grad_;
  Values pad_tmp_;
  Coeffs tmp_;
  double projected_div_ = 0.0;
  long solves_ = 0, iterations_ = 0;
};

// vector-field helpers
/// y += a x
void axpy(double a, const VectorCoeffs& x, VectorCoeffs& y);
/// y = a x + b y
void axpby(double a, const VectorCoeffs& x, double b, VectorCoeffs& y);
void set_zero(VectorCoeffs& y);

}  // namespace imex::flow
