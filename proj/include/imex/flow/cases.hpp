#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "imex/flow/operators.hpp"

namespace imex::flow {

struct TgValue {
  double vx, vy, p;
};

/// Taylor-Green vortex travelling with unit phase speed in x and y.
TgValue tg_exact(double x, double y, double t, double nu);

struct VvValue {
  double vx, vy, vz, p;
};

/// Travelling 3D vortex array of wavelength 1 and peak speed 2.
VvValue vv_exact(double x, double y, double z, double t);
/// nu0 + nu1 (|v|/2)^2
double vv_viscosity(const std::array<double, 3>& v, double nu0, double nu1);
/// Body force that makes vv_exact solve the momentum equation with vv_viscosity.
std::array<double, 3> vv_forcing(const std::array<double, 3>& x, double t, double nu0, double nu1);

/// |lambda_c|max dt v_ref with |lambda_c|max = pi max(N/L).
double cfl_number(const SpectralGrid& grid, double dt, double v_ref);

enum class FlowCaseKind { Tgp, Vvp, Custom };

FlowCaseKind parse_flow_case(std::string_view text);
std::string to_string(FlowCaseKind k);

struct FlowCaseConfig {
  FlowCaseKind kind = FlowCaseKind::Tgp;
  /// Points per axis; 0 picks 64 (TGP), 24 (VVP) or 16 (custom).
  int grid = 0;
  /// Negative picks the case default: TGP 0.02; VVP 0.01/0.01; custom 1/1600, 0.
  double nu0 = -1.0;
  double nu1 = -1.0;
  /// Factor on v_ref above which a run counts as unstable; 0 picks the
  /// case default (1.5 for VVP, 10 otherwise).
  double blowup_factor = 0.0;
};

/// A ready-to-run flow problem.
struct FlowCase {
  FlowCaseConfig config;  // with defaults resolved
  std::unique_ptr<FlowOperators> ops;
  FlowState initial;
  /// Exact velocity at time t; empty when no closed form exists.
  std::function<VectorCoeffs(double t)> exact;
  double v_ref = 1.0;
  double blowup_speed = 10.0;
  std::string description;
};

/// TGP: 2D, [-1/2,1/2]^2, constant nu. VVP: 3D, [-1/2,1/2]^3, nu(v) with
/// forcing. Custom: the disturbed Taylor-Green initial condition on
/// [-pi,pi]^3 (no exact solution).
FlowCase make_flow_case(const FlowCaseConfig& cfg);

}  // namespace imex::flow
