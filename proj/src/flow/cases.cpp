#include "imex/flow/cases.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imex::flow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TgValue tg_exact(double x, double y, double t, double nu) {
  const double a = kTwoPi * (x - t);
  const double b = kTwoPi * (y - 0.125 - t);
  const double e = std::exp(-8.0 * std::numbers::pi * std::numbers::pi * nu * t);
  TgValue v;
  v.vx = 1.0 + std::sin(a) * std::cos(b) * e;
  v.vy = 1.0 - std::cos(a) * std::sin(b) * e;
  v.p = 0.25 * (std::cos(2.0 * a) + std::cos(2.0 * b)) * e * e;
  return v;
}

VvValue vv_exact(double x, double y, double z, double t) {
  const double X = kTwoPi * (x + t), Y = kTwoPi * (y + t), Z = kTwoPi * (z + t);
  VvValue v;
  v.vx = (std::sin(X) + std::cos(Y)) * std::sin(Z);
  v.vy = (std::cos(X) + std::sin(Y)) * std::sin(Z);
  v.vz = (std::cos(X) + std::cos(Y)) * std::cos(Z);
  v.p = std::sin(X) * std::sin(Y) * std::sin(Z);
  return v;
}

double vv_viscosity(const std::array<double, 3>& v, double nu0, double nu1) {
  return nu0 + 0.25 * nu1 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

std::array<double, 3> vv_forcing(const std::array<double, 3>& x, double t, double nu0, double nu1) {
  const double k = kTwoPi;
  const double X = k * (x[0] + t), Y = k * (x[1] + t), Z = k * (x[2] + t);
  const double sX = std::sin(X), cX = std::cos(X), sY = std::sin(Y), cY = std::cos(Y), sZ = std::sin(Z),
               cZ = std::cos(Z);
  const double v[3] = {(sX + cY) * sZ, (cX + sY) * sZ, (cX + cY) * cZ};
  // G[i][j] = d_j v_i
  const double G[3][3] = {{k * cX * sZ, -k * sY * sZ, k * (sX + cY) * cZ},
                          {-k * sX * sZ, k * cY * sZ, k * (cX + sY) * cZ},
                          {-k * sX * cZ, -k * sY * cZ, -k * (cX + cY) * sZ}};
  const double grad_p[3] = {k * cX * sY * sZ, k * sX * cY * sZ, k * sX * sY * cZ};
  const double nu = vv_viscosity({v[0], v[1], v[2]}, nu0, nu1);
  double grad_nu[3];
  for (int j = 0; j < 3; ++j) {
    grad_nu[j] = 0.0;
    for (int l = 0; l < 3; ++l) grad_nu[j] += 0.5 * nu1 * v[l] * G[l][j];
  }
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) {
    // each factor is a single plane wave, so d_t = d_x + d_y + d_z and lap v = -2k^2 v
    const double dvdt = G[i][0] + G[i][1] + G[i][2];
    double conv = 0.0, stress = -2.0 * k * k * nu * v[i];
    for (int j = 0; j < 3; ++j) {
      conv += v[j] * G[i][j];
      stress += grad_nu[j] * (G[i][j] + G[j][i]);
    }
    f[static_cast<std::size_t>(i)] = dvdt + conv - stress + grad_p[i];
  }
  return f;
}

double cfl_number(const SpectralGrid& grid, double dt, double v_ref) {
  double m = 0.0;
  for (int a = 0; a < grid.dim(); ++a) m = std::max(m, grid.n(a) / grid.length(a));
  return std::numbers::pi * m * dt * v_ref;
}

FlowCaseKind parse_flow_case(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "tgp") return FlowCaseKind::Tgp;
  if (s == "vvp") return FlowCaseKind::Vvp;
  if (s == "custom") return FlowCaseKind::Custom;
  throw std::invalid_argument("unknown flow case '" + s + "' (tgp | vvp | custom)");
}

std::string to_string(FlowCaseKind k) {
  switch (k) {
    case FlowCaseKind::Tgp:
      return "tgp";
    case FlowCaseKind::Vvp:
      return "vvp";
    case FlowCaseKind::Custom:
      return "custom";
  }
  return {};
}

namespace {

template <class Fn>
VectorValues sample(const SpectralGrid& g, int components, Fn fn) {
  VectorValues out(static_cast<std::size_t>(components), Values(g.physical_size()));
  const int nz = g.dim() == 3 ? g.n(2) : 1;
  std::size_t p = 0;
  double v[3];
  for (int i = 0; i < g.n(0); ++i) {
    for (int j = 0; j < g.n(1); ++j) {
      for (int l = 0; l < nz; ++l, ++p) {
        const double z = g.dim() == 3 ? g.coordinate(2, l) : 0.0;
        fn(g.coordinate(0, i), g.coordinate(1, j), z, v);
        for (int c = 0; c < components; ++c) out[static_cast<std::size_t>(c)][p] = v[c];
      }
    }
  }
  return out;
}

}  // namespace

FlowCase make_flow_case(const FlowCaseConfig& in) {
  FlowCase fc;
  fc.config = in;
  auto& cfg = fc.config;
  switch (cfg.kind) {
    case FlowCaseKind::Tgp: {
      if (cfg.grid == 0) cfg.grid = 64;
      if (cfg.nu0 < 0) cfg.nu0 = 0.02;
      if (cfg.nu1 < 0) cfg.nu1 = 0.0;
      if (cfg.nu1 != 0.0) throw std::invalid_argument("tgp: the exact solution needs constant viscosity (nu1 = 0)");
      if (cfg.blowup_factor == 0) cfg.blowup_factor = 10.0;
      const double nu = cfg.nu0;
      fc.ops = std::make_unique<FlowOperators>(2, std::array<int, 3>{cfg.grid, cfg.grid, 1},
                                               std::array<double, 3>{1.0, 1.0, 1.0}, ViscosityModel{nu, 0.0},
                                               ForcingFn{}, std::array<double, 3>{-0.5, -0.5, 0.0});
      auto* ops = fc.ops.get();
      fc.exact = [ops, nu](double t) {
        return ops->to_coeffs(sample(ops->grid(), 2, [&](double x, double y, double, double* v) {
          const auto e = tg_exact(x, y, t, nu);
          v[0] = e.vx;
          v[1] = e.vy;
        }));
      };
      fc.description = "travelling Taylor-Green vortex, periodic, 2D";
      break;
    }
    case FlowCaseKind::Vvp: {
      if (cfg.grid == 0) cfg.grid = 24;
      if (cfg.nu0 < 0) cfg.nu0 = 0.01;
      if (cfg.nu1 < 0) cfg.nu1 = 0.01;
      if (cfg.blowup_factor == 0) cfg.blowup_factor = 1.5;
      const double nu0 = cfg.nu0, nu1 = cfg.nu1;
      ForcingFn forcing = [nu0, nu1](double t, const SpectralGrid& g, VectorValues& out) {
        out = sample(g, 3, [&](double x, double y, double z, double* v) {
          const auto f = vv_forcing({x, y, z}, t, nu0, nu1);
          v[0] = f[0];
          v[1] = f[1];
          v[2] = f[2];
        });
      };
      fc.ops = std::make_unique<FlowOperators>(3, std::array<int, 3>{cfg.grid, cfg.grid, cfg.grid},
                                               std::array<double, 3>{1.0, 1.0, 1.0}, ViscosityModel{nu0, nu1, 2.0},
                                               std::move(forcing), std::array<double, 3>{-0.5, -0.5, -0.5});
      auto* ops = fc.ops.get();
      fc.exact = [ops](double t) {
        return ops->to_coeffs(sample(ops->grid(), 3, [&](double x, double y, double z, double* v) {
          const auto e = vv_exact(x, y, z, t);
          v[0] = e.vx;
          v[1] = e.vy;
          v[2] = e.vz;
        }));
      };
      fc.description = "3D vortex array with velocity-dependent viscosity, periodic";
      break;
    }
    case FlowCaseKind::Custom: {
      if (cfg.grid == 0) cfg.grid = 16;
      if (cfg.nu0 < 0) cfg.nu0 = 1.0 / 1600.0;
      if (cfg.nu1 < 0) cfg.nu1 = 0.0;
      if (cfg.blowup_factor == 0) cfg.blowup_factor = 10.0;
      const double L = 2.0 * std::numbers::pi;
      fc.ops = std::make_unique<FlowOperators>(3, std::array<int, 3>{cfg.grid, cfg.grid, cfg.grid},
                                               std::array<double, 3>{L, L, L}, ViscosityModel{cfg.nu0, cfg.nu1, 1.0},
                                               ForcingFn{}, std::array<double, 3>{-0.5 * L, -0.5 * L, -0.5 * L});
      fc.description = "disturbed Taylor-Green vortex on [-pi,pi]^3 (no exact solution)";
      break;
    }
  }
  if (fc.exact) {
    fc.initial.v = fc.exact(0.0);
  } else {
    fc.initial.v = fc.ops->to_coeffs(sample(fc.ops->grid(), 3, [](double x, double y, double z, double* v) {
      v[0] = std::cos(x) * std::sin(y) * std::sin(z);
      v[1] = -std::sin(x) * std::cos(y) * std::sin(z);
      v[2] = 0.0;
    }));
  }
  fc.initial.t = 0.0;
  fc.initial.psi = fc.ops->grid().zero_coeffs();
  fc.v_ref = cfg.kind == FlowCaseKind::Vvp ? 2.0 : fc.ops->speed_max(fc.initial.v);
  fc.blowup_speed = cfg.blowup_factor * fc.v_ref;
  return fc;
}

}  // namespace imex::flow
