#include "imex/flow/steppers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace imex::flow {

FinalProjection parse_final_projection(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "auto") return FinalProjection::Auto;
  if (s == "as_printed" || s == "as-printed" || s == "printed") return FinalProjection::AsPrinted;
  if (s == "always") return FinalProjection::Always;
  throw std::invalid_argument("unknown final projection policy '" + s + "' (auto | as_printed | always)");
}

std::string to_string(FinalProjection p) {
  switch (p) {
    case FinalProjection::Auto:
      return "auto";
    case FinalProjection::AsPrinted:
      return "as_printed";
    case FinalProjection::Always:
      return "always";
  }
  return {};
}

Viscosity combine(double a, const Viscosity& x, double b, const Viscosity& y) {
  Viscosity out;
  out.value = a * x.value + b * y.value;
  if (x.constant && y.constant) return out;
  out.constant = false;
  const std::size_t n = x.constant ? y.padded.size() : x.padded.size();
  out.padded.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x.constant ? x.value : x.padded[i];
    const double yi = y.constant ? y.value : y.padded[i];
    out.padded[i] = a * xi + b * yi;
  }
  return out;
}

namespace {

VectorCoeffs scaled(double a, const VectorCoeffs& x) {
  VectorCoeffs y = x;
  for (auto& c : y) {
    for (auto& z : c) z *= a;
  }
  return y;
}

// F_c + F_d1 + F_d2 + 2 F_d3 and F_d1 + F_d3 from the four pieces
struct Pieces {
  VectorCoeffs c, d1, d2, d3;
};

Pieces pieces(FlowOperators& ops, const Viscosity& nu, const VectorCoeffs& v) {
  Pieces p;
  ops.convection(v, p.c);
  ops.viscous(nu, v, &p.d1, &p.d2, &p.d3);
  return p;
}

}  // namespace

void bdf2_flow_step(FlowOperators& ops, FlowState& s, Bdf2FlowHistory& hist, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("bdf2_flow_step: dt must be positive");
  if (hist.steps > 0 && std::abs(dt - hist.dt) > 1e-12 * hist.dt) {
    throw std::invalid_argument("bdf2_flow_step: step size changed; variable-step BDF2 is not supported");
  }
  const auto k = bdf2_coefficients(hist.steps == 0);
  const auto nu = ops.viscosity(s.v);
  const auto p = pieces(ops, nu, s.v);
  VectorCoeffs e = p.c;
  axpy(1.0, p.d1, e);
  axpy(1.0, p.d2, e);
  axpy(2.0, p.d3, e);
  VectorCoeffs h = p.d1;
  axpy(1.0, p.d3, h);

  // extrapolation
  VectorCoeffs rhs;
  ops.forcing(s.t + dt, rhs);
  axpby(k.beta0, e, 1.0, rhs);
  if (k.beta1 != 0.0) axpy(k.beta1, hist.e_prev, rhs);
  VectorCoeffs vp = scaled(k.alpha0 / k.gamma0, s.v);
  if (k.alpha1 != 0.0) axpy(k.alpha1 / k.gamma0, hist.v_prev, vp);
  axpy(dt / k.gamma0, rhs, vp);
  // projection
  s.psi = ops.project(vp);
  // diffusion with extrapolated viscosity
  const double gamma = dt / k.gamma0;
  const Viscosity nu_x = k.beta1 != 0.0 ? combine(k.beta0, nu, k.beta1, hist.nu_prev) : combine(k.beta0, nu, 0.0, nu);
  axpy(-gamma * k.beta0, h, vp);
  if (k.beta1 != 0.0) axpy(-gamma * k.beta1, hist.h_prev, vp);
  VectorCoeffs v_new;
  ops.helmholtz(nu_x, gamma, vp, v_new);
  if (ops.viscosity_model().variable()) s.psi = ops.project(v_new);

  hist.v_prev = std::move(s.v);
  hist.e_prev = std::move(e);
  hist.h_prev = std::move(h);
  hist.nu_prev = nu;
  hist.dt = dt;
  ++hist.steps;
  s.v = std::move(v_new);
  s.t += dt;
}

void rk_flow_step(FlowOperators& ops, FlowState& s, const ButcherCoefficients<double>& tab, double dt,
                  FinalProjection policy) {
  if (!(dt > 0)) throw std::invalid_argument("rk_flow_step: dt must be positive");
  const int S = tab.stages;
  const auto sS = static_cast<std::size_t>(S);
  const bool variable = ops.viscosity_model().variable();
  const bool forced = ops.has_forcing();
  auto ex_factor = [&](int i) { return tab.b_ex[static_cast<std::size_t>(i)] - tab.ex(S - 1, i); };
  auto im_factor = [&](int i) { return tab.b_im[static_cast<std::size_t>(i)] - tab.im(S - 1, i); };
  bool increment = false;
  for (int i = 0; i < S; ++i) increment = increment || ex_factor(i) != 0.0 || im_factor(i) != 0.0;

  std::vector<Pieces> P(sS);
  std::vector<VectorCoeffs> Fs(sS);
  if (forced) {
    for (int i = 0; i < S; ++i) ops.forcing(s.t + tab.c[static_cast<std::size_t>(i)] * dt, Fs[static_cast<std::size_t>(i)]);
  }
  auto need_terms = [&](int i) { return i < S - 1 || ex_factor(i) != 0.0 || im_factor(i) != 0.0; };

  VectorCoeffs vi = s.v;
  if (need_terms(0)) P[0] = pieces(ops, ops.viscosity(vi), vi);
  for (int i = 1; i < S; ++i) {
    VectorCoeffs vp = s.v;
    for (int j = 0; j < i; ++j) {
      const double a = dt * tab.ex(i, j);
      if (a == 0.0) continue;
      const auto& pj = P[static_cast<std::size_t>(j)];
      axpy(a, pj.c, vp);
      axpy(a, pj.d1, vp);
      axpy(a, pj.d2, vp);
      axpy(2.0 * a, pj.d3, vp);
    }
    if (forced) {
      for (int j = 0; j <= i; ++j) {
        if (tab.im(i, j) != 0.0) axpy(dt * tab.im(i, j), Fs[static_cast<std::size_t>(j)], vp);
      }
    }
    s.psi = ops.project(vp);
    const auto nu = ops.viscosity(vp);
    for (int j = 0; j < i; ++j) {
      const auto& pj = P[static_cast<std::size_t>(j)];
      const double a1 = dt * (tab.im(i, j) - tab.ex(i, j));
      const double a3 = -dt * tab.ex(i, j);
      if (a1 != 0.0) axpy(a1, pj.d1, vp);
      if (a3 != 0.0) axpy(a3, pj.d3, vp);
    }
    ops.helmholtz(nu, dt * tab.im(i, i), vp, vi);
    if (need_terms(i)) P[static_cast<std::size_t>(i)] = pieces(ops, nu, vi);
  }

  for (int i = 0; i < S; ++i) {
    const auto& pi = P[static_cast<std::size_t>(i)];
    const double fe = dt * ex_factor(i);
    const double fi = dt * im_factor(i);
    if (fe != 0.0) {
      axpy(fe, pi.c, vi);
      axpy(fe, pi.d2, vi);
      axpy(fe, pi.d3, vi);
    }
    if (fi != 0.0) {
      axpy(fi, pi.d1, vi);
      if (forced) axpy(fi, Fs[static_cast<std::size_t>(i)], vi);
    }
  }
  const bool project = policy == FinalProjection::Always || variable ||
                       (policy == FinalProjection::Auto && increment);
  if (project) s.psi = ops.project(vi);
  s.v = std::move(vi);
  s.t += dt;
}

SdcFlowIntegrator::SdcFlowIntegrator(SdcConfig cfg, FinalProjection policy) : cfg_(std::move(cfg)), policy_(policy) {
  cfg_.validate();
  reference_ = make_sdc_grid<double>(cfg_.M, 0.0, 1.0);
  predictor_ = builtin_tableau(cfg_.euler_predictor() ? "IMEX-Euler" : cfg_.predictor).coefficients();
}

void SdcFlowIntegrator::step(FlowOperators& ops, FlowState& s, double dt) const {
  if (!(dt > 0)) throw std::invalid_argument("sdc_flow_step: dt must be positive");
  const int M = cfg_.M;
  const auto n = static_cast<std::size_t>(M + 1);
  const bool variable = ops.viscosity_model().variable();
  std::vector<double> t(n);
  for (std::size_t m = 0; m < n; ++m) t[m] = s.t + dt * reference_.nodes[m];
  auto h = [&](int m) { return dt * reference_.length(m); };
  auto w = [&](int q, int m) { return dt * reference_.weight(q, m); };

  // predictor sweep
  std::vector<VectorCoeffs> V(n);
  V[0] = s.v;
  FlowState sub;
  for (int m = 1; m <= M; ++m) {
    sub.v = V[static_cast<std::size_t>(m - 1)];
    sub.t = t[static_cast<std::size_t>(m - 1)];
    rk_flow_step(ops, sub, predictor_, h(m), policy_);
    V[static_cast<std::size_t>(m)] = std::move(sub.v);
  }
  s.psi = std::move(sub.psi);
  if (cfg_.K == 0) {
    s.v = std::move(V.back());
    s.t += dt;
    return;
  }

  std::vector<VectorCoeffs> Fs(n);
  for (std::size_t m = 0; m < n; ++m) ops.forcing(t[m], Fs[m]);

  // per node: viscosity, explicit group, full tendency and lagged implicit term
  std::vector<Viscosity> nu(n), nuN(n);
  std::vector<VectorCoeffs> fex(n), f(n), fim(n), fexN(n), fN(n), fimN(n);
  auto refresh = [&](std::size_t m, const std::vector<VectorCoeffs>& X, std::vector<Viscosity>& nuv,
                     std::vector<VectorCoeffs>& fexv, std::vector<VectorCoeffs>& fv, std::vector<VectorCoeffs>& fimv,
                     bool full) {
    nuv[m] = ops.viscosity(X[m]);
    Pieces p = pieces(ops, nuv[m], X[m]);
    fexv[m] = std::move(p.c);
    axpy(1.0, p.d2, fexv[m]);
    axpy(1.0, p.d3, fexv[m]);
    if (!full) return;
    fv[m] = fexv[m];
    axpy(1.0, p.d1, fv[m]);
    axpy(1.0, Fs[m], fv[m]);
    if (m > 0) ops.viscous(nuv[m - 1], X[m], &fimv[m], nullptr, nullptr);
  };
  for (std::size_t m = 0; m < n; ++m) refresh(m, V, nu, fex, f, fim, true);

  std::vector<VectorCoeffs> N(n);
  for (int k = 0; k < cfg_.K; ++k) {
    const bool last = k + 1 == cfg_.K;
    N[0] = V[0];
    nuN[0] = nu[0];
    fexN[0] = fex[0];
    fN[0] = f[0];
    for (int m = 1; m <= M; ++m) {
      const auto sm = static_cast<std::size_t>(m);
      const double hm = h(m);
      VectorCoeffs d1, d3;
      ops.viscous(nuN[sm - 1], V[sm], &d1, nullptr, &d3);
      VectorCoeffs vp = N[sm - 1];
      axpy(hm, fexN[sm - 1], vp);
      axpy(hm, d1, vp);
      axpy(hm, d3, vp);
      axpy(-hm, fex[sm - 1], vp);
      axpy(-hm, fim[sm], vp);
      for (int q = 0; q <= M; ++q) axpy(w(q, m), f[static_cast<std::size_t>(q)], vp);
      s.psi = ops.project(vp);
      axpy(-hm, d1, vp);
      axpy(-hm, d3, vp);
      ops.helmholtz(nuN[sm - 1], hm, vp, N[sm]);
      if (variable || policy_ == FinalProjection::Always) s.psi = ops.project(N[sm]);
      if (m < M || !last) refresh(sm, N, nuN, fexN, fN, fimN, !last);
    }
    std::swap(V, N);
    if (!last) {
      std::swap(nu, nuN);
      std::swap(fex, fexN);
      std::swap(f, fN);
      std::swap(fim, fimN);
    }
  }
  s.v = std::move(V.back());
  s.t += dt;
}

void sdc_flow_step(FlowOperators& ops, FlowState& s, const SdcConfig& cfg, double dt) {
  SdcFlowIntegrator(cfg).step(ops, s, dt);
}

FlowStepper::FlowStepper(MethodSpec spec, FinalProjection policy) : spec_(std::move(spec)), policy_(policy) {
  if (spec_.kind == MethodKind::RungeKutta) rk_ = builtin_tableau(spec_.tableau).coefficients();
  if (spec_.kind == MethodKind::Sdc) sdc_ = std::make_unique<SdcFlowIntegrator>(spec_.sdc, policy_);
}

void FlowStepper::step(FlowOperators& ops, FlowState& s, double dt) {
  switch (spec_.kind) {
    case MethodKind::RungeKutta:
      rk_flow_step(ops, s, rk_, dt, policy_);
      return;
    case MethodKind::Sdc:
      sdc_->step(ops, s, dt);
      return;
    case MethodKind::Bdf2:
      bdf2_flow_step(ops, s, bdf2_, dt);
      return;
  }
}

}  // namespace imex::flow
