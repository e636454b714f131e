#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "imex/integrators.hpp"
#include "imex/quadrature.hpp"

namespace imex {

/// Fixed (M, K) semi-implicit SDC configuration. `predictor` is
/// "IMEX-Euler" or the name of a built-in tableau.
struct SdcConfig {
  int M = 3;
  int K = 5;
  std::string predictor = "IMEX-Euler";

  bool euler_predictor() const;
  /// Stage count of the RK predictor (2 for the IMEX Euler pairing).
  int predictor_stages() const;
  int predictor_order() const;
  /// min(predictor order + K, 2M)
  int theoretical_order() const;
  void validate() const;
};

/// Number of nontrivial substeps per step: M(K+1) with the Euler
/// predictor, M(K+s-1) with an s-stage RK predictor.
int substep_count(const SdcConfig& cfg);

/// SDC stepper with the reference grid and predictor coefficients built once.
template <class Real>
class SdcIntegrator {
 public:
  using State = typename SplitSystem<Real>::State;
  using Diffusivity = typename SplitSystem<Real>::Diffusivity;

  explicit SdcIntegrator(SdcConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    reference_ = make_sdc_grid<Real>(cfg_.M, Real(0), Real(1));
    if (!cfg_.euler_predictor()) predictor_ = coefficients<Real>(builtin_tableau(cfg_.predictor));
  }

  const SdcConfig& config() const { return cfg_; }

  /// Grid for [t, t+dt]; weights scale linearly with dt.
  SdcGrid<Real> grid(Real t, Real dt) const {
    SdcGrid<Real> g = reference_;
    for (auto& x : g.nodes) x = t + dt * x;
    g.nodes.front() = t;
    g.nodes.back() = t + dt;
    for (auto& h : g.lengths) h *= dt;
    for (auto& w : g.weights) w *= dt;
    return g;
  }

  /// Predictor sweep: u^0_m for m = 0..M.
  std::vector<State> predict(const SplitSystem<Real>& sys, const SdcGrid<Real>& g, const State& u) const {
    std::vector<State> U(static_cast<std::size_t>(cfg_.M + 1));
    U[0] = u;
    for (int m = 1; m <= cfg_.M; ++m) {
      const auto sm = static_cast<std::size_t>(m);
      const Real tm = g.nodes[sm - 1];
      if (predictor_) {
        U[sm] = imex_rk_step(sys, *predictor_, U[sm - 1], tm, g.length(m));
      } else {
        U[sm] = imex_euler_step(sys, U[sm - 1], tm, g.length(m));
      }
    }
    return U;
  }

  /// Applies `sweeps` correction sweeps to nodal values U (in place).
  void correct(const SplitSystem<Real>& sys, const SdcGrid<Real>& g, std::vector<State>& U, int sweeps) const {
    if (sweeps <= 0) return;
    const int M = cfg_.M;
    const auto n = static_cast<std::size_t>(M + 1);
    std::vector<Diffusivity> nu(n);
    std::vector<State> fc(n), f(n), fd_lag(n);
    // nu and f_c at a new node feed the next node of the same sweep; the
    // full tendency and the lagged implicit term only feed the next sweep.
    auto refresh = [&](std::size_t m, const std::vector<State>& V, std::vector<Diffusivity>& nuv,
                       std::vector<State>& fcv, std::vector<State>& fv, std::vector<State>& lagv,
                       bool full) {
      const Real tm = g.nodes[m];
      nuv[m] = sys.diffusivity(tm, V[m]);
      fcv[m] = sys.explicit_term(tm, V[m]);
      if (!full) return;
      fv[m] = fcv[m] + sys.implicit_term(tm, nuv[m], V[m]);
      if (m > 0) lagv[m] = sys.implicit_term(tm, nuv[m - 1], V[m]);
    };
    for (std::size_t m = 0; m < n; ++m) refresh(m, U, nu, fc, f, fd_lag, true);

    std::vector<State> N(n);
    std::vector<Diffusivity> nuN(n);
    std::vector<State> fcN(n), fN(n), lagN(n);
    for (int k = 0; k < sweeps; ++k) {
      const bool last = k + 1 == sweeps;
      N[0] = U[0];
      nuN[0] = nu[0];
      fcN[0] = fc[0];
      fN[0] = f[0];
      for (int m = 1; m <= M; ++m) {
        const auto sm = static_cast<std::size_t>(m);
        const Real h = g.length(m);
        State rhs = N[sm - 1] + std::complex<Real>(h) * (fcN[sm - 1] - fc[sm - 1] - fd_lag[sm]);
        for (int q = 0; q <= M; ++q) detail::add_scaled(rhs, g.weight(q, m), f[static_cast<std::size_t>(q)]);
        N[sm] = sys.implicit_solve(g.nodes[sm], nuN[sm - 1], h, rhs);
        if (m < M || !last) refresh(sm, N, nuN, fcN, fN, lagN, !last);
      }
      std::swap(U, N);
      if (!last) {
        std::swap(nu, nuN);
        std::swap(fc, fcN);
        std::swap(f, fN);
        std::swap(fd_lag, lagN);
      }
    }
  }

  State step(const SplitSystem<Real>& sys, const State& u, Real t, Real dt) const {
    const auto g = grid(t, dt);
    auto U = predict(sys, g, u);
    correct(sys, g, U, cfg_.K);
    return U.back();
  }

 private:
  SdcConfig cfg_;
  SdcGrid<Real> reference_;
  std::optional<ButcherCoefficients<Real>> predictor_;
};

/// One SDC step; builds the integrator on every call. Prefer SdcIntegrator
/// for repeated stepping.
template <class Real>
typename SplitSystem<Real>::State sdc_step(const SplitSystem<Real>& sys, const SdcConfig& cfg,
                                           const typename SplitSystem<Real>::State& u, Real t, Real dt) {
  if (!(dt > Real(0))) throw std::invalid_argument("sdc_step: dt must be positive");
  return SdcIntegrator<Real>(cfg).step(sys, u, t, dt);
}

}  // namespace imex
