#pragma once

#include <cmath>
#include <vector>

#include "imex/split_system.hpp"
#include "imex/tableaux.hpp"

namespace imex {

namespace detail {

template <class Real>
std::valarray<std::complex<Real>> scaled(const Real& a, const std::valarray<std::complex<Real>>& x) {
  return std::complex<Real>(a) * x;
}

// y += a * x
template <class Real>
void add_scaled(std::valarray<std::complex<Real>>& y, const Real& a,
                const std::valarray<std::complex<Real>>& x) {
  if (a == Real(0)) return;
  y += std::complex<Real>(a) * x;
}

}  // namespace detail

/// Coefficients in working precision; doubles come straight from the tableau.
template <class Real>
ButcherCoefficients<Real> coefficients(const ImexTableau& tab) {
  if constexpr (std::is_same_v<Real, double>) {
    return tab.coefficients();
  } else {
    return tab.template coefficients_as<Real>();
  }
}

/// One IMEX Euler step with the diffusivity frozen at the step start:
/// u' - dt f_d(nu(u), u') = u + dt f_c(u).
template <class Real>
typename SplitSystem<Real>::State imex_euler_step(const SplitSystem<Real>& sys,
                                                  const typename SplitSystem<Real>::State& u, Real t,
                                                  Real dt) {
  auto nu = sys.diffusivity(t, u);
  typename SplitSystem<Real>::State g = u + detail::scaled(dt, sys.explicit_term(t, u));
  return sys.implicit_solve(t + dt, nu, dt, g);
}

/// Two time levels of IMEX BDF2 with cached explicit tendencies and
/// diffusivities.
template <class Real>
struct Bdf2History {
  using State = typename SplitSystem<Real>::State;
  using Diffusivity = typename SplitSystem<Real>::Diffusivity;

  explicit Bdf2History(State u0) : u_curr(std::move(u0)) {}

  State u_prev, u_curr;
  State fc_prev, fc_curr;
  Diffusivity nu_prev, nu_curr;
  bool curr_cached = false;
  int steps = 0;
  Real dt = 0;
};

struct Bdf2Coefficients {
  double alpha0, alpha1, beta0, beta1, gamma0;
};

/// Equidistant IMEX BDF2 coefficients; the start step uses IMEX Euler.
inline constexpr Bdf2Coefficients bdf2_coefficients(bool start) {
  return start ? Bdf2Coefficients{1.0, 0.0, 1.0, 0.0, 1.0} : Bdf2Coefficients{2.0, -0.5, 2.0, -1.0, 1.5};
}

/// Advances hist from t to t+dt and returns the new state. Throws
/// std::invalid_argument if dt differs from the step size already in use.
template <class Real>
typename SplitSystem<Real>::State bdf2_step(const SplitSystem<Real>& sys, Bdf2History<Real>& hist,
                                            Real t, Real dt) {
  using std::abs;
  if (hist.steps > 0 && abs(dt - hist.dt) > Real(1e-12) * abs(hist.dt)) {
    throw std::invalid_argument("bdf2_step: step size changed; variable-step BDF2 is not supported");
  }
  if (!hist.curr_cached) {
    hist.fc_curr = sys.explicit_term(t, hist.u_curr);
    hist.nu_curr = sys.diffusivity(t, hist.u_curr);
    hist.curr_cached = true;
  }
  const auto k = bdf2_coefficients(hist.steps == 0);
  const Real a0(k.alpha0), a1(k.alpha1), b0(k.beta0), b1(k.beta1), g0(k.gamma0);

  auto rhs = detail::scaled(a0, hist.u_curr);
  auto nu_ext = hist.nu_curr;
  detail::add_scaled(rhs, dt * b0, hist.fc_curr);
  if (hist.steps > 0) {
    detail::add_scaled(rhs, a1, hist.u_prev);
    detail::add_scaled(rhs, dt * b1, hist.fc_prev);
    if (!sys.constant_diffusivity) {
      nu_ext = detail::scaled(b0, hist.nu_curr) + detail::scaled(b1, hist.nu_prev);
    }
  }
  auto u_next = sys.implicit_solve(t + dt, nu_ext, dt / g0, detail::scaled(Real(1) / g0, rhs));

  hist.u_prev = std::move(hist.u_curr);
  hist.fc_prev = std::move(hist.fc_curr);
  hist.nu_prev = std::move(hist.nu_curr);
  hist.u_curr = u_next;
  hist.curr_cached = false;
  hist.dt = dt;
  ++hist.steps;
  return u_next;
}

namespace detail {

template <class Real>
typename SplitSystem<Real>::State imex_rk_step(const SplitSystem<Real>& sys,
                                               const ButcherCoefficients<Real>& tab,
                                               const typename SplitSystem<Real>::State& u, Real t,
                                               Real dt, bool variable) {
  using State = typename SplitSystem<Real>::State;
  using Diffusivity = typename SplitSystem<Real>::Diffusivity;
  const int s = tab.stages;
  std::vector<State> fc(static_cast<std::size_t>(s));
  std::vector<State> fd(static_cast<std::size_t>(s));
  std::vector<Diffusivity> nu(static_cast<std::size_t>(s));

  nu[0] = sys.diffusivity(t, u);
  fc[0] = sys.explicit_term(t, u);
  fd[0] = sys.implicit_term(t, nu[0], u);

  for (int i = 1; i < s; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Real ti = t + tab.c[si] * dt;
    if (variable) {
      // explicit predictor from full tendencies, only used for nu_i
      State v = u;
      for (int j = 0; j < i; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (tab.ex(i, j) != Real(0)) v += std::complex<Real>(dt * tab.ex(i, j)) * (fc[sj] + fd[sj]);
      }
      nu[si] = sys.diffusivity(ti, v);
    } else {
      nu[si] = nu[0];
    }
    State g = u;
    for (int j = 0; j < i; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      add_scaled(g, dt * tab.ex(i, j), fc[sj]);
      add_scaled(g, dt * tab.im(i, j), fd[sj]);
    }
    State ui = tab.im(i, i) == Real(0) ? g : sys.implicit_solve(ti, nu[si], dt * tab.im(i, i), g);
    fc[si] = sys.explicit_term(ti, ui);
    fd[si] = sys.implicit_term(ti, nu[si], ui);
  }

  State out = u;
  for (int i = 0; i < s; ++i) {
    const auto si = static_cast<std::size_t>(i);
    add_scaled(out, dt * tab.b_ex[si], fc[si]);
    add_scaled(out, dt * tab.b_im[si], fd[si]);
  }
  return out;
}

}  // namespace detail

/// IMEX RK step for a diffusivity that does not depend on the solution.
template <class Real>
typename SplitSystem<Real>::State imex_rk_step_const(const SplitSystem<Real>& sys,
                                                     const ButcherCoefficients<Real>& tab,
                                                     const typename SplitSystem<Real>::State& u, Real t,
                                                     Real dt) {
  return detail::imex_rk_step(sys, tab, u, t, dt, false);
}

/// Semi-implicit partitioned RK step: each stage evaluates nu from an
/// explicit predictor and then solves a problem that is linear in the stage
/// value. Coincides with imex_rk_step_const when nu is constant.
template <class Real>
typename SplitSystem<Real>::State imex_rk_step_var(const SplitSystem<Real>& sys,
                                                   const ButcherCoefficients<Real>& tab,
                                                   const typename SplitSystem<Real>::State& u, Real t,
                                                   Real dt) {
  return detail::imex_rk_step(sys, tab, u, t, dt, true);
}

/// Picks the constant- or variable-diffusivity RK variant from the system.
template <class Real>
typename SplitSystem<Real>::State imex_rk_step(const SplitSystem<Real>& sys,
                                               const ButcherCoefficients<Real>& tab,
                                               const typename SplitSystem<Real>::State& u, Real t,
                                               Real dt) {
  return detail::imex_rk_step(sys, tab, u, t, dt, !sys.constant_diffusivity);
}

}  // namespace imex
