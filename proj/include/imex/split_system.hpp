#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <valarray>

namespace imex {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side du/dt = f_c(t,u) + f_d(t,nu,u) split into an explicit
/// (convective) part and an implicit (diffusive) part that is linear in u
/// once the diffusivity nu is frozen.
///
/// The diffusivity is carried as a coefficient vector; complex entries
/// let the scalar test problem put an arbitrary complex eigenvalue into
/// the implicit part.
template <class Real>
struct SplitSystem {
  using Scalar = std::complex<Real>;
  using State = std::valarray<Scalar>;
  using Diffusivity = std::valarray<Scalar>;

  std::size_t dimension = 1;
  std::function<State(Real t, const State& u)> explicit_term;
  std::function<State(Real t, const Diffusivity& nu, const State& u)> implicit_term;
  std::function<Diffusivity(Real t, const State& u)> diffusivity;
  /// Returns u with u - gamma * f_d(t, nu, u) = g.
  std::function<State(Real t, const Diffusivity& nu, Real gamma, const State& g)> implicit_solve;
  /// Set when diffusivity() ignores u.
  bool constant_diffusivity = true;
};

/// Scalar split test problem du/dt = lambda_ex u + lambda_im u.
/// Throws SolverError when an implicit stage hits the pole 1 - gamma*lambda_im = 0.
template <class Real>
SplitSystem<Real> linear_scalar_system(std::complex<Real> lambda_ex, std::complex<Real> lambda_im) {
  using Sys = SplitSystem<Real>;
  Sys sys;
  sys.dimension = 1;
  sys.explicit_term = [lambda_ex](Real, const typename Sys::State& u) {
    return typename Sys::State(lambda_ex * u);
  };
  sys.implicit_term = [](Real, const typename Sys::Diffusivity& nu, const typename Sys::State& u) {
    return typename Sys::State(nu * u);
  };
  sys.diffusivity = [lambda_im](Real, const typename Sys::State& u) {
    return typename Sys::Diffusivity(lambda_im, u.size());
  };
  sys.implicit_solve = [](Real, const typename Sys::Diffusivity& nu, Real gamma,
                          const typename Sys::State& g) {
    typename Sys::State denom = typename Sys::Scalar(1) - typename Sys::Scalar(gamma) * nu;
    for (const auto& d : denom) {
      if (d == typename Sys::Scalar(0)) throw SolverError("implicit stage is singular (pole of R)");
    }
    return typename Sys::State(g / denom);
  };
  sys.constant_diffusivity = true;
  return sys;
}

}  // namespace imex
