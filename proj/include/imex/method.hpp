#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "imex/integrators.hpp"
#include "imex/sdc.hpp"

namespace imex {

enum class MethodKind { Bdf2, RungeKutta, Sdc };

/// A time integration method by name: "BDF2", a tableau name such as
/// "RK-CB3e" or "IMEX-Euler", or "SDC-<pred>(M,K)" with pred one of Eu,
/// TR, CB2, CB3c, CB3e, CB4, ARS3.
struct MethodSpec {
  MethodKind kind = MethodKind::RungeKutta;
  std::string tableau;  // RungeKutta only
  SdcConfig sdc;        // Sdc only

  std::string name() const;
  int theoretical_order() const;
  /// Nontrivial substeps per step used for argument scaling: s-1 for RK,
  /// substep_count for SDC, 1 for BDF2.
  int substeps() const;
  bool one_step() const { return kind != MethodKind::Bdf2; }
};

/// Throws std::invalid_argument on unknown names.
MethodSpec parse_method(std::string_view text);

/// SDC spec from explicit fields (predictor name, M, K).
MethodSpec sdc_method(std::string_view predictor, int M, int K);

/// Stateful ODE stepper for any MethodSpec; BDF2 keeps its history, so a
/// stepper instance belongs to a single trajectory.
template <class Real>
class OdeStepper {
 public:
  using State = typename SplitSystem<Real>::State;

  explicit OdeStepper(MethodSpec spec) : spec_(std::move(spec)) {
    if (spec_.kind == MethodKind::RungeKutta) {
      rk_ = coefficients<Real>(builtin_tableau(spec_.tableau));
    } else if (spec_.kind == MethodKind::Sdc) {
      sdc_ = std::make_unique<SdcIntegrator<Real>>(spec_.sdc);
    }
  }

  const MethodSpec& spec() const { return spec_; }

  State step(const SplitSystem<Real>& sys, const State& u, Real t, Real dt) {
    switch (spec_.kind) {
      case MethodKind::RungeKutta:
        return imex_rk_step(sys, *rk_, u, t, dt);
      case MethodKind::Sdc:
        return sdc_->step(sys, u, t, dt);
      case MethodKind::Bdf2:
        if (!hist_) hist_.emplace(u);
        return bdf2_step(sys, *hist_, t, dt);
    }
    return u;
  }

 private:
  MethodSpec spec_;
  std::optional<ButcherCoefficients<Real>> rk_;
  std::unique_ptr<SdcIntegrator<Real>> sdc_;
  std::optional<Bdf2History<Real>> hist_;
};

/// Runs `steps` equidistant steps from (t0, u0).
template <class Real>
typename SplitSystem<Real>::State integrate(const SplitSystem<Real>& sys, const MethodSpec& spec,
                                            typename SplitSystem<Real>::State u0, Real t0, Real dt,
                                            long steps) {
  OdeStepper<Real> stepper(spec);
  for (long n = 0; n < steps; ++n) {
    u0 = stepper.step(sys, u0, t0 + Real(n) * dt, dt);
  }
  return u0;
}

}  // namespace imex
