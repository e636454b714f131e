#pragma once

#include <memory>
#include <string>
#include <vector>

#include "imex/flow/operators.hpp"
#include "imex/method.hpp"

namespace imex::flow {

/// When the RK stepper projects its assembled result.
///  - AsPrinted: only for variable viscosity.
///  - Auto: also when the assembly increment is nonzero, since it carries
///    the gradient parts of F_c and F_s.
///  - Always: after every step.
enum class FinalProjection { Auto, AsPrinted, Always };

FinalProjection parse_final_projection(std::string_view text);
std::string to_string(FinalProjection p);

/// nu = a x + b y
Viscosity combine(double a, const Viscosity& x, double b, const Viscosity& y);

/// BDF2 history: state, explicit group and viscosity at the previous level.
struct Bdf2FlowHistory {
  int steps = 0;
  double dt = 0.0;
  VectorCoeffs v_prev;
  VectorCoeffs e_prev;  // F_c + F_d + F_d3
  VectorCoeffs h_prev;  // F_d1 + F_d3
  Viscosity nu_prev;
};

/// Extrapolation, projection, diffusion and (variable viscosity only) a
/// second projection. The first step uses the IMEX Euler coefficients.
/// Throws std::invalid_argument when dt changes.
void bdf2_flow_step(FlowOperators& ops, FlowState& s, Bdf2FlowHistory& hist, double dt);

/// One IMEX RK step with stage-wise projection.
void rk_flow_step(FlowOperators& ops, FlowState& s, const ButcherCoefficients<double>& tab, double dt,
                  FinalProjection policy = FinalProjection::Auto);

/// Semi-implicit SDC step with reusable node grid and predictor.
class SdcFlowIntegrator {
 public:
  explicit SdcFlowIntegrator(SdcConfig cfg, FinalProjection policy = FinalProjection::Auto);
  const SdcConfig& config() const { return cfg_; }
  void step(FlowOperators& ops, FlowState& s, double dt) const;

 private:
  SdcConfig cfg_;
  FinalProjection policy_;
  SdcGrid<double> reference_;
  ButcherCoefficients<double> predictor_;
};

void sdc_flow_step(FlowOperators& ops, FlowState& s, const SdcConfig& cfg, double dt);

/// Any MethodSpec as a flow stepper; BDF2 keeps its history, so one
/// instance belongs to one trajectory.
class FlowStepper {
 public:
  FlowStepper(MethodSpec spec, FinalProjection policy = FinalProjection::Auto);
  const MethodSpec& spec() const { return spec_; }
  void step(FlowOperators& ops, FlowState& s, double dt);

 private:
  MethodSpec spec_;
  FinalProjection policy_;
  ButcherCoefficients<double> rk_;
  std::unique_ptr<SdcFlowIntegrator> sdc_;
  Bdf2FlowHistory bdf2_;
};

}  // namespace imex::flow
