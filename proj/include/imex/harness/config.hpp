#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "imex/flow/cases.hpp"
#include "imex/flow/steppers.hpp"
#include "imex/method.hpp"

namespace imex::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class CaseKind { Ode, Tgp, Vvp, Custom };

CaseKind parse_case(std::string_view text);
std::string to_string(CaseKind k);

/// Plain key = value run description. Unset numeric fields keep the case
/// defaults (see flow::FlowCaseConfig).
struct RunConfig {
  CaseKind kind = CaseKind::Tgp;
  std::string method = "RK-CB3e";
  std::vector<std::string> methods;  // converge; empty means {method}
  double dt = 1.0 / 64;
  std::vector<double> dt_list;  // converge; empty means {dt}
  double t_final = 0.25;
  int grid = 0;
  double nu0 = -1.0;
  double nu1 = -1.0;
  int sdc_M = 3;
  int sdc_K = 5;
  std::string predictor = "IMEX-Euler";
  unsigned long long seed = 0;
  /// Amplitude, relative to the reference speed, of a seeded random
  /// solenoidal disturbance added to the initial flow field.
  double perturbation = 0.0;
  std::complex<double> lambda_c{0.0, -1.0};
  std::complex<double> lambda_d{-1.0, 0.0};
  flow::FinalProjection final_projection = flow::FinalProjection::Auto;
  double blowup_factor = 0.0;
  std::optional<std::pair<double, double>> bracket;  // critical-cfl

  /// Applies one key; throws ConfigError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Resolved configuration in the same key = value format.
  std::string to_text() const;

  bool is_flow() const { return kind != CaseKind::Ode; }
  flow::FlowCaseConfig flow_config() const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

/// A method name, or "SDC" for the (predictor, sdc_M, sdc_K) fields.
MethodSpec resolve_method(const RunConfig& cfg, std::string_view name);

/// "0.25", "2^-5" or "1/32".
double parse_step(std::string_view text);
/// Comma list of steps; "a..b" expands powers of two from a down to b.
std::vector<double> parse_step_list(std::string_view text);
/// Comma list of method names; commas inside parentheses do not split.
std::vector<std::string> parse_method_list(std::string_view text);
/// "x", "yi", "x+yi", "x-yi" (also with j).
std::complex<double> parse_complex(std::string_view text);

}  // namespace imex::harness
