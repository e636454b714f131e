#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "imex/harness/config.hpp"

namespace imex::harness {

/// sqrt of the mean over all points and components of the squared
/// difference. Fields are sequences of equally long components.
template <class Field>
double rms_error(const Field& numeric, const Field& exact) {
  if (numeric.size() != exact.size()) throw std::invalid_argument("rms_error: component count mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < numeric.size(); ++c) {
    const auto& a = numeric[c];
    const auto& b = exact[c];
    if (a.size() != b.size()) throw std::invalid_argument("rms_error: grid size mismatch");
    if (c > 0 && a.size() != numeric[0].size()) throw std::invalid_argument("rms_error: ragged field");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = std::abs(a[i] - b[i]);
      sum += d * d;
    }
    count += a.size();
  }
  if (count == 0) throw std::invalid_argument("rms_error: empty field");
  return std::sqrt(sum / static_cast<double>(count));
}

/// ln(e1/e2) / ln(dt1/dt2); NaN when either error is zero or not finite.
double eoc(double e1, double e2, double dt1, double dt2);

struct ErrorSample {
  double t = 0.0;
  double rms_error_v = 0.0;
  double divergence_max = 0.0;
};

struct RunResult {
  std::string method;
  double dt = 0.0;
  long steps = 0;
  double t_end = 0.0;
  /// Final-time error; NaN without an exact solution or after a failure.
  double error = std::numeric_limits<double>::quiet_NaN();
  double twall = 0.0;  // stepping only
  bool unstable = false;
  std::string failure;  // why the run was flagged
  double max_speed = 0.0;
  /// Largest max|k.v|/max|v| at the end of a step.
  double max_divergence = 0.0;
  /// Largest max|k.v|/max|v| right after any projection.
  double projected_divergence = 0.0;
  long helmholtz_solves = 0;
  long helmholtz_iterations = 0;
  std::vector<ErrorSample> history;
};

struct RunOptions {
  bool record_history = false;
  /// Steps are ceil(t_final/dt) instead of requiring dt to divide t_final.
  bool horizon_only = false;
};

/// One trajectory of the configured case with the given method and step.
RunResult run_case(const RunConfig& cfg, const MethodSpec& method, double dt, const RunOptions& opt = {});

struct ConvergenceRecord {
  std::string method;
  double dt = 0.0;
  double eps_v = 0.0;
  double eoc = std::numeric_limits<double>::quiet_NaN();
  double twall_s = 0.0;
  bool unstable = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRecord> rows;  // by method in input order, dt decreasing
  std::vector<RunResult> runs;          // same order
};

/// Runs every (method, dt) pair on `jobs` worker threads. Unstable rows keep
/// their flag, get eps_v = NaN and break the EOC chain. Without an exact
/// solution the reference is a run with a quarter of the smallest step.
ConvergenceTable converge(const RunConfig& cfg, const std::vector<std::string>& methods, std::vector<double> dts,
                          int jobs = 1);

/// RFC 4180 quoting for fields containing commas or quotes.
std::string csv_field(const std::string& s);

/// method,dt,eps_v,eoc,twall_s with 17 significant digits and LF endings.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows);

struct CriticalCflResult {
  double dt_star = 0.0;      // largest step found stable
  double dt_unstable = 0.0;  // smallest step found unstable
  double cfl = 0.0;          // CFL number at dt_star (flow cases)
  int runs = 0;
};

/// Bisection (geometric) between a stable and an unstable step until
/// dt_unstable <= (1 + rel_tol) dt_star. Stability is judged over t_final.
/// Throws std::invalid_argument when the bracket does not straddle the limit.
CriticalCflResult critical_cfl(const RunConfig& cfg, const MethodSpec& method, double dt_lo, double dt_hi,
                               double rel_tol = 0.02);

/// meta.txt (resolved config, timing, solver stats) and errors.csv.
void write_run_directory(const std::filesystem::path& dir, const RunConfig& cfg, const RunResult& r);

/// Digits used for every float written by the harness.
inline constexpr int kCsvDigits = 17;

}  // namespace imex::harness
