#include "imex/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "imex/flow/cases.hpp"
#include "imex/flow/steppers.hpp"
#include "imex/real.hpp"

namespace imex::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

long step_count(const RunConfig& cfg, double dt, bool horizon_only) {
  if (!(dt > 0)) throw std::invalid_argument("run: dt must be positive");
  if (!(cfg.t_final > 0)) throw std::invalid_argument("run: t_final must be positive");
  if (horizon_only) return static_cast<long>(std::ceil(cfg.t_final / dt - 1e-12));
  const double r = cfg.t_final / dt;
  const long n = std::lround(r);
  if (n < 1 || std::abs(static_cast<double>(n) * dt - cfg.t_final) > 1e-12 * cfg.t_final) {
    std::ostringstream os;
    os << std::setprecision(kCsvDigits) << "run: dt = " << dt << " does not divide t_final = " << cfg.t_final;
    throw std::invalid_argument(os.str());
  }
  return n;
}

// random solenoidal modes with |m_i| <= 2, scaled to peak speed `amplitude`
void add_perturbation(flow::FlowOperators& ops, flow::VectorCoeffs& v, double amplitude, unsigned long long seed) {
  auto& g = ops.grid();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  flow::VectorCoeffs d = g.zero_vector();
  for (std::size_t q = 0; q < g.spectral_size(); ++q) {
    const auto m = g.mode(q);
    bool low = true;
    for (int a = 0; a < g.dim(); ++a) low = low && std::abs(m[static_cast<std::size_t>(a)]) <= 2;
    if (!low || g.k2()[q] == 0.0) continue;
    for (auto& c : d) c[q] = flow::cplx(nd(gen), nd(gen));
  }
  // the k_z = 0 plane must be Hermitian; a round trip enforces it
  for (auto& c : d) c = g.forward(g.backward(c));
  ops.project(d);
  const double smax = ops.speed_max(d);
  if (!(smax > 0)) return;
  flow::axpy(amplitude / smax, d, v);
}

struct FlowOutcome {
  flow::VectorCoeffs v;
};

RunResult run_ode(const RunConfig& cfg, const MethodSpec& method, double dt, const RunOptions& opt) {
  using C = std::complex<Quad>;
  RunResult r;
  r.method = method.name();
  r.dt = dt;
  const long n = step_count(cfg, dt, opt.horizon_only);
  const C lc(Quad(cfg.lambda_c.real()), Quad(cfg.lambda_c.imag()));
  const C ld(Quad(cfg.lambda_d.real()), Quad(cfg.lambda_d.imag()));
  const auto sys = linear_scalar_system<Quad>(lc, ld);
  const double threshold = cfg.blowup_factor > 0 ? cfg.blowup_factor : 10.0;
  OdeStepper<Quad> stepper(method);
  SplitSystem<Quad>::State u(C(1), 1);
  const Quad qdt(dt);
  auto exact = [&](Quad t) { return complex_exp(C((lc + ld) * t)); };
  Clock::duration busy{};
  for (long i = 0; i < n; ++i) {
    const Quad t = Quad(i) * qdt;
    try {
      const auto t0 = Clock::now();
      u = stepper.step(sys, u, t, qdt);
      busy += Clock::now() - t0;
    } catch (const SolverError& e) {
      r.unstable = true;
      r.failure = e.what();
      break;
    }
    r.steps = i + 1;
    r.t_end = static_cast<double>(Quad(i + 1) * qdt);
    const double mag = static_cast<double>(complex_abs(u[0]));
    r.max_speed = std::isfinite(mag) ? std::max(r.max_speed, mag) : mag;
    if (opt.record_history) {
      r.history.push_back({r.t_end, static_cast<double>(complex_abs(C(u[0] - exact(Quad(i + 1) * qdt)))), 0.0});
    }
    if (!(mag <= threshold)) {
      r.unstable = true;
      r.failure = std::isfinite(mag) ? "magnitude above the blow-up threshold" : "non-finite state";
      break;
    }
  }
  r.twall = seconds(busy);
  if (!r.unstable) r.error = static_cast<double>(complex_abs(C(u[0] - exact(Quad(n) * qdt))));
  return r;
}

RunResult run_flow(const RunConfig& cfg, const MethodSpec& method, double dt, const RunOptions& opt,
                   FlowOutcome* out) {
  RunResult r;
  r.method = method.name();
  r.dt = dt;
  const long n = step_count(cfg, dt, opt.horizon_only);
  auto fc = flow::make_flow_case(cfg.flow_config());
  auto& ops = *fc.ops;
  flow::FlowState s = fc.initial;
  if (cfg.perturbation > 0) add_perturbation(ops, s.v, cfg.perturbation * fc.v_ref, cfg.seed);
  flow::FlowStepper stepper(method, cfg.final_projection);
  ops.reset_projected_divergence();
  auto error_of = [&](const flow::VectorCoeffs& v, double t) {
    return rms_error(ops.to_values(v), ops.to_values(fc.exact(t)));
  };
  Clock::duration busy{};
  for (long i = 0; i < n; ++i) {
    try {
      const auto t0 = Clock::now();
      stepper.step(ops, s, dt);
      busy += Clock::now() - t0;
    } catch (const SolverError& e) {
      r.unstable = true;
      r.failure = e.what();
      break;
    }
    r.steps = i + 1;
    r.t_end = s.t;
    const double speed = ops.speed_max(s.v);
    r.max_speed = std::isfinite(speed) ? std::max(r.max_speed, speed) : speed;
    if (!(speed <= fc.blowup_speed)) {
      r.unstable = true;
      r.failure = std::isfinite(speed) ? "speed above the blow-up threshold" : "non-finite velocity";
      break;
    }
    const double scale = ops.coeff_max(s.v);
    const double div = scale > 0 ? ops.divergence_max(s.v) / scale : 0.0;
    r.max_divergence = std::max(r.max_divergence, div);
    if (opt.record_history) {
      const double e = fc.exact ? error_of(s.v, s.t) : std::numeric_limits<double>::quiet_NaN();
      r.history.push_back({s.t, e, ops.divergence_max(s.v)});
    }
  }
  r.twall = seconds(busy);
  r.projected_divergence = ops.projected_divergence();
  r.helmholtz_solves = ops.helmholtz_solves();
  r.helmholtz_iterations = ops.helmholtz_iterations();
  if (!r.unstable && fc.exact) r.error = error_of(s.v, s.t);
  if (out && !r.unstable) out->v = std::move(s.v);
  return r;
}

// Runs tasks on a fixed number of threads; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double eoc(double e1, double e2, double dt1, double dt2) {
  if (!(dt1 > 0) || !(dt2 > 0) || dt1 == dt2) throw std::invalid_argument("eoc: need distinct positive steps");
  if (!(e1 > 0) || !(e2 > 0) || !std::isfinite(e1) || !std::isfinite(e2)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log(e1 / e2) / std::log(dt1 / dt2);
}

RunResult run_case(const RunConfig& cfg, const MethodSpec& method, double dt, const RunOptions& opt) {
  if (cfg.is_flow()) return run_flow(cfg, method, dt, opt, nullptr);
  return run_ode(cfg, method, dt, opt);
}

ConvergenceTable converge(const RunConfig& cfg, const std::vector<std::string>& methods, std::vector<double> dts,
                          int jobs) {
  if (methods.empty()) throw std::invalid_argument("converge: no methods");
  if (dts.empty()) throw std::invalid_argument("converge: no step sizes");
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) specs.push_back(resolve_method(cfg, m));
  std::sort(dts.begin(), dts.end(), std::greater<>());
  dts.erase(std::unique(dts.begin(), dts.end()), dts.end());
  for (double dt : dts) (void)step_count(cfg, dt, false);

  const bool reference_needed = cfg.kind == CaseKind::Custom;
  const std::size_t per_method = dts.size() + (reference_needed ? 1 : 0);
  const std::size_t count = specs.size() * per_method;
  std::vector<RunResult> results(count);
  std::vector<FlowOutcome> finals(reference_needed ? count : 0);
  parallel_for(count, jobs, [&](std::size_t i) {
    const auto& spec = specs[i / per_method];
    const std::size_t j = i % per_method;
    const double dt = j < dts.size() ? dts[j] : dts.back() / 4;
    if (cfg.is_flow()) {
      results[i] = run_flow(cfg, spec, dt, {}, reference_needed ? &finals[i] : nullptr);
    } else {
      results[i] = run_ode(cfg, spec, dt, {});
    }
  });

  if (reference_needed) {
    auto fc = flow::make_flow_case(cfg.flow_config());
    for (std::size_t m = 0; m < specs.size(); ++m) {
      const auto& ref = results[m * per_method + dts.size()];
      const auto& vref = finals[m * per_method + dts.size()].v;
      for (std::size_t j = 0; j < dts.size(); ++j) {
        auto& r = results[m * per_method + j];
        if (r.unstable || ref.unstable) continue;
        flow::VectorCoeffs d = finals[m * per_method + j].v;
        flow::axpy(-1.0, vref, d);
        r.error = fc.ops->rms(d);  // Parseval: equals the grid-point RMS
      }
    }
  }

  ConvergenceTable table;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    for (std::size_t j = 0; j < dts.size(); ++j) {
      const auto& r = results[m * per_method + j];
      ConvergenceRecord rec;
      rec.method = r.method;
      rec.dt = r.dt;
      rec.unstable = r.unstable;
      rec.eps_v = r.unstable ? std::numeric_limits<double>::quiet_NaN() : r.error;
      rec.twall_s = r.twall;
      if (j > 0) {
        const auto& prev = table.rows.back();
        if (!prev.unstable && !rec.unstable) rec.eoc = eoc(prev.eps_v, rec.eps_v, prev.dt, rec.dt);
      }
      table.rows.push_back(rec);
      table.runs.push_back(r);
    }
  }
  return table;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  return q + '"';
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows) {
  os << "method,dt,eps_v,eoc,twall_s\n";
  os << std::setprecision(kCsvDigits);
  for (const auto& r : rows) {
    os << csv_field(r.method) << ',' << r.dt << ',' << r.eps_v << ',' << r.eoc << ',' << r.twall_s << '\n';
  }
}

CriticalCflResult critical_cfl(const RunConfig& cfg, const MethodSpec& method, double dt_lo, double dt_hi,
                               double rel_tol) {
  if (!(dt_lo > 0) || !(dt_hi > dt_lo)) throw std::invalid_argument("critical_cfl: need 0 < lo < hi");
  if (!(rel_tol > 0)) throw std::invalid_argument("critical_cfl: tolerance must be positive");
  CriticalCflResult res;
  RunOptions opt;
  opt.horizon_only = true;
  auto stable = [&](double dt) {
    ++res.runs;
    return !run_case(cfg, method, dt, opt).unstable;
  };
  if (!stable(dt_lo)) throw std::invalid_argument("critical_cfl: the lower end of the bracket is already unstable");
  if (stable(dt_hi)) throw std::invalid_argument("critical_cfl: the upper end of the bracket is still stable");
  double lo = dt_lo, hi = dt_hi;
  while (hi > (1.0 + rel_tol) * lo) {
    const double mid = std::sqrt(lo * hi);
    (stable(mid) ? lo : hi) = mid;
  }
  res.dt_star = lo;
  res.dt_unstable = hi;
  if (cfg.is_flow()) {
    auto fc = flow::make_flow_case(cfg.flow_config());
    res.cfl = flow::cfl_number(fc.ops->grid(), lo, fc.v_ref);
  } else {
    res.cfl = lo * std::abs(cfg.lambda_c);
  }
  return res;
}

void write_run_directory(const std::filesystem::path& dir, const RunConfig& cfg, const RunResult& r) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "meta.txt", std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write " + (dir / "meta.txt").string());
    meta << std::setprecision(kCsvDigits);
    meta << cfg.to_text();
    meta << "resolved_method = " << r.method << '\n';
    meta << "steps = " << r.steps << '\n';
    meta << "t_end = " << r.t_end << '\n';
    meta << "rms_error_v = " << r.error << '\n';
    meta << "unstable = " << (r.unstable ? "true" : "false") << '\n';
    if (!r.failure.empty()) meta << "failure = " << r.failure << '\n';
    meta << "twall_s = " << r.twall << '\n';
    meta << "max_speed = " << r.max_speed << '\n';
    if (cfg.is_flow()) {
      meta << "max_divergence_rel = " << r.max_divergence << '\n';
      meta << "projected_divergence_rel = " << r.projected_divergence << '\n';
      meta << "helmholtz_solves = " << r.helmholtz_solves << '\n';
      meta << "helmholtz_iterations = " << r.helmholtz_iterations << '\n';
      meta << "helmholtz_mean_iterations = "
           << (r.helmholtz_solves ? static_cast<double>(r.helmholtz_iterations) / static_cast<double>(r.helmholtz_solves) : 0.0)
           << '\n';
    }
  }
  std::ofstream csv(dir / "errors.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + (dir / "errors.csv").string());
  csv << "t,rms_error_v,divergence_max\n" << std::setprecision(kCsvDigits);
  for (const auto& e : r.history) csv << e.t << ',' << e.rms_error_v << ',' << e.divergence_max << '\n';
}

}  // namespace imex::harness
