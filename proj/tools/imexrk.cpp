// imexrk: command line front end for the integrators, the stability
// analysis and the flow experiments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "imex/harness/experiment.hpp"
#include "imex/kernels/kernels.hpp"
#include "imex/stability.hpp"
#include "imex/tableaux.hpp"

namespace fs = std::filesystem;
using namespace imex;
using namespace imex::harness;

namespace {

struct Globals {
  std::string config;
  std::string out;
  int jobs = 1;
  std::vector<std::string> sets;
};

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

// stdout unless --out names a file (or a directory, then `fallback` inside it)
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  Sink(const std::string& out, const std::string& fallback) {
    if (out.empty()) return;
    fs::path p(out);
    if (fs::is_directory(p) || out.back() == '/') {
      fs::create_directories(p);
      p /= fallback;
    } else if (p.has_parent_path()) {
      fs::create_directories(p.parent_path());
    }
    file.open(p, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + p.string());
    os = &file;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(kCsvDigits) << x;
  return os.str();
}

void print_matrix(std::ostream& os, const char* label, const std::vector<double>& a, int s) {
  os << label << ":\n";
  for (int i = 0; i < s; ++i) {
    os << "  ";
    for (int j = 0; j < s; ++j) os << std::setw(26) << fmt(a[static_cast<std::size_t>(i * s + j)]);
    os << '\n';
  }
}

void print_vector(std::ostream& os, const char* label, const std::vector<double>& v) {
  os << label << ":";
  for (double x : v) os << ' ' << fmt(x);
  os << '\n';
}

void dump_tableau(std::ostream& os, const ImexTableau& tab) {
  const auto& k = tab.coefficients();
  const auto rep = validate_structure(tab);
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  os << tab.name() << " (stages " << tab.stages() << ", order " << tab.declared_order() << ")\n";
  print_vector(os, "c", k.c);
  print_matrix(os, "a_im", k.a_im, k.stages);
  print_matrix(os, "a_ex", k.a_ex, k.stages);
  print_vector(os, "b_im", k.b_im);
  print_vector(os, "b_ex", k.b_ex);
  const auto& d = tab.declared_flags();
  const auto& c = rep.computed_flags;
  os << "flags (declared/computed): SA " << yn(d.stiffly_accurate) << '/' << yn(c.stiffly_accurate) << ", FSAL "
     << yn(d.fsal) << '/' << yn(c.fsal) << ", GSA " << yn(d.gsa) << '/' << yn(c.gsa) << ", b_ex = b_im "
     << yn(d.shared_b) << '/' << yn(c.shared_b) << '\n';
  for (const auto& chk : rep.checks) {
    if (!chk.pass) os << "check failed: " << chk.name << " (residual " << fmt(chk.residual) << ")\n";
  }
  os << '\n';
}

const char* status_name(CriticalImag::Status s) {
  switch (s) {
    case CriticalImag::Status::Bounded:
      return "bounded";
    case CriticalImag::Status::Unbounded:
      return "unbounded";
    case CriticalImag::Status::Marginal:
      return "marginal";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX Runge-Kutta, BDF2 and SDC time integration: experiments and analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key = value run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--jobs", g.jobs, "worker threads for independent runs")->check(CLI::Range(1, 1024));
  app.add_option("--set", g.sets, "override a configuration key (key=value), repeatable");
  std::string backend = "auto";
  app.add_option("--backend", backend, "vector kernels: auto | scalar | avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // run
  auto* run = app.add_subcommand("run", "integrate one case and write meta.txt and errors.csv");
  std::string run_method, run_dt;
  run->add_option("--method", run_method, "method (overrides the config)");
  run->add_option("--dt", run_dt, "time step, e.g. 2^-6");

  // converge
  auto* conv = app.add_subcommand("converge", "step-size sweep with EOC and wall time (CSV)");
  std::string conv_methods;
  std::string conv_dts;
  conv->add_option("--methods", conv_methods, "comma-separated methods (overrides the config)");
  conv->add_option("--dt-list", conv_dts, "steps, e.g. 2^-5..2^-11");

  // critical-cfl
  auto* crit = app.add_subcommand("critical-cfl", "bisect the largest stable step of a case");
  std::string crit_method, crit_bracket;
  double crit_tol = 0.02;
  crit->add_option("--method", crit_method, "method (overrides the config)");
  crit->add_option("--bracket", crit_bracket, "stable,unstable step pair (overrides the config)");
  crit->add_option("--tol", crit_tol, "relative step tolerance")->check(CLI::PositiveNumber);

  // stability-domain / accuracy-domain
  struct DomainOpts {
    std::string method = "RK-CB3e";
    std::string mode = "semi-implicit";
    GridSpec grid{-10, 2, -10, 10, 241, 401};
    bool scaled = false;
  };
  DomainOpts stab_opts, acc_opts;
  auto add_domain = [&](const char* name, const char* help, DomainOpts& o) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--method", o.method, "one-step method");
    sc->add_option("--mode", o.mode, "implicit | explicit | semi-implicit");
    sc->add_option("--re-min", o.grid.re_min);
    sc->add_option("--re-max", o.grid.re_max);
    sc->add_option("--im-min", o.grid.im_min);
    sc->add_option("--im-max", o.grid.im_max);
    sc->add_option("--nx", o.grid.nx)->check(CLI::Range(2, 100000));
    sc->add_option("--ny", o.grid.ny)->check(CLI::Range(2, 100000));
    sc->add_flag("--scaled", o.scaled, "axes in the per-substep argument z_s");
    return sc;
  };
  auto* stab = add_domain("stability-domain", "|R(z)| on a lattice (CSV re,im,abs_R,pole)", stab_opts);
  auto* acc = add_domain("accuracy-domain", "|R(z) - exp(z)| on a lattice (CSV re,im,abs_err,pole)", acc_opts);

  // critical-imag
  auto* cimag = app.add_subcommand("critical-imag", "critical imaginary part y* with |R(re + i y*)| = 1");
  std::string ci_methods = "RK-CB2,RK-CB3e,RK-ARS3,SDC-Eu(3,5),SDC-CB3e(3,3),SDC-ARS3(3,3)";
  std::string ci_mode = "semi-implicit";
  double ci_re = -0.1;
  bool ci_scaled = false;
  cimag->add_option("--methods", ci_methods, "comma-separated methods");
  cimag->add_option("--mode", ci_mode);
  cimag->add_option("--re", ci_re, "real part of z");
  cimag->add_flag("--scaled", ci_scaled, "per-substep argument z_s");

  // dump-tableau
  auto* dump = app.add_subcommand("dump-tableau", "print built-in tableaux with their flags");
  std::vector<std::string> dump_names;
  dump->add_option("names", dump_names, "tableau names (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    namespace kn = imex::kernels;
    if (backend == "scalar") kn::set_backend(kn::Backend::Scalar);
    if (backend == "avx2") kn::set_backend(kn::Backend::Avx2);
    if (*run) {
      auto cfg = load(g);
      if (!run_method.empty()) cfg.set("method", run_method);
      if (!run_dt.empty()) cfg.set("dt", run_dt);
      RunOptions opt;
      opt.record_history = true;
      const auto r = run_case(cfg, resolve_method(cfg, cfg.method), cfg.dt, opt);
      const fs::path dir = g.out.empty() ? fs::path("run_" + r.method) : fs::path(g.out);
      write_run_directory(dir, cfg, r);
      std::cout << r.method << " dt=" << fmt(r.dt) << " steps=" << r.steps << " eps_v=" << fmt(r.error)
                << " twall_s=" << fmt(r.twall) << (r.unstable ? " UNSTABLE (" + r.failure + ")" : "") << '\n'
                << "wrote " << dir.string() << '\n';
      return r.unstable ? 3 : 0;
    }
    if (*conv) {
      auto cfg = load(g);
      if (!conv_dts.empty()) cfg.set("dt_list", conv_dts);
      if (!conv_methods.empty()) cfg.set("methods", conv_methods);
      auto methods = cfg.methods;
      if (methods.empty()) methods = {cfg.method};
      const auto dts = cfg.dt_list.empty() ? std::vector<double>{cfg.dt} : cfg.dt_list;
      const auto table = converge(cfg, methods, dts, g.jobs);
      Sink sink(g.out, "convergence.csv");
      write_convergence_csv(*sink.os, table.rows);
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].unstable) std::cerr << table.rows[i].method << " dt=" << fmt(table.rows[i].dt)
                                              << " flagged unstable: " << table.runs[i].failure << '\n';
      }
      return 0;
    }
    if (*crit) {
      auto cfg = load(g);
      if (!crit_method.empty()) cfg.set("method", crit_method);
      if (!crit_bracket.empty()) cfg.set("bracket", crit_bracket);
      if (!cfg.bracket) throw ConfigError("critical-cfl needs a bracket (--bracket lo,hi or bracket = lo,hi)");
      const auto m = resolve_method(cfg, cfg.method);
      const auto res = critical_cfl(cfg, m, cfg.bracket->first, cfg.bracket->second, crit_tol);
      Sink sink(g.out, "critical_cfl.csv");
      *sink.os << "method,dt_star,dt_unstable,cfl,runs\n"
               << csv_field(m.name()) << ',' << fmt(res.dt_star) << ',' << fmt(res.dt_unstable) << ',' << fmt(res.cfl) << ','
               << res.runs << '\n';
      return 0;
    }
    if (*stab || *acc) {
      const auto& o = *stab ? stab_opts : acc_opts;
      const auto spec = parse_method(o.method);
      const auto scan = scan_domain(spec, parse_split_mode(o.mode), o.grid, o.scaled, g.jobs);
      Sink sink(g.out, *stab ? "stability_domain.csv" : "accuracy_domain.csv");
      auto& os = *sink.os;
      os << "re,im," << (*stab ? "abs_R" : "abs_err") << ",pole\n" << std::setprecision(kCsvDigits);
      for (int iy = 0; iy < o.grid.ny; ++iy) {
        for (int ix = 0; ix < o.grid.nx; ++ix) {
          const auto k = scan.index(ix, iy);
          os << scan.re[static_cast<std::size_t>(ix)] << ',' << scan.im[static_cast<std::size_t>(iy)] << ','
             << (*stab ? scan.abs_R[k] : scan.abs_err[k]) << ',' << int(scan.pole[k] != 0) << '\n';
        }
      }
      return 0;
    }
    if (*cimag) {
      const auto mode = parse_split_mode(ci_mode);
      Sink sink(g.out, "critical_imag.csv");
      *sink.os << "method,mode,re,scaled,y_star,status\n";
      for (const auto& name : parse_method_list(ci_methods)) {
        const auto spec = parse_method(name);
        const auto r = critical_imag(spec, mode, ci_re, ci_scaled);
        *sink.os << csv_field(spec.name()) << ',' << to_string(mode) << ',' << fmt(ci_re) << ',' << (ci_scaled ? "z_s" : "z")
                 << ',' << fmt(r.y_star) << ',' << status_name(r.status) << '\n';
      }
      return 0;
    }
    if (*dump) {
      Sink sink(g.out, "tableaux.txt");
      const auto& names = dump_names.empty() ? builtin_tableau_names() : dump_names;
      for (const auto& n : names) dump_tableau(*sink.os, builtin_tableau(n));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "imexrk: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
