#include "doctest.h"

#include <cmath>
#include <random>

#include "imex/method.hpp"
#include "oracles.hpp"

using namespace imex;
using C = std::complex<double>;
using State = SplitSystem<double>::State;

namespace {

State scalar(C v) { return State(v, 1); }

// u' = -nu(u) u with nu(u) = 1 + u^2, all of it treated as diffusion.
SplitSystem<double> nonlinear_decay() {
  SplitSystem<double> sys;
  sys.explicit_term = [](double, const State& u) { return State(C(0), u.size()); };
  sys.implicit_term = [](double, const State& nu, const State& u) { return State(-(nu * u)); };
  sys.diffusivity = [](double, const State& u) { return State(C(1) + u * u); };
  sys.implicit_solve = [](double, const State& nu, double gamma, const State& g) {
    return State(g / (C(1) + C(gamma) * nu));
  };
  sys.constant_diffusivity = false;
  return sys;
}

SplitSystem<double> zero_system(std::size_t n) {
  SplitSystem<double> sys;
  sys.dimension = n;
  sys.explicit_term = [](double, const State& u) { return State(C(0), u.size()); };
  sys.implicit_term = [](double, const State&, const State& u) { return State(C(0), u.size()); };
  sys.diffusivity = [](double, const State& u) { return State(C(0.3), u.size()); };
  sys.implicit_solve = [](double, const State&, double, const State& g) { return g; };
  return sys;
}

// Diagonal linear system with different rates per component.
SplitSystem<double> diagonal_system(std::vector<C> lc, std::vector<C> ld) {
  SplitSystem<double> sys;
  sys.dimension = lc.size();
  State Lc(lc.data(), lc.size()), Ld(ld.data(), ld.size());
  sys.explicit_term = [Lc](double, const State& u) { return State(Lc * u); };
  sys.implicit_term = [](double, const State& nu, const State& u) { return State(nu * u); };
  sys.diffusivity = [Ld](double, const State&) { return Ld; };
  sys.implicit_solve = [](double, const State& nu, double gamma, const State& g) {
    return State(g / (C(1) - C(gamma) * nu));
  };
  return sys;
}

double eoc(double e1, double e2, double dt1, double dt2) { return std::log(e1 / e2) / std::log(dt1 / dt2); }

double linear_error(const MethodSpec& m, double dt, C lc, C ld, double T) {
  const auto sys = linear_scalar_system<double>(lc, ld);
  const long n = std::lround(T / dt);
  const auto u = integrate<double>(sys, m, scalar(1.0), 0.0, dt, n);
  return std::abs(u[0] - std::exp((lc + ld) * T));
}

// Same in 113-bit arithmetic, so high orders are not masked by round-off.
double linear_error_quad(const MethodSpec& m, double dt, C lc, C ld, double T) {
  using CQ = std::complex<Quad>;
  const CQ lcq(lc.real(), lc.imag()), ldq(ld.real(), ld.imag());
  const auto sys = linear_scalar_system<Quad>(lcq, ldq);
  const long n = std::lround(T / dt);
  const auto u = integrate<Quad>(sys, m, SplitSystem<Quad>::State(CQ(1), 1), Quad(0), Quad(dt), n);
  return static_cast<double>(complex_abs(CQ(u[0] - complex_exp((lcq + ldq) * Quad(T)))));
}

}  // namespace

TEST_CASE("IMEX Euler closed forms") {
  auto s1 = linear_scalar_system<double>(0.0, -1.0);
  CHECK(std::abs(imex_euler_step(s1, scalar(1.0), 0.0, 1.0)[0] - 0.5) < 1e-16);
  auto s2 = linear_scalar_system<double>(-1.0, 0.0);
  CHECK(std::abs(imex_euler_step(s2, scalar(1.0), 0.0, 1.0)[0]) < 1e-16);
  auto s3 = linear_scalar_system<double>(C(0, -1), -1.0);
  const C expect = C(1, -0.1) / 1.1;
  CHECK(std::abs(imex_euler_step(s3, scalar(1.0), 0.0, 0.1)[0] - expect) < 1e-15);
}

TEST_CASE("BDF2 coefficients and start") {
  constexpr auto k = bdf2_coefficients(false);
  CHECK(k.alpha0 == 2.0);
  CHECK(k.alpha1 == -0.5);
  CHECK(k.beta0 == 2.0);
  CHECK(k.beta1 == -1.0);
  CHECK(k.gamma0 == 1.5);
  constexpr auto e = bdf2_coefficients(true);
  CHECK(e.alpha0 == 1.0);
  CHECK(e.alpha1 == 0.0);
  CHECK(e.gamma0 == 1.0);
}

TEST_CASE("BDF2 preserves a constant state and rejects step changes") {
  const auto sys = zero_system(1);
  Bdf2History<double> h(scalar(1.0));
  for (int n = 0; n < 4; ++n) CHECK(bdf2_step(sys, h, 0.1 * n, 0.1)[0] == C(1.0));
  CHECK(h.steps == 4);
  CHECK_THROWS_AS(bdf2_step(sys, h, 0.4, 0.05), std::invalid_argument);
}

TEST_CASE("BDF2 on u' = -u is second order") {
  const auto m = parse_method("BDF2");
  const double e1 = linear_error(m, 0.1, 0.0, -1.0, 1.0);
  const double e2 = linear_error(m, 0.05, 0.0, -1.0, 1.0);
  const double e3 = linear_error(m, 0.025, 0.0, -1.0, 1.0);
  CHECK(eoc(e2, e3, 0.05, 0.025) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(eoc(e1, e2, 0.1, 0.05) > 1.8);
}

TEST_CASE("every stepper maps u to u when all tendencies vanish") {
  const auto sys = zero_system(3);
  State u(3);
  u[0] = 1.0;
  u[1] = C(-2, 0.5);
  u[2] = 3.25;
  for (const char* name : {"IMEX-Euler", "RK-TR", "RK-CB2", "RK-CB3c", "RK-CB3e", "RK-CB4", "RK-ARS3", "BDF2",
                           "SDC-Eu(3,5)", "SDC-CB3e(3,3)", "SDC-ARS3(2,2)"}) {
    CAPTURE(name);
    const auto out = integrate<double>(sys, parse_method(name), u, 0.0, 0.1, 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == u[i]);
  }
}

TEST_CASE("RK-TR on pure diffusion equals its stage-by-stage closed form") {
  // stage 2: u2 = (1)/(1 - z); stage 3: u3 = (1 + z/2) / (1 - z/2) (uses u1 only, a_im[2,1] = 0);
  // SA, so the step result is u3.
  const C z(-0.7, 0.4);
  const auto sys = linear_scalar_system<double>(0.0, z);
  const auto tab = coefficients<double>(builtin_tableau("RK-TR"));
  const auto u = imex_rk_step_const(sys, tab, scalar(1.0), 0.0, 1.0);
  const C expect = (1.0 + z / 2.0) / (1.0 - z / 2.0);
  CHECK(std::abs(u[0] - expect) < 1e-15);
}

TEST_CASE("steppers are linear maps for linear constant-diffusivity systems") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const auto sys = diagonal_system({C(0, -1), C(0.2, -3), C(-0.5, 0)}, {C(-1), C(-4), C(-0.1, 0.3)});
  auto rnd = [&] {
    State v(3);
    for (auto& x : v) x = C(nd(rng), nd(rng));
    return v;
  };
  for (const char* name : {"IMEX-Euler", "RK-TR", "RK-CB2", "RK-CB3c", "RK-CB3e", "RK-CB4", "RK-ARS3", "BDF2",
                           "SDC-Eu(3,5)", "SDC-CB3e(3,3)"}) {
    CAPTURE(name);
    const auto m = parse_method(name);
    const State a = rnd(), b = rnd();
    const C alpha(0.7, -0.2), beta(-1.3, 0.0);
    const State combo = alpha * a + beta * b;
    const auto ua = integrate<double>(sys, m, a, 0.0, 0.05, 4);
    const auto ub = integrate<double>(sys, m, b, 0.0, 0.05, 4);
    const auto uc = integrate<double>(sys, m, combo, 0.0, 0.05, 4);
    const State diff = uc - (alpha * ua + beta * ub);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(diff[i]) <= 1e-12 * std::abs(uc[i]) + 1e-14);
  }
}

TEST_CASE("linear semi-implicit problem converges at the declared order") {
  const C lc(0, -1), ld(-1);
  struct Case {
    const char* name;
    double order;
  };
  const Case cases[] = {{"IMEX-Euler", 1}, {"RK-TR", 2},   {"RK-CB2", 2},  {"RK-CB3c", 3},
                        {"RK-CB3e", 3},    {"RK-ARS3", 3}, {"RK-CB4", 4}};
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto m = parse_method(c.name);
    // four octaves in the asymptotic regime
    const double e1 = linear_error_quad(m, 1.0 / 64, lc, ld, 1.0);
    const double e2 = linear_error_quad(m, 1.0 / 1024, lc, ld, 1.0);
    CHECK(std::log2(e1 / e2) / 4.0 == doctest::Approx(c.order).epsilon(0.1 / c.order));
  }
}

TEST_CASE("RK-CB3e on the split problem reaches order three") {
  const auto m = parse_method("RK-CB3e");
  const C lc(0, -1), ld(-1);
  const double e1 = linear_error(m, 0.02, lc, ld, 1.0);
  const double e2 = linear_error(m, 0.01, lc, ld, 1.0);
  CHECK(eoc(e1, e2, 0.02, 0.01) == doctest::Approx(3.0).epsilon(0.1 / 3));
}

TEST_CASE("variable-diffusivity path equals the constant path for constant nu") {
  const auto sys = linear_scalar_system<double>(C(0.3, -2), C(-1.5, 0.2));
  for (const auto& name : builtin_tableau_names()) {
    CAPTURE(name);
    const auto tab = coefficients<double>(builtin_tableau(name));
    const auto a = imex_rk_step_const(sys, tab, scalar(C(0.8, 0.1)), 0.2, 0.05);
    const auto b = imex_rk_step_var(sys, tab, scalar(C(0.8, 0.1)), 0.2, 0.05);
    CHECK(std::abs(a[0] - b[0]) <= 1e-15 * std::abs(a[0]));
  }
}

TEST_CASE("one RK-CB2 step on nonlinear decay matches an independent transcription") {
  const auto sys = nonlinear_decay();
  const double dt = 0.1, u0 = 1.0;
  const auto got = imex_rk_step_var(sys, coefficients<double>(builtin_tableau("RK-CB2")), scalar(u0), 0.0, dt);

  // independent transcription, real arithmetic, tableau typed in directly
  const double c2 = 0.4;
  const double aim[3][3] = {{0, 0, 0}, {0, c2, 0}, {0, 5.0 / 6, 1.0 / 6}};
  const double aex[3][3] = {{0, 0, 0}, {c2, 0, 0}, {0, 1, 0}};
  const double b[3] = {0, 5.0 / 6, 1.0 / 6};
  auto nu = [](double v) { return 1 + v * v; };
  double u[3], n[3], fd[3];
  u[0] = u0;
  n[0] = nu(u0);
  fd[0] = -n[0] * u[0];
  for (int i = 1; i < 3; ++i) {
    double v = u0, g = u0;
    for (int j = 0; j < i; ++j) {
      v += dt * aex[i][j] * fd[j];
      g += dt * aim[i][j] * fd[j];
    }
    n[i] = nu(v);
    u[i] = g / (1 + dt * aim[i][i] * n[i]);
    fd[i] = -n[i] * u[i];
  }
  double ref = u0;
  for (int i = 0; i < 3; ++i) ref += dt * b[i] * fd[i];
  CHECK(std::abs(got[0].real() - ref) <= 1e-14);
  CHECK(std::abs(got[0].imag()) == 0.0);
}

TEST_CASE("RK-ARS3 on nonlinear decay converges at third order") {
  const auto sys = nonlinear_decay();
  const double T = 1.0;
  const double ref = oracle::rk4([](double, double u) { return -(1 + u * u) * u; }, 1.0, 0.0, T, 20000);
  const auto m = parse_method("RK-ARS3");
  auto err = [&](double dt) {
    const auto u = integrate<double>(sys, m, scalar(1.0), 0.0, dt, std::lround(T / dt));
    return std::abs(u[0].real() - ref);
  };
  const double e1 = err(1.0 / 32), e2 = err(1.0 / 64), e3 = err(1.0 / 128);
  CHECK(eoc(e2, e3, 1.0 / 64, 1.0 / 128) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(eoc(e1, e2, 1.0 / 32, 1.0 / 64) > 2.7);
}

TEST_CASE("BDF2 with extrapolated diffusivity stays second order") {
  const auto sys = nonlinear_decay();
  const double ref = oracle::rk4([](double, double u) { return -(1 + u * u) * u; }, 1.0, 0.0, 1.0, 20000);
  const auto m = parse_method("BDF2");
  auto err = [&](double dt) {
    const auto u = integrate<double>(sys, m, scalar(1.0), 0.0, dt, std::lround(1.0 / dt));
    return std::abs(u[0].real() - ref);
  };
  CHECK(eoc(err(1.0 / 128), err(1.0 / 256), 2, 1) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("method names parse and print") {
  CHECK(parse_method("bdf2").name() == "BDF2");
  CHECK(parse_method("RK-CB3e").name() == "RK-CB3e");
  CHECK(parse_method("sdc-eu(3,5)").name() == "SDC-Eu(3,5)");
  CHECK(parse_method("SDC-CB3e( 3 , 3 )").name() == "SDC-CB3e(3,3)");
  CHECK(parse_method("SDC-ARS3(3,3)").theoretical_order() == 6);
  CHECK(parse_method("SDC-Eu(3,5)").theoretical_order() == 6);
  CHECK(parse_method("SDC-Eu(4,2)").theoretical_order() == 3);
  CHECK_THROWS_AS(parse_method("RK-NOPE"), std::invalid_argument);
  CHECK_THROWS_AS(parse_method("SDC-NOPE(3,3)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_method("SDC-Eu(0,3)"), std::invalid_argument);
}
