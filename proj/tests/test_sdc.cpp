#include "doctest.h"

#include <cmath>

#include "imex/method.hpp"
#include "oracles.hpp"

using namespace imex;
using C = std::complex<double>;
using CQ = std::complex<Quad>;
using State = SplitSystem<double>::State;
using StateQ = SplitSystem<Quad>::State;

namespace {

CQ widen(C z) { return {Quad(z.real()), Quad(z.imag())}; }

double quad_error(const MethodSpec& m, double dt, C lc, C ld, double T) {
  const auto sys = linear_scalar_system<Quad>(widen(lc), widen(ld));
  const long n = std::lround(T / dt);
  const auto u = integrate<Quad>(sys, m, StateQ(CQ(1), 1), Quad(0), Quad(dt), n);
  return static_cast<double>(complex_abs(CQ(u[0] - complex_exp((widen(lc) + widen(ld)) * Quad(T)))));
}

}  // namespace

TEST_CASE("substep counts") {
  CHECK(substep_count(SdcConfig{3, 5, "IMEX-Euler"}) == 18);
  CHECK(substep_count(SdcConfig{3, 3, "RK-CB3e"}) == 18);
  CHECK(substep_count(SdcConfig{3, 3, "RK-ARS3"}) == 21);
  CHECK(substep_count(SdcConfig{1, 0, "IMEX-Euler"}) == 1);
}

TEST_CASE("theoretical order bookkeeping") {
  CHECK(SdcConfig{3, 5, "IMEX-Euler"}.theoretical_order() == 6);
  CHECK(SdcConfig{3, 3, "RK-CB3e"}.theoretical_order() == 6);
  CHECK(SdcConfig{3, 8, "IMEX-Euler"}.theoretical_order() == 6);
  CHECK(SdcConfig{4, 2, "RK-CB2"}.theoretical_order() == 4);
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(SdcConfig({0, 2, "IMEX-Euler"}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(SdcConfig({2, -1, "IMEX-Euler"}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(SdcConfig({2, 1, "RK-NONE"}).validate(), std::invalid_argument);
  const auto sys = linear_scalar_system<double>(0.0, -1.0);
  CHECK_THROWS_AS(sdc_step(sys, SdcConfig{}, State(C(1), 1), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("K = 0 returns the bare predictor") {
  const auto sys = linear_scalar_system<double>(C(0, -1), -1.0);
  const auto a = sdc_step(sys, SdcConfig{1, 0, "IMEX-Euler"}, State(C(1), 1), 0.0, 0.1);
  const auto b = imex_euler_step(sys, State(C(1), 1), 0.0, 0.1);
  CHECK(a[0] == b[0]);

  const auto c = sdc_step(sys, SdcConfig{1, 0, "RK-CB3e"}, State(C(1), 1), 0.0, 0.1);
  const auto d = imex_rk_step(sys, coefficients<double>(builtin_tableau("RK-CB3e")), State(C(1), 1), 0.0, 0.1);
  CHECK(c[0] == d[0]);
}

TEST_CASE("many sweeps converge to the Lobatto IIIA collocation solution") {
  const SdcConfig cfg{3, 20, "IMEX-Euler"};
  SdcIntegrator<double> sdc(cfg);
  const auto g = sdc.grid(0.0, 1.0);
  for (const C lc : {C(0, -1), C(0, 0.5), C(0.2, 0)}) {
    for (const C ld : {C(-1), C(-0.3, 0.1), C(0)}) {
      CAPTURE(lc);
      CAPTURE(ld);
      const auto sys = linear_scalar_system<double>(lc, ld);
      const auto colloc = oracle::lobatto_iiia(g.nodes, lc + ld);
      const auto u = sdc.step(sys, State(C(1), 1), 0.0, 1.0);
      CHECK(std::abs(u[0] - colloc.back()) <= 1e-12);
    }
  }
}

TEST_CASE("collocation values are a fixed point of one sweep") {
  const SdcConfig cfg{3, 1, "IMEX-Euler"};
  SdcIntegrator<double> sdc(cfg);
  const double dt = 0.3;
  const auto g = sdc.grid(0.0, dt);
  const C lc(0, -2), ld(-1.5);
  const auto sys = linear_scalar_system<double>(lc, ld);
  std::vector<double> unit(g.nodes);
  for (auto& x : unit) x /= dt;
  const auto colloc = oracle::lobatto_iiia(unit, (lc + ld) * dt);
  std::vector<State> U;
  for (const auto& v : colloc) U.emplace_back(v, 1);
  const auto before = U;
  sdc.correct(sys, g, U, 1);
  for (std::size_t m = 0; m < U.size(); ++m) {
    CHECK(std::abs(U[m][0] - before[m][0]) <= 1e-12 * std::abs(before[m][0]));
  }
}

TEST_CASE("each sweep reduces the one-step error while below the order ceiling") {
  const C lc(0, -1), ld(-1);
  const auto sys = linear_scalar_system<Quad>(widen(lc), widen(ld));
  const Quad dt = Quad(1) / 100;
  const CQ exact = complex_exp((widen(lc) + widen(ld)) * dt);
  for (const char* pred : {"IMEX-Euler", "RK-CB2"}) {
    CAPTURE(pred);
    SdcIntegrator<Quad> sdc(SdcConfig{3, 0, pred});
    const auto g = sdc.grid(Quad(0), dt);
    auto U = sdc.predict(sys, g, StateQ(CQ(1), 1));
    const int p = sdc.config().predictor_order();
    Quad prev = complex_abs(CQ(U.back()[0] - exact));
    for (int k = 0; k < 2 * 3 - p; ++k) {
      sdc.correct(sys, g, U, 1);
      const Quad e = complex_abs(CQ(U.back()[0] - exact));
      CAPTURE(k);
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("SDC-Eu(3,5) is sixth order on the split linear problem") {
  const auto m = sdc_method("Eu", 3, 5);
  const C lc(0, -1), ld(-1);
  const double e1 = quad_error(m, 1.0 / 32, lc, ld, 1.0);
  const double e2 = quad_error(m, 1.0 / 64, lc, ld, 1.0);
  CHECK(std::log2(e1 / e2) == doctest::Approx(6.0).epsilon(0.2 / 6));
}

TEST_CASE("order never exceeds 2M with extra sweeps") {
  const C lc(0, -1), ld(-1);
  for (int M : {2, 3}) {
    const auto m = sdc_method("Eu", M, 12);
    const double e1 = quad_error(m, 1.0 / 16, lc, ld, 1.0);
    const double e2 = quad_error(m, 1.0 / 32, lc, ld, 1.0);
    const double e3 = quad_error(m, 1.0 / 64, lc, ld, 1.0);
    CHECK(std::log2(e1 / e2) <= 2 * M + 0.3);
    CHECK(std::log2(e2 / e3) <= 2 * M + 0.3);
    CHECK(std::log2(e2 / e3) >= 2 * M - 0.3);
  }
}

TEST_CASE("RK predictors: CB3e(3,3) and ARS3(3,3) reach order six") {
  const C lc(0, -1), ld(-1);
  for (const char* name : {"SDC-CB3e(3,3)", "SDC-ARS3(3,3)"}) {
    CAPTURE(name);
    const auto m = parse_method(name);
    const double e1 = quad_error(m, 1.0 / 32, lc, ld, 1.0);
    const double e2 = quad_error(m, 1.0 / 64, lc, ld, 1.0);
    CHECK(std::log2(e1 / e2) == doctest::Approx(6.0).epsilon(0.2 / 6));
  }
}
