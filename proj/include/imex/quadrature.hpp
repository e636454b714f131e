#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "imex/real.hpp"

namespace imex {

/// Nodes of one SDC step: GLL points mapped onto [t_start, t_end], the
/// subinterval lengths, and the (M+1) x M integration weights
/// w[q,m] = integral of l_q over subinterval m (m = 1..M, stored at m-1).
template <class Real>
struct SdcGrid {
  int M = 0;
  std::vector<Real> nodes;
  std::vector<Real> lengths;
  std::vector<Real> weights;

  Real weight(int q, int m) const { return weights[static_cast<std::size_t>(q * M + (m - 1))]; }
  Real length(int m) const { return lengths[static_cast<std::size_t>(m - 1)]; }
};

namespace detail {

/// P_n(x) and P_n'(x) by the three-term recurrence.
template <class Real>
void legendre(int n, const Real& x, Real& p, Real& dp) {
  Real p0 = 1;
  Real p1 = x;
  if (n == 0) {
    p = 1;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // (1-x^2) P_n' = n (P_{n-1} - x P_n)
  dp = Real(n) * (p0 - x * p1) / (Real(1) - x * x);
}

template <class Real>
Real eps() {
  return std::numeric_limits<Real>::epsilon();
}

}  // namespace detail

/// Reference GLL points on [-1,1]: endpoints plus the roots of P_M'.
/// Newton iteration on (1-x^2) P_M'(x) starting from Chebyshev-Gauss-Lobatto
/// points, in the Legendre-Vandermonde form used by the usual spectral codes.
template <class Real>
std::vector<Real> gll_reference_points(int M) {
  using std::abs;
  using std::cos;
  if (M < 1) throw std::invalid_argument("gll_nodes: need M >= 1");
  std::vector<Real> x(static_cast<std::size_t>(M + 1));
  const Real tol = std::max(Real(1e-15), Real(8) * detail::eps<Real>());
  for (int j = 0; j <= M; ++j) {
    Real xj = -cos(pi<Real>() * Real(j) / Real(M));
    if (j == 0 || j == M) {
      x[static_cast<std::size_t>(j)] = j == 0 ? Real(-1) : Real(1);
      continue;
    }
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      // q(x) = P_{M+1} - P_{M-1} vanishes exactly at the GLL points.
      Real p_prev = 1, p = xj, dp_prev = 0, dp = 1;
      for (int k = 2; k <= M + 1; ++k) {
        Real pn = (Real(2 * k - 1) * xj * p - Real(k - 1) * p_prev) / Real(k);
        Real dpn = dp_prev + Real(2 * k - 1) * p;
        p_prev = p;
        p = pn;
        dp_prev = dp;
        dp = dpn;
      }
      // p = P_{M+1}, p_prev = P_M; need P_{M-1}, dP_{M-1}: recover via recurrence
      // (M+1) P_{M+1} = (2M+1) x P_M - M P_{M-1}
      Real pm1 = (Real(2 * M + 1) * xj * p_prev - Real(M + 1) * p) / Real(M);
      Real dpm1 = dp - Real(2 * M + 1) * p_prev;  // P'_{M+1} - P'_{M-1} = (2M+1) P_M
      Real q = p - pm1;
      Real dq = dp - dpm1;
      Real dx = q / dq;
      xj -= dx;
      if (abs(dx) <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("gll_nodes: Newton iteration did not converge");
    x[static_cast<std::size_t>(j)] = xj;
  }
  // enforce exact symmetry
  for (int j = 0; j <= M / 2; ++j) {
    Real v = (x[static_cast<std::size_t>(M - j)] - x[static_cast<std::size_t>(j)]) / 2;
    x[static_cast<std::size_t>(j)] = -v;
    x[static_cast<std::size_t>(M - j)] = v;
  }
  if (M % 2 == 0) x[static_cast<std::size_t>(M / 2)] = 0;
  return x;
}

/// Gauss-Legendre points/weights on [-1,1], exact for degree 2n-1.
template <class Real>
void gauss_legendre(int n, std::vector<Real>& x, std::vector<Real>& w) {
  using std::abs;
  using std::cos;
  x.assign(static_cast<std::size_t>(n), Real(0));
  w.assign(static_cast<std::size_t>(n), Real(0));
  const Real tol = std::max(Real(1e-15), Real(8) * detail::eps<Real>());
  for (int i = 0; i < n; ++i) {
    Real xi = -cos(pi<Real>() * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real p, dp;
    for (int it = 0; it < 100; ++it) {
      detail::legendre(n, xi, p, dp);
      Real dx = p / dp;
      xi -= dx;
      if (abs(dx) <= tol) break;
    }
    detail::legendre(n, xi, p, dp);
    x[static_cast<std::size_t>(i)] = xi;
    w[static_cast<std::size_t>(i)] = Real(2) / ((Real(1) - xi * xi) * dp * dp);
  }
}

/// Barycentric weights for the given nodes.
template <class Real>
std::vector<Real> barycentric_weights(std::span<const Real> nodes) {
  std::vector<Real> bw(nodes.size(), Real(1));
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k != j) bw[j] /= (nodes[j] - nodes[k]);
    }
  }
  return bw;
}

/// Lagrange basis l_q evaluated at t (direct product form).
template <class Real>
Real lagrange_basis(std::span<const Real> nodes, std::size_t q, const Real& t) {
  Real v = 1;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k != q) v *= (t - nodes[k]) / (nodes[q] - nodes[k]);
  }
  return v;
}

/// Nodes and lengths of the SDC grid on [t_start, t_end]; weights left empty.
template <class Real>
SdcGrid<Real> gll_nodes(int M, const Real& t_start, const Real& t_end) {
  if (!(t_end > t_start)) throw std::invalid_argument("gll_nodes: need t_end > t_start");
  SdcGrid<Real> g;
  g.M = M;
  const auto ref = gll_reference_points<Real>(M);
  const Real half = (t_end - t_start) / 2;
  const Real mid = (t_end + t_start) / 2;
  g.nodes.resize(ref.size());
  for (std::size_t j = 0; j < ref.size(); ++j) g.nodes[j] = mid + half * ref[j];
  g.nodes.front() = t_start;
  g.nodes.back() = t_end;
  g.lengths.resize(static_cast<std::size_t>(M));
  for (int m = 1; m <= M; ++m) {
    g.lengths[static_cast<std::size_t>(m - 1)] =
        g.nodes[static_cast<std::size_t>(m)] - g.nodes[static_cast<std::size_t>(m - 1)];
  }
  return g;
}

/// Fills grid.weights: w[q,m] = integral over (t_{m-1}, t_m) of l_q,
/// by Gauss-Legendre quadrature exact for the degree-M basis.
template <class Real>
void sdc_weights(SdcGrid<Real>& grid) {
  const int M = grid.M;
  if (grid.nodes.size() != static_cast<std::size_t>(M + 1)) {
    throw std::invalid_argument("sdc_weights: grid nodes not populated");
  }
  std::vector<Real> gx, gw;
  gauss_legendre<Real>(M / 2 + 1, gx, gw);
  grid.weights.assign(static_cast<std::size_t>((M + 1) * M), Real(0));
  std::span<const Real> nodes(grid.nodes);
  for (int m = 1; m <= M; ++m) {
    const Real a = grid.nodes[static_cast<std::size_t>(m - 1)];
    const Real b = grid.nodes[static_cast<std::size_t>(m)];
    const Real half = (b - a) / 2;
    const Real mid = (a + b) / 2;
    for (int q = 0; q <= M; ++q) {
      Real sum = 0;
      for (std::size_t g = 0; g < gx.size(); ++g) {
        sum += gw[g] * lagrange_basis<Real>(nodes, static_cast<std::size_t>(q), mid + half * gx[g]);
      }
      grid.weights[static_cast<std::size_t>(q * M + (m - 1))] = half * sum;
    }
  }
}

/// Grid with nodes and weights.
template <class Real>
SdcGrid<Real> make_sdc_grid(int M, const Real& t_start, const Real& t_end) {
  auto g = gll_nodes<Real>(M, t_start, t_end);
  sdc_weights(g);
  return g;
}

/// Barycentric (second form) interpolation of nodal values; exact at nodes.
template <class Real, class Value>
Value lagrange_interpolate(const SdcGrid<Real>& grid, std::span<const Value> values, const Real& t) {
  if (values.size() != grid.nodes.size()) {
    throw std::invalid_argument("lagrange_interpolate: value count does not match nodes");
  }
  const std::span<const Real> nodes(grid.nodes);
  const auto bw = barycentric_weights<Real>(nodes);
  Value num{};
  Real den = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Real d = t - nodes[j];
    if (d == Real(0)) return values[j];
    const Real f = bw[j] / d;
    num += f * values[j];
    den += f;
  }
  return num / den;
}

}  // namespace imex
