#include "imex/flow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imex/kernels/kernels.hpp"

namespace imex::flow {

namespace {

const kernels::Table& K() { return kernels::active(); }

double* as_doubles(Coeffs& c) { return reinterpret_cast<double*>(c.data()); }
const double* as_doubles(const Coeffs& c) { return reinterpret_cast<const double*>(c.data()); }

}  // namespace

void axpy(double a, const VectorCoeffs& x, VectorCoeffs& y) {
  for (std::size_t i = 0; i < x.size(); ++i) K().axpy(2 * x[i].size(), a, as_doubles(x[i]), as_doubles(y[i]));
}

void axpby(double a, const VectorCoeffs& x, double b, VectorCoeffs& y) {
  for (std::size_t i = 0; i < x.size(); ++i) K().axpby(2 * x[i].size(), a, as_doubles(x[i]), b, as_doubles(y[i]));
}

void set_zero(VectorCoeffs& y) {
  for (auto& c : y) std::fill(c.begin(), c.end(), cplx(0));
}

FlowOperators::FlowOperators(int dim, std::array<int, 3> n, std::array<double, 3> length, ViscosityModel nu,
                             ForcingFn forcing, std::array<double, 3> origin)
    : grid_(dim, n, length, origin), model_(nu), forcing_(std::move(forcing)) {
  if (!(model_.nu0 >= 0.0) || !(model_.nu1 >= 0.0)) throw std::invalid_argument("viscosity coefficients must be >= 0");
  const auto d = static_cast<std::size_t>(dim);
  pad_v_.assign(d, Values(grid_.padded_size()));
  pad_grad_.assign(d * d, Values(grid_.padded_size()));
  pad_tmp_.assign(grid_.padded_size(), 0.0);
  tmp_ = grid_.zero_coeffs();
  force_values_.assign(d, grid_.zero_values());
}

VectorCoeffs FlowOperators::to_coeffs(const VectorValues& v) {
  VectorCoeffs out;
  for (const auto& c : v) out.push_back(grid_.forward(c));
  return out;
}

VectorValues FlowOperators::to_values(const VectorCoeffs& v) {
  VectorValues out;
  for (const auto& c : v) out.push_back(grid_.backward(c));
  return out;
}

Viscosity FlowOperators::constant_viscosity(double nu) const {
  Viscosity out;
  out.constant = true;
  out.value = nu;
  return out;
}

Viscosity FlowOperators::viscosity(const VectorCoeffs& v) {
  if (!model_.variable()) return constant_viscosity(model_.nu0);
  const int d = dim();
  for (int i = 0; i < d; ++i) grid_.backward_padded(v[static_cast<std::size_t>(i)].data(), pad_v_[static_cast<std::size_t>(i)].data());
  Viscosity out;
  out.constant = false;
  out.padded.resize(grid_.padded_size());
  const double c = model_.nu1 / (model_.v_scale * model_.v_scale);
  K().viscosity(grid_.padded_size(), pad_v_[0].data(), pad_v_[1].data(), d == 3 ? pad_v_[2].data() : nullptr,
                model_.nu0, c, out.padded.data());
  double sum = 0.0;
  for (double x : out.padded) sum += x;
  out.value = sum / static_cast<double>(out.padded.size());
  return out;
}

void FlowOperators::convection(const VectorCoeffs& v, VectorCoeffs& out) {
  const int d = dim();
  const std::size_t ns = grid_.spectral_size();
  out.assign(static_cast<std::size_t>(d), grid_.zero_coeffs());
  for (int i = 0; i < d; ++i) grid_.backward_padded(v[static_cast<std::size_t>(i)].data(), pad_v_[static_cast<std::size_t>(i)].data());
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      K().multiply(grid_.padded_size(), pad_v_[si].data(), pad_v_[sj].data(), pad_tmp_.data());
      grid_.forward_padded(pad_tmp_.data(), tmp_.data());
      K().ik_accumulate(ns, grid_.k(j).data(), -1.0, tmp_.data(), out[si].data());
      if (i != j) K().ik_accumulate(ns, grid_.k(i).data(), -1.0, tmp_.data(), out[sj].data());
    }
  }
}

void FlowOperators::gradient_values(const Coeffs& c, Values* out) {
  const std::size_t ns = grid_.spectral_size();
  for (int j = 0; j < dim(); ++j) {
    std::fill(tmp_.begin(), tmp_.end(), cplx(0));
    K().ik_accumulate(ns, grid_.k(j).data(), 1.0, c.data(), tmp_.data());
    grid_.backward_padded(tmp_.data(), out[j].data());
  }
}

void FlowOperators::viscous(const Viscosity& nu, const VectorCoeffs& v, VectorCoeffs* d1, VectorCoeffs* d2,
                            VectorCoeffs* d3) {
  const int d = dim();
  const auto sd = static_cast<std::size_t>(d);
  const std::size_t ns = grid_.spectral_size();
  for (VectorCoeffs* o : {d1, d2, d3}) {
    if (o) o->assign(sd, grid_.zero_coeffs());
  }
  if (!d1 && !d2 && !d3) return;

  if (nu.constant) {
    const double n0 = nu.value;
    const auto& k2 = grid_.k2();
    if (d1) {
      for (std::size_t i = 0; i < sd; ++i) {
        for (std::size_t q = 0; q < ns; ++q) (*d1)[i][q] = -n0 * k2[q] * v[i][q];
      }
    }
    if (d2 || d3) {
      std::fill(tmp_.begin(), tmp_.end(), cplx(0));
      for (int j = 0; j < d; ++j) K().ik_accumulate(ns, grid_.k(j).data(), 1.0, v[static_cast<std::size_t>(j)].data(), tmp_.data());
      for (int i = 0; i < d; ++i) {
        const auto si = static_cast<std::size_t>(i);
        if (d2) K().ik_accumulate(ns, grid_.k(i).data(), n0, tmp_.data(), (*d2)[si].data());
        if (d3) K().ik_accumulate(ns, grid_.k(i).data(), -n0, tmp_.data(), (*d3)[si].data());
      }
    }
    return;
  }

  // G[i*d + j] = d_j v_i on the padded grid
  for (std::size_t i = 0; i < sd; ++i) gradient_values(v[i], &pad_grad_[i * sd]);
  const std::size_t np = grid_.padded_size();
  if (d1 || d2) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
        K().multiply(np, nu.padded.data(), pad_grad_[si * sd + sj].data(), pad_tmp_.data());
        grid_.forward_padded(pad_tmp_.data(), tmp_.data());
        if (d1) K().ik_accumulate(ns, grid_.k(j).data(), 1.0, tmp_.data(), (*d1)[si].data());
        if (d2) K().ik_accumulate(ns, grid_.k(i).data(), 1.0, tmp_.data(), (*d2)[sj].data());
      }
    }
  }
  if (d3) {
    std::fill(pad_tmp_.begin(), pad_tmp_.end(), 0.0);
    for (std::size_t i = 0; i < sd; ++i) K().axpy(np, 1.0, pad_grad_[i * sd + i].data(), pad_tmp_.data());
    K().multiply(np, nu.padded.data(), pad_tmp_.data(), pad_tmp_.data());
    grid_.forward_padded(pad_tmp_.data(), tmp_.data());
    for (int i = 0; i < d; ++i) K().ik_accumulate(ns, grid_.k(i).data(), -1.0, tmp_.data(), (*d3)[static_cast<std::size_t>(i)].data());
  }
}

void FlowOperators::forcing(double t, VectorCoeffs& out) {
  const auto sd = static_cast<std::size_t>(dim());
  out.assign(sd, grid_.zero_coeffs());
  if (!forcing_) return;
  forcing_(t, grid_, force_values_);
  for (std::size_t i = 0; i < sd; ++i) grid_.forward(force_values_[i].data(), out[i].data());
}

TendencyTerms FlowOperators::tendency_terms(const FlowState& s) {
  TendencyTerms f;
  const auto nu = viscosity(s.v);
  convection(s.v, f.c);
  viscous(nu, s.v, &f.d1, &f.d2, &f.d3);
  forcing(s.t, f.s);
  return f;
}

Coeffs FlowOperators::project(VectorCoeffs& v) {
  const int d = dim();
  const std::size_t ns = grid_.spectral_size();
  Coeffs psi = grid_.zero_coeffs();
  for (int j = 0; j < d; ++j) K().ik_accumulate(ns, grid_.k(j).data(), 1.0, v[static_cast<std::size_t>(j)].data(), psi.data());
  const auto& k2 = grid_.k2();
  for (std::size_t q = 0; q < ns; ++q) psi[q] = k2[q] > 0 ? -psi[q] / k2[q] : cplx(0);
  for (int j = 0; j < d; ++j) K().ik_accumulate(ns, grid_.k(j).data(), -1.0, psi.data(), v[static_cast<std::size_t>(j)].data());
  const double vmax = coeff_max(v);
  if (vmax > 0) projected_div_ = std::max(projected_div_, divergence_max(v) / vmax);
  return psi;
}

void FlowOperators::apply_helmholtz(const Viscosity& nu, double gamma, const VectorCoeffs& v, VectorCoeffs& out) {
  const auto sd = static_cast<std::size_t>(dim());
  const std::size_t ns = grid_.spectral_size();
  out = v;
  if (gamma == 0.0) return;
  if (nu.constant) {
    const auto& k2 = grid_.k2();
    for (std::size_t i = 0; i < sd; ++i) {
      for (std::size_t q = 0; q < ns; ++q) out[i][q] *= 1.0 + gamma * nu.value * k2[q];
    }
    return;
  }
  const std::size_t np = grid_.padded_size();
  for (std::size_t i = 0; i < sd; ++i) {
    gradient_values(v[i], pad_v_.data());
    for (std::size_t j = 0; j < sd; ++j) {
      K().multiply(np, nu.padded.data(), pad_v_[j].data(), pad_tmp_.data());
      grid_.forward_padded(pad_tmp_.data(), tmp_.data());
      K().ik_accumulate(ns, grid_.k(static_cast<int>(j)).data(), -gamma, tmp_.data(), out[i].data());
    }
  }
}

double FlowOperators::dot(const VectorCoeffs& a, const VectorCoeffs& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += K().weighted_dot(a[i].size(), grid_.weights().data(), a[i].data(), b[i].data());
  return s;
}

HelmholtzStats FlowOperators::helmholtz(const Viscosity& nu, double gamma, const VectorCoeffs& g, VectorCoeffs& v,
                                        double tol, int max_iterations) {
  if (gamma < 0.0) throw std::invalid_argument("helmholtz: gamma must be >= 0");
  ++solves_;
  const auto sd = static_cast<std::size_t>(dim());
  const std::size_t ns = grid_.spectral_size();
  const auto& k2 = grid_.k2();
  HelmholtzStats st;
  auto precondition = [&](const VectorCoeffs& r, VectorCoeffs& z, double nu_bar) {
    z = r;
    for (std::size_t i = 0; i < sd; ++i) {
      for (std::size_t q = 0; q < ns; ++q) z[i][q] /= 1.0 + gamma * nu_bar * k2[q];
    }
  };
  if (gamma == 0.0 || nu.constant) {
    precondition(g, v, nu.constant ? nu.value : 0.0);
    return st;
  }

  const double gnorm = std::sqrt(dot(g, g));
  if (gnorm == 0.0) {
    v = g;
    return st;
  }
  precondition(g, v, nu.value);
  VectorCoeffs r, z, p, Ap;
  apply_helmholtz(nu, gamma, v, Ap);
  r = g;
  axpy(-1.0, Ap, r);
  precondition(r, z, nu.value);
  p = z;
  double rz = dot(r, z);
  st.residual = std::sqrt(dot(r, r)) / gnorm;
  while (st.residual > tol) {
    if (st.iterations >= max_iterations) {
      iterations_ += st.iterations;
      throw SolverError("helmholtz: no convergence after " + std::to_string(max_iterations) +
                        " iterations, residual " + std::to_string(st.residual));
    }
    ++st.iterations;
    apply_helmholtz(nu, gamma, p, Ap);
    const double alpha = rz / dot(p, Ap);
    axpy(alpha, p, v);
    axpy(-alpha, Ap, r);
    st.residual = std::sqrt(dot(r, r)) / gnorm;
    if (!std::isfinite(st.residual)) {
      iterations_ += st.iterations;
      throw SolverError("helmholtz: non-finite residual");
    }
    if (st.residual <= tol) {
      // confirm against the true residual; the recurrence drifts
      apply_helmholtz(nu, gamma, v, Ap);
      r = g;
      axpy(-1.0, Ap, r);
      st.residual = std::sqrt(dot(r, r)) / gnorm;
      if (st.residual <= tol) break;
      precondition(r, z, nu.value);
      p = z;
      rz = dot(r, z);
      continue;
    }
    precondition(r, z, nu.value);
    const double rz_new = dot(r, z);
    axpby(1.0, z, rz_new / rz, p);
    rz = rz_new;
  }
  iterations_ += st.iterations;
  return st;
}

double FlowOperators::divergence_max(const VectorCoeffs& v) const {
  const std::size_t ns = grid_.spectral_size();
  double m = 0.0;
  for (std::size_t q = 0; q < ns; ++q) {
    cplx s = 0;
    for (int j = 0; j < dim(); ++j) s += grid_.k(j)[q] * v[static_cast<std::size_t>(j)][q];
    m = std::max(m, std::abs(s));
  }
  return m;
}

double FlowOperators::coeff_max(const VectorCoeffs& v) const {
  double m = 0.0;
  for (const auto& c : v) {
    for (const auto& x : c) m = std::max(m, std::abs(x));
  }
  return m;
}

double FlowOperators::rms(const VectorCoeffs& v) const {
  return std::sqrt(std::max(0.0, dot(v, v)) / static_cast<double>(v.size()));
}

double FlowOperators::speed_max(const VectorCoeffs& v) {
  const auto values = to_values(v);
  const std::size_t n = grid_.physical_size();
  double m = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    for (const auto& c : values) s += c[p] * c[p];
    if (!std::isfinite(s)) return std::numeric_limits<double>::quiet_NaN();
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

}  // namespace imex::flow
