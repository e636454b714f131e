#include "imex/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace imex {

SplitMode parse_split_mode(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "implicit" || s == "im") return SplitMode::Implicit;
  if (s == "explicit" || s == "ex") return SplitMode::Explicit;
  if (s == "semi_implicit" || s == "semi-implicit" || s == "semi") return SplitMode::SemiImplicit;
  throw std::invalid_argument("unknown split mode '" + s + "' (implicit | explicit | semi_implicit)");
}

std::string to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::Implicit:
      return "implicit";
    case SplitMode::Explicit:
      return "explicit";
    case SplitMode::SemiImplicit:
      return "semi_implicit";
  }
  return {};
}

StabilityValue eval_R(const MethodSpec& method, std::complex<double> z, SplitMode mode) {
  StabilityEvaluator<double> ev(method);
  StabilityValue out;
  try {
    out.R = ev.R(z, mode);
    out.error = out.R - std::exp(z);
  } catch (const SolverError&) {
    out.pole = true;
    out.R = {std::numeric_limits<double>::infinity(), 0.0};
    out.error = out.R;
  }
  return out;
}

std::complex<double> scaled_argument(const MethodSpec& method, std::complex<double> z) {
  return z / static_cast<double>(method.substeps());
}

DomainScan scan_domain(const MethodSpec& method, SplitMode mode, const GridSpec& grid, bool scaled, int jobs) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("scan_domain: resolutions must be >= 2");
  StabilityEvaluator<double> ev(method);
  DomainScan scan;
  scan.grid = grid;
  scan.scaled = scaled;
  scan.substeps = scaled ? method.substeps() : 1;
  scan.re.resize(static_cast<std::size_t>(grid.nx));
  scan.im.resize(static_cast<std::size_t>(grid.ny));
  for (int i = 0; i < grid.nx; ++i) {
    scan.re[static_cast<std::size_t>(i)] = grid.re_min + (grid.re_max - grid.re_min) * i / (grid.nx - 1);
  }
  for (int j = 0; j < grid.ny; ++j) {
    scan.im[static_cast<std::size_t>(j)] = grid.im_min + (grid.im_max - grid.im_min) * j / (grid.ny - 1);
  }
  const std::size_t n = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  scan.abs_R.assign(n, 0.0);
  scan.abs_err.assign(n, 0.0);
  scan.pole.assign(n, 0);
  const double factor = scan.substeps;

  auto rows = [&](int first, int stride) {
    for (int j = first; j < grid.ny; j += stride) {
      for (int i = 0; i < grid.nx; ++i) {
        const auto k = scan.index(i, j);
        const std::complex<double> z(scan.re[static_cast<std::size_t>(i)] * factor,
                                     scan.im[static_cast<std::size_t>(j)] * factor);
        try {
          const auto r = ev.R(z, mode);
          scan.abs_R[k] = std::abs(r);
          scan.abs_err[k] = std::abs(r - std::exp(z));
        } catch (const SolverError&) {
          scan.pole[k] = 1;
          scan.abs_R[k] = std::numeric_limits<double>::infinity();
          scan.abs_err[k] = std::numeric_limits<double>::infinity();
        }
      }
    }
  };
  jobs = std::max(1, std::min(jobs, grid.ny));
  if (jobs == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(rows, w, jobs);
    for (auto& t : pool) t.join();
  }
  return scan;
}

CriticalImag critical_imag(const MethodSpec& method, SplitMode mode, double re_part, bool scaled) {
  StabilityEvaluator<double> ev(method);
  const double factor = scaled ? method.substeps() : 1.0;
  auto unstable = [&](double y) {
    try {
      return std::abs(ev.R({re_part * factor, y * factor}, mode)) > 1.0;
    } catch (const SolverError&) {
      return true;
    }
  };
  constexpr double kStart = 0.01;
  constexpr double kLimit = 1e3;
  constexpr double kTol = 1e-4;
  CriticalImag out;
  // probing at the bisection tolerance keeps |R| clear of round-off at 1
  if (unstable(0.0) || unstable(kTol)) {
    out.status = CriticalImag::Status::Marginal;
    out.y_star = 0.0;
    return out;
  }
  double hi = kStart;
  while (!unstable(hi)) {
    hi *= 2.0;
    if (hi > kLimit) {
      out.status = CriticalImag::Status::Unbounded;
      out.y_star = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  // Doubling can jump over a narrow unstable band; sweep [0, hi] finely.
  constexpr int kSweep = 2000;
  double lo = 0.0;
  for (int k = 1; k <= kSweep; ++k) {
    const double y = hi * k / kSweep;
    if (unstable(y)) {
      hi = y;
      break;
    }
    lo = y;
  }
  while (hi - lo > kTol * 0.5) {
    const double mid = 0.5 * (lo + hi);
    (unstable(mid) ? hi : lo) = mid;
  }
  out.y_star = 0.5 * (lo + hi);
  return out;
}

ConsistencyResult consistency_order(const MethodSpec& method, SplitMode mode) {
  StabilityEvaluator<Quad> ev(method);
  ConsistencyResult res;
  constexpr int kPoints = 8;
  const Quad angle = Quad(3) * pi<Quad>() / Quad(4);
  std::vector<double> lx, ly;
  for (int k = 0; k < kPoints; ++k) {
    const double log_r = -1.0 - 2.0 * k / (kPoints - 1);
    const Quad r = boost::multiprecision::pow(Quad(10), Quad(log_r));
    const std::complex<Quad> z(r * boost::multiprecision::cos(angle), r * boost::multiprecision::sin(angle));
    const Quad e = complex_abs(ev.error(z, mode));
    res.radii.push_back(static_cast<double>(r));
    res.errors.push_back(static_cast<double>(e));
    lx.push_back(log_r);
    ly.push_back(e > 0 ? static_cast<double>(boost::multiprecision::log10(e)) : -400.0);
  }
  double mx = 0, my = 0;
  for (int k = 0; k < kPoints; ++k) {
    mx += lx[static_cast<std::size_t>(k)];
    my += ly[static_cast<std::size_t>(k)];
  }
  mx /= kPoints;
  my /= kPoints;
  double sxy = 0, sxx = 0;
  for (int k = 0; k < kPoints; ++k) {
    const auto i = static_cast<std::size_t>(k);
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  res.slope = sxy / sxx;
  double ss = 0;
  for (int k = 0; k < kPoints; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double d = ly[i] - (my + res.slope * (lx[i] - mx));
    ss += d * d;
  }
  res.fit_residual = std::sqrt(ss / kPoints);
  res.order = res.slope - 1.0;
  res.determinate = res.fit_residual <= 0.1;
  return res;
}

}  // namespace imex
