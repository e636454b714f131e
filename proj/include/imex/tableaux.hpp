#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "imex/real.hpp"

namespace imex {

/// Exact rational coefficient. Some published coefficients have 23-digit
/// numerators, hence the 128-bit storage.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  template <class Real>
  Real as() const {
    const Quad q = Quad(num) / Quad(den);
    return static_cast<Real>(q);
  }
};

struct TableauFlags {
  bool stiffly_accurate = false;  // a_im[s,.] == b_im
  bool fsal = false;              // a_ex[s,.] == b_ex
  bool gsa = false;               // stiffly_accurate && fsal
  bool shared_b = false;          // b_ex == b_im

  friend bool operator==(const TableauFlags&, const TableauFlags&) = default;
};

/// Butcher coefficients of a CK-type IMEX pairing, converted to `Real`.
/// Matrices are row-major s*s.
template <class Real>
struct ButcherCoefficients {
  int stages = 0;
  std::vector<Real> c;
  std::vector<Real> a_im;
  std::vector<Real> a_ex;
  std::vector<Real> b_im;
  std::vector<Real> b_ex;

  const Real& im(int i, int j) const { return a_im[static_cast<std::size_t>(i * stages + j)]; }
  const Real& ex(int i, int j) const { return a_ex[static_cast<std::size_t>(i * stages + j)]; }
};

/// Paired DIRK/ERK tableau with a shared node vector.
///
/// Built-in tableaux keep their exact rational source so that higher
/// precision coefficient sets can be produced without transcription
/// round-off; tableaux built from doubles convert by widening.
class ImexTableau {
 public:
  ImexTableau(std::string name, int declared_order, ButcherCoefficients<double> coeffs,
              TableauFlags declared_flags);

  const std::string& name() const { return name_; }
  int stages() const { return coeffs_.stages; }
  int declared_order() const { return declared_order_; }
  /// Flags as listed in the method's property table.
  const TableauFlags& declared_flags() const { return declared_flags_; }

  double c(int i) const { return coeffs_.c[static_cast<std::size_t>(i)]; }
  double a_im(int i, int j) const { return coeffs_.im(i, j); }
  double a_ex(int i, int j) const { return coeffs_.ex(i, j); }
  double b_im(int i) const { return coeffs_.b_im[static_cast<std::size_t>(i)]; }
  double b_ex(int i) const { return coeffs_.b_ex[static_cast<std::size_t>(i)]; }

  const ButcherCoefficients<double>& coefficients() const { return coeffs_; }
  ButcherCoefficients<double>& mutable_coefficients() {
    exact_.clear();
    return coeffs_;
  }

  template <class Real>
  ButcherCoefficients<Real> coefficients_as() const;

  /// Only used by the built-in registry.
  void attach_exact(std::vector<Rational> c, std::vector<Rational> a_im, std::vector<Rational> a_ex,
                    std::vector<Rational> b_im, std::vector<Rational> b_ex);

 private:
  std::string name_;
  int declared_order_;
  ButcherCoefficients<double> coeffs_;
  TableauFlags declared_flags_;
  // c, a_im, a_ex, b_im, b_ex; empty when not built from rationals
  std::vector<std::vector<Rational>> exact_;
};

/// Names accepted by builtin_tableau, in property-table order, plus IMEX-Euler.
const std::vector<std::string>& builtin_tableau_names();

/// Throws std::invalid_argument listing valid names for unknown identifiers.
/// Lookup is case-insensitive; "RK-" prefixes are optional.
const ImexTableau& builtin_tableau(std::string_view name);

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  TableauFlags computed_flags;

  bool all_pass() const;
  const CheckResult* find(std::string_view name) const;
};

/// Structural identities of a CK pairing: row sums, weight sums, node
/// endpoints, triangularity and the SA/FSAL/shared-b coefficient identities.
/// Identities are judged exact to `tolerance` (absolute).
ValidationReport validate_structure(const ImexTableau& tab, double tolerance = 1e-14);

/// Max over i>=1 of |sum_j a_im[i,j] c_j - c_i^2/2|.
double stage_order2_defect(const ImexTableau& tab);

// ---------------------------------------------------------------------------

template <class Real>
ButcherCoefficients<Real> ImexTableau::coefficients_as() const {
  ButcherCoefficients<Real> out;
  out.stages = coeffs_.stages;
  auto convert = [&](const std::vector<double>& d, std::size_t which) {
    std::vector<Real> v;
    v.reserve(d.size());
    if (!exact_.empty()) {
      for (const auto& r : exact_[which]) v.push_back(r.template as<Real>());
    } else {
      for (double x : d) v.push_back(static_cast<Real>(x));
    }
    return v;
  };
  out.c = convert(coeffs_.c, 0);
  out.a_im = convert(coeffs_.a_im, 1);
  out.a_ex = convert(coeffs_.a_ex, 2);
  out.b_im = convert(coeffs_.b_im, 3);
  out.b_ex = convert(coeffs_.b_ex, 4);
  return out;
}

}  // namespace imex
