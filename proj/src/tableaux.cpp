#include "imex/tableaux.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

namespace imex {

namespace {

__int128 parse_int(std::string_view s) {
  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
    neg = s[i] == '-';
    ++i;
  }
  if (i == s.size()) throw std::invalid_argument("empty integer in rational literal");
  __int128 v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      throw std::invalid_argument("bad digit in rational literal");
    }
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

Rational q(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return {parse_int(s), 1};
  return {parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1))};
}

// Lower-triangular rows given as lists; missing entries are zero.
using Rows = std::vector<std::vector<std::string_view>>;
using Row = std::vector<std::string_view>;

std::vector<Rational> square(const Rows& rows, int s) {
  std::vector<Rational> out(static_cast<std::size_t>(s * s));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    for (int j = 0; j < static_cast<int>(rows[static_cast<std::size_t>(i)].size()); ++j) {
      out[static_cast<std::size_t>(i * s + j)] = q(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<Rational> vec(const Row& r) {
  std::vector<Rational> out;
  for (auto x : r) out.push_back(q(x));
  return out;
}

std::vector<double> to_double(const std::vector<Rational>& r) {
  std::vector<double> out;
  out.reserve(r.size());
  for (const auto& x : r) out.push_back(x.as<double>());
  return out;
}

ImexTableau make(std::string name, int order, TableauFlags flags, const Row& c, const Rows& a_im,
                 const Rows& a_ex, const Row& b_im, const Row& b_ex) {
  const int s = static_cast<int>(c.size());
  auto rc = vec(c);
  auto rim = square(a_im, s);
  auto rex = square(a_ex, s);
  auto rbim = vec(b_im);
  auto rbex = vec(b_ex);
  ButcherCoefficients<double> d;
  d.stages = s;
  d.c = to_double(rc);
  d.a_im = to_double(rim);
  d.a_ex = to_double(rex);
  d.b_im = to_double(rbim);
  d.b_ex = to_double(rbex);
  flags.gsa = flags.stiffly_accurate && flags.fsal;
  ImexTableau tab(std::move(name), order, std::move(d), flags);
  tab.attach_exact(std::move(rc), std::move(rim), std::move(rex), std::move(rbim), std::move(rbex));
  return tab;
}

std::vector<ImexTableau> build_registry() {
  std::vector<ImexTableau> out;

  out.push_back(make("RK-TR", 2, {.stiffly_accurate = true, .fsal = true},
                     {"0", "1", "1"},
                     {{}, {"0", "1"}, {"1/2", "0", "1/2"}},
                     {{}, {"1"}, {"1/2", "1/2"}},
                     {"1/2", "0", "1/2"},
                     {"1/2", "1/2", "0"}));

  out.push_back(make("RK-CB2", 2, {.stiffly_accurate = true, .shared_b = true},
                     {"0", "2/5", "1"},
                     {{}, {"0", "2/5"}, {"0", "5/6", "1/6"}},
                     {{}, {"2/5"}, {"0", "1"}},
                     {"0", "5/6", "1/6"},
                     {"0", "5/6", "1/6"}));

  // Entries a_im[4,3] and a_ex[4,3] as corrected against the original
  // publication, where they appear swapped.
  out.push_back(make("RK-CB3c", 3, {.shared_b = true},
                     {"0", "3375509829940/4525919076317", "272778623835/1039454778728", "1"},
                     {{},
                      {"0", "3375509829940/4525919076317"},
                      {"0", "-11712383888607531889907/32694570495602105556248", "566138307881/912153721139"},
                      {"0", "673488652607/2334033219546", "493801219040/853653026979",
                       "184814777513/1389668723319"}},
                     {{},
                      {"3375509829940/4525919076317"},
                      {"0", "272778623835/1039454778728"},
                      {"0", "673488652607/2334033219546", "1660544566939/2334033219546"}},
                     {"0", "673488652607/2334033219546", "493801219040/853653026979",
                      "184814777513/1389668723319"},
                     {"0", "673488652607/2334033219546", "493801219040/853653026979",
                      "184814777513/1389668723319"}));

  out.push_back(make("RK-CB3e", 3, {.stiffly_accurate = true, .shared_b = true},
                     {"0", "1/3", "1", "1"},
                     {{}, {"0", "1/3"}, {"0", "1/2", "1/2"}, {"0", "3/4", "-1/4", "1/2"}},
                     {{}, {"1/3"}, {"0", "1"}, {"0", "3/4", "1/4"}},
                     {"0", "3/4", "-1/4", "1/2"},
                     {"0", "3/4", "-1/4", "1/2"}));

  const Row cb4_b = {"232049084587/1377130630063", "322009889509/2243393849156",
                     "-195109672787/1233165545817", "-340582416761/705418832319",
                     "463396075661/409972144477", "323177943294/1626646580633"};
  out.push_back(make(
      "RK-CB4", 4, {.stiffly_accurate = true, .shared_b = true},
      {"0", "1/4", "3/4", "3/8", "1/2", "1"},
      {{},
       {"1/8", "1/8"},
       {"216145252607/961230882893", "257479850128/1143310606989", "30481561667/101628412017"},
       {"232049084587/1377130630063", "-381180097479/1276440792700", "-54660926949/461115766612",
        "344309628413/552073727558"},
       {"232049084587/1377130630063", "322009889509/2243393849156", "-100836174740/861952129159",
        "-250423827953/1283875864443", "1/2"},
       cb4_b},
      {{},
       {"1/4"},
       {"153985248130/1004999853329", "902825336800/1512825644809"},
       {"232049084587/1377130630063", "99316866929/820744730663", "82888780751/969573940619"},
       {"232049084587/1377130630063", "322009889509/2243393849156", "57501241309/765040883867",
        "76345938311/676824576433"},
       {"232049084587/1377130630063", "322009889509/2243393849156", "-195109672787/1233165545817",
        "-4099309936455/6310162971841", "1395992540491/933264948679"}},
      cb4_b, cb4_b));

  out.push_back(make("RK-ARS3", 3, {.stiffly_accurate = true, .fsal = true},
                     {"0", "1/2", "2/3", "1/2", "1"},
                     {{},
                      {"0", "1/2"},
                      {"0", "1/6", "1/2"},
                      {"0", "-1/2", "1/2", "1/2"},
                      {"0", "3/2", "-3/2", "1/2", "1/2"}},
                     {{},
                      {"1/2"},
                      {"11/18", "1/18"},
                      {"5/6", "-5/6", "1/2"},
                      {"1/4", "7/4", "3/4", "-7/4"}},
                     {"0", "3/2", "-3/2", "1/2", "1/2"},
                     {"1/4", "7/4", "3/4", "-7/4", "0"}));

  out.push_back(make("IMEX-Euler", 1, {.stiffly_accurate = true, .fsal = true},
                     {"0", "1"},
                     {{}, {"0", "1"}},
                     {{}, {"1"}},
                     {"0", "1"},
                     {"1", "0"}));
  return out;
}

const std::vector<ImexTableau>& registry() {
  static const std::vector<ImexTableau> reg = build_registry();
  return reg;
}

std::string normalize(std::string_view s) {
  std::string out;
  for (char ch : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (out.rfind("rk-", 0) == 0) out.erase(0, 3);
  if (out.rfind("imexrk", 0) == 0) out.erase(0, 6);
  return out;
}

}  // namespace

ImexTableau::ImexTableau(std::string name, int declared_order, ButcherCoefficients<double> coeffs,
                         TableauFlags declared_flags)
    : name_(std::move(name)),
      declared_order_(declared_order),
      coeffs_(std::move(coeffs)),
      declared_flags_(declared_flags) {
  const auto s = static_cast<std::size_t>(coeffs_.stages);
  if (coeffs_.stages < 1 || coeffs_.c.size() != s || coeffs_.a_im.size() != s * s ||
      coeffs_.a_ex.size() != s * s || coeffs_.b_im.size() != s || coeffs_.b_ex.size() != s) {
    throw std::invalid_argument("tableau '" + name_ + "': inconsistent coefficient sizes");
  }
}

void ImexTableau::attach_exact(std::vector<Rational> c, std::vector<Rational> a_im,
                               std::vector<Rational> a_ex, std::vector<Rational> b_im,
                               std::vector<Rational> b_ex) {
  exact_ = {std::move(c), std::move(a_im), std::move(a_ex), std::move(b_im), std::move(b_ex)};
}

const std::vector<std::string>& builtin_tableau_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& t : registry()) n.push_back(t.name());
    return n;
  }();
  return names;
}

const ImexTableau& builtin_tableau(std::string_view name) {
  const std::string key = normalize(name);
  for (const auto& t : registry()) {
    if (normalize(t.name()) == key) return t;
  }
  std::string msg = "unknown method '" + std::string(name) + "'; valid names:";
  for (const auto& n : builtin_tableau_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_structure(const ImexTableau& tab, double tolerance) {
  ValidationReport rep;
  const int s = tab.stages();
  auto add = [&](std::string name, double residual) {
    rep.checks.push_back({std::move(name), residual <= tolerance, residual});
  };

  double rim = 0.0;
  double rex = 0.0;
  double upper_im = 0.0;
  double upper_ex = 0.0;
  for (int i = 0; i < s; ++i) {
    double sim = 0.0;
    double sex = 0.0;
    for (int j = 0; j < s; ++j) {
      sim += tab.a_im(i, j);
      sex += tab.a_ex(i, j);
      if (j > i) upper_im = std::max(upper_im, std::abs(tab.a_im(i, j)));
      if (j >= i) upper_ex = std::max(upper_ex, std::abs(tab.a_ex(i, j)));
    }
    rim = std::max(rim, std::abs(sim - tab.c(i)));
    rex = std::max(rex, std::abs(sex - tab.c(i)));
  }
  add("row_sum_im", rim);
  add("row_sum_ex", rex);
  add("lower_triangular_im", upper_im);
  add("strictly_lower_ex", upper_ex);
  add("first_stage_explicit", std::abs(tab.a_im(0, 0)));

  double bim = 0.0;
  double bex = 0.0;
  for (int i = 0; i < s; ++i) {
    bim += tab.b_im(i);
    bex += tab.b_ex(i);
  }
  add("b_im_sum", std::abs(bim - 1.0));
  add("b_ex_sum", std::abs(bex - 1.0));
  add("c_first_zero", std::abs(tab.c(0)));
  add("c_last_one", std::abs(tab.c(s - 1) - 1.0));

  double sa = 0.0;
  double fsal = 0.0;
  double shared = 0.0;
  for (int j = 0; j < s; ++j) {
    sa = std::max(sa, std::abs(tab.a_im(s - 1, j) - tab.b_im(j)));
    fsal = std::max(fsal, std::abs(tab.a_ex(s - 1, j) - tab.b_ex(j)));
    shared = std::max(shared, std::abs(tab.b_ex(j) - tab.b_im(j)));
  }
  rep.computed_flags.stiffly_accurate = sa <= tolerance;
  rep.computed_flags.fsal = fsal <= tolerance;
  rep.computed_flags.shared_b = shared <= tolerance;
  rep.computed_flags.gsa = rep.computed_flags.stiffly_accurate && rep.computed_flags.fsal;

  // A declared identity must hold; an undeclared one is reported, not failed.
  const auto& decl = tab.declared_flags();
  auto flag_check = [&](std::string name, bool declared, bool computed, double residual) {
    CheckResult r{std::move(name), declared == computed, residual};
    rep.checks.push_back(r);
  };
  flag_check("flag_stiffly_accurate", decl.stiffly_accurate, rep.computed_flags.stiffly_accurate, sa);
  flag_check("flag_fsal", decl.fsal, rep.computed_flags.fsal, fsal);
  flag_check("flag_shared_b", decl.shared_b, rep.computed_flags.shared_b, shared);
  return rep;
}

double stage_order2_defect(const ImexTableau& tab) {
  double worst = 0.0;
  for (int i = 1; i < tab.stages(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < tab.stages(); ++j) sum += tab.a_im(i, j) * tab.c(j);
    worst = std::max(worst, std::abs(sum - 0.5 * tab.c(i) * tab.c(i)));
  }
  return worst;
}

}  // namespace imex
