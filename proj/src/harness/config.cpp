#include "imex/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace imex::harness {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  double v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) throw ConfigError(std::string(what) + ": not a number: '" + s + "'");
  return v;
}

long long to_int(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(std::string(what) + ": not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string fmt(std::complex<double> z) {
  std::ostringstream os;
  os << std::setprecision(17) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

CaseKind parse_case(std::string_view text) {
  const auto s = lower(trim(text));
  if (s == "ode") return CaseKind::Ode;
  if (s == "tgp") return CaseKind::Tgp;
  if (s == "vvp") return CaseKind::Vvp;
  if (s == "custom") return CaseKind::Custom;
  throw ConfigError("case: unknown value '" + s + "' (ode | tgp | vvp | custom)");
}

std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Ode:
      return "ode";
    case CaseKind::Tgp:
      return "tgp";
    case CaseKind::Vvp:
      return "vvp";
    case CaseKind::Custom:
      return "custom";
  }
  return {};
}

double parse_step(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) throw ConfigError("empty step size");
  double v = 0;
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    v = std::pow(to_double(s.substr(0, caret), "step base"), to_double(s.substr(caret + 1), "step exponent"));
  } else if (const auto slash = s.find('/'); slash != std::string::npos) {
    v = to_double(s.substr(0, slash), "step") / to_double(s.substr(slash + 1), "step");
  } else {
    v = to_double(s, "step");
  }
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError("step sizes must be positive: '" + s + "'");
  return v;
}

std::vector<double> parse_step_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const double a = parse_step(item.substr(0, dots));
      const double b = parse_step(item.substr(dots + 2));
      const double r = std::log2(a / b);
      if (std::abs(r - std::round(r)) > 1e-9) throw ConfigError("range ends must differ by a power of two: '" + item + "'");
      const int n = static_cast<int>(std::lround(r));
      for (int i = 0; i <= std::abs(n); ++i) out.push_back(n >= 0 ? a / std::ldexp(1.0, i) : a * std::ldexp(1.0, i));
    } else {
      out.push_back(parse_step(item));
    }
  }
  if (out.empty()) throw ConfigError("empty step list");
  return out;
}

std::vector<std::string> parse_method_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
    cur.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::complex<double> parse_complex(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ConfigError("empty complex value");
  const char last = s.back();
  if (last != 'i' && last != 'j') return {to_double(s, "complex"), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign or the leading sign
  std::size_t cut = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_of = [](std::string t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    if (t[0] == '+') t.erase(0, 1);
    return to_double(t, "complex");
  };
  if (cut == std::string::npos) return {0.0, imag_of(s)};
  return {to_double(s.substr(0, cut), "complex"), imag_of(s.substr(cut))};
}

void RunConfig::set(std::string_view key_in, std::string_view value_in) {
  const auto key = lower(trim(key_in));
  const auto value = trim(value_in);
  if (key == "case") {
    kind = parse_case(value);
  } else if (key == "method") {
    (void)resolve_method(*this, value);
    method = value;
  } else if (key == "methods") {
    methods = parse_method_list(value);
    for (const auto& m : methods) (void)resolve_method(*this, m);
  } else if (key == "dt") {
    dt = parse_step(value);
  } else if (key == "dt_list") {
    dt_list = parse_step_list(value);
  } else if (key == "t_final") {
    t_final = parse_step(value);
  } else if (key == "grid") {
    const auto g = to_int(value, "grid");
    if (g != 0 && (g < 4 || g % 4 != 0)) throw ConfigError("grid: must be a positive multiple of 4");
    grid = static_cast<int>(g);
  } else if (key == "nu0") {
    nu0 = to_double(value, "nu0");
  } else if (key == "nu1") {
    nu1 = to_double(value, "nu1");
  } else if (key == "sdc_m") {
    sdc_M = static_cast<int>(to_int(value, "sdc_M"));
    if (sdc_M < 1) throw ConfigError("sdc_M: must be >= 1");
  } else if (key == "sdc_k") {
    sdc_K = static_cast<int>(to_int(value, "sdc_K"));
    if (sdc_K < 0) throw ConfigError("sdc_K: must be >= 0");
  } else if (key == "predictor") {
    predictor = value;
    try {
      (void)sdc_method(predictor, 1, 0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("predictor: ") + e.what());
    }
  } else if (key == "seed") {
    const auto v = to_int(value, "seed");
    if (v < 0) throw ConfigError("seed: must be >= 0");
    seed = static_cast<unsigned long long>(v);
  } else if (key == "perturbation") {
    perturbation = to_double(value, "perturbation");
  } else if (key == "lambda_c") {
    lambda_c = parse_complex(value);
  } else if (key == "lambda_d") {
    lambda_d = parse_complex(value);
  } else if (key == "final_projection") {
    try {
      final_projection = flow::parse_final_projection(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "blowup_factor") {
    blowup_factor = to_double(value, "blowup_factor");
  } else if (key == "bracket") {
    const auto parts = split(value, ',');
    if (parts.size() != 2) throw ConfigError("bracket: expected 'lo,hi'");
    const double lo = parse_step(parts[0]), hi = parse_step(parts[1]);
    if (!(lo < hi)) throw ConfigError("bracket: need lo < hi");
    bracket = std::make_pair(lo, hi);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "case = " << to_string(kind) << '\n';
  os << "method = " << method << '\n';
  if (!methods.empty()) {
    os << "methods = ";
    for (std::size_t i = 0; i < methods.size(); ++i) os << (i ? "," : "") << methods[i];
    os << '\n';
  }
  os << "dt = " << fmt(dt) << '\n';
  if (!dt_list.empty()) {
    os << "dt_list = ";
    for (std::size_t i = 0; i < dt_list.size(); ++i) os << (i ? "," : "") << fmt(dt_list[i]);
    os << '\n';
  }
  os << "t_final = " << fmt(t_final) << '\n';
  if (is_flow()) {
    const auto fc = flow::make_flow_case(flow_config()).config;
    os << "grid = " << fc.grid << '\n';
    os << "nu0 = " << fmt(fc.nu0) << '\n';
    os << "nu1 = " << fmt(fc.nu1) << '\n';
    os << "blowup_factor = " << fmt(fc.blowup_factor) << '\n';
    os << "final_projection = " << flow::to_string(final_projection) << '\n';
    os << "perturbation = " << fmt(perturbation) << '\n';
  } else {
    os << "lambda_c = " << fmt(lambda_c) << '\n';
    os << "lambda_d = " << fmt(lambda_d) << '\n';
    os << "blowup_factor = " << fmt(blowup_factor > 0 ? blowup_factor : 10.0) << '\n';
  }
  os << "sdc_M = " << sdc_M << '\n';
  os << "sdc_K = " << sdc_K << '\n';
  os << "predictor = " << predictor << '\n';
  os << "seed = " << seed << '\n';
  if (bracket) os << "bracket = " << fmt(bracket->first) << "," << fmt(bracket->second) << '\n';
  return os.str();
}

flow::FlowCaseConfig RunConfig::flow_config() const {
  flow::FlowCaseConfig fc;
  switch (kind) {
    case CaseKind::Tgp:
      fc.kind = flow::FlowCaseKind::Tgp;
      break;
    case CaseKind::Vvp:
      fc.kind = flow::FlowCaseKind::Vvp;
      break;
    case CaseKind::Custom:
      fc.kind = flow::FlowCaseKind::Custom;
      break;
    case CaseKind::Ode:
      throw ConfigError("the ode case has no flow configuration");
  }
  fc.grid = grid;
  fc.nu0 = nu0;
  fc.nu1 = nu1;
  fc.blowup_factor = blowup_factor;
  return fc;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      cfg.set(t.substr(0, eq), t.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_config(is);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

MethodSpec resolve_method(const RunConfig& cfg, std::string_view name) {
  try {
    if (lower(trim(name)) == "sdc") return sdc_method(cfg.predictor, cfg.sdc_M, cfg.sdc_K);
    return parse_method(name);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("method: ") + e.what());
  }
}

}  // namespace imex::harness
