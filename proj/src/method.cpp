#include "imex/method.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace imex {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

bool is_euler(std::string_view s) {
  const auto l = lower(s);
  return l == "eu" || l == "euler" || l == "imex-euler" || l == "imexeuler";
}

std::string short_predictor(const SdcConfig& cfg) {
  if (cfg.euler_predictor()) return "Eu";
  std::string n = builtin_tableau(cfg.predictor).name();
  if (n.rfind("RK-", 0) == 0) n.erase(0, 3);
  return n;
}

}  // namespace

bool SdcConfig::euler_predictor() const { return is_euler(predictor); }

int SdcConfig::predictor_stages() const {
  return euler_predictor() ? 2 : builtin_tableau(predictor).stages();
}

int SdcConfig::predictor_order() const {
  return euler_predictor() ? 1 : builtin_tableau(predictor).declared_order();
}

int SdcConfig::theoretical_order() const { return std::min(predictor_order() + K, 2 * M); }

void SdcConfig::validate() const {
  if (M < 1) throw std::invalid_argument("SDC: need M >= 1");
  if (K < 0) throw std::invalid_argument("SDC: need K >= 0");
  if (!euler_predictor()) (void)builtin_tableau(predictor);
}

int substep_count(const SdcConfig& cfg) {
  if (cfg.euler_predictor()) return cfg.M * (cfg.K + 1);
  return cfg.M * (cfg.K + cfg.predictor_stages() - 1);
}

std::string MethodSpec::name() const {
  switch (kind) {
    case MethodKind::Bdf2:
      return "BDF2";
    case MethodKind::RungeKutta:
      return builtin_tableau(tableau).name();
    case MethodKind::Sdc:
      return "SDC-" + short_predictor(sdc) + "(" + std::to_string(sdc.M) + "," + std::to_string(sdc.K) + ")";
  }
  return {};
}

int MethodSpec::theoretical_order() const {
  switch (kind) {
    case MethodKind::Bdf2:
      return 2;
    case MethodKind::RungeKutta:
      return builtin_tableau(tableau).declared_order();
    case MethodKind::Sdc:
      return sdc.theoretical_order();
  }
  return 0;
}

int MethodSpec::substeps() const {
  switch (kind) {
    case MethodKind::Bdf2:
      return 1;
    case MethodKind::RungeKutta:
      return builtin_tableau(tableau).stages() - 1;
    case MethodKind::Sdc:
      return substep_count(sdc);
  }
  return 1;
}

MethodSpec sdc_method(std::string_view predictor, int M, int K) {
  MethodSpec spec;
  spec.kind = MethodKind::Sdc;
  spec.sdc.M = M;
  spec.sdc.K = K;
  spec.sdc.predictor = is_euler(predictor) ? "IMEX-Euler" : builtin_tableau(predictor).name();
  spec.sdc.validate();
  return spec;
}

MethodSpec parse_method(std::string_view text) {
  const std::string s(text);
  const auto l = lower(s);
  if (l == "bdf2" || l == "imex-bdf2") {
    MethodSpec spec;
    spec.kind = MethodKind::Bdf2;
    return spec;
  }
  static const std::regex sdc_re(R"(^sdc-([a-z0-9-]+)\((\d+),(\d+)\)$)", std::regex::icase);
  std::smatch m;
  std::string compact;
  for (char ch : s) {
    if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
  }
  if (std::regex_match(compact, m, sdc_re)) {
    return sdc_method(m[1].str(), std::stoi(m[2].str()), std::stoi(m[3].str()));
  }
  MethodSpec spec;
  spec.kind = MethodKind::RungeKutta;
  spec.tableau = builtin_tableau(s).name();
  return spec;
}

}  // namespace imex
