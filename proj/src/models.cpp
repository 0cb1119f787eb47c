#include "bt/models.hpp"

#include <algorithm>
#include <map>

#include "bt/csv.hpp"

namespace bt {

void PowerLawParams::validate() const {
  if (!(A > 0.0)) throw config_error("models", "power law A must be positive");
  if (!(alpha > 0.0)) throw config_error("models", "power law alpha must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw config_error("models", "power law beta must lie in (0, 1]");
}

namespace {
const std::map<std::string, PowerLawParams>& preset_table() {
  static const std::map<std::string, PowerLawParams> table{
      {"giersiepen", {3.62e-7, 2.416, 0.785}},
      {"song", {1.8e-8, 1.991, 0.765}},
      {"zhang", {1.228e-7, 1.9918, 0.6606}},
      {"ding_human", {3.458e-8, 2.0639, 0.2777}},
      {"ding_porcine", {6.701e-6, 1.0981, 0.2778}},
  };
  return table;
}
}  // namespace

PowerLawParams powerlaw_preset(const std::string& name) {
  auto it = preset_table().find(name);
  if (it == preset_table().end()) throw config_error("models", "unknown power-law preset '" + name + "'");
  return it->second;
}

const std::vector<std::string>& powerlaw_preset_names() {
  static const std::vector<std::string> names{"giersiepen", "song", "zhang", "ding_human", "ding_porcine"};
  return names;
}

ReactionCoefficients powerlaw_coefficients(double sigma_s, const PowerLawParams& p) {
  if (sigma_s < 0.0) throw numerical_error("models", "shear stress must be non-negative");
  if (sigma_s == 0.0) return {0.0, 1.0};
  return {std::pow(p.A * std::pow(sigma_s, p.alpha), 1.0 / p.beta), 1.0};
}

PoreAreaModel PoreAreaModel::linear(double c_p) {
  if (!(c_p >= 0.0)) throw config_error("models", "pore area slope must be non-negative");
  PoreAreaModel m;
  m.c_p_ = c_p;
  return m;
}

PoreAreaModel PoreAreaModel::tabulated(std::vector<double> strain, std::vector<double> area) {
  if (strain.empty() || strain.size() != area.size())
    throw config_error("models", "pore area table needs matching, non-empty strain and area columns");
  for (std::size_t i = 1; i < strain.size(); ++i) {
    if (!(strain[i] > strain[i - 1])) throw config_error("models", "pore area table strains must increase");
    if (area[i] < area[i - 1]) throw config_error("models", "pore area table must be nondecreasing");
  }
  if (area.front() < 0.0) throw config_error("models", "pore area must be non-negative");
  PoreAreaModel m;
  m.strain_ = std::move(strain);
  m.area_ = std::move(area);
  return m;
}

PoreAreaModel PoreAreaModel::from_csv(const std::filesystem::path& path) {
  std::vector<double> s, a;
  for (const auto& r : read_csv_rows(path)) {
    s.push_back(parse_double(r, 0));
    a.push_back(parse_double(r, 1));
  }
  return tabulated(std::move(s), std::move(a));
}

double PoreAreaModel::operator()(double eps, double eps0) const {
  if (eps <= eps0) return 0.0;
  if (strain_.empty()) return c_p_ * (eps - eps0);
  if (eps <= strain_.front()) return area_.front();
  if (eps >= strain_.back()) return area_.back();
  const auto hi = std::upper_bound(strain_.begin(), strain_.end(), eps) - strain_.begin();
  const auto lo = hi - 1;
  const double w = (eps - strain_[lo]) / (strain_[hi] - strain_[lo]);
  return (1.0 - w) * area_[lo] + w * area_[hi];
}

void PoreModelParams::validate() const {
  if (!(hct > 0.0 && hct < 1.0)) throw config_error("models", "hematocrit must lie in (0, 1)");
  if (!(h >= 0.0)) throw config_error("models", "mass transfer coefficient h must be non-negative");
  if (!(v_rbc > 0.0)) throw config_error("models", "RBC volume must be positive");
}

double mass_transfer(double shear_rate, const PoreModelParams& p) {
  if (shear_rate < 0.0) throw numerical_error("models", "shear rate must be non-negative");
  if (shear_rate == 0.0) return 0.0;
  return p.h * std::pow(shear_rate, p.k_exp);
}

ReactionCoefficients pore_coefficients(double eps, double shear_rate, const PoreModelParams& p) {
  if (eps < -1.0) throw numerical_error("models", "area strain below -1");
  const double area = p.pore_area(eps, p.eps0);
  const double kappa = mass_transfer(shear_rate, p);
  return {kappa / (1.0 - p.hct) * area / p.v_rbc, 1.0 - p.hct};
}

double ih_from_linearized(double l, double beta, bool clamp_negative) {
  if (l < 0.0) {
    if (clamp_negative) return 0.0;
    if (beta != std::floor(beta))
      throw numerical_error("models", "negative linearized index with non-integer beta gives a complex IH");
  }
  return std::pow(l, beta);
}

}  // namespace bt
