#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bt/error.hpp"

namespace bt {

/// Reaction coefficients of the saturating residual form
///   (d/dt + u.grad) c = mu_r (nu_r - c).
struct ReactionCoefficients {
  double mu_r = 0.0;  ///< s^-1
  double nu_r = 1.0;  ///< saturation value
};

/// IH = A sigma^alpha t^beta.
struct PowerLawParams {
  double A = 1.0;
  double alpha = 2.0;
  double beta = 1.0;

  void validate() const;
  bool operator==(const PowerLawParams&) const = default;
};

/// Named parameter sets: giersiepen, song, zhang, ding_human, ding_porcine.
PowerLawParams powerlaw_preset(const std::string& name);
const std::vector<std::string>& powerlaw_preset_names();

/// E = sym(grad_u), II_E = ((tr E)^2 - tr(E^2)) / 2.
template <typename Derived>
typename Derived::Scalar second_invariant_strain_rate(const Eigen::MatrixBase<Derived>& grad_u) {
  using Scalar = typename Derived::Scalar;
  const auto e = ((grad_u + grad_u.transpose()) / Scalar(2)).eval();
  const Scalar tr = e.trace();
  return (tr * tr - (e * e).trace()) / Scalar(2);
}

/// Scalar shear stress sigma_s = 2 visc sqrt(-II_E). `grad_u(i, j)` is
/// du_i/dx_j; only its symmetric part matters.
template <typename Derived>
typename Derived::Scalar strain_rate_invariant_stress(const Eigen::MatrixBase<Derived>& grad_u,
                                                      typename Derived::Scalar visc) {
  using Scalar = typename Derived::Scalar;
  using std::max;
  using std::sqrt;
  const Scalar ii = second_invariant_strain_rate(grad_u);
  return Scalar(2) * visc * sqrt(max(Scalar(0), -ii));
}

/// Fluid shear rate G_f = 2 sqrt(-II_E), so that sigma_s = visc * G_f.
template <typename Derived>
typename Derived::Scalar shear_rate(const Eigen::MatrixBase<Derived>& grad_u) {
  using Scalar = typename Derived::Scalar;
  using std::max;
  using std::sqrt;
  return Scalar(2) * sqrt(max(Scalar(0), -second_invariant_strain_rate(grad_u)));
}

/// mu_r = (A sigma^alpha)^(1/beta), nu_r = 1.
ReactionCoefficients powerlaw_coefficients(double sigma_s, const PowerLawParams& p);

/// Total pore area A_p as a function of the area strain. Zero at or below
/// the threshold strain and nondecreasing above it.
class PoreAreaModel {
 public:
  /// A_p = c_p max(0, eps - eps0).
  static PoreAreaModel linear(double c_p);
  /// Piecewise-linear interpolation of (strain, area) samples, held constant
  /// beyond the last sample and forced to zero at or below eps0.
  static PoreAreaModel tabulated(std::vector<double> strain, std::vector<double> area);
  /// Reads "strain,area" rows.
  static PoreAreaModel from_csv(const std::filesystem::path& path);

  double operator()(double eps, double eps0) const;

  bool is_tabulated() const { return !strain_.empty(); }
  double slope() const { return c_p_; }

 private:
  double c_p_ = 0.0;
  std::vector<double> strain_;
  std::vector<double> area_;
};

struct PoreModelParams {
  double h = 4.48e-8;   ///< kappa = h G_f^k_exp
  double k_exp = 1.31;
  double hct = 0.36;
  double v_rbc = 9.0e-11;  ///< cm^3
  double eps0 = 0.0016;
  PoreAreaModel pore_area = PoreAreaModel::linear(1.0e-6);

  void validate() const;
};

/// kappa = h G_f^k.
double mass_transfer(double shear_rate, const PoreModelParams& p);

/// mu_r = kappa / (1 - Hct) * A_p(eps) / V_RBC, nu_r = 1 - Hct.
ReactionCoefficients pore_coefficients(double eps, double shear_rate, const PoreModelParams& p);

/// Drug release model: no reaction, saturation at the stent charge c_s0.
inline ReactionCoefficients drug_coefficients(double c_s0) { return {0.0, c_s0}; }

/// IH = l^beta. Negative l is zeroed when `clamp_negative` is set; otherwise
/// it is an error unless beta is an integer.
double ih_from_linearized(double l, double beta, bool clamp_negative);

}  // namespace bt
