#pragma once

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/ellint_rg.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

#include "bt/error.hpp"

namespace bt {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Coefficients of the droplet-type RBC shape equation.
struct MorphologyParams {
  double alpha1 = 5.0;        ///< relaxation rate, s^-1
  double alpha2 = 4.2298e-4;  ///< elongation
  double alpha3 = 4.2298e-4;  ///< rotation

  bool operator==(const MorphologyParams&) const = default;

  void validate() const {
    if (!(alpha1 > 0.0)) throw config_error("morphology", "alpha1 must be positive");
  }
};

/// Right-hand side of the local shape-tensor equation
///
///   dS/dt = -a1 (S - g(S) I) + a2 (E S + S E) + a3 (W S - S W),
///
/// with g(S) = 3 III_S / II_S, E and W the symmetric and antisymmetric parts
/// of grad_u (grad_u(i, j) = du_i/dx_j). g(S) makes the relaxation term
/// volume preserving: tr(S^-1 dS/dt) = 2 a2 tr(E).
template <typename Scalar>
Matrix3<Scalar> morphology_rhs(const Matrix3<Scalar>& s, const Matrix3<Scalar>& grad_u, const MorphologyParams& p) {
  using std::abs;
  const Scalar tr = s.trace();
  const Scalar ii = ((tr * tr) - (s * s).trace()) / Scalar(2);
  if (!(abs(ii) > Scalar(1e-300)) || !(abs(ii) > Scalar(1e-14) * tr * tr))
    throw numerical_error("morphology", "degenerate shape tensor (II_S vanishes)");
  const Scalar g = Scalar(3) * s.determinant() / ii;
  const Matrix3<Scalar> e = (grad_u + grad_u.transpose()) / Scalar(2);
  const Matrix3<Scalar> w = (grad_u - grad_u.transpose()) / Scalar(2);
  return -Scalar(p.alpha1) * (s - g * Matrix3<Scalar>::Identity()) + Scalar(p.alpha2) * (e * s + s * e) +
         Scalar(p.alpha3) * (w * s - s * w);
}

/// Classical RK4 integration with a frozen velocity gradient. The step is
/// shrunk to t_end / ceil(t_end / dt) so the last step lands on t_end.
template <typename Scalar>
Matrix3<Scalar> integrate_local(Matrix3<Scalar> s, const Matrix3<Scalar>& grad_u, double t_end, double dt,
                                const MorphologyParams& p) {
  if (!(dt > 0.0)) throw config_error("morphology", "time step must be positive");
  if (!(t_end >= 0.0)) throw config_error("morphology", "end time must be non-negative");
  if (t_end == 0.0) return s;
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  const Scalar h = Scalar(t_end) / Scalar(steps);
  const Scalar half = h / Scalar(2);
  for (long n = 0; n < steps; ++n) {
    const Matrix3<Scalar> k1 = morphology_rhs<Scalar>(s, grad_u, p);
    const Matrix3<Scalar> k2 = morphology_rhs<Scalar>(s + half * k1, grad_u, p);
    const Matrix3<Scalar> k3 = morphology_rhs<Scalar>(s + half * k2, grad_u, p);
    const Matrix3<Scalar> k4 = morphology_rhs<Scalar>(s + h * k3, grad_u, p);
    s += h / Scalar(6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    s = ((s + s.transpose()) / Scalar(2)).eval();
    if (Eigen::LLT<Matrix3<Scalar>>(s).info() != Eigen::Success)
      throw numerical_error("morphology", "shape tensor lost positive definiteness; reduce the time step");
  }
  return s;
}

/// Principal semi-axes: square roots of the eigenvalues of S, ascending.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> principal_semi_axes(const Matrix3<Scalar>& s) {
  Eigen::SelfAdjointEigenSolver<Matrix3<Scalar>> eig(s, Eigen::EigenvaluesOnly);
  const auto lambda = eig.eigenvalues();
  if (eig.info() != Eigen::Success || !(lambda(0) > Scalar(0)))
    throw numerical_error("morphology", "degenerate shape tensor (not positive definite)");
  return lambda.cwiseSqrt();
}

/// Longest and shortest semi-axis (L, W).
template <typename Scalar>
std::pair<Scalar, Scalar> semi_axes(const Matrix3<Scalar>& s) {
  const auto axes = principal_semi_axes(s);
  return {axes(2), axes(0)};
}

/// D = (L - W) / (L + W).
template <typename Scalar>
Scalar distortion(const Scalar& l, const Scalar& w) {
  if (!(w > Scalar(0)) || l < w) throw numerical_error("morphology", "semi-axes must satisfy L >= W > 0");
  return (l - w) / (l + w);
}

/// sigma_eff = 2 visc a1 D / ((1 - D^2) a2).
template <typename Scalar>
Scalar effective_stress(const Scalar& d, double visc, const MorphologyParams& p) {
  if (!(d < Scalar(1) - Scalar(1e-12)))
    throw numerical_error("morphology", "distortion saturated (D -> 1), effective stress is singular");
  return Scalar(2) * Scalar(visc) * Scalar(p.alpha1) * d / ((Scalar(1) - d * d) * Scalar(p.alpha2));
}

/// Thomsen's approximation of the ellipsoid surface area (p = 1.6075).
template <typename Scalar>
Scalar ellipsoid_area_thomsen(const Scalar& a, const Scalar& b, const Scalar& c) {
  using std::pow;
  const Scalar p(1.6075);
  const Scalar mean = (pow(a * b, p) + pow(a * c, p) + pow(b * c, p)) / Scalar(3);
  return Scalar(4) * boost::math::constants::pi<Scalar>() * pow(mean, Scalar(1) / p);
}

/// Exact ellipsoid surface area, 4 pi a b c R_G(a^-2, b^-2, c^-2).
template <typename Scalar>
Scalar ellipsoid_area_exact(const Scalar& a, const Scalar& b, const Scalar& c) {
  const Scalar one(1);
  return Scalar(4) * boost::math::constants::pi<Scalar>() * a * b * c *
         boost::math::ellint_rg(one / (a * a), one / (b * b), one / (c * c));
}

enum class AreaMethod { thomsen, exact };

/// Surface area strain (A_S - A0) / A0 of the ellipsoid described by S.
template <typename Scalar>
Scalar area_strain(const Matrix3<Scalar>& s, double a0, AreaMethod method = AreaMethod::thomsen) {
  if (!(a0 > 0.0)) throw config_error("morphology", "reference area must be positive");
  const auto axes = principal_semi_axes(s);
  const Scalar area = method == AreaMethod::thomsen ? ellipsoid_area_thomsen(axes(0), axes(1), axes(2))
                                                    : ellipsoid_area_exact(axes(0), axes(1), axes(2));
  return (area - Scalar(a0)) / Scalar(a0);
}

}  // namespace bt
