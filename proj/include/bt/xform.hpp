#pragma once

#include <boost/math/special_functions/next.hpp>

#include <cmath>
#include <string>

#include "bt/error.hpp"

namespace bt {

enum class TransformKind { identity, upper_bound, logistic };

/// Change of variable between the physical concentration c and the solved
/// variable cbar.
///
///   upper_bound: c = nu (1 - exp(-cbar/k))        c < nu
///   logistic:    c = nu / (1 + exp(-cbar/k))      0 < c < nu
struct Transform {
  TransformKind kind = TransformKind::upper_bound;
  double nu = 1.0;
  double k = 1.0;

  void validate() const {
    if (!(nu > 0.0)) throw config_error("xform", "transform.nu must be positive");
    if (!(k > 0.0)) throw config_error("xform", "transform.k must be positive");
  }
};

/// Physical concentration for a solved value. Results are pinned inside the
/// open admissible interval at machine level, so the upper-bound transform
/// never returns nu itself even when exp(-cbar/k) underflows.
template <typename Scalar>
Scalar to_physical(const Transform& t, const Scalar& cbar) {
  using std::exp;
  using std::expm1;
  const Scalar nu(t.nu), k(t.k);
  switch (t.kind) {
    case TransformKind::identity:
      return cbar;
    case TransformKind::upper_bound: {
      const Scalar c = -nu * expm1(-cbar / k);
      const Scalar top = boost::math::float_prior(nu);
      return c < top ? c : top;
    }
    case TransformKind::logistic: {
      Scalar c = nu / (Scalar(1) + exp(-cbar / k));
      const Scalar top = boost::math::float_prior(nu);
      const Scalar bottom = boost::math::float_next(Scalar(0));
      if (c > top) c = top;
      if (c < bottom) c = bottom;
      return c;
    }
  }
  return cbar;
}

/// Inverse of to_physical on the open admissible range.
template <typename Scalar>
Scalar to_transformed(const Transform& t, const Scalar& c) {
  using std::log;
  using std::log1p;
  const Scalar nu(t.nu), k(t.k);
  switch (t.kind) {
    case TransformKind::identity:
      return c;
    case TransformKind::upper_bound:
      if (!(c < nu)) throw numerical_error("xform", "concentration must be below nu for the upper-bound transform");
      return -k * log1p(-c / nu);
    case TransformKind::logistic:
      if (!(c > Scalar(0) && c < nu))
        throw numerical_error("xform", "concentration must lie strictly between 0 and nu for the logistic transform");
      return k * log(c / (nu - c));
  }
  return c;
}

/// Constant right-hand side of the transformed equation: k*mu for the upper
/// bound transform. The identity transform keeps the reaction form, so mu is
/// returned unchanged and femcore applies mu (nu - c). The logistic transform
/// only admits reaction-free models.
inline double transformed_source(const Transform& t, double mu_r) {
  switch (t.kind) {
    case TransformKind::upper_bound:
      return t.k * mu_r;
    case TransformKind::identity:
      return mu_r;
    case TransformKind::logistic:
      if (mu_r != 0.0)
        throw numerical_error("xform", "logistic transform is unsupported for models with a reaction (mu != 0)");
      return 0.0;
  }
  return 0.0;
}

std::string to_string(TransformKind kind);
TransformKind parse_transform_kind(const std::string& s);

}  // namespace bt
