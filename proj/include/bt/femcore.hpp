#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bt/mesh.hpp"
#include "bt/models.hpp"
#include "bt/quadrature.hpp"
#include "bt/xform.hpp"

namespace bt {

inline constexpr double steady = std::numeric_limits<double>::infinity();

enum class DcOperator { none, isotropic, cwd_reference, cwd_physical };
enum class DcDiffusivity { dc_lin, dc_quad, codina };

/// Discontinuity-capturing selection.
struct DCConfig {
  DcOperator op = DcOperator::none;
  DcDiffusivity diffusivity = DcDiffusivity::dc_quad;
  double codina_c = 0.7;
  double grad_floor = 1e-14;

  bool operator==(const DCConfig&) const = default;

  void validate() const {
    if (!(codina_c > 0.0)) throw config_error("femcore", "dc.codina_c must be positive");
    if (!(grad_floor > 0.0)) throw config_error("femcore", "dc.grad_floor must be positive");
  }
};

std::string to_string(DcOperator op);
std::string to_string(DcDiffusivity d);
DcOperator parse_dc_operator(const std::string& s);
DcDiffusivity parse_dc_diffusivity(const std::string& s);

// ---------------------------------------------------------------------------
// Pointwise kernels

/// tau = ((2/dt)^2 + u.G u)^(-1/2); dt = infinity drops the transient term.
template <typename Scalar, int Dim>
Scalar tau(const Vector<Scalar, Dim>& u, const SquareMatrix<Scalar, Dim>& g, double dt) {
  using std::sqrt;
  const Scalar transient = std::isinf(dt) ? Scalar(0) : Scalar(2.0 / dt) * Scalar(2.0 / dt);
  const Scalar denom = transient + u.dot(g * u);
  if (!(denom > Scalar(0))) throw numerical_error("femcore", "tau undefined: steady problem with stagnant element");
  return Scalar(1) / sqrt(denom);
}

/// Shakib diffusivity, linear (|R| / |grad c|_{G^-1}) or quadratic
/// (2 tau R^2 / |grad c|^2_{G^-1}). Returns zero when grad c . G^-1 grad c
/// does not exceed `floor_sq`.
template <typename Scalar, int Dim>
Scalar dc_diffusivity(const Scalar& residual, const Vector<Scalar, Dim>& grad, const SquareMatrix<Scalar, Dim>& g,
                      const Scalar& tau_e, DcDiffusivity kind, const Scalar& floor_sq) {
  using std::abs;
  using std::sqrt;
  const Scalar q = grad.dot(g.ldlt().solve(grad));
  if (!(q > floor_sq)) return Scalar(0);
  switch (kind) {
    case DcDiffusivity::dc_lin:
      return abs(residual) / sqrt(q);
    case DcDiffusivity::dc_quad:
      return Scalar(2) * tau_e * residual * residual / q;
    case DcDiffusivity::codina:
      break;
  }
  throw config_error("femcore", "codina diffusivity needs codina_diffusivity()");
}

/// Codina crosswind diffusivity without physical diffusion (1/Pe = 0):
/// h C |R| / (2 |grad c|).
template <typename Scalar, int Dim>
Scalar codina_diffusivity(const Scalar& residual, const Vector<Scalar, Dim>& grad, const Scalar& h_e, double c,
                          const Scalar& floor_sq) {
  using std::abs;
  using std::sqrt;
  const Scalar q = grad.squaredNorm();
  if (!(q > floor_sq)) return Scalar(0);
  return Scalar(0.5) * h_e * Scalar(c) * abs(residual) / sqrt(q);
}

/// Diffusion direction tensor M of the capturing term nu grad w . M grad c.
///
///   isotropic      M = G^-1 = J J^T
///   cwd_reference  M = J (I - ub ub^T / |ub|^2) J^T,  ub = J^-1 u
///   cwd_physical   M = I - u u^T / |u|^2
///
/// For the reference-frame variant |ub|^2 = u.G u, and M G u = 0. A vanishing
/// velocity falls back to the unprojected tensor.
template <typename Scalar, int Dim>
SquareMatrix<Scalar, Dim> dc_tensor(const Vector<Scalar, Dim>& u, const SquareMatrix<Scalar, Dim>& jacobian,
                                    DcOperator op) {
  using Mat = SquareMatrix<Scalar, Dim>;
  const Scalar tiny = std::numeric_limits<Scalar>::min();
  switch (op) {
    case DcOperator::none:
      return Mat::Zero();
    case DcOperator::isotropic:
      return jacobian * jacobian.transpose();
    case DcOperator::cwd_reference: {
      const Vector<Scalar, Dim> ub = jacobian.inverse() * u;
      Mat p = Mat::Identity();
      const Scalar n2 = ub.squaredNorm();
      if (n2 > tiny) p -= ub * ub.transpose() / n2;
      return jacobian * p * jacobian.transpose();
    }
    case DcOperator::cwd_physical: {
      Mat p = Mat::Identity();
      const Scalar n2 = u.squaredNorm();
      if (n2 > tiny) p -= u * u.transpose() / n2;
      return p;
    }
  }
  return Mat::Zero();
}

// ---------------------------------------------------------------------------
// Element kernels

/// Element-constant reaction data of the discrete residual
///   R = dc/dt + u.grad c + reaction * c - source.
struct ElementCoefficients {
  double source = 0.0;
  double reaction = 0.0;
};

/// Upper-bound: source k mu, no reaction. Identity: source mu nu, reaction
/// mu. Logistic: reaction-free models only.
ElementCoefficients element_coefficients(const Transform& t, const ReactionCoefficients& mean);

template <int Dim>
struct LocalSystem {
  Eigen::Matrix<double, Dim + 1, Dim + 1> matrix = Eigen::Matrix<double, Dim + 1, Dim + 1>::Zero();
  Eigen::Matrix<double, Dim + 1, 1> rhs = Eigen::Matrix<double, Dim + 1, 1>::Zero();
};

/// Element-mean of nodal vectors.
template <int Dim>
Vector<double, Dim> element_mean(const Eigen::Matrix<double, Dim, Dim + 1>& nodal) {
  return nodal.rowwise().mean();
}

/// Galerkin plus SUPG contributions of one element, backward Euler in time
/// when dt is finite. The velocity is interpolated at the quadrature points;
/// tau uses the element-mean velocity.
template <int Dim>
LocalSystem<Dim> supg_element(const ElementGeometry<double, Dim>& geo, const Eigen::Matrix<double, Dim, Dim + 1>& u,
                              const ElementCoefficients& coef, double dt,
                              const Eigen::Matrix<double, Dim + 1, 1>& cbar_old) {
  using Nodal = Eigen::Matrix<double, Dim + 1, 1>;
  const bool transient = !std::isinf(dt);
  const double inv_dt = transient ? 1.0 / dt : 0.0;
  const Vector<double, Dim> ue = element_mean<Dim>(u);
  double tau_e = 0.0;
  if (transient || ue.dot(geo.metric * ue) > 0.0) tau_e = tau<double, Dim>(ue, geo.metric, dt);

  LocalSystem<Dim> out;
  const double w = SimplexQuadrature<Dim>::weight * geo.volume;
  for (const auto& lambda : SimplexQuadrature<Dim>::points()) {
    const Nodal n = lambda;
    const Vector<double, Dim> uq = u * n;
    const Nodal adv = geo.shape_gradients * uq;
    const Nodal op = adv + (inv_dt + coef.reaction) * n;
    const double f = coef.source + inv_dt * n.dot(cbar_old);
    out.matrix += w * (n + tau_e * adv) * op.transpose();
    out.rhs += w * f * (n + tau_e * adv);
  }
  return out;
}

/// Element residual at the centroid for a given nodal field.
template <int Dim>
double element_residual(const ElementGeometry<double, Dim>& geo, const Eigen::Matrix<double, Dim, Dim + 1>& u,
                        const ElementCoefficients& coef, double dt, const Eigen::Matrix<double, Dim + 1, 1>& cbar,
                        const Eigen::Matrix<double, Dim + 1, 1>& cbar_old) {
  const double inv_dt = std::isinf(dt) ? 0.0 : 1.0 / dt;
  const Vector<double, Dim> grad = geo.shape_gradients.transpose() * cbar;
  const double cm = cbar.mean();
  return inv_dt * (cm - cbar_old.mean()) + element_mean<Dim>(u).dot(grad) + coef.reaction * cm - coef.source;
}

/// nu grad N_a . M grad N_b over the element.
template <int Dim>
Eigen::Matrix<double, Dim + 1, Dim + 1> dc_element_matrix(const ElementGeometry<double, Dim>& geo,
                                                          const SquareMatrix<double, Dim>& m, double nu) {
  return nu * geo.volume * geo.shape_gradients * m * geo.shape_gradients.transpose();
}

// ---------------------------------------------------------------------------
// Global assembly

/// Linear system over the free (non-Dirichlet) nodes.
struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::map<int, double> dirichlet;
  std::vector<int> free_nodes;  ///< free index -> node

  /// Full nodal field from a free-node solution.
  ScalarField expand(const Eigen::VectorXd& x, int num_nodes) const;
};

struct AssemblyOptions {
  Transform transform;
  DCConfig dc;
  double dt = steady;
  const ScalarField* lagged = nullptr;    ///< field for the capturing diffusivity
  const ScalarField* previous = nullptr;  ///< previous time level (transient)
  std::map<int, double> dirichlet;        ///< node -> solved-variable value
  int threads = 1;
};

/// Per-element capturing diffusivity evaluated on a lagged field. Elements
/// with sqrt(grad . G^-1 grad) <= grad_floor * max|lagged| get none.
std::vector<double> dc_viscosity(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                                 const AssemblyOptions& opt);

AssembledSystem assemble(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                         const AssemblyOptions& opt);

}  // namespace bt
