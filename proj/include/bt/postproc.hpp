#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "bt/mesh.hpp"

namespace bt {

struct FieldStats {
  double min = 0.0;
  double max = 0.0;
  int negative_nodes = 0;
  /// Volume share of elements touching at least one negative node.
  double negative_volume_fraction = 0.0;
};

FieldStats field_stats(const Mesh& mesh, const ScalarField& field);

struct LineSample {
  double s = 0.0;  ///< arc length from the start point
  Eigen::VectorXd point;
  std::optional<double> value;  ///< empty outside the mesh
};

/// n uniformly spaced samples on [p0, p1] (endpoints included for n > 1),
/// interpolated with the P1 shape functions of the containing element.
std::vector<LineSample> sample_line(const Mesh& mesh, const ScalarField& field, const Eigen::VectorXd& p0,
                                    const Eigen::VectorXd& p1, int n);

/// Flux-weighted mean of `field` over facets carrying `marker`:
/// int (u.n) f / int (u.n). Products of the linear traces are integrated exactly.
double outflow_average(const Mesh& mesh, const ScalarField& field, const VectorField& u, const std::string& marker);

/// Plasma free hemoglobin increase over a loop test, mg/dL.
/// q in L/min, t in min, v_loop in mL.
double delta_phb(double ih_out, double hb, double hct, double q, double t, double v_loop);

inline constexpr double default_hb = 15000.0;  ///< mg/dL

}  // namespace bt
