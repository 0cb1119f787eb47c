#include "bt/postproc.hpp"

#include <algorithm>
#include <cmath>

namespace bt {

FieldStats field_stats(const Mesh& mesh, const ScalarField& field) {
  if (field.size() != mesh.num_nodes()) throw numerical_error("postproc", "field does not match the mesh");
  FieldStats s;
  if (field.size() == 0) return s;
  s.min = field.minCoeff();
  s.max = field.maxCoeff();
  s.negative_nodes = static_cast<int>((field.array() < 0.0).count());
  double neg = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    bool any = false;
    for (int a = 0; a < mesh.elements().rows(); ++a) any = any || field[mesh.elements()(a, e)] < 0.0;
    if (any) neg += mesh.element_volume(e);
  }
  const double total = mesh.total_volume();
  s.negative_volume_fraction = total > 0.0 ? neg / total : 0.0;
  return s;
}

namespace {

// Barycentric coordinates of x in element e.
Eigen::VectorXd barycentric(const Mesh& mesh, int e, const Eigen::VectorXd& x) {
  const int d = mesh.dim();
  const auto& nodes = mesh.nodes();
  const auto& el = mesh.elements();
  Eigen::MatrixXd t(d, d);
  for (int k = 0; k < d; ++k) t.col(k) = nodes.col(el(k + 1, e)) - nodes.col(el(0, e));
  const Eigen::VectorXd tail = t.partialPivLu().solve(x - nodes.col(el(0, e)));
  Eigen::VectorXd lambda(d + 1);
  lambda[0] = 1.0 - tail.sum();
  lambda.tail(d) = tail;
  return lambda;
}

}  // namespace

std::vector<LineSample> sample_line(const Mesh& mesh, const ScalarField& field, const Eigen::VectorXd& p0,
                                    const Eigen::VectorXd& p1, int n) {
  const int d = mesh.dim();
  if (field.size() != mesh.num_nodes()) throw numerical_error("postproc", "field does not match the mesh");
  if (p0.size() != d || p1.size() != d) throw config_error("postproc", "line end points must match the mesh dimension");
  if (n < 1) throw config_error("postproc", "line needs at least one sample");

  const auto& nodes = mesh.nodes();
  const auto& el = mesh.elements();
  const int ne = mesh.num_elements();
  Eigen::MatrixXd lo(d, ne), hi(d, ne);
  for (int e = 0; e < ne; ++e) {
    lo.col(e) = nodes.col(el(0, e));
    hi.col(e) = nodes.col(el(0, e));
    for (int a = 1; a <= d; ++a) {
      lo.col(e) = lo.col(e).cwiseMin(nodes.col(el(a, e)));
      hi.col(e) = hi.col(e).cwiseMax(nodes.col(el(a, e)));
    }
  }
  const double extent = (nodes.rowwise().maxCoeff() - nodes.rowwise().minCoeff()).maxCoeff();
  const double box_tol = 1e-12 * extent;
  const double bary_tol = 1e-10;

  std::vector<LineSample> out(n);
  const double length = (p1 - p0).norm();
  bool any = false;
  for (int k = 0; k < n; ++k) {
    const double f = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    auto& smp = out[k];
    smp.point = p0 + f * (p1 - p0);
    smp.s = f * length;
    for (int e = 0; e < ne; ++e) {
      if ((smp.point - lo.col(e)).minCoeff() < -box_tol || (hi.col(e) - smp.point).minCoeff() < -box_tol) continue;
      const Eigen::VectorXd lambda = barycentric(mesh, e, smp.point);
      if (lambda.minCoeff() < -bary_tol) continue;
      double v = 0.0;
      for (int a = 0; a <= d; ++a) v += lambda[a] * field[el(a, e)];
      smp.value = v;
      any = true;
      break;
    }
  }
  if (!any) throw config_error("postproc", "sample line does not intersect the mesh");
  return out;
}

double outflow_average(const Mesh& mesh, const ScalarField& field, const VectorField& u, const std::string& marker) {
  if (field.size() != mesh.num_nodes()) throw numerical_error("postproc", "field does not match the mesh");
  if (u.rows() != mesh.dim() || u.cols() != mesh.num_nodes())
    throw numerical_error("postproc", "velocity does not match the mesh");
  double flux = 0.0, weighted = 0.0, magnitude = 0.0;
  bool found = false;
  const auto& facets = mesh.facets();
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (facets[f].marker != marker) continue;
    found = true;
    const auto geo = facet_geometry(mesh, static_cast<int>(f));
    const auto& fn = facets[f].nodes;
    const int m = static_cast<int>(fn.size());
    // int over a k-simplex of g*h (both linear) = |F| / ((k+1)(k+2)) (sum g_i h_i + sum g sum h)
    double un_sum = 0.0, f_sum = 0.0, prod = 0.0, abs_sum = 0.0;
    for (int a = 0; a < m; ++a) {
      const double un = u.col(fn[a]).dot(geo.normal);
      un_sum += un;
      abs_sum += std::abs(un);
      f_sum += field[fn[a]];
      prod += un * field[fn[a]];
    }
    const double k = m - 1;
    weighted += geo.measure / ((k + 1) * (k + 2)) * (prod + un_sum * f_sum);
    flux += geo.measure * un_sum / m;
    magnitude += geo.measure * abs_sum / m;
  }
  if (!found) throw config_error("postproc", "no boundary facets carry marker '" + marker + "'");
  if (!(flux > 1e-12 * magnitude) || flux <= 0.0)
    throw numerical_error("postproc", "zero or negative net flux through '" + marker + "'");
  return weighted / flux;
}

double delta_phb(double ih_out, double hb, double hct, double q, double t, double v_loop) {
  if (!(hct > 0.0 && hct < 1.0)) throw config_error("postproc", "hematocrit must lie in (0, 1)");
  if (!(v_loop > 0.0)) throw config_error("postproc", "loop volume must be positive");
  const double q_ml = q * 1000.0;
  return ih_out * hb / (1.0 - hct) * (q_ml * t) / v_loop;
}

}  // namespace bt
