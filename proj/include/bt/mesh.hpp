#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "bt/error.hpp"

namespace bt {

/// Nodal scalar values, one entry per mesh node.
using ScalarField = Eigen::VectorXd;
/// Nodal vectors stored column-wise: dim x num_nodes.
using VectorField = Eigen::MatrixXd;

/// A boundary facet (segment in 2D, triangle in 3D) carrying a marker name.
struct BoundaryFacet {
  std::vector<int> nodes;
  std::string marker;
  int element = -1;  ///< owning element, filled in by Mesh
};

/// Unstructured mesh of linear simplices (triangles or tetrahedra).
///
/// Construction validates the mesh: node indices in range, positive element
/// volume (negatively oriented elements are reordered, degenerate ones are
/// rejected), and every boundary facet a face of exactly one element. When no
/// facets are supplied the full boundary is extracted with marker "boundary".
class Mesh {
 public:
  Mesh() = default;
  Mesh(Eigen::MatrixXd nodes, Eigen::MatrixXi elements, std::vector<BoundaryFacet> facets = {});

  int dim() const { return static_cast<int>(nodes_.rows()); }
  int num_nodes() const { return static_cast<int>(nodes_.cols()); }
  int num_elements() const { return static_cast<int>(elements_.cols()); }

  /// Coordinates, dim x num_nodes.
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  /// Connectivity, (dim+1) x num_elements.
  const Eigen::MatrixXi& elements() const { return elements_; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }

  Eigen::VectorXd node(int i) const { return nodes_.col(i); }
  double element_volume(int e) const { return volumes_[e]; }
  double total_volume() const;

  /// Distinct facet markers in first-seen order.
  std::vector<std::string> markers() const;

 private:
  Eigen::MatrixXd nodes_;
  Eigen::MatrixXi elements_;
  std::vector<BoundaryFacet> facets_;
  std::vector<double> volumes_;
};

enum class MeshFormat { gmsh_ascii, native_csv };

/// Reads a Gmsh MSH 2.2 ASCII file, or a directory holding nodes.csv,
/// elements.csv and optionally facets.csv.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format);

/// Writes the native CSV triple into `dir` (created if needed).
void save_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Reference-element geometry

template <typename Scalar, int Dim>
using SquareMatrix = Eigen::Matrix<Scalar, Dim, Dim>;
template <typename Scalar, int Dim>
using Vector = Eigen::Matrix<Scalar, Dim, 1>;

/// Vertices of the symmetric reference simplex (unit edge), one per column:
/// the equilateral triangle in 2D, the regular tetrahedron in 3D.
template <typename Scalar, int Dim>
Eigen::Matrix<Scalar, Dim, Dim + 1> symmetric_simplex_vertices() {
  static_assert(Dim == 2 || Dim == 3);
  Eigen::Matrix<Scalar, Dim, Dim + 1> v = Eigen::Matrix<Scalar, Dim, Dim + 1>::Zero();
  using std::sqrt;
  v(0, 1) = Scalar(1);
  v(0, 2) = Scalar(1) / Scalar(2);
  v(1, 2) = sqrt(Scalar(3)) / Scalar(2);
  if constexpr (Dim == 3) {
    v(0, 3) = Scalar(1) / Scalar(2);
    v(1, 3) = sqrt(Scalar(3)) / Scalar(6);
    v(2, 3) = sqrt(Scalar(2) / Scalar(3));
  }
  return v;
}

/// Linear map taking the symmetric reference simplex onto the unit simplex.
template <typename Scalar, int Dim>
SquareMatrix<Scalar, Dim> symmetric_to_unit_simplex() {
  const auto v = symmetric_simplex_vertices<Scalar, Dim>();
  SquareMatrix<Scalar, Dim> b = v.template rightCols<Dim>();
  return b.inverse();
}

/// Jacobian, covariant metric and measure of one linear simplex, all with
/// respect to the symmetric reference simplex.
template <typename Scalar, int Dim>
struct ElementGeometry {
  SquareMatrix<Scalar, Dim> jacobian;          ///< dx/dxi
  SquareMatrix<Scalar, Dim> inverse_jacobian;  ///< dxi/dx
  SquareMatrix<Scalar, Dim> metric;            ///< G = J^-T J^-1
  Scalar volume;
  /// Gradients of the P1 basis functions, one row per vertex.
  Eigen::Matrix<Scalar, Dim + 1, Dim> shape_gradients;
};

/// Geometry from vertex coordinates (one column per vertex).
template <typename Scalar, int Dim>
ElementGeometry<Scalar, Dim> element_geometry(const Eigen::Matrix<Scalar, Dim, Dim + 1>& x) {
  SquareMatrix<Scalar, Dim> jstd;
  Scalar scale(0);
  for (int a = 0; a < Dim; ++a) {
    jstd.col(a) = x.col(a + 1) - x.col(0);
    using std::max;
    scale = max(scale, Scalar(jstd.col(a).norm()));
  }
  const Scalar det = jstd.determinant();
  using std::abs;
  using std::pow;
  if (!(abs(det) > Scalar(1e-14) * pow(scale, Dim)) || !(det > Scalar(0))) {
    throw numerical_error("mesh", "singular or inverted element Jacobian");
  }

  ElementGeometry<Scalar, Dim> g;
  g.jacobian = jstd * symmetric_to_unit_simplex<Scalar, Dim>();
  g.inverse_jacobian = g.jacobian.inverse();
  g.metric = g.inverse_jacobian.transpose() * g.inverse_jacobian;
  g.volume = det / Scalar(Dim == 2 ? 2 : 6);

  const SquareMatrix<Scalar, Dim> jstd_inv = jstd.inverse();
  Eigen::Matrix<Scalar, Dim + 1, Dim> dn_dxi = Eigen::Matrix<Scalar, Dim + 1, Dim>::Zero();
  dn_dxi.row(0).setConstant(Scalar(-1));
  dn_dxi.template bottomRows<Dim>().setIdentity();
  g.shape_gradients = dn_dxi * jstd_inv;
  return g;
}

/// Vertex coordinates of element `e`, one column per vertex.
template <int Dim>
Eigen::Matrix<double, Dim, Dim + 1> element_vertices(const Mesh& mesh, int e) {
  Eigen::Matrix<double, Dim, Dim + 1> x;
  for (int a = 0; a <= Dim; ++a) x.col(a) = mesh.nodes().col(mesh.elements()(a, e));
  return x;
}

template <int Dim>
ElementGeometry<double, Dim> element_geometry(const Mesh& mesh, int e) {
  return element_geometry<double, Dim>(element_vertices<Dim>(mesh, e));
}

/// Longest edge of element `e`.
double longest_edge(const Mesh& mesh, int e);

/// Outward unit normal and measure of boundary facet `f`.
struct FacetGeometry {
  Eigen::VectorXd normal;
  double measure = 0.0;
};
FacetGeometry facet_geometry(const Mesh& mesh, int f);

/// Nodes of boundary facets whose facet-averaged u.n is negative.
std::set<int> inflow_nodes(const Mesh& mesh, const VectorField& u);

}  // namespace bt
