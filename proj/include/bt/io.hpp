#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bt/mesh.hpp"
#include "bt/postproc.hpp"

namespace bt {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Reads "node_id,value[,value_y[,value_z]]" rows, one per mesh node in node
/// order, into a components x num_nodes matrix. Node ids must be strictly
/// increasing; a row count other than num_nodes is an error. `what` names the
/// field in diagnostics ("<what> not found").
Eigen::MatrixXd read_nodal_field(const std::filesystem::path& path, int num_nodes, int components,
                                 const std::string& what);
void write_nodal_field(const std::filesystem::path& path, const Eigen::MatrixXd& values);

/// Named nodal data attached to a mesh, in insertion order.
struct VtkData {
  Mesh mesh;
  std::vector<std::pair<std::string, ScalarField>> scalars;
  std::vector<std::pair<std::string, VectorField>> vectors;

  const ScalarField& scalar(const std::string& name) const;
};

/// Legacy VTK ASCII unstructured grid (cell type 5 or 10) with point data.
/// Vectors of a 2D mesh are padded with a zero z component.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, ScalarField>>& scalars,
               const std::vector<std::pair<std::string, VectorField>>& vectors = {});
void write_vtk(const std::filesystem::path& path, const VtkData& data);
/// Reads files in the layout written by write_vtk. A grid made of triangles
/// whose points all have z = 0 is returned as a 2D mesh.
VtkData read_vtk(const std::filesystem::path& path);

/// "quantity,value" rows.
void write_key_values(const std::filesystem::path& path, const std::vector<std::pair<std::string, double>>& rows);
/// Header "s,value"; absent samples are written as "nan".
void write_line_csv(const std::filesystem::path& path, const std::vector<LineSample>& samples);

}  // namespace bt
