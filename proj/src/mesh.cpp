#include "bt/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "bt/csv.hpp"

namespace bt {
namespace {

using FaceKey = std::vector<int>;

FaceKey sorted_face(std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

// Faces of element e as node lists (face i is opposite vertex i).
std::vector<std::vector<int>> element_faces(const Eigen::MatrixXi& elements, int e) {
  const int n = static_cast<int>(elements.rows());
  std::vector<std::vector<int>> faces;
  for (int skip = 0; skip < n; ++skip) {
    std::vector<int> f;
    for (int a = 0; a < n; ++a)
      if (a != skip) f.push_back(elements(a, e));
    faces.push_back(std::move(f));
  }
  return faces;
}

double signed_measure(const Eigen::MatrixXd& nodes, const Eigen::MatrixXi& elements, int e) {
  const int d = static_cast<int>(nodes.rows());
  Eigen::MatrixXd j(d, d);
  for (int a = 0; a < d; ++a) j.col(a) = nodes.col(elements(a + 1, e)) - nodes.col(elements(0, e));
  return j.determinant() / (d == 2 ? 2.0 : 6.0);
}

}  // namespace

Mesh::Mesh(Eigen::MatrixXd nodes, Eigen::MatrixXi elements, std::vector<BoundaryFacet> facets)
    : nodes_(std::move(nodes)), elements_(std::move(elements)), facets_(std::move(facets)) {
  const int d = dim();
  if (d != 2 && d != 3) throw io_error("mesh", "mesh dimension must be 2 or 3");
  if (elements_.rows() != d + 1) throw io_error("mesh", "elements must have dim+1 nodes");
  if (num_elements() == 0) throw io_error("mesh", "mesh has no elements");

  volumes_.resize(num_elements());
  for (int e = 0; e < num_elements(); ++e) {
    double h = 0.0;
    for (int a = 0; a <= d; ++a) {
      const int i = elements_(a, e);
      if (i < 0 || i >= num_nodes())
        throw io_error("mesh", "element " + std::to_string(e) + " references missing node");
    }
    for (int a = 1; a <= d; ++a)
      h = std::max(h, (nodes_.col(elements_(a, e)) - nodes_.col(elements_(0, e))).norm());
    double vol = signed_measure(nodes_, elements_, e);
    if (vol < 0.0) {
      std::swap(elements_(d - 1, e), elements_(d, e));
      vol = -vol;
    }
    if (!(vol > 1e-14 * std::pow(h, d)))
      throw numerical_error("mesh", "inverted or degenerate element " + std::to_string(e));
    volumes_[e] = vol;
  }

  std::map<FaceKey, std::pair<int, int>> face_owner;  // face -> (count, element)
  for (int e = 0; e < num_elements(); ++e) {
    for (auto& f : element_faces(elements_, e)) {
      auto& slot = face_owner[sorted_face(f)];
      ++slot.first;
      slot.second = e;
    }
  }

  if (facets_.empty()) {
    for (int e = 0; e < num_elements(); ++e) {
      for (auto& f : element_faces(elements_, e)) {
        if (face_owner.at(sorted_face(f)).first == 1) facets_.push_back({f, "boundary", e});
      }
    }
  } else {
    for (auto& facet : facets_) {
      if (static_cast<int>(facet.nodes.size()) != d)
        throw io_error("mesh", "boundary facet must have " + std::to_string(d) + " nodes");
      auto it = face_owner.find(sorted_face(facet.nodes));
      if (it == face_owner.end() || it->second.first != 1)
        throw io_error("mesh", "facet '" + facet.marker + "' is not a boundary face of exactly one element");
      facet.element = it->second.second;
    }
  }
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (double x : volumes_) v += x;
  return v;
}

std::vector<std::string> Mesh::markers() const {
  std::vector<std::string> out;
  for (const auto& f : facets_)
    if (std::find(out.begin(), out.end(), f.marker) == out.end()) out.push_back(f.marker);
  return out;
}

double longest_edge(const Mesh& mesh, int e) {
  const int n = mesh.dim() + 1;
  double h = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      h = std::max(h, (mesh.nodes().col(mesh.elements()(a, e)) - mesh.nodes().col(mesh.elements()(b, e))).norm());
  return h;
}

FacetGeometry facet_geometry(const Mesh& mesh, int f) {
  const auto& facet = mesh.facets()[f];
  const auto& x = mesh.nodes();
  FacetGeometry g;
  if (mesh.dim() == 2) {
    const Eigen::Vector2d t = x.col(facet.nodes[1]) - x.col(facet.nodes[0]);
    g.measure = t.norm();
    g.normal = Eigen::Vector2d(t.y(), -t.x()) / g.measure;
  } else {
    const Eigen::Vector3d a = x.col(facet.nodes[1]) - x.col(facet.nodes[0]);
    const Eigen::Vector3d b = x.col(facet.nodes[2]) - x.col(facet.nodes[0]);
    const Eigen::Vector3d c = a.cross(b);
    g.measure = 0.5 * c.norm();
    g.normal = c.normalized();
  }
  // Orient away from the owning element's centroid.
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(mesh.dim());
  for (int a = 0; a <= mesh.dim(); ++a) centroid += x.col(mesh.elements()(a, facet.element));
  centroid /= mesh.dim() + 1;
  if (g.normal.dot(x.col(facet.nodes[0]) - centroid) < 0.0) g.normal = -g.normal;
  return g;
}

std::set<int> inflow_nodes(const Mesh& mesh, const VectorField& u) {
  if (u.rows() != mesh.dim() || u.cols() != mesh.num_nodes())
    throw numerical_error("mesh", "velocity field does not match mesh");
  std::set<int> out;
  for (int f = 0; f < static_cast<int>(mesh.facets().size()); ++f) {
    const auto& facet = mesh.facets()[f];
    Eigen::VectorXd ubar = Eigen::VectorXd::Zero(mesh.dim());
    for (int n : facet.nodes) ubar += u.col(n);
    ubar /= static_cast<double>(facet.nodes.size());
    const double un = ubar.dot(facet_geometry(mesh, f).normal);
    if (un < -1e-12 * ubar.norm()) out.insert(facet.nodes.begin(), facet.nodes.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Readers

namespace {

Mesh load_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("mesh", "cannot open " + path.string());

  std::unordered_map<long, int> node_index;
  std::vector<Eigen::Vector3d> coords;
  std::map<int, std::string> physical_names;
  struct RawElement {
    int type;
    int tag;
    std::vector<long> nodes;
  };
  std::vector<RawElement> raw;
  int line_no = 0;
  std::string line;

  auto fail = [&](const std::string& msg) {
    return io_error("mesh", path.filename().string() + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw fail("unexpected end of file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  bool saw_format = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      std::istringstream s(next_line());
      double version = 0;
      int file_type = -1;
      s >> version >> file_type;
      if (!s || version < 2.0 || version >= 3.0) throw fail("only MSH 2.x is supported");
      if (file_type != 0) throw fail("only ASCII MSH is supported");
      saw_format = true;
      next_line();
    } else if (line == "$PhysicalNames") {
      int n = 0;
      std::istringstream(next_line()) >> n;
      for (int i = 0; i < n; ++i) {
        std::istringstream s(next_line());
        int dim = 0, tag = 0;
        std::string name;
        s >> dim >> tag;
        std::getline(s, name);
        auto q0 = name.find('"'), q1 = name.rfind('"');
        if (q0 == std::string::npos || q1 == q0) throw fail("malformed physical name");
        physical_names[tag] = name.substr(q0 + 1, q1 - q0 - 1);
      }
      next_line();
    } else if (line == "$Nodes") {
      long n = -1;
      std::istringstream(next_line()) >> n;
      if (n < 0) throw fail("bad node count");
      for (long i = 0; i < n; ++i) {
        std::istringstream s(next_line());
        long id;
        Eigen::Vector3d x;
        s >> id >> x[0] >> x[1] >> x[2];
        if (!s) throw fail("malformed node line");
        node_index[id] = static_cast<int>(coords.size());
        coords.push_back(x);
      }
      if (next_line() != "$EndNodes") throw fail("expected $EndNodes");
    } else if (line == "$Elements") {
      long n = -1;
      std::istringstream(next_line()) >> n;
      if (n < 0) throw fail("bad element count");
      for (long i = 0; i < n; ++i) {
        std::istringstream s(next_line());
        long id;
        int type, ntags;
        s >> id >> type >> ntags;
        if (!s || ntags < 0) throw fail("malformed element line");
        std::vector<int> tags(ntags);
        for (auto& t : tags) s >> t;
        int nn = 0;
        switch (type) {
          case 1: nn = 2; break;
          case 2: nn = 3; break;
          case 4: nn = 4; break;
          case 15: nn = 1; break;
          default: throw fail("unsupported element type " + std::to_string(type));
        }
        RawElement r{type, ntags > 0 ? tags[0] : 0, std::vector<long>(nn)};
        for (auto& v : r.nodes) s >> v;
        if (!s) throw fail("malformed element line");
        raw.push_back(std::move(r));
      }
      if (next_line() != "$EndElements") throw fail("expected $EndElements");
    }
  }
  if (!saw_format) throw io_error("mesh", path.string() + ": missing $MeshFormat");

  const bool has_tets = std::any_of(raw.begin(), raw.end(), [](auto& r) { return r.type == 4; });
  const int dim = has_tets ? 3 : 2;
  const int cell_type = has_tets ? 4 : 2;
  const int facet_type = has_tets ? 2 : 1;

  auto lookup = [&](long id) {
    auto it = node_index.find(id);
    if (it == node_index.end()) throw io_error("mesh", path.string() + ": element references unknown node " + std::to_string(id));
    return it->second;
  };

  std::vector<std::vector<int>> cells;
  std::vector<BoundaryFacet> facets;
  for (const auto& r : raw) {
    std::vector<int> idx;
    for (long id : r.nodes) idx.push_back(lookup(id));
    if (r.type == cell_type) {
      cells.push_back(std::move(idx));
    } else if (r.type == facet_type) {
      auto it = physical_names.find(r.tag);
      facets.push_back({std::move(idx), it != physical_names.end() ? it->second : std::to_string(r.tag)});
    }
  }

  Eigen::MatrixXd nodes(dim, coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) nodes.col(i) = coords[i].head(dim);
  Eigen::MatrixXi elements(dim + 1, cells.size());
  for (std::size_t e = 0; e < cells.size(); ++e)
    for (int a = 0; a <= dim; ++a) elements(a, e) = cells[e][a];
  return Mesh(std::move(nodes), std::move(elements), std::move(facets));
}

Mesh load_csv(const std::filesystem::path& dir) {
  const auto node_rows = read_csv_rows(dir / "nodes.csv");
  if (node_rows.empty()) throw io_error("mesh", "nodes.csv is empty");
  const int dim = static_cast<int>(node_rows.front().fields.size()) - 1;
  if (dim != 2 && dim != 3) throw io_error("mesh", "nodes.csv rows must be id,x,y[,z]");

  std::unordered_map<long, int> node_index;
  Eigen::MatrixXd nodes(dim, node_rows.size());
  for (std::size_t i = 0; i < node_rows.size(); ++i) {
    const auto& r = node_rows[i];
    if (static_cast<int>(r.fields.size()) != dim + 1)
      throw io_error("mesh", "nodes.csv:" + std::to_string(r.line) + ": inconsistent column count");
    node_index[parse_long(r, 0)] = static_cast<int>(i);
    for (int k = 0; k < dim; ++k) nodes(k, i) = parse_double(r, k + 1);
  }
  auto lookup = [&](const CsvRow& r, std::size_t col, const char* file) {
    auto it = node_index.find(parse_long(r, col));
    if (it == node_index.end())
      throw io_error("mesh", std::string(file) + ":" + std::to_string(r.line) + ": unknown node id");
    return it->second;
  };

  const auto elem_rows = read_csv_rows(dir / "elements.csv");
  Eigen::MatrixXi elements(dim + 1, elem_rows.size());
  for (std::size_t e = 0; e < elem_rows.size(); ++e) {
    const auto& r = elem_rows[e];
    if (static_cast<int>(r.fields.size()) != dim + 2)
      throw io_error("mesh", "elements.csv:" + std::to_string(r.line) + ": unsupported element (expected " +
                                 std::to_string(dim + 1) + " nodes)");
    for (int a = 0; a <= dim; ++a) elements(a, e) = lookup(r, a + 1, "elements.csv");
  }

  std::vector<BoundaryFacet> facets;
  if (std::filesystem::exists(dir / "facets.csv")) {
    for (const auto& r : read_csv_rows(dir / "facets.csv")) {
      if (static_cast<int>(r.fields.size()) != dim + 1)
        throw io_error("mesh", "facets.csv:" + std::to_string(r.line) + ": expected marker and " +
                                   std::to_string(dim) + " nodes");
      BoundaryFacet f{{}, r.fields[0]};
      for (int a = 0; a < dim; ++a) f.nodes.push_back(lookup(r, a + 1, "facets.csv"));
      facets.push_back(std::move(f));
    }
  }
  return Mesh(std::move(nodes), std::move(elements), std::move(facets));
}

}  // namespace

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  if (!std::filesystem::exists(path)) throw io_error("mesh", "mesh source not found: " + path.string());
  return format == MeshFormat::gmsh_ascii ? load_gmsh(path) : load_csv(path);
}

void save_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const int d = mesh.dim();
  std::ofstream nodes(dir / "nodes.csv"), elems(dir / "elements.csv"), facets(dir / "facets.csv");
  if (!nodes || !elems || !facets) throw io_error("mesh", "cannot write mesh CSV into " + dir.string());
  nodes.precision(17);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    nodes << i;
    for (int k = 0; k < d; ++k) nodes << ',' << mesh.nodes()(k, i);
    nodes << '\n';
  }
  for (int e = 0; e < mesh.num_elements(); ++e) {
    elems << e;
    for (int a = 0; a <= d; ++a) elems << ',' << mesh.elements()(a, e);
    elems << '\n';
  }
  for (const auto& f : mesh.facets()) {
    facets << f.marker;
    for (int n : f.nodes) facets << ',' << n;
    facets << '\n';
  }
}

}  // namespace bt
