#include "bt/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "bt/csv.hpp"

namespace bt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw io_error("io_cli", "cannot format number");
  return std::string(buf.data(), end);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw io_error("io_cli", "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("io_cli", "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw io_error("io_cli", "write failed for " + path.string());
}

}  // namespace

Eigen::MatrixXd read_nodal_field(const std::filesystem::path& path, int num_nodes, int components,
                                 const std::string& what) {
  if (!std::filesystem::exists(path)) throw io_error("io_cli", what + " not found: " + path.string());
  const auto rows = read_csv_rows(path);
  if (static_cast<int>(rows.size()) != num_nodes) {
    std::ostringstream msg;
    msg << path.string() << ": " << rows.size() << " rows for " << num_nodes << " mesh nodes";
    throw io_error("io_cli", msg.str());
  }
  Eigen::MatrixXd out(components, num_nodes);
  long last_id = std::numeric_limits<long>::min();
  for (int i = 0; i < num_nodes; ++i) {
    const auto& row = rows[i];
    if (static_cast<int>(row.fields.size()) != components + 1) {
      std::ostringstream msg;
      msg << path.string() << ":" << row.line << ": expected " << components + 1 << " fields";
      throw io_error("io_cli", msg.str());
    }
    const long id = parse_long(row, 0);
    if (id <= last_id) {
      std::ostringstream msg;
      msg << path.string() << ":" << row.line << ": node ids must be strictly increasing";
      throw io_error("io_cli", msg.str());
    }
    last_id = id;
    for (int c = 0; c < components; ++c) out(c, i) = parse_double(row, c + 1);
  }
  return out;
}

void write_nodal_field(const std::filesystem::path& path, const Eigen::MatrixXd& values) {
  auto out = open_out(path);
  out << "node_id";
  static const char* names[] = {"value", "value_y", "value_z"};
  for (int c = 0; c < values.rows() && c < 3; ++c) out << ',' << names[c];
  out << '\n';
  for (int i = 0; i < values.cols(); ++i) {
    out << i;
    for (int c = 0; c < values.rows(); ++c) out << ',' << format_double(values(c, i));
    out << '\n';
  }
  finish(out, path);
}

const ScalarField& VtkData::scalar(const std::string& name) const {
  for (const auto& [n, f] : scalars)
    if (n == name) return f;
  throw config_error("io_cli", "no point scalar named '" + name + "'");
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, ScalarField>>& scalars,
               const std::vector<std::pair<std::string, VectorField>>& vectors) {
  const int n = mesh.num_nodes();
  const int ne = mesh.num_elements();
  const int d = mesh.dim();
  for (const auto& [name, f] : scalars)
    if (f.size() != n) throw numerical_error("io_cli", "scalar '" + name + "' does not match the mesh");
  for (const auto& [name, f] : vectors)
    if (f.cols() != n || f.rows() != d) throw numerical_error("io_cli", "vector '" + name + "' does not match the mesh");

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nbt solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) out << (k ? " " : "") << format_double(k < d ? mesh.nodes()(k, i) : 0.0);
    out << '\n';
  }
  out << "CELLS " << ne << ' ' << ne * (d + 2) << '\n';
  for (int e = 0; e < ne; ++e) {
    out << d + 1;
    for (int a = 0; a <= d; ++a) out << ' ' << mesh.elements()(a, e);
    out << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << (d == 2 ? 5 : 10) << '\n';
  if (!scalars.empty() || !vectors.empty()) out << "POINT_DATA " << n << '\n';
  for (const auto& [name, f] : scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << format_double(f[i]) << '\n';
  }
  for (const auto& [name, f] : vectors) {
    out << "VECTORS " << name << " double\n";
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) out << (k ? " " : "") << format_double(k < d ? f(k, i) : 0.0);
      out << '\n';
    }
  }
  finish(out, path);
}

void write_vtk(const std::filesystem::path& path, const VtkData& data) {
  write_vtk(path, data.mesh, data.scalars, data.vectors);
}

namespace {

class Tokens {
 public:
  explicit Tokens(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw io_error("io_cli", "cannot open " + path.string());
  }
  bool next(std::string& tok) {
    while (true) {
      if (ls_ >> tok) return true;
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      ls_.clear();
      ls_.str(line);
    }
  }
  std::string word(const char* expect) {
    std::string t;
    if (!next(t)) fail(std::string("unexpected end of file, expected ") + expect);
    return t;
  }
  long integer() {
    const auto t = word("an integer");
    long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("bad integer '" + t + "'");
    return v;
  }
  double number() {
    const auto t = word("a number");
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("bad number '" + t + "'");
    return v;
  }
  void rest_of_line() {
    std::string discard;
    std::getline(ls_, discard);
  }
  std::string line_text() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_no_;
    return line;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream s;
    s << path_.string() << ":" << line_no_ << ": " << msg;
    throw io_error("io_cli", s.str());
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::istringstream ls_;
  int line_no_ = 0;
};

}  // namespace

VtkData read_vtk(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw io_error("io_cli", "file not found: " + path.string());
  Tokens tk(path);
  const auto header = tk.line_text();
  if (header.rfind("# vtk DataFile", 0) != 0) tk.fail("not a legacy VTK file");
  tk.line_text();  // title
  if (tk.word("ASCII") != "ASCII") tk.fail("only ASCII VTK files are supported");
  if (tk.word("DATASET") != "DATASET" || tk.word("UNSTRUCTURED_GRID") != "UNSTRUCTURED_GRID")
    tk.fail("only UNSTRUCTURED_GRID datasets are supported");

  Eigen::MatrixXd points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
  std::vector<std::pair<std::string, ScalarField>> scalars;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> vectors;
  long npoint_data = -1;
  std::string key;
  while (tk.next(key)) {
    if (key == "POINTS") {
      const long n = tk.integer();
      tk.word("a data type");
      points.resize(3, n);
      for (long i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k) points(k, i) = tk.number();
    } else if (key == "CELLS") {
      const long n = tk.integer();
      tk.integer();
      cells.resize(n);
      for (long e = 0; e < n; ++e) {
        const long m = tk.integer();
        for (long a = 0; a < m; ++a) cells[e].push_back(static_cast<int>(tk.integer()));
      }
    } else if (key == "CELL_TYPES") {
      const long n = tk.integer();
      for (long e = 0; e < n; ++e) types.push_back(static_cast<int>(tk.integer()));
    } else if (key == "POINT_DATA") {
      npoint_data = tk.integer();
    } else if (key == "SCALARS") {
      const auto name = tk.word("a name");
      tk.word("a data type");
      tk.rest_of_line();
      if (tk.word("LOOKUP_TABLE") != "LOOKUP_TABLE") tk.fail("expected LOOKUP_TABLE");
      tk.word("a table name");
      ScalarField f(npoint_data);
      for (long i = 0; i < npoint_data; ++i) f[i] = tk.number();
      scalars.emplace_back(name, std::move(f));
    } else if (key == "VECTORS") {
      const auto name = tk.word("a name");
      tk.word("a data type");
      Eigen::MatrixXd f(3, npoint_data);
      for (long i = 0; i < npoint_data; ++i)
        for (int k = 0; k < 3; ++k) f(k, i) = tk.number();
      vectors.emplace_back(name, std::move(f));
    } else {
      tk.fail("unsupported VTK section '" + key + "'");
    }
    if ((key == "SCALARS" || key == "VECTORS") && npoint_data < 0) tk.fail("point data before POINT_DATA");
  }
  if (cells.size() != types.size()) throw io_error("io_cli", path.string() + ": CELLS and CELL_TYPES disagree");
  if (cells.empty()) throw io_error("io_cli", path.string() + ": no cells");
  const int type = types.front();
  if (type != 5 && type != 10) throw io_error("io_cli", path.string() + ": unsupported cell type " + std::to_string(type));
  for (std::size_t e = 0; e < types.size(); ++e) {
    if (types[e] != type) throw io_error("io_cli", path.string() + ": mixed cell types are not supported");
    if (static_cast<int>(cells[e].size()) != (type == 5 ? 3 : 4))
      throw io_error("io_cli", path.string() + ": cell size does not match its type");
  }
  const int d = type == 5 ? 2 : 3;
  if (d == 2 && points.row(2).cwiseAbs().maxCoeff() != 0.0)
    throw io_error("io_cli", path.string() + ": triangle grid is not planar in z = 0");
  if (npoint_data >= 0 && npoint_data != points.cols())
    throw io_error("io_cli", path.string() + ": POINT_DATA count does not match POINTS");

  Eigen::MatrixXi el(d + 1, static_cast<Eigen::Index>(cells.size()));
  for (std::size_t e = 0; e < cells.size(); ++e)
    for (int a = 0; a <= d; ++a) el(a, static_cast<Eigen::Index>(e)) = cells[e][a];
  VtkData out;
  out.mesh = Mesh(points.topRows(d), el);
  out.scalars = std::move(scalars);
  for (auto& [name, f] : vectors) out.vectors.emplace_back(name, f.topRows(d));
  return out;
}

void write_key_values(const std::filesystem::path& path, const std::vector<std::pair<std::string, double>>& rows) {
  auto out = open_out(path);
  out << "quantity,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << format_double(v) << '\n';
  finish(out, path);
}

void write_line_csv(const std::filesystem::path& path, const std::vector<LineSample>& samples) {
  auto out = open_out(path);
  out << "s,value\n";
  for (const auto& smp : samples)
    out << format_double(smp.s) << ',' << (smp.value ? format_double(*smp.value) : "nan") << '\n';
  finish(out, path);
}

}  // namespace bt
