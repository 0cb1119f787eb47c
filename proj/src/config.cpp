#include "bt/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bt/io.hpp"

namespace bt {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::powerlaw: return "powerlaw";
    case ModelKind::pore: return "pore";
    case ModelKind::drug: return "drug";
  }
  return "powerlaw";
}

std::string to_string(FieldSource s) {
  switch (s) {
    case FieldSource::strain_rate: return "strain_rate";
    case FieldSource::channel: return "channel";
    case FieldSource::morphology: return "morphology";
    case FieldSource::field: return "field";
  }
  return "strain_rate";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown by value parsers; the caller attaches key and line.
struct BadValue {
  std::string what;
};

double to_double(const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    throw BadValue{"expected a number, got '" + v + "'"};
  }
  return out;
}

long to_long(const std::string& v) {
  long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw BadValue{"expected an integer, got '" + v + "'"};
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

template <typename Enum>
Enum to_enum(const std::string& v, std::initializer_list<std::pair<const char*, Enum>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (v == name) return e;
    names += (names.empty() ? "" : ", ") + std::string(name);
  }
  throw BadValue{"expected one of {" + names + "}, got '" + v + "'"};
}

FieldSource to_source(const std::string& v) {
  return to_enum<FieldSource>(v, {{"strain_rate", FieldSource::strain_rate},
                                  {"channel", FieldSource::channel},
                                  {"morphology", FieldSource::morphology},
                                  {"field", FieldSource::field}});
}

std::string to_text(double v) { return format_double(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool is_path = false;
};

std::string resolve_path(const std::string& v, const std::filesystem::path& base) {
  if (v.empty() || v == "channel") return v;
  std::filesystem::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal().string();
}

// Ordered so that serialization groups sections.
const std::vector<std::pair<std::string, Key>>& key_table() {
#define BT_NUM(name, member) \
  {name, {[](RunConfig& c, const std::string& v) { c.member = to_double(v); }, [](const RunConfig& c) { return to_text(c.member); }}}
#define BT_INT(name, member)                                                                 \
  {name, {[](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_long(v)); }, \
          [](const RunConfig& c) { return to_text(static_cast<int>(c.member)); }}}
#define BT_STR(name, member) \
  {name, {[](RunConfig& c, const std::string& v) { c.member = v; }, [](const RunConfig& c) { return c.member; }}}
#define BT_PATH(name, member) \
  {name, {[](RunConfig& c, const std::string& v) { c.member = v; }, [](const RunConfig& c) { return c.member; }, true}}
#define BT_SRC(name, member) \
  {name, {[](RunConfig& c, const std::string& v) { c.member = to_source(v); }, [](const RunConfig& c) { return to_string(c.member); }}}

  static const std::vector<std::pair<std::string, Key>> table = {
      BT_PATH("mesh.source", mesh_source),
      BT_STR("mesh.format", mesh_format),
      BT_INT("channel.nx", channel_nx),
      BT_INT("channel.ny", channel_ny),
      BT_NUM("channel.jitter", channel_jitter),
      {"channel.seed",
       {[](RunConfig& c, const std::string& v) {
          const long s = to_long(v);
          if (s < 0 || s > 4294967295L) throw BadValue{"seed must fit in 32 bits"};
          c.channel_seed = static_cast<std::uint32_t>(s);
        },
        [](const RunConfig& c) { return std::to_string(c.channel_seed); }}},
      BT_PATH("velocity.source", velocity_source),
      {"model.kind",
       {[](RunConfig& c, const std::string& v) {
          c.model = to_enum<ModelKind>(v, {{"powerlaw", ModelKind::powerlaw}, {"pore", ModelKind::pore}, {"drug", ModelKind::drug}});
        },
        [](const RunConfig& c) { return to_string(c.model); }}},
      {"model.preset",
       {[](RunConfig& c, const std::string& v) {
          c.preset = v;
          if (v == "custom") return;
          try {
            c.law = powerlaw_preset(v);
          } catch (const Error& e) {
            throw BadValue{"unknown preset '" + v + "'"};
          }
        },
        [](const RunConfig& c) { return c.preset; }}},
      {"model.A", {[](RunConfig& c, const std::string& v) { c.law.A = to_double(v); }, [](const RunConfig& c) { return to_text(c.law.A); }}},
      {"model.alpha", {[](RunConfig& c, const std::string& v) { c.law.alpha = to_double(v); }, [](const RunConfig& c) { return to_text(c.law.alpha); }}},
      {"model.beta", {[](RunConfig& c, const std::string& v) { c.law.beta = to_double(v); }, [](const RunConfig& c) { return to_text(c.law.beta); }}},
      BT_SRC("model.stress", stress),
      BT_NUM("model.viscosity", viscosity),
      BT_PATH("model.stress_field", stress_field),
      BT_NUM("pore.h", pore_h),
      BT_NUM("pore.k", pore_k),
      BT_NUM("pore.hct", pore_hct),
      BT_NUM("pore.v_rbc", pore_v_rbc),
      BT_NUM("pore.eps0", pore_eps0),
      BT_STR("pore.area_model", pore_area_model),
      BT_NUM("pore.c_p", pore_c_p),
      BT_PATH("pore.area_table", pore_area_table),
      BT_SRC("pore.strain", pore_strain),
      BT_PATH("pore.strain_field", pore_strain_field),
      BT_SRC("pore.shear", pore_shear),
      BT_PATH("pore.shear_field", pore_shear_field),
      BT_NUM("drug.c_s0", drug_c_s0),
      BT_NUM("morphology.alpha1", morph.alpha1),
      BT_NUM("morphology.alpha2", morph.alpha2),
      BT_NUM("morphology.alpha3", morph.alpha3),
      BT_NUM("morphology.t_end", morph_t_end),
      BT_NUM("morphology.dt", morph_dt),
      BT_NUM("morphology.viscosity", morph_viscosity),
      BT_NUM("morphology.a0", morph_a0),
      {"morphology.area_method",
       {[](RunConfig& c, const std::string& v) {
          c.morph_area = to_enum<AreaMethod>(v, {{"thomsen", AreaMethod::thomsen}, {"exact", AreaMethod::exact}});
        },
        [](const RunConfig& c) { return std::string(c.morph_area == AreaMethod::thomsen ? "thomsen" : "exact"); }}},
      {"transform.kind",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.transform = parse_transform_kind(v);
          } catch (const Error&) {
            throw BadValue{"expected one of {identity, upper_bound, logistic}, got '" + v + "'"};
          }
        },
        [](const RunConfig& c) { return to_string(c.transform); }}},
      {"transform.nu",
       {[](RunConfig& c, const std::string& v) {
          if (v == "auto")
            c.transform_nu.reset();
          else
            c.transform_nu = to_double(v);
        },
        [](const RunConfig& c) { return c.transform_nu ? to_text(*c.transform_nu) : std::string("auto"); }}},
      BT_NUM("transform.k", transform_k),
      {"dc.operator",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.dc.op = parse_dc_operator(v);
          } catch (const Error&) {
            throw BadValue{"expected one of {none, isotropic, cwd_reference, cwd_physical}, got '" + v + "'"};
          }
        },
        [](const RunConfig& c) { return to_string(c.dc.op); }}},
      {"dc.diffusivity",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.dc.diffusivity = parse_dc_diffusivity(v);
          } catch (const Error&) {
            throw BadValue{"expected one of {dc_lin, dc_quad, codina}, got '" + v + "'"};
          }
        },
        [](const RunConfig& c) { return to_string(c.dc.diffusivity); }}},
      BT_NUM("dc.codina_c", dc.codina_c),
      BT_NUM("dc.grad_floor", dc.grad_floor),
      {"solver.mode",
       {[](RunConfig& c, const std::string& v) {
          c.solver.mode = to_enum<SolveMode>(v, {{"steady", SolveMode::steady}, {"transient", SolveMode::transient}});
        },
        [](const RunConfig& c) { return std::string(c.solver.mode == SolveMode::steady ? "steady" : "transient"); }}},
      BT_NUM("solver.dt", solver.dt),
      BT_INT("solver.n_steps", solver.n_steps),
      BT_INT("solver.dc_passes", solver.dc_passes),
      BT_NUM("solver.linear_tol", solver.linear_tol),
      BT_INT("solver.max_linear_iters", solver.max_linear_iters),
      BT_INT("solver.output_stride", solver.output_stride),
      BT_INT("solver.threads", solver.threads),
      BT_NUM("inflow.value", inflow_value),
      BT_PATH("output.dir", output_dir),
      {"output.vtk", {[](RunConfig& c, const std::string& v) { c.output_vtk = to_bool(v); }, [](const RunConfig& c) { return to_text(c.output_vtk); }}},
      BT_STR("outflow.marker", outflow_marker),
      BT_NUM("outflow.hb", outflow_hb),
      BT_NUM("outflow.hct", outflow_hct),
      BT_NUM("outflow.q", outflow_q),
      BT_NUM("outflow.t", outflow_t),
      BT_NUM("outflow.v_loop", outflow_v_loop),
  };
#undef BT_NUM
#undef BT_INT
#undef BT_STR
#undef BT_PATH
#undef BT_SRC
  return table;
}

ProbeLine parse_probe(const std::string& name, const std::string& v) {
  const auto values = to_list(v);
  ProbeLine p;
  p.name = name;
  if (values.size() != 5 && values.size() != 7)
    throw BadValue{"expected x0,y0,x1,y1,n or x0,y0,z0,x1,y1,z1,n"};
  const std::size_t d = values.size() == 5 ? 2 : 3;
  p.p0.assign(values.begin(), values.begin() + d);
  p.p1.assign(values.begin() + d, values.begin() + 2 * d);
  const double n = values.back();
  if (n != std::floor(n) || n < 1) throw BadValue{"sample count must be a positive integer"};
  p.n = static_cast<int>(n);
  return p;
}

bool valid_probe_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) return false;
  return true;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir) {
  const auto& table = key_table();
  std::map<std::string, const Key*> lookup;
  for (const auto& [name, key] : table) lookup[name] = &key;

  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](int line, const std::string& msg) -> Error {
    std::ostringstream s;
    s << origin << ":" << line << ": " << msg;
    return config_error("io_cli", s.str());
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw fail(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail(line_no, "expected 'key = value'");
    const auto k = trim(line.substr(0, eq));
    if (k.empty()) throw fail(line_no, "missing key");
    const auto key = section.empty() || k.find('.') != std::string::npos ? k : section + "." + k;
    if (auto it = seen.find(key); it != seen.end())
      throw fail(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = line_no;
    entries.push_back({key, trim(line.substr(eq + 1)), line_no});
  }

  RunConfig cfg;
  auto apply = [&](const Entry& e) {
    try {
      if (e.key.rfind("probe.", 0) == 0) {
        const auto name = e.key.substr(6);
        if (!valid_probe_name(name)) throw BadValue{"probe names may use letters, digits, '_' and '-'"};
        cfg.probes.push_back(parse_probe(name, e.value));
        return;
      }
      auto it = lookup.find(e.key);
      if (it == lookup.end()) throw fail(e.line, "unknown key '" + e.key + "'");
      it->second->set(cfg, it->second->is_path ? resolve_path(e.value, base_dir) : e.value);
    } catch (const BadValue& b) {
      throw fail(e.line, e.key + ": " + b.what);
    }
  };
  // A preset supplies defaults that explicit model keys may override.
  for (const auto& e : entries)
    if (e.key == "model.preset") apply(e);
  for (const auto& e : entries)
    if (e.key != "model.preset") apply(e);
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw io_error("io_cli", "config not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw io_error("io_cli", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string(), path.parent_path());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& [name, key] : key_table()) {
    const auto dot = name.find('.');
    const auto sec = name.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << name.substr(dot + 1) << " = " << key.get(cfg) << '\n';
  }
  if (!cfg.probes.empty()) {
    out << "\n[probe]\n";
    for (const auto& p : cfg.probes) {
      out << p.name << " = ";
      for (double v : p.p0) out << format_double(v) << ',';
      for (double v : p.p1) out << format_double(v) << ',';
      out << p.n << '\n';
    }
  }
  return out.str();
}

void RunConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& msg) { return config_error("io_cli", key + " " + msg); };
  auto need_file = [](const std::string& p, const std::string& what) {
    if (!std::filesystem::exists(p)) throw io_error("io_cli", what + " not found: " + p);
  };

  if (mesh_format != "auto" && mesh_format != "gmsh_ascii" && mesh_format != "native_csv")
    throw bad("mesh.format", "must be auto, gmsh_ascii or native_csv");
  if (mesh_source.empty()) throw bad("mesh.source", "must be 'channel' or a path");
  if (mesh_source != "channel") need_file(mesh_source, "mesh source");
  if (channel_nx < 2 || channel_ny < 2) throw bad("channel.nx/ny", "must be at least 2");
  if (!(channel_jitter >= 0.0 && channel_jitter < 0.5)) throw bad("channel.jitter", "must lie in [0, 0.5)");

  if (velocity_source.empty()) throw bad("velocity.source", "must be 'channel' or a path");
  if (velocity_source != "channel") need_file(velocity_source, "velocity source");

  auto check_source = [&](FieldSource s, const std::string& key, const std::string& file_key, const std::string& file) {
    if (s == FieldSource::field) {
      if (file.empty()) throw bad(file_key, "is required when " + key + " = field");
      need_file(file, file_key);
    }
    if (s == FieldSource::channel && velocity_source != "channel")
      throw bad(key, "= channel requires velocity.source = channel");
  };

  try {
    law.validate();
  } catch (const Error& e) {
    throw bad("model.A/alpha/beta", std::string("invalid: ") + e.what());
  }
  if (!(viscosity > 0.0)) throw bad("model.viscosity", "must be positive");
  if (model == ModelKind::powerlaw) check_source(stress, "model.stress", "model.stress_field", stress_field);
  if (model == ModelKind::pore) {
    if (pore_strain != FieldSource::morphology && pore_strain != FieldSource::field)
      throw bad("pore.strain", "must be morphology or field");
    check_source(pore_strain, "pore.strain", "pore.strain_field", pore_strain_field);
    if (pore_shear == FieldSource::morphology) throw bad("pore.shear", "must be strain_rate, channel or field");
    check_source(pore_shear, "pore.shear", "pore.shear_field", pore_shear_field);
    if (pore_area_model == "table") {
      if (pore_area_table.empty()) throw bad("pore.area_table", "is required when pore.area_model = table");
      need_file(pore_area_table, "pore.area_table");
    } else if (pore_area_model != "linear") {
      throw bad("pore.area_model", "must be linear or table");
    }
    if (!(pore_hct > 0.0 && pore_hct < 1.0)) throw bad("pore.hct", "must lie in (0, 1)");
    if (!(pore_h >= 0.0)) throw bad("pore.h", "must be non-negative");
    if (!(pore_v_rbc > 0.0)) throw bad("pore.v_rbc", "must be positive");
    if (!(pore_c_p >= 0.0)) throw bad("pore.c_p", "must be non-negative");
  }
  if (model == ModelKind::drug && !(drug_c_s0 > 0.0)) throw bad("drug.c_s0", "must be positive");
  if (!(morph.alpha1 > 0.0)) throw bad("morphology.alpha1", "must be positive");
  if (!(morph_t_end >= 0.0)) throw bad("morphology.t_end", "must be non-negative");
  if (!(morph_dt > 0.0)) throw bad("morphology.dt", "must be positive");
  if (!(morph_viscosity > 0.0)) throw bad("morphology.viscosity", "must be positive");
  if (!(morph_a0 >= 0.0)) throw bad("morphology.a0", "must be non-negative");

  if (transform_nu && !(*transform_nu > 0.0)) throw bad("transform.nu", "must be positive");
  if (!(transform_k > 0.0)) throw bad("transform.k", "must be positive");
  if (!(dc.codina_c > 0.0)) throw bad("dc.codina_c", "must be positive");
  if (!(dc.grad_floor > 0.0)) throw bad("dc.grad_floor", "must be positive");
  solver.validate();

  if (output_dir.empty()) throw bad("output.dir", "must not be empty");
  for (const auto& p : probes) {
    if (p.p0.size() != p.p1.size()) throw bad("probe." + p.name, "end points differ in dimension");
    if (p.n < 1) throw bad("probe." + p.name, "needs at least one sample");
  }
  if (!outflow_marker.empty()) {
    if (!(outflow_q > 0.0)) throw bad("outflow.q", "must be positive when outflow.marker is set");
    if (!(outflow_t > 0.0)) throw bad("outflow.t", "must be positive");
    if (!(outflow_v_loop > 0.0)) throw bad("outflow.v_loop", "must be positive");
    if (!(outflow_hb > 0.0)) throw bad("outflow.hb", "must be positive");
    if (!(outflow_hct > 0.0 && outflow_hct < 1.0)) throw bad("outflow.hct", "must lie in (0, 1)");
  }
}

}  // namespace bt
