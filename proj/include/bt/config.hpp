#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bt/femcore.hpp"
#include "bt/models.hpp"
#include "bt/morphology.hpp"
#include "bt/solver.hpp"
#include "bt/xform.hpp"

namespace bt {

enum class ModelKind { powerlaw, pore, drug };
/// Where a nodal input quantity comes from.
///  strain_rate: recovered velocity gradient; channel: analytic channel shear;
///  morphology: local shape-tensor integration; field: nodal CSV.
enum class FieldSource { strain_rate, channel, morphology, field };

struct ProbeLine {
  std::string name;
  std::vector<double> p0;
  std::vector<double> p1;
  int n = 101;
  bool operator==(const ProbeLine&) const = default;
};

struct RunConfig {
  // mesh.source is "channel" or a path; mesh.format is auto, gmsh_ascii or native_csv
  std::string mesh_source = "channel";
  std::string mesh_format = "auto";
  int channel_nx = 80;
  int channel_ny = 62;
  double channel_jitter = 0.0;
  std::uint32_t channel_seed = 42;

  std::string velocity_source = "channel";

  ModelKind model = ModelKind::powerlaw;
  std::string preset = "custom";
  PowerLawParams law{1.0, 2.0, 1.0};
  FieldSource stress = FieldSource::strain_rate;
  double viscosity = 0.035;
  std::string stress_field;

  double pore_h = 4.48e-8;
  double pore_k = 1.31;
  double pore_hct = 0.36;
  double pore_v_rbc = 9.0e-11;
  double pore_eps0 = 0.0016;
  std::string pore_area_model = "linear";
  double pore_c_p = 1.0e-6;
  std::string pore_area_table;
  FieldSource pore_strain = FieldSource::morphology;
  std::string pore_strain_field;
  FieldSource pore_shear = FieldSource::strain_rate;
  std::string pore_shear_field;

  double drug_c_s0 = 1.0;

  MorphologyParams morph;
  double morph_t_end = 0.1;
  double morph_dt = 1.0e-5;
  double morph_viscosity = 0.035;
  double morph_a0 = 0.0;  ///< 0 means the area of the initial unit sphere
  AreaMethod morph_area = AreaMethod::thomsen;

  TransformKind transform = TransformKind::upper_bound;
  std::optional<double> transform_nu;  ///< defaults to the model saturation
  double transform_k = 1.0;

  DCConfig dc;
  SolverConfig solver;
  double inflow_value = 0.0;

  std::string output_dir = "out";
  bool output_vtk = true;
  std::vector<ProbeLine> probes;

  std::string outflow_marker;  ///< empty disables outflow averaging
  double outflow_hb = 15000.0;
  double outflow_hct = 0.36;
  double outflow_q = 0.0;
  double outflow_t = 120.0;
  double outflow_v_loop = 250.0;

  bool operator==(const RunConfig&) const = default;

  /// Range checks and file existence; throws naming the offending key.
  void validate() const;
};

/// Parses the line-oriented key/value format: "[section]" headers, "key = value"
/// pairs (keys may also be fully dotted), "#" or ";" comments. Relative paths
/// are resolved against `base_dir`. Unknown keys are rejected.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>",
                            const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Writes every key, so parsing the result reproduces the config.
std::string serialize_config(const RunConfig& cfg);

std::string to_string(ModelKind k);
std::string to_string(FieldSource s);

}  // namespace bt
