#include "bt/run.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "bt/cases.hpp"
#include "bt/io.hpp"
#include "bt/morphology.hpp"
#include "bt/parallel.hpp"
#include "bt/quadrature.hpp"

namespace bt {

namespace {

ChannelSpec channel_spec(const RunConfig& cfg) {
  ChannelSpec spec;
  spec.nx = cfg.channel_nx;
  spec.ny = cfg.channel_ny;
  spec.jitter = cfg.channel_jitter;
  spec.seed = cfg.channel_seed;
  spec.viscosity = cfg.viscosity;
  spec.law = cfg.law;
  spec.inflow = cfg.inflow_value;
  return spec;
}

Mesh make_mesh(const RunConfig& cfg) {
  if (cfg.mesh_source == "channel") {
    const auto spec = channel_spec(cfg);
    return rectangle_mesh(spec.nx, spec.ny, spec.length, spec.height, spec.jitter, spec.seed);
  }
  MeshFormat fmt = MeshFormat::gmsh_ascii;
  if (cfg.mesh_format == "native_csv" || (cfg.mesh_format == "auto" && std::filesystem::is_directory(cfg.mesh_source)))
    fmt = MeshFormat::native_csv;
  return load_mesh(cfg.mesh_source, fmt);
}

VectorField make_velocity(const Mesh& mesh, const RunConfig& cfg) {
  if (cfg.velocity_source == "channel") {
    if (mesh.dim() != 2) throw config_error("io_cli", "velocity.source = channel needs a 2D mesh");
    const auto spec = channel_spec(cfg);
    VectorField u = VectorField::Zero(2, mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) u(0, i) = channel_velocity(spec, mesh.nodes()(1, i));
    return u;
  }
  return read_nodal_field(cfg.velocity_source, mesh.num_nodes(), mesh.dim(), "velocity source");
}

ScalarField read_scalar(const std::string& path, const Mesh& mesh, const std::string& what) {
  return read_nodal_field(path, mesh.num_nodes(), 1, what).row(0).transpose();
}

ScalarField channel_shear(const Mesh& mesh, const RunConfig& cfg) {
  const auto spec = channel_spec(cfg);
  ScalarField g(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) g[i] = channel_shear_rate(spec, mesh.nodes()(1, i));
  return g;
}

Eigen::Matrix3d embed(const Eigen::MatrixXd& g) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  out.topLeftCorner(g.rows(), g.cols()) = g;
  return out;
}

double reference_area(const RunConfig& cfg) {
  if (cfg.morph_a0 > 0.0) return cfg.morph_a0;
  return cfg.morph_area == AreaMethod::exact ? ellipsoid_area_exact(1.0, 1.0, 1.0) : ellipsoid_area_thomsen(1.0, 1.0, 1.0);
}

template <int Dim>
double channel_l2_error(const Mesh& mesh, const ScalarField& c, const ChannelSpec& spec) {
  double err = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto x = element_vertices<Dim>(mesh, e);
    for (const auto& q : SimplexQuadrature<Dim>::points()) {
      Eigen::Matrix<double, Dim, 1> p = Eigen::Matrix<double, Dim, 1>::Zero();
      double ch = 0.0;
      for (int a = 0; a <= Dim; ++a) {
        p += q[a] * x.col(a);
        ch += q[a] * c[mesh.elements()(a, e)];
      }
      const double d = ch - channel_analytic(spec, p[0], p[1]);
      err += SimplexQuadrature<Dim>::weight * mesh.element_volume(e) * d * d;
    }
  }
  return std::sqrt(err);
}

}  // namespace

std::vector<Eigen::MatrixXd> recover_velocity_gradient(const Mesh& mesh, const VectorField& u) {
  const int d = mesh.dim();
  const int n = mesh.num_nodes();
  std::vector<Eigen::MatrixXd> grads(n, Eigen::MatrixXd::Zero(d, d));
  std::vector<double> weight(n, 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::MatrixXd ue(d, d + 1), dn;
    for (int a = 0; a <= d; ++a) ue.col(a) = u.col(mesh.elements()(a, e));
    if (d == 2)
      dn = element_geometry<2>(mesh, e).shape_gradients;
    else
      dn = element_geometry<3>(mesh, e).shape_gradients;
    const Eigen::MatrixXd g = ue * dn;
    const double w = mesh.element_volume(e);
    for (int a = 0; a <= d; ++a) {
      grads[mesh.elements()(a, e)] += w * g;
      weight[mesh.elements()(a, e)] += w;
    }
  }
  for (int i = 0; i < n; ++i)
    if (weight[i] > 0.0) grads[i] /= weight[i];
  return grads;
}

std::vector<Eigen::Matrix3d> morphology_states(const std::vector<Eigen::MatrixXd>& grads, const RunConfig& cfg) {
  std::vector<Eigen::Matrix3d> out(grads.size());
  parallel_for(static_cast<int>(grads.size()), cfg.solver.threads, [&](int i) {
    out[i] = integrate_local<double>(Eigen::Matrix3d::Identity(), embed(grads[i]), cfg.morph_t_end, cfg.morph_dt, cfg.morph);
  });
  return out;
}

std::vector<ReactionCoefficients> build_reaction(const Mesh& mesh, const VectorField& u, const RunConfig& cfg) {
  const int n = mesh.num_nodes();
  std::vector<ReactionCoefficients> r(n);
  if (cfg.model == ModelKind::drug) {
    std::fill(r.begin(), r.end(), drug_coefficients(cfg.drug_c_s0));
    return r;
  }

  std::vector<Eigen::MatrixXd> grads;
  auto gradients = [&]() -> const std::vector<Eigen::MatrixXd>& {
    if (grads.empty()) grads = recover_velocity_gradient(mesh, u);
    return grads;
  };
  std::vector<Eigen::Matrix3d> shapes;
  auto morph = [&]() -> const std::vector<Eigen::Matrix3d>& {
    if (shapes.empty()) {
      spdlog::info("integrating shape tensors at {} nodes", n);
      shapes = morphology_states(gradients(), cfg);
    }
    return shapes;
  };

  if (cfg.model == ModelKind::powerlaw) {
    ScalarField sigma(n);
    switch (cfg.stress) {
      case FieldSource::strain_rate:
        for (int i = 0; i < n; ++i) sigma[i] = strain_rate_invariant_stress(gradients()[i], cfg.viscosity);
        break;
      case FieldSource::channel:
        sigma = cfg.viscosity * channel_shear(mesh, cfg);
        break;
      case FieldSource::field:
        sigma = read_scalar(cfg.stress_field, mesh, "model.stress_field");
        break;
      case FieldSource::morphology:
        for (int i = 0; i < n; ++i) {
          const auto [l, w] = semi_axes(morph()[i]);
          sigma[i] = effective_stress(distortion(l, w), cfg.morph_viscosity, cfg.morph);
        }
        break;
    }
    for (int i = 0; i < n; ++i) r[i] = powerlaw_coefficients(sigma[i], cfg.law);
    return r;
  }

  PoreModelParams p;
  p.h = cfg.pore_h;
  p.k_exp = cfg.pore_k;
  p.hct = cfg.pore_hct;
  p.v_rbc = cfg.pore_v_rbc;
  p.eps0 = cfg.pore_eps0;
  p.pore_area = cfg.pore_area_model == "table" ? PoreAreaModel::from_csv(cfg.pore_area_table) : PoreAreaModel::linear(cfg.pore_c_p);
  p.validate();

  ScalarField eps(n);
  if (cfg.pore_strain == FieldSource::field) {
    eps = read_scalar(cfg.pore_strain_field, mesh, "pore.strain_field");
  } else {
    const double a0 = reference_area(cfg);
    for (int i = 0; i < n; ++i) eps[i] = area_strain(morph()[i], a0, cfg.morph_area);
  }
  ScalarField shear(n);
  switch (cfg.pore_shear) {
    case FieldSource::field:
      shear = read_scalar(cfg.pore_shear_field, mesh, "pore.shear_field");
      break;
    case FieldSource::channel:
      shear = channel_shear(mesh, cfg);
      break;
    default:
      for (int i = 0; i < n; ++i) shear[i] = shear_rate(gradients()[i]);
  }
  for (int i = 0; i < n; ++i) r[i] = pore_coefficients(eps[i], shear[i], p);
  return r;
}

RunSummary run(const RunConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_dir);

  Problem problem;
  problem.mesh = make_mesh(cfg);
  spdlog::info("mesh: {} nodes, {} elements, dim {}", problem.mesh.num_nodes(), problem.mesh.num_elements(),
               problem.mesh.dim());
  problem.velocity = make_velocity(problem.mesh, cfg);
  problem.reaction = build_reaction(problem.mesh, problem.velocity, cfg);

  double saturation = 1.0;
  if (cfg.model == ModelKind::pore) saturation = 1.0 - cfg.pore_hct;
  if (cfg.model == ModelKind::drug) saturation = cfg.drug_c_s0;
  problem.transform.kind = cfg.transform;
  problem.transform.nu = cfg.transform_nu.value_or(saturation);
  problem.transform.k = cfg.transform_k;
  problem.dc = cfg.dc;
  problem.inflow_value = cfg.inflow_value;

  RunSummary summary;
  ScalarField cbar;
  std::vector<std::pair<std::string, ScalarField>> snapshots;
  if (cfg.solver.mode == SolveMode::steady) {
    auto res = solve_steady(problem, cfg.solver);
    cbar = std::move(res.cbar);
    summary.passes = std::move(res.passes);
  } else {
    auto res = solve_transient(problem, cfg.solver);
    for (std::size_t k = 0; k < res.fields.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "solution_%04zu.vtk", k);
      snapshots.emplace_back(name, res.fields[k]);
    }
    cbar = res.fields.back();
  }

  const ScalarField c = physical_field(problem.transform, cbar);
  ScalarField ih(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    ih[i] = cfg.model == ModelKind::powerlaw ? ih_from_linearized(c[i], cfg.law.beta, true) : std::max(0.0, c[i]);
  ScalarField mu(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) mu[i] = problem.reaction[i].mu_r;

  summary.stats = field_stats(problem.mesh, c);
  spdlog::info("min={:.6e} max={:.6e} neg_nodes={} neg_volume_fraction={:.6e}", summary.stats.min, summary.stats.max,
               summary.stats.negative_nodes, summary.stats.negative_volume_fraction);

  std::vector<std::pair<std::string, ScalarField>> scalars{{"c", c}, {"cbar", cbar}, {"ih", ih}, {"mu_r", mu}};
  const bool channel_case =
      cfg.mesh_source == "channel" && cfg.velocity_source == "channel" && cfg.model == ModelKind::powerlaw &&
      cfg.stress == FieldSource::channel;
  if (channel_case) {
    const auto spec = channel_spec(cfg);
    ScalarField exact(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      exact[i] = channel_analytic(spec, problem.mesh.nodes()(0, i), problem.mesh.nodes()(1, i));
    scalars.emplace_back("analytic", exact);
    summary.l2_error = channel_l2_error<2>(problem.mesh, c, spec);
    spdlog::info("l2_error={:.6e}", *summary.l2_error);
  }

  std::vector<std::pair<std::string, double>> rows{
      {"num_nodes", problem.mesh.num_nodes()},
      {"num_elements", problem.mesh.num_elements()},
      {"min", summary.stats.min},
      {"max", summary.stats.max},
      {"negative_nodes", summary.stats.negative_nodes},
      {"negative_volume_fraction", summary.stats.negative_volume_fraction},
  };
  for (const auto& p : summary.passes) {
    const auto tag = "pass" + std::to_string(p.pass) + "_";
    rows.emplace_back(tag + "min", p.min);
    rows.emplace_back(tag + "max", p.max);
    rows.emplace_back(tag + "negative_nodes", p.negative_nodes);
  }
  if (summary.l2_error) rows.emplace_back("l2_error", *summary.l2_error);
  if (!cfg.outflow_marker.empty()) {
    summary.ih_out = outflow_average(problem.mesh, ih, problem.velocity, cfg.outflow_marker);
    summary.delta_phb =
        delta_phb(*summary.ih_out, cfg.outflow_hb, cfg.outflow_hct, cfg.outflow_q, cfg.outflow_t, cfg.outflow_v_loop);
    rows.emplace_back("ih_out", *summary.ih_out);
    rows.emplace_back("delta_phb", *summary.delta_phb);
    spdlog::info("ih_out={:.6e} delta_phb={:.6e} mg/dL", *summary.ih_out, *summary.delta_phb);
  }

  if (cfg.output_vtk) {
    const auto path = out_dir / "solution.vtk";
    write_vtk(path, problem.mesh, scalars, {{"velocity", problem.velocity}});
    summary.written.push_back(path);
    for (const auto& [name, f] : snapshots) {
      const auto snap = out_dir / name;
      write_vtk(snap, problem.mesh, {{"c", physical_field(problem.transform, f)}, {"cbar", f}});
      summary.written.push_back(snap);
    }
  }
  const auto stats_path = out_dir / "stats.csv";
  write_key_values(stats_path, rows);
  summary.written.push_back(stats_path);
  for (const auto& probe : cfg.probes) {
    if (static_cast<int>(probe.p0.size()) != problem.mesh.dim())
      throw config_error("io_cli", "probe." + probe.name + " does not match the mesh dimension");
    const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(probe.p0.data(), probe.p0.size());
    const Eigen::VectorXd p1 = Eigen::Map<const Eigen::VectorXd>(probe.p1.data(), probe.p1.size());
    const auto path = out_dir / ("line_" + probe.name + ".csv");
    write_line_csv(path, sample_line(problem.mesh, c, p0, p1, probe.n));
    summary.written.push_back(path);
  }
  return summary;
}

}  // namespace bt
