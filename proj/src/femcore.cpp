#include "bt/femcore.hpp"

#include <algorithm>

#include "bt/parallel.hpp"

namespace bt {

std::string to_string(DcOperator op) {
  switch (op) {
    case DcOperator::none: return "none";
    case DcOperator::isotropic: return "isotropic";
    case DcOperator::cwd_reference: return "cwd_reference";
    case DcOperator::cwd_physical: return "cwd_physical";
  }
  return "none";
}

std::string to_string(DcDiffusivity d) {
  switch (d) {
    case DcDiffusivity::dc_lin: return "dc_lin";
    case DcDiffusivity::dc_quad: return "dc_quad";
    case DcDiffusivity::codina: return "codina";
  }
  return "dc_quad";
}

DcOperator parse_dc_operator(const std::string& s) {
  if (s == "none") return DcOperator::none;
  if (s == "isotropic") return DcOperator::isotropic;
  if (s == "cwd_reference") return DcOperator::cwd_reference;
  if (s == "cwd_physical") return DcOperator::cwd_physical;
  throw config_error("femcore", "unknown dc operator '" + s + "'");
}

DcDiffusivity parse_dc_diffusivity(const std::string& s) {
  if (s == "dc_lin") return DcDiffusivity::dc_lin;
  if (s == "dc_quad") return DcDiffusivity::dc_quad;
  if (s == "codina") return DcDiffusivity::codina;
  throw config_error("femcore", "unknown dc diffusivity '" + s + "'");
}

ElementCoefficients element_coefficients(const Transform& t, const ReactionCoefficients& mean) {
  switch (t.kind) {
    case TransformKind::upper_bound:
      return {transformed_source(t, mean.mu_r), 0.0};
    case TransformKind::identity:
      return {mean.mu_r * mean.nu_r, mean.mu_r};
    case TransformKind::logistic:
      return {transformed_source(t, mean.mu_r), 0.0};
  }
  return {};
}

ScalarField AssembledSystem::expand(const Eigen::VectorXd& x, int num_nodes) const {
  ScalarField out = ScalarField::Zero(num_nodes);
  for (std::size_t i = 0; i < free_nodes.size(); ++i) out[free_nodes[i]] = x[static_cast<Eigen::Index>(i)];
  for (const auto& [node, value] : dirichlet) out[node] = value;
  return out;
}

namespace {

template <int Dim>
using NodalVec = Eigen::Matrix<double, Dim + 1, 1>;

template <int Dim>
NodalVec<Dim> gather(const Mesh& mesh, const ScalarField& f, int e) {
  NodalVec<Dim> v;
  for (int a = 0; a <= Dim; ++a) v[a] = f[mesh.elements()(a, e)];
  return v;
}

template <int Dim>
Eigen::Matrix<double, Dim, Dim + 1> gather_velocity(const Mesh& mesh, const VectorField& u, int e) {
  Eigen::Matrix<double, Dim, Dim + 1> v;
  for (int a = 0; a <= Dim; ++a) v.col(a) = u.col(mesh.elements()(a, e));
  return v;
}

template <int Dim>
ReactionCoefficients mean_reaction(const Mesh& mesh, const std::vector<ReactionCoefficients>& r, int e) {
  ReactionCoefficients m{0.0, 0.0};
  for (int a = 0; a <= Dim; ++a) {
    m.mu_r += r[mesh.elements()(a, e)].mu_r;
    m.nu_r += r[mesh.elements()(a, e)].nu_r;
  }
  m.mu_r /= Dim + 1;
  m.nu_r /= Dim + 1;
  return m;
}

void check_inputs(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                  const AssemblyOptions& opt) {
  const auto n = mesh.num_nodes();
  if (u.rows() != mesh.dim() || u.cols() != n) throw numerical_error("femcore", "velocity field dimension mismatch");
  if (static_cast<int>(reaction.size()) != n) throw numerical_error("femcore", "reaction field dimension mismatch");
  if (opt.lagged && opt.lagged->size() != n) throw numerical_error("femcore", "lagged field dimension mismatch");
  if (opt.previous && opt.previous->size() != n)
    throw numerical_error("femcore", "previous field dimension mismatch");
  if (!std::isinf(opt.dt) && !opt.previous)
    throw numerical_error("femcore", "transient assembly needs the previous time level");
  for (const auto& [node, value] : opt.dirichlet)
    if (node < 0 || node >= n) throw numerical_error("femcore", "Dirichlet node out of range");
}

template <int Dim>
std::vector<double> dc_viscosity_impl(const Mesh& mesh, const VectorField& u,
                                      const std::vector<ReactionCoefficients>& reaction, const AssemblyOptions& opt) {
  std::vector<double> nu(mesh.num_elements(), 0.0);
  if (opt.dc.op == DcOperator::none || !opt.lagged) return nu;
  const ScalarField& lag = *opt.lagged;
  const double scale = lag.size() ? lag.cwiseAbs().maxCoeff() : 0.0;
  // Layer is ignored once the element variation drops to roundoff relative to the field.
  const double floor_metric = (opt.dc.grad_floor * scale) * (opt.dc.grad_floor * scale);

  parallel_for(mesh.num_elements(), opt.threads, [&](int e) {
    const auto geo = element_geometry<Dim>(mesh, e);
    const auto ue_nodes = gather_velocity<Dim>(mesh, u, e);
    const auto coef = element_coefficients(opt.transform, mean_reaction<Dim>(mesh, reaction, e));
    const NodalVec<Dim> c = gather<Dim>(mesh, lag, e);
    const NodalVec<Dim> c_old = opt.previous ? gather<Dim>(mesh, *opt.previous, e) : c;
    const double r = element_residual<Dim>(geo, ue_nodes, coef, opt.dt, c, c_old);
    const Vector<double, Dim> grad = geo.shape_gradients.transpose() * c;
    const Vector<double, Dim> ue = element_mean<Dim>(ue_nodes);
    if (opt.dc.diffusivity == DcDiffusivity::codina) {
      const double h = longest_edge(mesh, e);
      nu[e] = codina_diffusivity<double, Dim>(r, grad, h, opt.dc.codina_c, floor_metric / (h * h));
    } else {
      const double speed2 = ue.dot(geo.metric * ue);
      double tau_e = 0.0;
      if (!std::isinf(opt.dt) || speed2 > 0.0) tau_e = tau<double, Dim>(ue, geo.metric, opt.dt);
      nu[e] = dc_diffusivity<double, Dim>(r, grad, geo.metric, tau_e, opt.dc.diffusivity, floor_metric);
    }
  });
  return nu;
}

template <int Dim>
AssembledSystem assemble_impl(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                              const AssemblyOptions& opt) {
  const int ne = mesh.num_elements();
  const int nn = mesh.num_nodes();
  const std::vector<double> nu_dc = dc_viscosity_impl<Dim>(mesh, u, reaction, opt);
  const ScalarField zero = ScalarField::Zero(nn);
  const ScalarField& previous = opt.previous ? *opt.previous : zero;

  std::vector<LocalSystem<Dim>> local(ne);
  parallel_for(ne, opt.threads, [&](int e) {
    const auto geo = element_geometry<Dim>(mesh, e);
    const auto ue_nodes = gather_velocity<Dim>(mesh, u, e);
    const auto coef = element_coefficients(opt.transform, mean_reaction<Dim>(mesh, reaction, e));
    local[e] = supg_element<Dim>(geo, ue_nodes, coef, opt.dt, gather<Dim>(mesh, previous, e));
    if (nu_dc[e] > 0.0) {
      const auto m = dc_tensor<double, Dim>(element_mean<Dim>(ue_nodes), geo.jacobian, opt.dc.op);
      local[e].matrix += dc_element_matrix<Dim>(geo, m, nu_dc[e]);
    }
  });

  AssembledSystem sys;
  sys.dirichlet = opt.dirichlet;
  std::vector<int> free_index(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (!sys.dirichlet.count(i)) {
      free_index[i] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(i);
    }
  }
  const int nf = static_cast<int>(sys.free_nodes.size());
  sys.rhs = Eigen::VectorXd::Zero(nf);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(ne) * (Dim + 1) * (Dim + 1));
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a <= Dim; ++a) {
      const int row = free_index[mesh.elements()(a, e)];
      if (row < 0) continue;
      sys.rhs[row] += local[e].rhs[a];
      for (int b = 0; b <= Dim; ++b) {
        const int node_b = mesh.elements()(b, e);
        const int col = free_index[node_b];
        if (col >= 0)
          triplets.emplace_back(row, col, local[e].matrix(a, b));
        else
          sys.rhs[row] -= local[e].matrix(a, b) * sys.dirichlet.at(node_b);
      }
    }
  }
  sys.matrix.resize(nf, nf);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

}  // namespace

std::vector<double> dc_viscosity(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                                 const AssemblyOptions& opt) {
  check_inputs(mesh, u, reaction, opt);
  return mesh.dim() == 2 ? dc_viscosity_impl<2>(mesh, u, reaction, opt) : dc_viscosity_impl<3>(mesh, u, reaction, opt);
}

AssembledSystem assemble(const Mesh& mesh, const VectorField& u, const std::vector<ReactionCoefficients>& reaction,
                         const AssemblyOptions& opt) {
  check_inputs(mesh, u, reaction, opt);
  opt.dc.validate();
  opt.transform.validate();
  return mesh.dim() == 2 ? assemble_impl<2>(mesh, u, reaction, opt) : assemble_impl<3>(mesh, u, reaction, opt);
}

}  // namespace bt
