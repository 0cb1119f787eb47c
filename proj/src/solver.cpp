#include "bt/solver.hpp"

#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>

namespace bt {

void SolverConfig::validate() const {
  if (dc_passes < 1) throw config_error("solver", "solver.dc_passes must be at least 1");
  if (!(linear_tol > 0.0)) throw config_error("solver", "solver.linear_tol must be positive");
  if (max_linear_iters < 0) throw config_error("solver", "solver.max_linear_iters must be non-negative");
  if (mode == SolveMode::transient) {
    if (!(dt > 0.0) || std::isinf(dt)) throw config_error("solver", "solver.dt must be positive and finite");
    if (n_steps < 0) throw config_error("solver", "solver.n_steps must be non-negative");
    if (output_stride < 1) throw config_error("solver", "solver.output_stride must be at least 1");
  }
  if (threads < 1) throw config_error("solver", "threads must be at least 1");
}

Eigen::VectorXd linear_solve(const AssembledSystem& sys, double tol, int max_iters) {
  const auto& a = sys.matrix;
  const auto& b = sys.rhs;
  if (a.rows() != a.cols() || a.rows() != b.size()) throw numerical_error("solver", "linear system is not square");
  if (a.rows() == 0) return Eigen::VectorXd();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw numerical_error("solver", "singular matrix: " + lu.lastErrorMessage());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());

  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw numerical_error("solver", "singular matrix: non-finite solution");
  Eigen::VectorXd r = b - a * x;
  double rel = r.norm() / bnorm;
  for (int it = 0; rel > tol && it < max_iters; ++it) {
    x += lu.solve(r);
    r = b - a * x;
    rel = r.norm() / bnorm;
  }
  if (!(rel <= tol)) {
    std::ostringstream msg;
    msg << "linear solve did not converge: relative residual " << rel << " > " << tol;
    throw numerical_error("solver", msg.str());
  }
  return x;
}

std::map<int, double> inflow_dirichlet(const Problem& problem) {
  const double value = to_transformed(problem.transform, problem.inflow_value);
  std::map<int, double> out;
  for (int n : inflow_nodes(problem.mesh, problem.velocity)) out[n] = value;
  return out;
}

ScalarField physical_field(const Transform& t, const ScalarField& cbar) {
  return cbar.unaryExpr([&t](double v) { return to_physical(t, v); });
}

namespace {

PassStats pass_stats(int pass, const Transform& t, const ScalarField& cbar) {
  const ScalarField c = physical_field(t, cbar);
  PassStats s;
  s.pass = pass;
  s.min = c.minCoeff();
  s.max = c.maxCoeff();
  s.negative_nodes = static_cast<int>((c.array() < 0.0).count());
  spdlog::info("pass={} min={:.6e} max={:.6e} neg_nodes={}", s.pass, s.min, s.max, s.negative_nodes);
  return s;
}

void check_problem(const Problem& p) {
  const int n = p.mesh.num_nodes();
  if (p.velocity.rows() != p.mesh.dim() || p.velocity.cols() != n)
    throw numerical_error("solver", "velocity field does not match the mesh");
  if (static_cast<int>(p.reaction.size()) != n) throw numerical_error("solver", "reaction field does not match the mesh");
  p.transform.validate();
  p.dc.validate();
  // The transformed equation assumes the model saturates at transform.nu.
  if (p.transform.kind != TransformKind::identity) {
    for (const auto& r : p.reaction) {
      if (r.mu_r != 0.0 && std::abs(r.nu_r - p.transform.nu) > 1e-12 * p.transform.nu)
        throw config_error("solver", "transform.nu must equal the model saturation value " + std::to_string(r.nu_r));
    }
  }
}

}  // namespace

SteadyResult solve_steady(const Problem& problem, const SolverConfig& cfg) {
  cfg.validate();
  check_problem(problem);
  AssemblyOptions opt;
  opt.transform = problem.transform;
  opt.dc = problem.dc;
  opt.dt = steady;
  opt.dirichlet = inflow_dirichlet(problem);
  opt.threads = cfg.threads;

  const int passes = problem.dc.op == DcOperator::none ? 1 : cfg.dc_passes;
  SteadyResult result;
  ScalarField lagged;
  for (int pass = 1; pass <= passes; ++pass) {
    opt.lagged = pass == 1 ? nullptr : &lagged;
    const auto sys = assemble(problem.mesh, problem.velocity, problem.reaction, opt);
    const auto x = linear_solve(sys, cfg.linear_tol, cfg.max_linear_iters);
    result.cbar = sys.expand(x, problem.mesh.num_nodes());
    result.passes.push_back(pass_stats(pass, problem.transform, result.cbar));
    lagged = result.cbar;
  }
  return result;
}

TransientResult solve_transient(const Problem& problem, const SolverConfig& cfg, const ScalarField* initial) {
  cfg.validate();
  check_problem(problem);
  AssemblyOptions opt;
  opt.transform = problem.transform;
  opt.dc = problem.dc;
  opt.dt = cfg.dt;
  opt.dirichlet = inflow_dirichlet(problem);
  opt.threads = cfg.threads;

  ScalarField current;
  if (initial) {
    if (initial->size() != problem.mesh.num_nodes())
      throw numerical_error("solver", "initial condition does not match the mesh");
    current = *initial;
  } else {
    current = ScalarField::Constant(problem.mesh.num_nodes(), to_transformed(problem.transform, problem.inflow_value));
  }

  TransientResult out;
  out.times.push_back(0.0);
  out.fields.push_back(current);
  for (int step = 1; step <= cfg.n_steps; ++step) {
    const ScalarField previous = current;
    opt.previous = &previous;
    opt.lagged = problem.dc.op == DcOperator::none ? nullptr : &previous;
    const auto sys = assemble(problem.mesh, problem.velocity, problem.reaction, opt);
    current = sys.expand(linear_solve(sys, cfg.linear_tol, cfg.max_linear_iters), problem.mesh.num_nodes());
    spdlog::debug("step={} t={:.6e}", step, step * cfg.dt);
    if (step % cfg.output_stride == 0 || step == cfg.n_steps) {
      out.times.push_back(step * cfg.dt);
      out.fields.push_back(current);
    }
  }
  return out;
}

}  // namespace bt
