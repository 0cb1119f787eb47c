#pragma once

#include <Eigen/Sparse>

#include <vector>

#include "bt/femcore.hpp"
#include "bt/mesh.hpp"
#include "bt/models.hpp"
#include "bt/xform.hpp"

namespace bt {

enum class SolveMode { steady, transient };

struct SolverConfig {
  SolveMode mode = SolveMode::steady;
  double dt = 1e-3;
  int n_steps = 100;
  int dc_passes = 3;
  double linear_tol = 1e-10;
  int max_linear_iters = 20;
  int output_stride = 1;
  int threads = 1;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

/// Everything a solve needs besides the solver settings. Fields are aligned
/// with the mesh node ordering; `inflow_value` is a physical concentration
/// imposed on every inflow node.
struct Problem {
  Mesh mesh;
  VectorField velocity;
  std::vector<ReactionCoefficients> reaction;
  Transform transform;
  DCConfig dc;
  double inflow_value = 0.0;
};

struct PassStats {
  int pass = 0;
  double min = 0.0;
  double max = 0.0;
  int negative_nodes = 0;
};

struct SteadyResult {
  ScalarField cbar;
  std::vector<PassStats> passes;
};

struct TransientResult {
  std::vector<double> times;
  std::vector<ScalarField> fields;
};

/// Direct sparse LU followed by iterative refinement (at most `max_iters`
/// sweeps) until ||Ax - b|| <= tol ||b||.
Eigen::VectorXd linear_solve(const AssembledSystem& sys, double tol, int max_iters);

/// Lagged capturing: pass 1 without capturing, each further pass with the
/// diffusivity evaluated on the previous pass's field.
SteadyResult solve_steady(const Problem& problem, const SolverConfig& cfg);

/// Backward-Euler stepping with the capturing diffusivity lagged one time
/// level. Without `initial` the inflow value is extended uniformly. The
/// returned sequence starts with the initial field.
TransientResult solve_transient(const Problem& problem, const SolverConfig& cfg, const ScalarField* initial = nullptr);

/// Inflow Dirichlet values in the solved variable.
std::map<int, double> inflow_dirichlet(const Problem& problem);

/// Physical concentration for every node.
ScalarField physical_field(const Transform& t, const ScalarField& cbar);

}  // namespace bt
