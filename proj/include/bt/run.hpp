#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "bt/config.hpp"
#include "bt/postproc.hpp"

namespace bt {

/// Volume-weighted average of the elementwise constant gradients;
/// entry (i, j) of each matrix is du_i/dx_j.
std::vector<Eigen::MatrixXd> recover_velocity_gradient(const Mesh& mesh, const VectorField& u);

/// Shape tensor after integrating from the unit sphere under each node's
/// (frozen) velocity gradient, 2D gradients embedded in the x-y plane.
std::vector<Eigen::Matrix3d> morphology_states(const std::vector<Eigen::MatrixXd>& grads, const RunConfig& cfg);

/// Per-node reaction coefficients for the configured model.
std::vector<ReactionCoefficients> build_reaction(const Mesh& mesh, const VectorField& u, const RunConfig& cfg);

struct RunSummary {
  FieldStats stats;
  std::vector<PassStats> passes;
  std::optional<double> ih_out;
  std::optional<double> delta_phb;
  std::optional<double> l2_error;  ///< against the analytic channel solution
  std::vector<std::filesystem::path> written;
};

/// Builds the problem, solves it and writes solution.vtk (when enabled),
/// stats.csv and one line_<name>.csv per probe into cfg.output_dir.
RunSummary run(const RunConfig& cfg);

}  // namespace bt
