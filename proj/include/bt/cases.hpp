#pragma once

#include <cstdint>
#include <vector>

#include "bt/mesh.hpp"
#include "bt/models.hpp"
#include "bt/solver.hpp"

namespace bt {

/// Two-dimensional power-law channel: x in [0, length], y in [0, height],
/// u = (u_max - profile (0.5 - y)^2, 0) below y = 0.5 and u_max above.
/// Inflow at x = 0 carries c = 0.
struct ChannelSpec {
  double length = 2.0;     ///< cm
  double height = 0.62;    ///< cm
  double u_max = 300.0;    ///< cm/s
  double profile = 1000.0; ///< cm^-1 s^-1
  double viscosity = 0.35; ///< g/cm/s
  PowerLawParams law{1.0, 2.0, 1.0};
  double inflow = 0.0;
  int nx = 80;
  int ny = 62;
  /// Interior nodes are displaced by up to jitter times the cell size in each
  /// direction; boundary nodes stay put. 0 gives the aligned grid.
  double jitter = 0.0;
  std::uint32_t seed = 42;

  void validate() const;
};

double channel_velocity(const ChannelSpec& spec, double y);
/// |du/dy|.
double channel_shear_rate(const ChannelSpec& spec, double y);
/// Exact linearized index along the streamline through (x, y).
double channel_analytic(const ChannelSpec& spec, double x, double y);

/// Structured triangulation of [0, length] x [0, height] with nx x ny cells,
/// each split along its rising diagonal. Node (i, j) has index j (nx+1) + i.
/// Facet markers: inflow (x = 0), outflow, bottom, top.
Mesh rectangle_mesh(int nx, int ny, double length, double height, double jitter = 0.0, std::uint32_t seed = 42);

struct ChannelCase {
  Mesh mesh;
  VectorField velocity;
  std::vector<ReactionCoefficients> reaction;
};

ChannelCase build_channel(const ChannelSpec& spec);

/// Ready-to-solve channel problem.
Problem channel_problem(const ChannelSpec& spec, const Transform& transform, const DCConfig& dc);

}  // namespace bt
