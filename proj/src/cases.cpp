#include "bt/cases.hpp"

#include <cmath>
#include <random>

namespace bt {

void ChannelSpec::validate() const {
  if (nx < 2 || ny < 2) throw config_error("cases", "channel resolution must be at least 2 x 2");
  if (!(length > 0.0 && height > 0.0)) throw config_error("cases", "channel dimensions must be positive");
  if (!(jitter >= 0.0 && jitter < 0.5)) throw config_error("cases", "jitter must lie in [0, 0.5)");
  if (!(viscosity > 0.0)) throw config_error("cases", "viscosity must be positive");
  law.validate();
}

double channel_velocity(const ChannelSpec& spec, double y) {
  if (y < 0.5) {
    const double d = 0.5 - y;
    return spec.u_max - spec.profile * d * d;
  }
  return spec.u_max;
}

double channel_shear_rate(const ChannelSpec& spec, double y) {
  return y < 0.5 ? 2.0 * spec.profile * (0.5 - y) : 0.0;
}

double channel_analytic(const ChannelSpec& spec, double x, double y) {
  const double sigma = spec.viscosity * channel_shear_rate(spec, y);
  const double rate = powerlaw_coefficients(sigma, spec.law).mu_r;
  if (rate == 0.0 || x <= 0.0) return 0.0;
  return -std::expm1(-rate * x / channel_velocity(spec, y));
}

Mesh rectangle_mesh(int nx, int ny, double length, double height, double jitter, std::uint32_t seed) {
  const int nn = (nx + 1) * (ny + 1);
  Eigen::MatrixXd nodes(2, nn);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  // Raw engine output is portable, distribution objects are not.
  std::mt19937 rng(seed);
  auto offset = [&]() { return jitter * (2.0 * (rng() / 4294967296.0) - 1.0); };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double x = length * i / nx, y = height * j / ny;
      if (jitter > 0.0 && i > 0 && i < nx && j > 0 && j < ny) {
        x += offset() * length / nx;
        y += offset() * height / ny;
      }
      nodes.col(id(i, j)) << x, y;
    }
  }

  Eigen::MatrixXi elements(3, 2 * nx * ny);
  int e = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      elements.col(e++) << n00, n10, n11;
      elements.col(e++) << n00, n11, n01;
    }
  }

  std::vector<BoundaryFacet> facets;
  for (int j = 0; j < ny; ++j) {
    facets.push_back({{id(0, j + 1), id(0, j)}, "inflow"});
    facets.push_back({{id(nx, j), id(nx, j + 1)}, "outflow"});
  }
  for (int i = 0; i < nx; ++i) {
    facets.push_back({{id(i, 0), id(i + 1, 0)}, "bottom"});
    facets.push_back({{id(i + 1, ny), id(i, ny)}, "top"});
  }
  return Mesh(std::move(nodes), std::move(elements), std::move(facets));
}

ChannelCase build_channel(const ChannelSpec& spec) {
  spec.validate();
  ChannelCase out{rectangle_mesh(spec.nx, spec.ny, spec.length, spec.height, spec.jitter, spec.seed), {}, {}};
  const int nn = out.mesh.num_nodes();
  out.velocity = VectorField::Zero(2, nn);
  out.reaction.resize(nn);
  for (int i = 0; i < nn; ++i) {
    const double y = out.mesh.nodes()(1, i);
    out.velocity(0, i) = channel_velocity(spec, y);
    out.reaction[i] = powerlaw_coefficients(spec.viscosity * channel_shear_rate(spec, y), spec.law);
  }
  return out;
}

Problem channel_problem(const ChannelSpec& spec, const Transform& transform, const DCConfig& dc) {
  auto c = build_channel(spec);
  Problem p;
  p.mesh = std::move(c.mesh);
  p.velocity = std::move(c.velocity);
  p.reaction = std::move(c.reaction);
  p.transform = transform;
  p.dc = dc;
  p.inflow_value = spec.inflow;
  return p;
}

}  // namespace bt
