#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss.hpp>

#include <random>

#include "bt/cases.hpp"
#include "bt/femcore.hpp"
#include "test_util.hpp"

using namespace bt;
using bt::test::error_kind;
using bt::test::rel_err;

namespace {

Transform identity_transform() {
  Transform t;
  t.kind = TransformKind::identity;
  return t;
}

// Unit cube split into n^3 cells of six tetrahedra each (Kuhn subdivision).
Mesh cube_mesh(int n) {
  auto id = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  Eigen::MatrixXd nodes(3, (n + 1) * (n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) nodes.col(id(i, j, k)) << double(i) / n, double(j) / n, double(k) / n;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  Eigen::MatrixXi elements(4, 6 * n * n * n);
  int e = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          elements(0, e) = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            elements(s + 1, e) = id(c[0], c[1], c[2]);
          }
          ++e;
        }
  return Mesh(std::move(nodes), std::move(elements));
}

Eigen::VectorXd solve(const AssembledSystem& sys) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.matrix);
  REQUIRE(lu.info() == Eigen::Success);
  return lu.solve(sys.rhs);
}

// Gram matrix of the symmetric simplex edges leaving vertex 0.
template <int Dim>
SquareMatrix<double, Dim> reference_gram() {
  SquareMatrix<double, Dim> g = SquareMatrix<double, Dim>::Constant(0.5);
  g.diagonal().setOnes();
  return g;
}

template <int Dim>
Eigen::Matrix<double, Dim, Dim + 1> random_simplex(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  while (true) {
    Eigen::Matrix<double, Dim, Dim + 1> x;
    for (int i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
    SquareMatrix<double, Dim> e;
    for (int a = 0; a < Dim; ++a) e.col(a) = x.col(a + 1) - x.col(0);
    const double det = e.determinant();
    if (std::abs(det) < 0.05) continue;
    if (det < 0) x.col(1).swap(x.col(2));
    return x;
  }
}

}  // namespace

TEST_CASE("tau examples") {
  const Eigen::Vector2d u(2.0, 0.0);
  CHECK(tau<double, 2>(u, Eigen::Matrix2d::Identity(), steady) == 0.5);
  CHECK(tau<double, 2>(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), 0.1) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(error_kind([] { tau<double, 2>(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), steady); }) ==
        ErrorKind::numerical);

  // Channel cell of the 80 x 62 grid, first triangle.
  Eigen::Matrix<double, 2, 3> x;
  x << 0.0, 0.025, 0.025, 0.0, 0.0, 0.01;
  const auto geo = element_geometry<double, 2>(x);
  Eigen::Matrix2d edges;
  edges << 0.025, 0.025, 0.0, 0.01;
  const Eigen::Matrix2d g = edges.inverse().transpose() * reference_gram<2>() * edges.inverse();
  const Eigen::Vector2d uc(287.5, 0.0);
  const double dt = 2.5e-4;
  const double oracle = 1.0 / std::sqrt(4.0 / (dt * dt) + uc.dot(g * uc));
  CHECK(rel_err(tau<double, 2>(uc, geo.metric, dt), oracle) < 1e-14);
}

TEST_CASE("Shakib diffusivities") {
  const Eigen::Vector2d grad(1.0, 0.0);
  const Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
  CHECK(dc_diffusivity<double, 2>(2.0, grad, g, 0.25, DcDiffusivity::dc_lin, 0.0) == 2.0);
  CHECK(dc_diffusivity<double, 2>(2.0, grad, g, 0.25, DcDiffusivity::dc_quad, 0.0) == 2.0);
  CHECK(dc_diffusivity<double, 2>(0.0, grad, g, 0.25, DcDiffusivity::dc_lin, 0.0) == 0.0);
  CHECK(dc_diffusivity<double, 2>(0.0, grad, g, 0.25, DcDiffusivity::dc_quad, 0.0) == 0.0);
  CHECK(dc_diffusivity<double, 2>(2.0, Eigen::Vector2d::Zero(), g, 0.25, DcDiffusivity::dc_lin, 0.0) == 0.0);
  CHECK(dc_diffusivity<double, 2>(2.0, Eigen::Vector2d::Zero(), g, 0.25, DcDiffusivity::dc_quad, 0.0) == 0.0);
  // Below the floor nothing is added.
  CHECK(dc_diffusivity<double, 2>(2.0, (1e-9 * grad).eval(), g, 0.25, DcDiffusivity::dc_lin, 1e-16) == 0.0);

  // Anisotropic metric: q = grad . G^-1 grad.
  Eigen::Matrix2d ga;
  ga << 4.0, 1.0, 1.0, 2.0;
  const Eigen::Vector2d gr(0.3, -0.7);
  const double q = gr.dot(ga.inverse() * gr);
  CHECK(rel_err(dc_diffusivity<double, 2>(1.5, gr, ga, 0.1, DcDiffusivity::dc_lin, 0.0), 1.5 / std::sqrt(q)) < 1e-14);
  CHECK(rel_err(dc_diffusivity<double, 2>(1.5, gr, ga, 0.1, DcDiffusivity::dc_quad, 0.0), 0.2 * 2.25 / q) < 1e-14);
}

TEST_CASE("Codina diffusivity") {
  const Eigen::Vector2d grad(0.0, 2.0);
  CHECK(codina_diffusivity<double, 2>(1.0, grad, 0.1, 0.7, 0.0) == doctest::Approx(0.0175).epsilon(1e-15));
  CHECK(codina_diffusivity<double, 2>(0.0, grad, 0.1, 0.7, 0.0) == 0.0);
  CHECK(codina_diffusivity<double, 2>(1.0, Eigen::Vector2d::Zero(), 0.1, 0.7, 0.0) == 0.0);
}

TEST_CASE("capturing tensors") {
  CHECK(dc_tensor<double, 2>(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity(), DcOperator::isotropic) ==
        Eigen::Matrix2d::Identity());
  const auto ref = element_geometry<double, 2>(symmetric_simplex_vertices<double, 2>());
  CHECK((dc_tensor<double, 2>(Eigen::Vector2d(1, 2), ref.jacobian, DcOperator::isotropic) - Eigen::Matrix2d::Identity())
            .norm() < 1e-15);
  const Eigen::Matrix2d phys = dc_tensor<double, 2>(Eigen::Vector2d(1, 0), ref.jacobian, DcOperator::cwd_physical);
  CHECK(phys == Eigen::Vector2d(0.0, 1.0).asDiagonal().toDenseMatrix());
  CHECK(dc_tensor<double, 2>(Eigen::Vector2d(1, 0), ref.jacobian, DcOperator::none).norm() == 0.0);
  // Stagnant element: no direction to remove.
  CHECK(dc_tensor<double, 2>(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), DcOperator::cwd_physical) ==
        Eigen::Matrix2d::Identity());
}

TEST_CASE("crosswind tensors annihilate the streamline direction") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto geo = element_geometry<double, 3>(random_simplex<3>(rng));
    const Eigen::Vector3d u(d(rng), d(rng), d(rng));
    const Eigen::Matrix3d m = dc_tensor<double, 3>(u, geo.jacobian, DcOperator::cwd_reference);
    const Eigen::Vector3d gu = geo.metric * u;
    CHECK((m * gu).norm() <= 1e-12 * m.norm() * gu.norm());
    const Eigen::Matrix3d p = geo.inverse_jacobian * m * geo.inverse_jacobian.transpose();
    CHECK((p * p - p).norm() < 1e-12);
    const Eigen::Matrix3d mp = dc_tensor<double, 3>(u, geo.jacobian, DcOperator::cwd_physical);
    CHECK((mp * u).norm() <= 1e-12 * u.norm());
  }
}

TEST_CASE("capturing tensors are symmetric positive semidefinite") {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto geo = element_geometry<double, 2>(random_simplex<2>(rng));
    const Eigen::Vector2d u(d(rng), d(rng));
    for (auto op : {DcOperator::isotropic, DcOperator::cwd_reference, DcOperator::cwd_physical}) {
      const Eigen::Matrix2d m = dc_tensor<double, 2>(u, geo.jacobian, op);
      CHECK((m - m.transpose()).norm() <= 1e-14 * (1.0 + m.norm()));
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * (1.0 + m.norm()));
    }
  }
}

TEST_CASE("isotropic and crosswind fluxes agree across the reference streamline") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto geo = element_geometry<double, 2>(random_simplex<2>(rng));
    const Eigen::Vector2d u(d(rng), d(rng));
    const Eigen::Vector2d ub = geo.inverse_jacobian * u;
    // Reference-frame gradient perpendicular to ub.
    const Eigen::Vector2d grad = geo.inverse_jacobian.transpose() * Eigen::Vector2d(-ub.y(), ub.x());
    const Eigen::Vector2d iso = dc_tensor<double, 2>(u, geo.jacobian, DcOperator::isotropic) * grad;
    const Eigen::Vector2d cwd = dc_tensor<double, 2>(u, geo.jacobian, DcOperator::cwd_reference) * grad;
    CHECK((iso - cwd).norm() <= 1e-12 * iso.norm());
  }
}

TEST_CASE("element coefficients per transform") {
  const ReactionCoefficients r{3.0, 0.64};
  const auto id = element_coefficients(identity_transform(), r);
  CHECK(id.source == doctest::Approx(1.92).epsilon(1e-15));
  CHECK(id.reaction == 3.0);
  Transform up;
  up.nu = 0.64;
  up.k = 2.0;
  const auto ub = element_coefficients(up, r);
  CHECK(ub.source == 6.0);
  CHECK(ub.reaction == 0.0);
}

TEST_CASE("stagnant reaction-free element contributes nothing") {
  const auto geo = element_geometry<double, 2>(symmetric_simplex_vertices<double, 2>());
  const auto local = supg_element<2>(geo, Eigen::Matrix<double, 2, 3>::Zero(), {}, steady, Eigen::Vector3d::Zero());
  CHECK(local.matrix.norm() == 0.0);
  CHECK(local.rhs.norm() == 0.0);
}

TEST_CASE("element integrals match a collapsed-coordinate Gauss rule") {
  using boost::math::quadrature::gauss;
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_simplex<2>(rng);
    const auto geo = element_geometry<double, 2>(x);
    Eigen::Matrix<double, 2, 3> u;
    for (int i = 0; i < 6; ++i) u.data()[i] = d(rng);
    const Eigen::Vector3d old(d(rng), d(rng), d(rng));
    const ElementCoefficients coef{d(rng), std::abs(d(rng))};
    const double dt = 0.05;
    const auto local = supg_element<2>(geo, u, coef, dt, old);

    const Eigen::Vector2d ue = u.rowwise().mean();
    const double t = 1.0 / std::sqrt(4.0 / (dt * dt) + ue.dot(geo.metric * ue));
    Eigen::Matrix3d mat;
    Eigen::Vector3d rhs;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b <= 3; ++b) {
        // Integrand over the unit triangle in (r, s) = (lambda_1, lambda_2), collapsed to the square.
        auto f = [&](double p, double q) {
          const double r = p, s = q * (1.0 - p);
          const Eigen::Vector3d n(1.0 - r - s, r, s);
          const Eigen::Vector2d uq = u * n;
          const Eigen::Vector3d adv = geo.shape_gradients * uq;
          const double test = n[a] + t * adv[a];
          const double value = b < 3 ? adv[b] + (1.0 / dt + coef.reaction) * n[b] : coef.source + n.dot(old) / dt;
          return test * value * (1.0 - p);
        };
        const double integral = gauss<double, 10>::integrate(
            [&](double p) { return gauss<double, 10>::integrate([&](double q) { return f(p, q); }, 0.0, 1.0); }, 0.0,
            1.0);
        // Unit triangle has area 1/2.
        const double value = integral * 2.0 * geo.volume;
        if (b < 3)
          mat(a, b) = value;
        else
          rhs[a] = value;
      }
    }
    CHECK((local.matrix - mat).norm() <= 1e-12 * mat.norm());
    CHECK((local.rhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("linear solution along the flow is reproduced in 2D") {
  const Mesh mesh = rectangle_mesh(6, 5, 1.0, 1.0, 0.3, 9);
  const Eigen::Vector2d u(2.0, 1.0);
  const double s = 3.0;
  VectorField vel = u.replicate(1, mesh.num_nodes());
  std::vector<ReactionCoefficients> reaction(mesh.num_nodes(), {s, 1.0});
  auto exact = [&](int i) { return s * u.dot(mesh.nodes().col(i)) / u.squaredNorm(); };
  AssemblyOptions opt;  // upper-bound transform, k = 1: source s, no reaction
  for (int n : inflow_nodes(mesh, vel)) opt.dirichlet[n] = exact(n);
  const auto sys = assemble(mesh, vel, reaction, opt);
  CHECK(sys.free_nodes.size() > 10);
  const ScalarField c = sys.expand(solve(sys), mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) CHECK(std::abs(c[i] - exact(i)) < 1e-12);
}

TEST_CASE("linear solution along the flow is reproduced in 3D") {
  const Mesh mesh = cube_mesh(3);
  CHECK(mesh.num_elements() == 162);
  const Eigen::Vector3d u(1.0, 0.4, -0.3);
  const double s = 0.7;
  VectorField vel = u.replicate(1, mesh.num_nodes());
  std::vector<ReactionCoefficients> reaction(mesh.num_nodes(), {s, 1.0});
  auto exact = [&](int i) { return s * u.dot(mesh.nodes().col(i)) / u.squaredNorm(); };
  AssemblyOptions opt;
  for (int n : inflow_nodes(mesh, vel)) opt.dirichlet[n] = exact(n);
  const auto sys = assemble(mesh, vel, reaction, opt);
  CHECK(!sys.free_nodes.empty());
  const ScalarField c = sys.expand(solve(sys), mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) CHECK(std::abs(c[i] - exact(i)) < 1e-12);
}

TEST_CASE("constant inflow gives a constant field") {
  ChannelSpec spec;
  spec.nx = 10;
  spec.ny = 8;
  spec.jitter = 0.3;
  auto channel = build_channel(spec);
  std::vector<ReactionCoefficients> reaction(channel.mesh.num_nodes(), {0.0, 1.0});
  const double v = 0.37;
  AssemblyOptions opt;
  opt.transform = identity_transform();
  for (int n : inflow_nodes(channel.mesh, channel.velocity)) opt.dirichlet[n] = v;
  const auto sys0 = assemble(channel.mesh, channel.velocity, reaction, opt);
  const ScalarField c = sys0.expand(solve(sys0), channel.mesh.num_nodes());
  CHECK((c.array() - v).abs().maxCoeff() < 1e-12);

  opt.dc.op = DcOperator::isotropic;
  opt.lagged = &c;
  const auto nu = dc_viscosity(channel.mesh, channel.velocity, reaction, opt);
  CHECK(*std::max_element(nu.begin(), nu.end()) == 0.0);
  const auto sys = assemble(channel.mesh, channel.velocity, reaction, opt);
  const ScalarField c2 = sys.expand(solve(sys), channel.mesh.num_nodes());
  CHECK((c2.array() - v).abs().maxCoeff() < 1e-12);
}

TEST_CASE("zero residual switches off stabilization and capturing") {
  const Mesh mesh = rectangle_mesh(5, 4, 1.0, 0.8, 0.25, 3);
  const Eigen::Vector2d u(1.5, -0.5);
  const double s = 2.0;
  VectorField vel = u.replicate(1, mesh.num_nodes());
  std::vector<ReactionCoefficients> reaction(mesh.num_nodes(), {s, 1.0});
  ScalarField exact(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) exact[i] = s * u.dot(mesh.nodes().col(i)) / u.squaredNorm() + 1.0;

  for (auto op : {DcOperator::isotropic, DcOperator::cwd_reference, DcOperator::cwd_physical}) {
    for (auto kind : {DcDiffusivity::dc_lin, DcDiffusivity::dc_quad, DcDiffusivity::codina}) {
      AssemblyOptions opt;
      opt.dc.op = op;
      opt.dc.diffusivity = kind;
      opt.lagged = &exact;
      for (double nu : dc_viscosity(mesh, vel, reaction, opt)) CHECK(nu <= 1e-12);
    }
  }
  Transform up;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto geo = element_geometry<2>(mesh, e);
    Eigen::Vector3d ce;
    for (int a = 0; a < 3; ++a) ce[a] = exact[mesh.elements()(a, e)];
    const auto local = supg_element<2>(geo, vel.leftCols<3>(), element_coefficients(up, {s, 1.0}), steady, ce);
    CHECK((local.matrix * ce - local.rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("capturing diffusivity is non-negative") {
  ChannelSpec spec;
  spec.nx = 20;
  spec.ny = 12;
  spec.jitter = 0.3;
  auto channel = build_channel(spec);
  std::mt19937 rng(25);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField lag(channel.mesh.num_nodes());
  for (auto& v : lag) v = d(rng);
  for (auto op : {DcOperator::isotropic, DcOperator::cwd_reference, DcOperator::cwd_physical}) {
    for (auto kind : {DcDiffusivity::dc_lin, DcDiffusivity::dc_quad, DcDiffusivity::codina}) {
      AssemblyOptions opt;
      opt.dc.op = op;
      opt.dc.diffusivity = kind;
      opt.lagged = &lag;
      const auto nu = dc_viscosity(channel.mesh, channel.velocity, channel.reaction, opt);
      CHECK(*std::min_element(nu.begin(), nu.end()) >= 0.0);
      CHECK(*std::max_element(nu.begin(), nu.end()) > 0.0);
    }
  }
}

TEST_CASE("assembly is bitwise deterministic across repeats and threads") {
  ChannelSpec spec;
  spec.nx = 24;
  spec.ny = 16;
  spec.jitter = 0.3;
  auto channel = build_channel(spec);
  ScalarField lag = channel.mesh.nodes().row(0).transpose();
  AssemblyOptions opt;
  opt.dc.op = DcOperator::cwd_reference;
  opt.lagged = &lag;
  for (int n : inflow_nodes(channel.mesh, channel.velocity)) opt.dirichlet[n] = 0.0;
  const auto a = assemble(channel.mesh, channel.velocity, channel.reaction, opt);
  const auto b = assemble(channel.mesh, channel.velocity, channel.reaction, opt);
  opt.threads = 3;
  const auto c = assemble(channel.mesh, channel.velocity, channel.reaction, opt);
  for (const auto* other : {&b, &c}) {
    CHECK(other->matrix.nonZeros() == a.matrix.nonZeros());
    CHECK(std::equal(a.matrix.valuePtr(), a.matrix.valuePtr() + a.matrix.nonZeros(), other->matrix.valuePtr()));
    CHECK(std::equal(a.matrix.innerIndexPtr(), a.matrix.innerIndexPtr() + a.matrix.nonZeros(),
                     other->matrix.innerIndexPtr()));
    CHECK(a.rhs == other->rhs);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const Mesh mesh = rectangle_mesh(2, 2, 1.0, 1.0);
  std::vector<ReactionCoefficients> reaction(mesh.num_nodes());
  AssemblyOptions opt;
  CHECK(error_kind([&] { assemble(mesh, VectorField::Ones(3, mesh.num_nodes()), reaction, opt); }) ==
        ErrorKind::numerical);
  CHECK(error_kind([&] { assemble(mesh, VectorField::Ones(2, 4), reaction, opt); }) == ErrorKind::numerical);
  CHECK(error_kind([&] { assemble(mesh, VectorField::Ones(2, mesh.num_nodes()), {}, opt); }) == ErrorKind::numerical);
  ScalarField short_field = ScalarField::Zero(3);
  opt.lagged = &short_field;
  opt.dc.op = DcOperator::isotropic;
  CHECK(error_kind([&] { assemble(mesh, VectorField::Ones(2, mesh.num_nodes()), reaction, opt); }) ==
        ErrorKind::numerical);
  AssemblyOptions transient;
  transient.dt = 0.1;
  CHECK(error_kind([&] { assemble(mesh, VectorField::Ones(2, mesh.num_nodes()), reaction, transient); }) ==
        ErrorKind::numerical);
}

TEST_CASE("parsing of capturing names") {
  for (auto op : {DcOperator::none, DcOperator::isotropic, DcOperator::cwd_reference, DcOperator::cwd_physical})
    CHECK(parse_dc_operator(to_string(op)) == op);
  for (auto d : {DcDiffusivity::dc_lin, DcDiffusivity::dc_quad, DcDiffusivity::codina})
    CHECK(parse_dc_diffusivity(to_string(d)) == d);
  CHECK(error_kind([] { parse_dc_operator("cwd"); }) == ErrorKind::config);
  CHECK(error_kind([] { DCConfig{DcOperator::none, DcDiffusivity::dc_quad, 0.0, 1e-14}.validate(); }) ==
        ErrorKind::config);
}
