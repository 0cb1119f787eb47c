#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

#include "bt/cases.hpp"
#include "bt/postproc.hpp"
#include "test_util.hpp"

using namespace bt;
using bt::test::error_kind;
using bt::test::rel_err;
using mp = boost::multiprecision::cpp_bin_float_50;

TEST_CASE("statistics of simple fields") {
  const Mesh m = rectangle_mesh(2, 2, 1.0, 1.0);
  const auto zero = field_stats(m, ScalarField::Zero(m.num_nodes()));
  CHECK(zero.min == 0.0);
  CHECK(zero.max == 0.0);
  CHECK(zero.negative_nodes == 0);
  CHECK(zero.negative_volume_fraction == 0.0);

  // Node 0 is the corner touched only by the first triangle of cell (0, 0).
  ScalarField f = ScalarField::Ones(m.num_nodes());
  f[0] = -0.25;
  const auto s = field_stats(m, f);
  CHECK(s.min == -0.25);
  CHECK(s.max == 1.0);
  CHECK(s.negative_nodes == 1);
  double touching = 0.0;
  for (int e = 0; e < m.num_elements(); ++e)
    for (int a = 0; a < 3; ++a)
      if (m.elements()(a, e) == 0) touching += m.element_volume(e);
  CHECK(s.negative_volume_fraction == doctest::Approx(touching / m.total_volume()).epsilon(1e-15));
  CHECK(s.negative_volume_fraction == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("line samples of constant and linear fields") {
  const Mesh m = rectangle_mesh(7, 5, 2.0, 1.0, 0.3, 4);
  const ScalarField constant = ScalarField::Constant(m.num_nodes(), 0.7);
  ScalarField linear(m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i) linear[i] = 3.0 * m.nodes()(0, i) - 2.0 * m.nodes()(1, i) + 0.5;
  const Eigen::Vector2d p0(0.1, 0.05), p1(1.9, 0.95);
  const auto cs = sample_line(m, constant, p0, p1, 17);
  const auto ls = sample_line(m, linear, p0, p1, 17);
  REQUIRE(cs.size() == 17);
  for (int i = 0; i < 17; ++i) {
    REQUIRE(cs[i].value);
    CHECK(std::abs(*cs[i].value - 0.7) < 1e-14);
    const Eigen::Vector2d x = p0 + (p1 - p0) * i / 16.0;
    CHECK((cs[i].point - x).norm() < 1e-14);
    CHECK(cs[i].s == doctest::Approx((p1 - p0).norm() * i / 16.0));
    REQUIRE(ls[i].value);
    CHECK(std::abs(*ls[i].value - (3.0 * x.x() - 2.0 * x.y() + 0.5)) < 1e-13);
  }
}

TEST_CASE("line samples on the wall hit nodal values") {
  const Mesh m = rectangle_mesh(8, 4, 2.0, 0.62, 0.3, 42);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(m.num_nodes());
  for (auto& v : f) v = d(rng);
  const auto s = sample_line(m, f, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, 0.0), 9);
  for (int i = 0; i <= 8; ++i) {
    REQUIRE(s[i].value);
    CHECK(std::abs(*s[i].value - f[i]) < 1e-13);
  }
}

TEST_CASE("line samples outside the mesh are absent") {
  const Mesh m = rectangle_mesh(4, 4, 1.0, 1.0);
  const ScalarField f = ScalarField::Ones(m.num_nodes());
  const auto s = sample_line(m, f, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.5, 0.5), 11);
  int present = 0;
  for (const auto& x : s) present += x.value.has_value();
  CHECK(present == 6);
  CHECK(!s.back().value);
  CHECK(error_kind([&] { sample_line(m, f, Eigen::Vector2d(2, 2), Eigen::Vector2d(3, 3), 5); }) == ErrorKind::config);
}

TEST_CASE("outflow average") {
  ChannelSpec spec;
  spec.nx = 6;
  spec.ny = 31;
  const auto ch = build_channel(spec);
  const ScalarField q = ScalarField::Constant(ch.mesh.num_nodes(), 0.123);
  CHECK(outflow_average(ch.mesh, q, ch.velocity, "outflow") == doctest::Approx(0.123).epsilon(1e-14));

  // Uniform flow: the average of a field linear in y is its mean over the outlet.
  VectorField uniform = VectorField::Zero(2, ch.mesh.num_nodes());
  uniform.row(0).setConstant(5.0);
  ScalarField lin(ch.mesh.num_nodes());
  for (int i = 0; i < ch.mesh.num_nodes(); ++i) lin[i] = 2.0 * ch.mesh.nodes()(1, i) + 1.0;
  CHECK(outflow_average(ch.mesh, lin, uniform, "outflow") == doctest::Approx(0.62 + 1.0).epsilon(1e-14));

  // Scaling the velocity cancels.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  ScalarField r(ch.mesh.num_nodes());
  for (auto& v : r) v = d(rng);
  const double base = outflow_average(ch.mesh, r, ch.velocity, "outflow");
  CHECK(rel_err(outflow_average(ch.mesh, r, (7.5 * ch.velocity).eval(), "outflow"), base) < 1e-14);

  CHECK(error_kind([&] { outflow_average(ch.mesh, q, VectorField::Zero(2, ch.mesh.num_nodes()), "outflow"); }) ==
        ErrorKind::numerical);
  CHECK(error_kind([&] { outflow_average(ch.mesh, q, ch.velocity, "outlet"); }) == ErrorKind::config);
}

TEST_CASE("outflow average on a single facet with linear velocity") {
  // One triangle; the outflow facet is the segment x = 1 from (1, 0) to (1, 1).
  Eigen::MatrixXd nodes(2, 3);
  nodes << 0.0, 1.0, 1.0, 0.5, 0.0, 1.0;
  Eigen::MatrixXi elements(3, 1);
  elements << 0, 1, 2;
  const Mesh m(nodes, elements, {{{1, 2}, "out"}});
  ScalarField f(3);
  f << 9.0, 2.0, 4.0;
  VectorField u = VectorField::Zero(2, 3);
  u.row(0) << 1.0, 1.0, 1.0;
  CHECK(outflow_average(m, f, u, "out") == doctest::Approx(3.0).epsilon(1e-15));
  // u.n = 1 + y, f = 2 + 2 y: int (1+y)(2+2y) / int (1+y) = (14/3) / (3/2).
  u.row(0) << 1.0, 1.0, 2.0;
  CHECK(outflow_average(m, f, u, "out") == doctest::Approx(28.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("plasma hemoglobin conversion") {
  CHECK(delta_phb(0.0, default_hb, 0.36, 6.0, 120.0, 250.0) == 0.0);
  // Increase of 36.11 mg/dL at 6 L/min, inverted.
  const double scale = 15000.0 / 0.64 * 6000.0 * 120.0 / 250.0;
  const double ih = 36.11 / scale;
  CHECK(delta_phb(ih, default_hb, 0.36, 6.0, 120.0, 250.0) == doctest::Approx(36.11).epsilon(1e-14));
  CHECK(delta_phb(ih, default_hb, 0.36, 12.0, 120.0, 250.0) == doctest::Approx(72.22).epsilon(1e-14));

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double i = 1e-6 * d(rng), hb = 10000 + 8000 * d(rng), hct = 0.2 + 0.5 * d(rng);
    const double q = 1 + 8 * d(rng), t = 10 + 200 * d(rng), v = 100 + 400 * d(rng);
    const mp oracle = mp(i) * mp(hb) / (1 - mp(hct)) * (mp(q) * 1000 * mp(t)) / mp(v);
    CHECK(rel_err(delta_phb(i, hb, hct, q, t, v), static_cast<double>(oracle)) < 1e-14);
    CHECK(rel_err(delta_phb(2 * i, hb, hct, q, t, v), 2 * delta_phb(i, hb, hct, q, t, v)) < 1e-15);
    CHECK(rel_err(delta_phb(i, hb, hct, q, t, 2 * v), 0.5 * delta_phb(i, hb, hct, q, t, v)) < 1e-15);
  }
  CHECK(error_kind([] { delta_phb(1e-6, default_hb, 1.0, 6.0, 120.0, 250.0); }) == ErrorKind::config);
}
