#pragma once

#include <Eigen/Dense>

#include <array>

namespace bt {

/// Symmetric simplex rule exact for polynomials of degree 2: 3 points on a
/// triangle, 4 points on a tetrahedron. Points are barycentric coordinates,
/// weights sum to one (multiply by the element volume).
template <int Dim>
struct SimplexQuadrature;

template <>
struct SimplexQuadrature<2> {
  static constexpr int size = 3;
  static std::array<Eigen::Vector3d, 3> points() {
    constexpr double a = 2.0 / 3.0, b = 1.0 / 6.0;
    return {Eigen::Vector3d(a, b, b), Eigen::Vector3d(b, a, b), Eigen::Vector3d(b, b, a)};
  }
  static constexpr double weight = 1.0 / 3.0;
};

template <>
struct SimplexQuadrature<3> {
  static constexpr int size = 4;
  static std::array<Eigen::Vector4d, 4> points() {
    constexpr double a = 0.5854101966249685, b = 0.1381966011250105;
    return {Eigen::Vector4d(a, b, b, b), Eigen::Vector4d(b, a, b, b), Eigen::Vector4d(b, b, a, b),
            Eigen::Vector4d(b, b, b, a)};
  }
  static constexpr double weight = 0.25;
};

}  // namespace bt
