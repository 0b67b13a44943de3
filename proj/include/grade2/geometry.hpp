#pragma once

#include <Eigen/Dense>

#include <functional>

namespace grade2 {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using ScalarFunction = std::function<double(double, double)>;
using VectorFunction = std::function<Vec2(double, double)>;
/// Gradient of a vector field, row i = gradient of component i.
using TensorFunction = std::function<Mat2(double, double)>;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace grade2
