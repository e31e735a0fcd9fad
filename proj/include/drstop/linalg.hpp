#pragma once

#include <array>
#include <optional>

namespace drstop::linalg {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Gaussian elimination with partial pivoting. Returns nullopt when a pivot
/// falls below `singular_tol` times the largest entry of its column.
std::optional<Vec3> solve3(Mat3 a, Vec3 b, double singular_tol = 1e-14);

}  // namespace drstop::linalg
