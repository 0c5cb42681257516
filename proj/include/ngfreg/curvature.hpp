#pragma once

#include <vector>

#include "ngfreg/transforms.hpp"

namespace ngfreg {

/// Curvature regularizer 1/2 (|Lap u1|^2 + |Lap u2|^2) of a B-spline
/// displacement, discretized on the control grid with cell area as quadrature
/// weight.
///
/// Second differences use the 3-point stencil at interior nodes and the
/// nearest inward 3-point stencil at boundary nodes, so the discrete operator
/// vanishes on every affine displacement field. Needs >= 3 points per axis.
double curv_value(const BSplineField& bf);

/// Gradient over the coefficients: cell area * L^T L u per channel.
std::vector<double> curv_gradient(const BSplineField& bf);

}  // namespace ngfreg
