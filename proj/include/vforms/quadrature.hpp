#pragma once

#include <vector>

#include "vforms/box.hpp"

namespace vforms {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2q - 1.
struct Quadrature1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes via Newton iteration on the Legendre recurrence; cached per order.
const Quadrature1D& gauss_legendre(int order);

/// Tensor-product rule over an axis-aligned box, row-major over axes.
struct BoxRule {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
};

BoxRule box_rule(const Box& box, int order);

}  // namespace vforms
