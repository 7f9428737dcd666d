#pragma once

#include <functional>

#include "amis/proposals.hpp"
#include "amis/types.hpp"

namespace amis {

// Vector-valued integrand; all components are integrated together.
using VectorFunction = std::function<Vector(const ConstPoint&)>;

struct QuadratureResult {
  Vector value;
  int intervals_per_axis = 0;
  bool converged = false;
};

// Tensor trapezoid rule over a box (d = 1 or 2), doubling the number of
// intervals per axis until two successive refinements differ by less than
// `tol` in every component.
QuadratureResult integrate_box(const VectorFunction& f, const Box& box, double tol = 1e-8,
                               int initial_intervals = 64);

// Scalar convenience wrapper.
double integrate_box(const PointFunction& f, const Box& box, double tol = 1e-8);

// Tensor Gauss-Legendre rule (8 nodes per axis) on a single cell, split into
// pieces_x by pieces_y sub-cells.
double integrate_cell(const PointFunction& f, const Box& cell, int pieces_x = 1, int pieces_y = 1);

}  // namespace amis
