#include "amis/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

#include "amis/errors.hpp"

namespace amis {

namespace {

constexpr int kMaxIntervals1d = 1 << 20;
constexpr int kMaxIntervals2d = 1 << 12;

Vector trapezoid(const VectorFunction& f, const Box& box, int n) {
  const int d = box.dim();
  const Vector h = (box.upper - box.lower) / static_cast<double>(n);
  Vector x(d);
  Vector acc;
  if (d == 1) {
    for (int i = 0; i <= n; ++i) {
      x[0] = box.lower[0] + i * h[0];
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      Vector v = f(x);
      if (acc.size() == 0) acc = Vector::Zero(v.size());
      acc += w * v;
    }
    return acc * h[0];
  }
  for (int i = 0; i <= n; ++i) {
    x[0] = box.lower[0] + i * h[0];
    const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    Vector row;
    for (int j = 0; j <= n; ++j) {
      x[1] = box.lower[1] + j * h[1];
      const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
      Vector v = f(x);
      if (row.size() == 0) row = Vector::Zero(v.size());
      row += wj * v;
    }
    if (acc.size() == 0) acc = Vector::Zero(row.size());
    acc += wi * row;
  }
  return acc * (h[0] * h[1]);
}

}  // namespace

QuadratureResult integrate_box(const VectorFunction& f, const Box& box, double tol,
                               int initial_intervals) {
  const int d = box.dim();
  if (d < 1 || d > 2) throw UnsupportedError("quadrature: only d <= 2 is supported");
  const int max_n = d == 1 ? kMaxIntervals1d : kMaxIntervals2d;
  QuadratureResult r;
  int n = initial_intervals;
  Vector prev = trapezoid(f, box, n);
  while (n < max_n) {
    n *= 2;
    Vector next = trapezoid(f, box, n);
    const double diff = (next - prev).cwiseAbs().maxCoeff();
    prev = std::move(next);
    if (diff < tol) {
      r.converged = true;
      break;
    }
  }
  r.value = std::move(prev);
  r.intervals_per_axis = n;
  return r;
}

double integrate_box(const PointFunction& f, const Box& box, double tol) {
  const auto r = integrate_box([&f](const ConstPoint& x) { return Vector::Constant(1, f(x)); },
                               box, tol);
  return r.value[0];
}

double integrate_cell(const PointFunction& f, const Box& cell, int pieces_x, int pieces_y) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const int d = cell.dim();
  if (d < 1 || d > 2) throw UnsupportedError("quadrature: only d <= 2 is supported");
  pieces_x = std::max(pieces_x, 1);
  pieces_y = std::max(pieces_y, 1);
  Vector h = (cell.upper - cell.lower);
  h[0] /= pieces_x;
  if (d == 2) h[1] /= pieces_y;
  Vector x(d);
  double total = 0.0;
  if (d == 1) {
    for (int i = 0; i < pieces_x; ++i) {
      const double a = cell.lower[0] + i * h[0];
      total += Rule::integrate(
          [&](double u) {
            x[0] = u;
            return f(x);
          },
          a, a + h[0]);
    }
    return total;
  }
  for (int i = 0; i < pieces_x; ++i) {
    const double a = cell.lower[0] + i * h[0];
    for (int j = 0; j < pieces_y; ++j) {
      const double c = cell.lower[1] + j * h[1];
      total += Rule::integrate(
          [&](double u) {
            return Rule::integrate(
                [&](double v) {
                  x[0] = u;
                  x[1] = v;
                  return f(x);
                },
                c, c + h[1]);
          },
          a, a + h[0]);
    }
  }
  return total;
}

}  // namespace amis
