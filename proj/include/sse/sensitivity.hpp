#pragma once

#include <vector>

#include <Eigen/Core>

#include "sse/sse_model.hpp"

namespace sse {

// Piecewise polynomial on [0,1] (one quantile coordinate). Piece k lives on
// [breaks[k], breaks[k+1]) and is stored as coefficients of the orthonormal
// Legendre basis of that interval.
struct PiecewisePoly1D {
  std::vector<double> breaks;
  std::vector<Eigen::VectorXd> coefficients;

  std::size_t pieces() const { return coefficients.size(); }
  double evaluate(double u) const;
  // Integral over [0,1] w.r.t. du.
  double integral() const;
  // Integral of the square over [0,1].
  double integral_of_square() const;
};

struct SobolResult {
  std::vector<double> partial_variance;
  std::vector<double> first_order;
};

// E[M_SSE | U_i = u] as a piecewise polynomial in u, refined on the disjoint
// breakpoint partition of the terminal-domain edges along dimension i.
PiecewisePoly1D conditional_expectation_1d(const FlattenedSse& f, std::size_t i);

double first_order_partial_variance(const FlattenedSse& f, std::size_t i);

// Throws "degenerate constant model" when the model variance vanishes.
SobolResult first_order_sobol(const FlattenedSse& f);

} // namespace sse
