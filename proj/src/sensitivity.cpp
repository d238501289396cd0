#include "sse/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "sse/error.hpp"

namespace sse {

double PiecewisePoly1D::evaluate(double u) const {
  if (coefficients.empty()) return 0.0;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), u);
  std::size_t k = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
  k = std::min(k, pieces() - 1);
  const Eigen::VectorXd& c = coefficients[k];
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 0) return 0.0;
  std::vector<double> psi(deg + 1);
  legendre_orthonormal_all(deg, u, breaks[k], breaks[k + 1], psi);
  double s = 0.0;
  for (int j = 0; j <= deg; ++j) s += c[j] * psi[j];
  return s;
}

double PiecewisePoly1D::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < pieces(); ++k) {
    if (coefficients[k].size() > 0) s += (breaks[k + 1] - breaks[k]) * coefficients[k][0];
  }
  return s;
}

double PiecewisePoly1D::integral_of_square() const {
  double s = 0.0;
  for (std::size_t k = 0; k < pieces(); ++k) {
    s += (breaks[k + 1] - breaks[k]) * coefficients[k].squaredNorm();
  }
  return s;
}

PiecewisePoly1D conditional_expectation_1d(const FlattenedSse& f, std::size_t i) {
  if (i >= f.dim()) throw Error("dimension index out of range");

  // Per terminal domain: the univariate polynomial in u_i obtained by
  // integrating the other coordinates out, scaled by the marginalized mass.
  struct Contribution {
    double lo, hi;
    Eigen::VectorXd coeffs;  // Legendre coefficients on [lo, hi)
  };
  std::vector<Contribution> parts;
  std::vector<double> breaks{0.0, 1.0};
  for (const auto& d : f.domains()) {
    const double lo = d.box.lower[i];
    const double hi = d.box.upper[i];
    breaks.push_back(lo);
    breaks.push_back(hi);
    const double weight = d.mass / (hi - lo);
    int deg = 0;
    for (const auto& alpha : d.indices) {
      if (alpha.rank() == 0 || (alpha.rank() == 1 && alpha[i] > 0)) deg = std::max(deg, alpha[i]);
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(deg + 1);
    for (std::size_t j = 0; j < d.indices.size(); ++j) {
      const auto& alpha = d.indices[j];
      if (alpha.rank() == 0 || (alpha.rank() == 1 && alpha[i] > 0)) {
        c[alpha[i]] += weight * d.coefficients[static_cast<Eigen::Index>(j)];
      }
    }
    parts.push_back({lo, hi, std::move(c)});
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  PiecewisePoly1D g;
  g.breaks = breaks;
  g.coefficients.assign(breaks.size() - 1, Eigen::VectorXd());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k];
    const double b = breaks[k + 1];
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(1);
    for (const auto& part : parts) {
      if (part.lo > a || part.hi < b) continue;  // refined interval outside the domain edge
      const int deg = static_cast<int>(part.coeffs.size()) - 1;
      Eigen::VectorXd local;
      if (part.lo == a && part.hi == b) {
        local = part.coeffs;
      } else {
        const Eigen::MatrixXd t = reprojection_matrix(deg, part.lo, part.hi, a, b);
        local = t.transpose() * part.coeffs;
      }
      if (local.size() > acc.size()) acc.conservativeResizeLike(Eigen::VectorXd::Zero(local.size()));
      acc.head(local.size()) += local;
    }
    g.coefficients[k] = std::move(acc);
  }
  return g;
}

double first_order_partial_variance(const FlattenedSse& f, std::size_t i) {
  const PiecewisePoly1D g = conditional_expectation_1d(f, i);
  const double m = mean(f);
  const double second = g.integral_of_square();
  const double v = second - m * m;
  if (v < -1e-12 * std::max(1.0, second)) {
    throw Error("negative partial variance");
  }
  return std::max(0.0, v);
}

SobolResult first_order_sobol(const FlattenedSse& f) {
  const double total = variance(f);
  if (!(total > 1e-13 * second_moment(f)) || total <= 0.0) {
    throw Error("degenerate constant model");
  }
  SobolResult r;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const double v = first_order_partial_variance(f, i);
    r.partial_variance.push_back(v);
    r.first_order.push_back(v / total);
  }
  return r;
}

} // namespace sse
