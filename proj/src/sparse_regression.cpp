#include "sse/sparse_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/QR>

#include "sse/error.hpp"

namespace sse {

namespace {

// Relative pivot threshold below which a design is treated as rank deficient.
constexpr double kRankThreshold = 1e-10;

double loo_from_leverage(const Eigen::VectorXd& residual, const Eigen::VectorXd& leverage,
                         bool& unstable) {
  const Eigen::Index n = residual.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double denom = 1.0 - leverage[i];
    if (denom < kLeverageCap) {
      denom = kLeverageCap;
      unstable = true;
    }
    const double e = residual[i] / denom;
    sum += e * e;
  }
  return sum / static_cast<double>(n);
}

} // namespace

OlsResult ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) {
    throw Error("dimension mismatch");
  }
  OlsResult result;
  if (p == 0) {
    result.coefficients.resize(0);
    result.loo = n == 0 ? 0.0 : y.squaredNorm() / static_cast<double>(n);
    return result;
  }
  if (n < p) {
    throw Error("ill-conditioned basis");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < p) {
    throw Error("ill-conditioned basis");
  }
  result.coefficients = qr.solve(y);
  const Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  const Eigen::VectorXd leverage = thin_q.rowwise().squaredNorm();
  const Eigen::VectorXd residual = y - design * result.coefficients;
  result.loo = loo_from_leverage(residual, leverage, result.unstable);
  if (!result.coefficients.allFinite()) {
    throw Error("ill-conditioned basis");
  }
  return result;
}

Selection StepwiseSolver::select(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                 Eigen::Index max_terms) const {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) {
    throw Error("dimension mismatch");
  }
  max_terms = std::clamp<Eigen::Index>(max_terms, 0, std::min(n, p));

  const Eigen::VectorXd norms = design.colwise().norm();
  std::vector<bool> blocked(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(norms[j] > 0.0)) blocked[j] = true;
  }

  // Orthonormal basis of the active span, built by Gram-Schmidt with one
  // re-orthogonalization pass; the hat diagonal is the running row norm.
  Eigen::MatrixXd basis(n, max_terms);
  Eigen::VectorXd leverage = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = y;
  std::vector<Eigen::Index> path;

  bool unstable = false;
  const double y_norm = y.norm();
  double best_loo = n == 0 ? 0.0 : y.squaredNorm() / static_cast<double>(n);
  std::size_t best_size = 0;
  const Eigen::Index patience = std::max<Eigen::Index>(10, max_terms / 10);

  while (static_cast<Eigen::Index>(path.size()) < max_terms) {
    if (residual.norm() <= 1e-14 * y_norm || y_norm == 0.0) break;
    const Eigen::VectorXd corr = design.transpose() * residual;
    Eigen::Index pick = -1;
    double best_corr = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (blocked[j]) continue;
      const double c = std::abs(corr[j]) / norms[j];
      if (c > best_corr) {
        best_corr = c;
        pick = j;
      }
    }
    if (pick < 0 || best_corr <= 1e-13 * residual.norm()) break;

    const Eigen::Index k = static_cast<Eigen::Index>(path.size());
    Eigen::VectorXd v = design.col(pick);
    for (int pass = 0; pass < 2; ++pass) {
      if (k > 0) v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
    }
    const double v_norm = v.norm();
    blocked[pick] = true;
    if (v_norm <= 1e-8 * norms[pick]) {
      // Numerically inside the active span.
      continue;
    }
    basis.col(k) = v / v_norm;
    residual -= basis.col(k) * basis.col(k).dot(residual);
    leverage += basis.col(k).cwiseAbs2();
    path.push_back(pick);

    bool step_unstable = false;
    const double loo = loo_from_leverage(residual, leverage, step_unstable);
    if (loo < best_loo) {
      best_loo = loo;
      best_size = path.size();
    }
    if (static_cast<Eigen::Index>(path.size() - best_size) >= patience) break;
  }

  Selection sel;
  sel.active.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(best_size));
  // Final coefficients from a fresh pivoted QR of the chosen columns; shrink the
  // set if the refit disagrees on the numerical rank.
  while (true) {
    try {
      const Eigen::MatrixXd sub = design(Eigen::all, sel.active);
      const OlsResult fit = ols_fit(sub, y);
      sel.coefficients = fit.coefficients;
      sel.loo = fit.loo;
      sel.unstable = fit.unstable || unstable;
      return sel;
    } catch (const Error&) {
      if (sel.active.empty()) throw;
      sel.active.pop_back();
    }
  }
}

Selection sparse_select(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        Eigen::Index max_terms) {
  return StepwiseSolver{}.select(design, y, max_terms);
}

Expansion Expansion::null(Box box) {
  Expansion e;
  e.box = std::move(box);
  e.coefficients.resize(0);
  return e;
}

double Expansion::evaluate(std::span<const double> u) const {
  if (indices.empty()) return 0.0;
  return eval_expansion(indices, coefficients, box, u);
}

Eigen::VectorXd Expansion::evaluate(const Eigen::MatrixXd& points, bool extrapolate) const {
  if (indices.empty()) return Eigen::VectorXd::Zero(points.rows());
  return eval_design_matrix(indices, box, points, extrapolate) * coefficients;
}

double Expansion::constant() const {
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j].is_zero()) return coefficients[static_cast<Eigen::Index>(j)];
  }
  return 0.0;
}

double Expansion::variance() const {
  double v = 0.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (!indices[j].is_zero()) {
      const double c = coefficients[static_cast<Eigen::Index>(j)];
      v += c * c;
    }
  }
  return v;
}

Expansion adaptive_fit(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, const Box& box,
                       const AdaptiveOptions& options, const SparseSolver& solver) {
  const Eigen::Index n = points.rows();
  const std::size_t dim = box.dim();
  if (n == 0) {
    throw Error("no feasible candidate basis");
  }
  if (y.size() != n || static_cast<std::size_t>(points.cols()) != dim) {
    throw Error("dimension mismatch");
  }
  if (options.q_grid.empty()) {
    throw Error("empty q-norm grid");
  }
  std::vector<double> q_grid = options.q_grid;
  std::sort(q_grid.begin(), q_grid.end());

  const std::size_t size_limit = static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 1));

  struct Candidate {
    int degree;
    double q;
    TruncationSet set;
  };
  // Feasible candidates grouped by degree; q values yielding the same set as
  // the previous q are dropped.
  std::vector<std::vector<Candidate>> by_degree;
  std::map<MultiIndex, Eigen::Index> column_of;
  for (int p = 0; p <= options.max_degree; ++p) {
    std::vector<Candidate> group;
    std::size_t previous_size = 0;
    for (double q : q_grid) {
      TruncationSet cand = generate_truncation(dim, p, q, options.max_rank);
      if (cand.size() == previous_size) continue;
      previous_size = cand.size();
      if (cand.size() > size_limit) break;
      for (const auto& alpha : cand.indices) column_of.emplace(alpha, 0);
      group.push_back({p, q, std::move(cand)});
    }
    if (group.empty()) break;
    by_degree.push_back(std::move(group));
  }
  if (by_degree.empty()) {
    throw Error("no feasible candidate basis");
  }

  // One design over the union of all candidate sets, sliced per candidate.
  std::vector<MultiIndex> union_indices;
  union_indices.reserve(column_of.size());
  for (auto& [alpha, col] : column_of) {
    col = static_cast<Eigen::Index>(union_indices.size());
    union_indices.push_back(alpha);
  }
  const Eigen::MatrixXd full_design = eval_design_matrix(union_indices, box, points);

  Expansion best = Expansion::null(box);
  double best_loo = std::numeric_limits<double>::infinity();
  std::vector<double> degree_loo;

  for (const auto& group : by_degree) {
    double degree_best = std::numeric_limits<double>::infinity();
    for (const auto& cand : group) {
      std::vector<Eigen::Index> cols;
      cols.reserve(cand.set.size());
      for (const auto& alpha : cand.set.indices) cols.push_back(column_of.at(alpha));
      const Eigen::MatrixXd design = full_design(Eigen::all, cols);

      const Eigen::Index max_terms =
          std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(cand.set.size()));
      const Selection sel = solver.select(design, y, std::max<Eigen::Index>(max_terms, 0));

      degree_best = std::min(degree_best, sel.loo);
      if (sel.loo < best_loo) {
        best_loo = sel.loo;
        best = Expansion::null(box);
        best.loo = sel.loo;
        best.degree = cand.degree;
        best.q = cand.q;
        best.unstable = sel.unstable;
        best.coefficients = sel.coefficients;
        for (Eigen::Index c : sel.active) best.indices.push_back(cand.set.indices[c]);
      }
    }
    degree_loo.push_back(degree_best);
    const std::size_t k = degree_loo.size();
    if (k >= 3 && degree_loo[k - 1] > degree_loo[k - 2] && degree_loo[k - 2] > degree_loo[k - 3]) {
      break;
    }
  }

  // Store active terms in graded-lex order.
  std::vector<std::size_t> order(best.indices.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graded_lex_less(best.indices[a], best.indices[b]);
  });
  Expansion sorted = Expansion::null(box);
  sorted.loo = best.loo;
  sorted.degree = best.degree;
  sorted.q = best.q;
  sorted.unstable = best.unstable;
  sorted.coefficients.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t j = 0; j < order.size(); ++j) {
    sorted.indices.push_back(best.indices[order[j]]);
    sorted.coefficients[static_cast<Eigen::Index>(j)] = best.coefficients[static_cast<Eigen::Index>(order[j])];
  }
  return sorted;
}

} // namespace sse
