#include "sse/sse_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sse/error.hpp"
#include "sse/parallel.hpp"

namespace sse {

std::size_t SseConfig::resolved_n_min(std::size_t dim) const {
  if (n_min > 0) return n_min;
  return std::min<std::size_t>(5 * dim, 50);
}

int SseConfig::resolved_max_level(std::size_t n_train, std::size_t dim) const {
  if (max_level >= 0) return max_level;
  const std::size_t nm = resolved_n_min(dim);
  int level = 0;
  // Largest L with 2^L * n_min <= N.
  while ((nm << (level + 1)) <= n_train && level < 62) ++level;
  return level;
}

double sample_variance(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  if (n < 2) return 0.0;
  const double m = y.mean();
  return (y.array() - m).square().sum() / static_cast<double>(n - 1);
}

double FlatDomain::evaluate(std::span<const double> u) const {
  if (indices.empty()) return 0.0;
  return eval_expansion(indices, coefficients, box, u);
}

std::size_t FlattenedSse::locate(std::span<const double> u) const {
  if (routes_.empty()) throw Error("empty flattened model");
  int r = 0;
  while (routes_[r].split_dim >= 0) {
    const auto& route = routes_[r];
    r = u[route.split_dim] < route.mid ? route.children[0] : route.children[1];
  }
  return static_cast<std::size_t>(routes_[r].domain);
}

double FlattenedSse::predict_quantile(std::span<const double> u) const {
  if (u.size() != dim_) throw Error("dimension mismatch");
  return domains_[locate(u)].evaluate(u);
}

SseModel::SseModel(InputModel input, SseConfig config, std::vector<Subdomain> nodes,
                   TrainingDiagnostics diagnostics)
    : input_(std::move(input)), config_(std::move(config)), nodes_(std::move(nodes)),
      diagnostics_(std::move(diagnostics)) {
  if (nodes_.empty()) throw Error("model without subdomains");
  const std::size_t dim = input_.dim();
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const auto& node = nodes_[id];
    if (node.box.dim() != dim) throw Error("subdomain dimension mismatch");
    if (node.is_leaf()) {
      terminals_.push_back(static_cast<int>(id));
      continue;
    }
    if (node.split_dim < 0 || static_cast<std::size_t>(node.split_dim) >= dim) {
      throw Error("invalid split dimension");
    }
    for (int c : node.children) {
      if (c <= static_cast<int>(id) || c >= static_cast<int>(nodes_.size()) ||
          nodes_[c].parent != static_cast<int>(id)) {
        throw Error("inconsistent subdomain tree");
      }
    }
  }
  flat_ = flatten(*this);
}

int SseModel::depth() const {
  int depth = 0;
  for (const auto& node : nodes_) {
    if (node.expanded()) depth = std::max(depth, node.level);
  }
  return depth;
}

std::size_t SseModel::expansion_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Subdomain& s) { return s.expanded(); }));
}

int SseModel::locate_leaf(std::span<const double> u) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = u[node.split_dim] < node.box.midpoint(node.split_dim) ? node.children[0] : node.children[1];
  }
  return id;
}

double SseModel::predict_quantile(std::span<const double> u, bool flattened) const {
  if (u.size() != dim()) throw Error("dimension mismatch");
  for (double v : u) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("point outside support");
  }
  if (flattened) return flat_.predict_quantile(u);
  double sum = 0.0;
  int id = 0;
  while (true) {
    const auto& node = nodes_[id];
    if (node.expansion) sum += node.expansion->evaluate(u);
    if (node.is_leaf()) break;
    id = u[node.split_dim] < node.box.midpoint(node.split_dim) ? node.children[0] : node.children[1];
  }
  return sum;
}

double SseModel::predict(std::span<const double> x, bool flattened) const {
  if (x.size() != dim()) throw Error("dimension mismatch");
  for (std::size_t d = 0; d < dim(); ++d) {
    if (!input_.marginal(d).in_support(x[d])) throw Error("point outside support");
  }
  const Eigen::VectorXd u = input_.to_quantile(x);
  return predict_quantile(std::span<const double>(u.data(), dim()), flattened);
}

Eigen::VectorXd SseModel::predict(const Eigen::MatrixXd& x, bool flattened) const {
  if (static_cast<std::size_t>(x.cols()) != dim()) throw Error("dimension mismatch");
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(dim());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (std::size_t d = 0; d < dim(); ++d) row[d] = x(i, d);
    out[i] = predict(row, flattened);
  }
  return out;
}

std::size_t choose_split_direction(const Expansion& e, const Box& box) {
  const std::size_t dim = box.dim();
  std::vector<double> first_order(dim, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < e.indices.size(); ++j) {
    const auto& alpha = e.indices[j];
    if (alpha.is_zero()) continue;
    const double c2 = e.coefficients[static_cast<Eigen::Index>(j)] * e.coefficients[static_cast<Eigen::Index>(j)];
    total += c2;
    if (alpha.rank() == 1) {
      for (std::size_t d = 0; d < dim; ++d) {
        if (alpha[d] > 0) first_order[d] += c2;
      }
    }
  }
  std::vector<std::size_t> candidates;
  const double best = *std::max_element(first_order.begin(), first_order.end());
  if (total > 0.0 && best > 0.0) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (first_order[d] >= best * (1.0 - 1e-12)) candidates.push_back(d);
    }
  } else {
    candidates.resize(dim);
    std::iota(candidates.begin(), candidates.end(), 0);
  }
  std::size_t pick = candidates.front();
  for (std::size_t d : candidates) {
    if (box.edge(d) > box.edge(pick)) pick = d;
  }
  return pick;
}

namespace {

bool has_duplicate_rows(const Eigen::MatrixXd& x) {
  std::vector<std::vector<double>> rows(x.rows(), std::vector<double>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) rows[i][j] = x(i, j);
  }
  std::sort(rows.begin(), rows.end());
  return std::adjacent_find(rows.begin(), rows.end()) != rows.end();
}

} // namespace

SseModel train(const InputModel& input, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               const SseConfig& config) {
  const std::size_t dim = input.dim();
  const std::size_t n = static_cast<std::size_t>(x.rows());
  if (static_cast<std::size_t>(x.cols()) != dim) throw Error("dimension mismatch");
  if (static_cast<std::size_t>(y.size()) != n) throw Error("dimension mismatch");
  const std::size_t n_min = config.resolved_n_min(dim);
  if (n_min < 2) throw Error("n_min must be at least 2");
  if (n < n_min) throw Error("insufficient data");
  if (!y.allFinite()) throw Error("non-finite response");
  for (std::size_t d = 0; d < dim; ++d) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (!input.marginal(d).in_support(x(i, d))) throw Error("design point outside support");
    }
  }

  const Eigen::MatrixXd u = input.to_quantile(x);
  const int max_level = config.resolved_max_level(n, dim);
  const unsigned threads = resolve_threads(config.threads);
  const AdaptiveOptions options = config.adaptive_options();

  TrainingDiagnostics diag;
  diag.n_train = n;
  diag.n_min = n_min;
  diag.max_level = max_level;
  diag.y_variance = sample_variance(y);
  diag.duplicate_rows = has_duplicate_rows(x);
  diag.residual_ss.push_back(y.squaredNorm());

  std::vector<Subdomain> nodes;
  std::vector<std::vector<Eigen::Index>> members;  // training rows per node

  Subdomain root;
  root.box = Box::unit(dim);
  root.mass = 1.0;
  root.n_points = n;
  nodes.push_back(root);
  members.emplace_back(n);
  std::iota(members[0].begin(), members[0].end(), 0);

  Eigen::VectorXd residual = y;
  std::vector<int> level_nodes{0};

  for (int level = 0; !level_nodes.empty(); ++level) {
    std::vector<int> to_fit;
    if (level <= max_level) {
      for (int id : level_nodes) {
        if (nodes[id].n_points >= n_min) to_fit.push_back(id);
      }
    }
    if (to_fit.empty()) break;

    std::vector<Expansion> fits(to_fit.size());
    parallel_for(to_fit.size(), threads, [&](std::size_t k) {
      const int id = to_fit[k];
      const auto& rows = members[id];
      const Eigen::MatrixXd local_u = u(rows, Eigen::all);
      const Eigen::VectorXd local_r = residual(rows);
      fits[k] = adaptive_fit(local_u, local_r, nodes[id].box, options);
    });
    // Residual updates touch disjoint rows; applied in node order.
    for (std::size_t k = 0; k < to_fit.size(); ++k) {
      const int id = to_fit[k];
      const auto& rows = members[id];
      const Eigen::VectorXd fitted = fits[k].evaluate(u(rows, Eigen::all));
      for (std::size_t i = 0; i < rows.size(); ++i) residual[rows[i]] -= fitted[static_cast<Eigen::Index>(i)];
      nodes[id].loo = fits[k].loo;
      nodes[id].expansion = std::move(fits[k]);
    }
    diag.residual_ss.push_back(residual.squaredNorm());

    if (level == max_level) break;
    std::vector<int> next;
    int index_in_level = 0;
    for (int id : to_fit) {
      const std::size_t d = choose_split_direction(*nodes[id].expansion, nodes[id].box);
      const double mid = nodes[id].box.midpoint(d);
      auto [lo_box, hi_box] = nodes[id].box.split(d);
      std::vector<Eigen::Index> lo_rows;
      std::vector<Eigen::Index> hi_rows;
      for (Eigen::Index r : members[id]) (u(r, d) < mid ? lo_rows : hi_rows).push_back(r);

      nodes[id].split_dim = static_cast<int>(d);
      std::array<Box, kChildrenPerSplit> boxes{std::move(lo_box), std::move(hi_box)};
      std::array<std::vector<Eigen::Index>, kChildrenPerSplit> rows{std::move(lo_rows), std::move(hi_rows)};
      for (int c = 0; c < kChildrenPerSplit; ++c) {
        Subdomain child;
        child.level = level + 1;
        child.index = index_in_level++;
        child.parent = id;
        child.box = std::move(boxes[c]);
        child.mass = nodes[id].mass / kChildrenPerSplit;
        child.loo = nodes[id].loo;
        child.n_points = rows[c].size();
        const int child_id = static_cast<int>(nodes.size());
        nodes[id].children[c] = child_id;
        nodes.push_back(std::move(child));
        members.push_back(std::move(rows[c]));
        next.push_back(child_id);
      }
    }
    level_nodes = std::move(next);
  }

  return SseModel(input, config, std::move(nodes), std::move(diag));
}

namespace {

// Re-expresses every ancestor expansion on the leaf box and sums them.
FlatDomain flatten_leaf(const std::vector<Subdomain>& nodes, int leaf) {
  const Box& target = nodes[leaf].box;
  const std::size_t dim = target.dim();
  std::map<MultiIndex, double> acc;

  for (int id = leaf; id >= 0; id = nodes[id].parent) {
    const auto& node = nodes[id];
    if (!node.expansion || node.expansion->indices.empty()) continue;
    const Expansion& e = *node.expansion;

    std::vector<int> max_deg(dim, 0);
    for (const auto& alpha : e.indices) {
      for (std::size_t d = 0; d < dim; ++d) max_deg[d] = std::max(max_deg[d], alpha[d]);
    }
    std::vector<Eigen::MatrixXd> transform(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (max_deg[d] == 0) continue;
      transform[d] = reprojection_matrix(max_deg[d], e.box.lower[d], e.box.upper[d], target.lower[d],
                                         target.upper[d]);
    }

    for (std::size_t j = 0; j < e.indices.size(); ++j) {
      const auto& alpha = e.indices[j];
      const double a = e.coefficients[static_cast<Eigen::Index>(j)];
      std::vector<std::size_t> support;
      for (std::size_t d = 0; d < dim; ++d) {
        if (alpha[d] > 0) support.push_back(d);
      }
      // Odometer over beta_d in [0, alpha_d] on the support.
      std::vector<int> beta_vals(support.size(), 0);
      MultiIndex beta = MultiIndex::zero(dim);
      while (true) {
        double coeff = a;
        for (std::size_t s = 0; s < support.size(); ++s) {
          const std::size_t d = support[s];
          coeff *= transform[d](alpha[d], beta_vals[s]);
          beta.degrees[d] = beta_vals[s];
        }
        acc[beta] += coeff;
        std::size_t s = 0;
        while (s < support.size()) {
          if (++beta_vals[s] <= alpha[support[s]]) break;
          beta_vals[s] = 0;
          ++s;
        }
        if (s == support.size()) break;
      }
    }
  }

  FlatDomain fd;
  fd.node = leaf;
  fd.box = target;
  fd.mass = nodes[leaf].mass;
  fd.loo = nodes[leaf].loo;
  for (const auto& [alpha, c] : acc) fd.indices.push_back(alpha);
  std::sort(fd.indices.begin(), fd.indices.end(), graded_lex_less);
  fd.coefficients.resize(static_cast<Eigen::Index>(fd.indices.size()));
  for (std::size_t j = 0; j < fd.indices.size(); ++j) {
    fd.coefficients[static_cast<Eigen::Index>(j)] = acc.at(fd.indices[j]);
  }
  return fd;
}

} // namespace

FlattenedSse flatten(const SseModel& model) {
  const auto& nodes = model.nodes();
  FlattenedSse flat;
  flat.dim_ = model.dim();
  flat.routes_.resize(nodes.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    auto& route = flat.routes_[id];
    if (node.is_leaf()) {
      route.domain = static_cast<int>(flat.domains_.size());
      flat.domains_.push_back(flatten_leaf(nodes, static_cast<int>(id)));
    } else {
      route.split_dim = node.split_dim;
      route.mid = node.box.midpoint(node.split_dim);
      route.children = node.children;
    }
  }
  return flat;
}

double mean(const FlattenedSse& f) {
  double m = 0.0;
  for (const auto& d : f.domains()) {
    for (std::size_t j = 0; j < d.indices.size(); ++j) {
      if (d.indices[j].is_zero()) m += d.mass * d.coefficients[static_cast<Eigen::Index>(j)];
    }
  }
  return m;
}

double second_moment(const FlattenedSse& f) {
  double s = 0.0;
  for (const auto& d : f.domains()) s += d.mass * d.coefficients.squaredNorm();
  return s;
}

double variance(const FlattenedSse& f) {
  const double m = mean(f);
  return std::max(0.0, second_moment(f) - m * m);
}

GenErrorEstimate gen_error_estimate(const SseModel& model, double y_variance) {
  GenErrorEstimate est;
  for (int id : model.terminal_ids()) {
    const auto& node = model.nodes()[id];
    est.absolute += node.loo * node.mass;
  }
  if (y_variance > 0.0) {
    est.relative = est.absolute / y_variance;
  } else {
    est.relative = est.absolute == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return est;
}

} // namespace sse
