#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sse/input_model.hpp"
#include "sse/poly_basis.hpp"
#include "sse/sparse_regression.hpp"

namespace sse {

// Every split produces two children of equal probability mass.
inline constexpr int kChildrenPerSplit = 2;

struct SseConfig {
  int max_degree = 4;  // maximum degree of the local residual expansions
  std::vector<double> q_grid{0.5, 0.6, 0.7, 0.8};
  int max_rank = 2;
  // Minimum number of local points needed to expand a residual; 0 selects
  // min(5 M, 50).
  std::size_t n_min = 0;
  // Deepest level allowed to hold an expansion; negative selects
  // floor(log2(N / n_min)).
  int max_level = -1;
  std::uint64_t seed = 0;
  // Worker threads for the per-level fits (0 = resolve_threads()).
  unsigned threads = 0;

  std::size_t resolved_n_min(std::size_t dim) const;
  int resolved_max_level(std::size_t n_train, std::size_t dim) const;
  AdaptiveOptions adaptive_options() const { return {max_degree, q_grid, max_rank}; }
};

struct Subdomain {
  int level = 0;
  int index = 0;  // position within its level
  int parent = -1;
  std::array<int, kChildrenPerSplit> children{-1, -1};
  int split_dim = -1;
  Box box;
  double mass = 1.0;
  std::optional<Expansion> expansion;
  // Own LOO error if expanded, otherwise inherited from the closest expanded
  // ancestor. Absolute units (output squared).
  double loo = 0.0;
  std::size_t n_points = 0;

  bool is_leaf() const { return children[0] < 0; }
  bool expanded() const { return expansion.has_value(); }
};

struct TrainingDiagnostics {
  std::size_t n_train = 0;
  std::size_t n_min = 0;
  int max_level = 0;
  double y_variance = 0.0;  // sample variance of the training responses
  bool duplicate_rows = false;
  // residual_ss[0] is sum(Y^2); residual_ss[l + 1] is the training residual
  // sum of squares after the level-l updates.
  std::vector<double> residual_ss;
};

// One terminal domain of the flattened representation.
struct FlatDomain {
  int node = -1;  // id of the tree leaf
  Box box;
  double mass = 0.0;
  std::vector<MultiIndex> indices;  // merged support, graded-lex ordered
  Eigen::VectorXd coefficients;
  double loo = 0.0;

  double evaluate(std::span<const double> u) const;
};

class SseModel;

// Per-terminal-domain single expansions equivalent to the summed tree.
class FlattenedSse {
public:
  FlattenedSse() = default;

  std::size_t dim() const { return dim_; }
  const std::vector<FlatDomain>& domains() const { return domains_; }
  // Index into domains() of the terminal domain holding u.
  std::size_t locate(std::span<const double> u) const;
  double predict_quantile(std::span<const double> u) const;

private:
  friend FlattenedSse flatten(const SseModel& model);

  struct Route {
    int split_dim = -1;
    double mid = 0.0;
    std::array<int, kChildrenPerSplit> children{-1, -1};
    int domain = -1;
  };

  std::size_t dim_ = 0;
  std::vector<FlatDomain> domains_;
  std::vector<Route> routes_;
};

// Trained, immutable SSE. Nodes are stored breadth first; node 0 is the root.
class SseModel {
public:
  SseModel(InputModel input, SseConfig config, std::vector<Subdomain> nodes,
           TrainingDiagnostics diagnostics);

  const InputModel& input_model() const { return input_; }
  const SseConfig& config() const { return config_; }
  const std::vector<Subdomain>& nodes() const { return nodes_; }
  const Subdomain& root() const { return nodes_.front(); }
  const TrainingDiagnostics& diagnostics() const { return diagnostics_; }
  const FlattenedSse& flattened() const { return flat_; }
  std::size_t dim() const { return input_.dim(); }

  // Leaf node ids in breadth-first order; together they partition [0,1]^M.
  const std::vector<int>& terminal_ids() const { return terminals_; }
  // Deepest level holding an expansion.
  int depth() const;
  std::size_t expansion_count() const;

  int locate_leaf(std::span<const double> u) const;
  double predict(std::span<const double> x, bool flattened = true) const;
  double predict_quantile(std::span<const double> u, bool flattened = true) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x, bool flattened = true) const;

private:
  InputModel input_;
  SseConfig config_;
  std::vector<Subdomain> nodes_;
  TrainingDiagnostics diagnostics_;
  std::vector<int> terminals_;
  FlattenedSse flat_;
};

SseModel train(const InputModel& input, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               const SseConfig& config);

// Dimension of the largest first-order Sobol index of e; ties and the
// all-constant case fall back to the widest box edge, then the lowest index.
std::size_t choose_split_direction(const Expansion& e, const Box& box);

FlattenedSse flatten(const SseModel& model);

double mean(const FlattenedSse& f);
double variance(const FlattenedSse& f);
// Second moment sum_p V_p sum_alpha c_alpha^2.
double second_moment(const FlattenedSse& f);

struct GenErrorEstimate {
  double absolute = 0.0;
  double relative = 0.0;
};

GenErrorEstimate gen_error_estimate(const SseModel& model, double y_variance);
inline GenErrorEstimate gen_error_estimate(const SseModel& model) {
  return gen_error_estimate(model, model.diagnostics().y_variance);
}

// Unbiased sample variance.
double sample_variance(const Eigen::VectorXd& y);

} // namespace sse
