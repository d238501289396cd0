#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sse/input_model.hpp"
#include "sse/sse_model.hpp"

namespace sse {

using ModelFunction = std::function<double(std::span<const double>)>;

// -x + 0.1 sin(30 x) + exp(-(50 (x - 0.65))^2) on [0, 1].
double model_1d(double x);

// Sum of two Gaussian bumps centred at 1/3 and 2/3 with axis weights
// exp(-(i - 1)), scaled by 10^M / 2. Evaluated in log space.
double model_zhou(std::span<const double> x);
double model_zhou_log(std::span<const double> x);

// Two-degree-of-freedom oscillator limit state, peak factor 3.
// x = {m_p, m_s, k_p, k_s, zeta_p, zeta_s, S_0, F_s}.
double model_oscillator(std::span<const double> x);

// Two-bar truss with snap-through. x = {P [kN], E [GPa], A [cm^2]};
// returns the vertical displacement w [m].
double model_truss(std::span<const double> x);
// Critical (snap-through) load for the given stiffness.
double truss_critical_load(double e, double a);

InputModel oscillator_input();
InputModel truss_input();
InputModel unit_cube_input(std::size_t dim);

struct BenchmarkCase {
  std::string name;
  InputModel input;
  ModelFunction model;
  std::vector<std::size_t> sizes;
  int degree_sse = 4;
  int degree_pce = 10;
  std::size_t replications = 5;
  // Full-budget study (long running).
  std::vector<std::size_t> paper_sizes;
  std::size_t paper_replications = 10;
};

// Registered case names: 1d, zhou10, zhou100, oscillator, truss.
std::vector<std::string> case_names();
// Throws "unknown case '<name>' (valid: ...)".
BenchmarkCase make_case(const std::string& name);

// Monte Carlo estimate of E[(M - M~)^2] / Var[M] on a held-out sample.
double relative_mse(const std::function<double(std::span<const double>)>& surrogate,
                    const ModelFunction& truth, const InputModel& input, std::size_t n_val,
                    std::uint64_t seed);

// Reference sample for repeated relative-MSE evaluations.
struct ValidationSet {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double variance = 0.0;
};

ValidationSet make_validation_set(const ModelFunction& truth, const InputModel& input,
                                  std::size_t n_val, std::uint64_t seed);
double relative_mse(const Eigen::VectorXd& prediction, const ValidationSet& val);

enum class Method { Sse, Pce };
std::string to_string(Method m);

struct ConvergenceRecord {
  std::string case_name;
  std::size_t n = 0;
  std::size_t rep = 0;
  Method method = Method::Sse;
  double eta = 0.0;
  double eps_gen_hat = 0.0;
  double wall_seconds = 0.0;
  // SSE structure; zero for the PCE baseline.
  int depth = 0;
  int max_level = 0;
  std::size_t n_min = 0;
  std::size_t expansions = 0;
};

struct ConvergenceOptions {
  std::vector<std::size_t> sizes;  // empty: the case defaults
  std::size_t replications = 0;    // 0: the case default
  std::size_t n_val = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool run_pce = true;
};

// Deterministic seed for one (case, N, replication) cell.
std::uint64_t derive_seed(std::uint64_t master, const std::string& case_name, std::uint64_t n,
                          std::uint64_t rep);

// Records ordered by N, replication, then method (SSE first).
std::vector<ConvergenceRecord> run_convergence(const BenchmarkCase& bc,
                                               const ConvergenceOptions& options);

struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double lo_whisker = 0.0;
  double hi_whisker = 0.0;
};

// Quartiles by linear interpolation between order statistics; whiskers at
// the most extreme data within 1.5 IQR of the box.
BoxStats box_stats(std::vector<double> values);
double median(std::vector<double> values);

struct BoxRow {
  std::string case_name;
  std::size_t n = 0;
  Method method = Method::Sse;
  BoxStats stats;
};

std::vector<BoxRow> summarize(const std::vector<ConvergenceRecord>& records);

struct EstimatorAccuracy {
  std::string case_name;
  std::size_t count = 0;
  double pearson_log = 0.0;
  double spearman = 0.0;
  double underestimation = 0.0;  // fraction of runs with eps_gen_hat < eta
};

double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

// Pools all records passed in (one case). Log correlations skip pairs with a
// non-positive entry.
EstimatorAccuracy estimator_accuracy(const std::vector<ConvergenceRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_box_csv(std::ostream& out, const std::vector<BoxRow>& rows);

} // namespace sse
