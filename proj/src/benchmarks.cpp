#include "sse/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "sse/csv.hpp"
#include "sse/error.hpp"
#include "sse/parallel.hpp"
#include "sse/sparse_regression.hpp"

namespace sse {

double model_1d(double x) {
  const double z = 50.0 * (x - 0.65);
  return -x + 0.1 * std::sin(30.0 * x) + std::exp(-z * z);
}

double model_zhou_log(std::span<const double> x) {
  const std::size_t m = x.size();
  if (m == 0) throw Error("zhou model needs at least one dimension");
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = std::exp(-static_cast<double>(i));
    const double d1 = 10.0 * a * (x[i] - 1.0 / 3.0);
    const double d2 = 10.0 * a * (x[i] - 2.0 / 3.0);
    s1 += d1 * d1;
    s2 += d2 * d2;
  }
  const double e1 = -0.5 * s1;
  const double e2 = -0.5 * s2;
  const double hi = std::max(e1, e2);
  const double lse = hi + std::log1p(std::exp(std::min(e1, e2) - hi));
  const double md = static_cast<double>(m);
  return md * std::numbers::ln10 - std::numbers::ln2 - 0.5 * md * std::log(2.0 * std::numbers::pi) + lse;
}

double model_zhou(std::span<const double> x) { return std::exp(model_zhou_log(x)); }

double model_oscillator(std::span<const double> x) {
  if (x.size() != 8) throw Error("oscillator model expects 8 inputs");
  for (double v : x) {
    if (!(v > 0.0)) throw Error("oscillator inputs must be positive");
  }
  const double mp = x[0], ms = x[1], kp = x[2], ks = x[3];
  const double zp = x[4], zs = x[5], s0 = x[6], fs = x[7];
  constexpr double peak = 3.0;
  const double wp = std::sqrt(kp / mp);
  const double ws = std::sqrt(ks / ms);
  const double gamma = ms / mp;
  const double wa = 0.5 * (wp + ws);
  const double za = 0.5 * (zp + zs);
  const double theta = (wp - ws) / wa;
  const double ex2 = std::numbers::pi * s0 / (4.0 * zs * ws * ws * ws) * (za * zs) /
                     (zp * zs * (4.0 * za * za + theta * theta) + gamma * za * za) *
                     ((zp * wp * wp * wp + zs * ws * ws * ws) * wp) / (4.0 * za * std::pow(wa, 4));
  return fs - peak * ks * std::sqrt(ex2);
}

namespace {

constexpr double kTrussLength = 5.0;
const double kTrussAngle = 10.0 * std::numbers::pi / 180.0;

// P / (2 EA) as a function of the bar angle.
double truss_load_ratio(double alpha) {
  return std::sin(alpha) - std::tan(alpha) * std::cos(kTrussAngle);
}

double truss_critical_angle() { return std::acos(std::cbrt(std::cos(kTrussAngle))); }

// Root of truss_load_ratio(alpha) = target in [lo, hi], where the ratio is
// decreasing and brackets the target.
double bisect_angle(double lo, double hi, double target) {
  if (!(truss_load_ratio(lo) >= target && truss_load_ratio(hi) <= target)) {
    throw Error("no equilibrium found");
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (truss_load_ratio(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

double truss_critical_load(double e, double a) {
  return 2.0 * e * a * 100.0 * truss_load_ratio(truss_critical_angle());
}

double model_truss(std::span<const double> x) {
  if (x.size() != 3) throw Error("truss model expects 3 inputs");
  const double p = x[0], e = x[1], a = x[2];
  if (!(p > 0.0 && e > 0.0 && a > 0.0)) throw Error("truss inputs must be positive");
  const double ea = e * a * 100.0;
  const double target = p / (2.0 * ea);
  const double astar = truss_critical_angle();
  double alpha;
  if (target <= truss_load_ratio(astar)) {
    alpha = bisect_angle(astar, kTrussAngle, target);
  } else {
    // Post-snap branch: the ratio runs from +inf at -pi/2 down to 0 at -alpha0.
    double lo = -kTrussAngle;
    double step = 0.1;
    while (truss_load_ratio(lo) < target) {
      lo = std::max(-std::numbers::pi / 2 + 1e-15, lo - step);
      step *= 2.0;
      if (lo <= -std::numbers::pi / 2 + 1e-15 && truss_load_ratio(lo) < target) {
        throw Error("no equilibrium found");
      }
    }
    alpha = bisect_angle(lo, -kTrussAngle, target);
  }
  return kTrussLength * std::cos(kTrussAngle) * (std::tan(kTrussAngle) - std::tan(alpha));
}

InputModel oscillator_input() {
  return InputModel({Marginal::lognormal(1.5, 0.1), Marginal::lognormal(0.01, 0.1),
                     Marginal::lognormal(1.0, 0.2), Marginal::lognormal(0.01, 0.2),
                     Marginal::lognormal(0.05, 0.4), Marginal::lognormal(0.02, 0.5),
                     Marginal::lognormal(100.0, 0.1), Marginal::lognormal(15.0, 0.1)},
                    {"m_p", "m_s", "k_p", "k_s", "zeta_p", "zeta_s", "S_0", "F_s"});
}

InputModel truss_input() {
  return InputModel({Marginal::gumbel(430.0, 0.2), Marginal::lognormal(210.0, 0.1),
                     Marginal::gaussian(10.0, 0.5)},
                    {"P", "E", "A"});
}

InputModel unit_cube_input(std::size_t dim) {
  return InputModel(std::vector<Marginal>(dim, Marginal::uniform(0.0, 1.0)));
}

std::vector<std::string> case_names() { return {"1d", "zhou10", "zhou100", "oscillator", "truss"}; }

BenchmarkCase make_case(const std::string& name) {
  if (name == "1d") {
    return {name, unit_cube_input(1), [](std::span<const double> x) { return model_1d(x[0]); },
            {10, 50, 100, 200}, 5, 20, 10, {10, 50, 100, 200}, 10};
  }
  if (name == "zhou10") {
    return {name, unit_cube_input(10), model_zhou, {500, 2000}, 2, 7, 3, {500, 1000, 2000, 5000}, 10};
  }
  if (name == "zhou100") {
    return {name, unit_cube_input(100), model_zhou, {1000, 2000}, 2, 7, 3, {1000, 2000, 5000, 10000}, 10};
  }
  if (name == "oscillator") {
    return {name, oscillator_input(), model_oscillator, {1000, 5000}, 4, 10, 3, {1000, 5000, 10000, 20000}, 10};
  }
  if (name == "truss") {
    return {name, truss_input(), model_truss, {100, 500, 1000}, 4, 10, 5, {100, 500, 1000, 2000, 5000}, 10};
  }
  std::string valid;
  for (const auto& n : case_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error("unknown case '" + name + "' (valid: " + valid + ")");
}

ValidationSet make_validation_set(const ModelFunction& truth, const InputModel& input,
                                  std::size_t n_val, std::uint64_t seed) {
  ValidationSet v;
  v.x = input.sample(n_val, seed);
  v.y.resize(v.x.rows());
  std::vector<double> row(input.dim());
  for (Eigen::Index i = 0; i < v.x.rows(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = v.x(i, static_cast<Eigen::Index>(j));
    v.y[i] = truth(row);
  }
  v.variance = sample_variance(v.y);
  return v;
}

double relative_mse(const Eigen::VectorXd& prediction, const ValidationSet& val) {
  if (prediction.size() != val.y.size()) throw Error("prediction size mismatch");
  if (!(val.variance > 0.0)) throw Error("validation response has zero variance");
  return (prediction - val.y).squaredNorm() / static_cast<double>(val.y.size()) / val.variance;
}

double relative_mse(const std::function<double(std::span<const double>)>& surrogate,
                    const ModelFunction& truth, const InputModel& input, std::size_t n_val,
                    std::uint64_t seed) {
  const ValidationSet val = make_validation_set(truth, input, n_val, seed);
  Eigen::VectorXd pred(val.x.rows());
  std::vector<double> row(input.dim());
  for (Eigen::Index i = 0; i < val.x.rows(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = val.x(i, static_cast<Eigen::Index>(j));
    pred[i] = surrogate(row);
  }
  return relative_mse(pred, val);
}

std::string to_string(Method m) { return m == Method::Sse ? "SSE" : "PCE"; }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_name(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, const std::string& case_name, std::uint64_t n,
                          std::uint64_t rep) {
  std::uint64_t h = splitmix(master);
  h = splitmix(h ^ hash_name(case_name));
  h = splitmix(h ^ n);
  return splitmix(h ^ rep);
}

std::vector<ConvergenceRecord> run_convergence(const BenchmarkCase& bc,
                                               const ConvergenceOptions& options) {
  const auto sizes = options.sizes.empty() ? bc.sizes : options.sizes;
  const std::size_t reps = options.replications == 0 ? bc.replications : options.replications;
  const std::size_t dim = bc.input.dim();

  // One validation sample per case, shared by every run.
  const ValidationSet val =
      make_validation_set(bc.model, bc.input, options.n_val, derive_seed(options.seed, bc.name, 0, ~0ULL));
  const Eigen::MatrixXd val_u = bc.input.to_quantile(val.x);

  const std::size_t cells = sizes.size() * reps;
  const std::size_t per_cell = options.run_pce ? 2 : 1;
  std::vector<ConvergenceRecord> out(cells * per_cell);

  // Cells run concurrently; the fits inside a cell then stay single threaded.
  const unsigned workers = resolve_threads(options.threads);
  parallel_for(cells, workers, [&](std::size_t cell) {
    const std::size_t n = sizes[cell / reps];
    const std::size_t rep = cell % reps;
    const std::uint64_t seed = derive_seed(options.seed, bc.name, n, rep);

    const Eigen::MatrixXd x = bc.input.sample(n, seed);
    Eigen::VectorXd y(x.rows());
    std::vector<double> row(dim);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) row[j] = x(i, static_cast<Eigen::Index>(j));
      y[i] = bc.model(row);
    }

    using clock = std::chrono::steady_clock;
    {
      SseConfig cfg;
      cfg.max_degree = bc.degree_sse;
      cfg.seed = seed;
      cfg.threads = 1;
      const auto t0 = clock::now();
      const SseModel model = train(bc.input, x, y, cfg);
      const double secs = std::chrono::duration<double>(clock::now() - t0).count();
      Eigen::VectorXd pred(val_u.rows());
      std::vector<double> u(dim);
      for (Eigen::Index i = 0; i < val_u.rows(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) u[j] = val_u(i, static_cast<Eigen::Index>(j));
        pred[i] = model.predict_quantile(u);
      }
      ConvergenceRecord& r = out[cell * per_cell];
      r.case_name = bc.name;
      r.n = n;
      r.rep = rep;
      r.method = Method::Sse;
      r.eta = relative_mse(pred, val);
      r.eps_gen_hat = gen_error_estimate(model).relative;
      r.wall_seconds = secs;
      r.depth = model.depth();
      r.max_level = model.diagnostics().max_level;
      r.n_min = model.diagnostics().n_min;
      r.expansions = model.expansion_count();
    }
    if (options.run_pce) {
      const auto t0 = clock::now();
      const Eigen::MatrixXd u = bc.input.to_quantile(x);
      const Box root = Box::unit(dim);
      const AdaptiveOptions ao{bc.degree_pce, SseConfig{}.q_grid, SseConfig{}.max_rank};
      const Expansion pce = adaptive_fit(u, y, root, ao);
      const double secs = std::chrono::duration<double>(clock::now() - t0).count();
      const Eigen::VectorXd pred = pce.evaluate(val_u);
      ConvergenceRecord& r = out[cell * per_cell + 1];
      r.case_name = bc.name;
      r.n = n;
      r.rep = rep;
      r.method = Method::Pce;
      r.eta = relative_mse(pred, val);
      const double vy = sample_variance(y);
      r.eps_gen_hat = vy > 0.0 ? pce.loo / vy : 0.0;
      r.wall_seconds = secs;
    }
  });
  return out;
}

double median(std::vector<double> values) { return box_stats(std::move(values)).median; }

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error("box statistics of an empty sample");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.median = quantile_sorted(values, 0.5);
  s.q1 = quantile_sorted(values, 0.25);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.lo_whisker = *std::find_if(values.begin(), values.end(), [&](double v) { return v >= lo_fence; });
  s.hi_whisker = *std::find_if(values.rbegin(), values.rend(), [&](double v) { return v <= hi_fence; });
  return s;
}

std::vector<BoxRow> summarize(const std::vector<ConvergenceRecord>& records) {
  // Keyed groups in first-appearance order.
  std::vector<BoxRow> rows;
  std::vector<std::vector<double>> groups;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const BoxRow& b) {
      return b.case_name == r.case_name && b.n == r.n && b.method == r.method;
    });
    std::size_t k;
    if (it == rows.end()) {
      rows.push_back({r.case_name, r.n, r.method, {}});
      groups.emplace_back();
      k = rows.size() - 1;
    } else {
      k = static_cast<std::size_t>(it - rows.begin());
    }
    groups[k].push_back(r.eta);
  }
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].stats = box_stats(groups[k]);
  return rows;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("correlation needs two equal-length samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

// Average ranks (ties share the mean rank).
std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

} // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  return pearson(ra, rb);
}

EstimatorAccuracy estimator_accuracy(const std::vector<ConvergenceRecord>& records) {
  EstimatorAccuracy acc;
  if (records.empty()) return acc;
  acc.case_name = records.front().case_name;
  acc.count = records.size();
  std::vector<double> le, lg, e, g;
  std::size_t under = 0;
  for (const auto& r : records) {
    e.push_back(r.eta);
    g.push_back(r.eps_gen_hat);
    if (r.eps_gen_hat < r.eta) ++under;
    if (r.eta > 0.0 && r.eps_gen_hat > 0.0) {
      le.push_back(std::log(r.eta));
      lg.push_back(std::log(r.eps_gen_hat));
    }
  }
  acc.underestimation = static_cast<double>(under) / static_cast<double>(records.size());
  acc.pearson_log = le.size() >= 2 ? pearson(lg, le) : 0.0;
  acc.spearman = records.size() >= 2 ? spearman(g, e) : 0.0;
  return acc;
}

void write_records_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "case,N,rep,method,eta,eps_gen_hat,wall_seconds\n";
  for (const auto& r : records) {
    out << r.case_name << ',' << r.n << ',' << r.rep << ',' << to_string(r.method) << ','
        << format_double(r.eta) << ',' << format_double(r.eps_gen_hat) << ','
        << format_double(std::round(r.wall_seconds * 1e3) / 1e3) << '\n';
  }
}

void write_box_csv(std::ostream& out, const std::vector<BoxRow>& rows) {
  out << "case,N,method,median,q1,q3,lo_whisker,hi_whisker\n";
  for (const auto& b : rows) {
    out << b.case_name << ',' << b.n << ',' << to_string(b.method) << ',' << format_double(b.stats.median)
        << ',' << format_double(b.stats.q1) << ',' << format_double(b.stats.q3) << ','
        << format_double(b.stats.lo_whisker) << ',' << format_double(b.stats.hi_whisker) << '\n';
  }
}

} // namespace sse
