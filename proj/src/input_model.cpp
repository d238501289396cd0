#include "sse/input_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "sse/error.hpp"

namespace sse {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw Error("non-finite input");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(std::string(what) + " must be positive and finite");
  }
}

} // namespace

std::string to_string(Family family) {
  switch (family) {
  case Family::Uniform:
    return "uniform";
  case Family::Gaussian:
    return "gaussian";
  case Family::Lognormal:
    return "lognormal";
  case Family::Gumbel:
    return "gumbel";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "gaussian") return Family::Gaussian;
  if (name == "lognormal") return Family::Lognormal;
  if (name == "gumbel") return Family::Gumbel;
  throw Error("unknown distribution family '" + name + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

Marginal Marginal::uniform(double lower, double upper) {
  require_finite(lower);
  require_finite(upper);
  if (!(upper > lower)) {
    throw Error("uniform bounds require b > a");
  }
  return Marginal(Family::Uniform, lower, upper, 0.5 * (lower + upper),
                  (upper - lower) / std::sqrt(12.0), {lower, upper});
}

Marginal Marginal::gaussian(double mean, double std_dev) {
  require_finite(mean);
  require_positive(std_dev, "std");
  return Marginal(Family::Gaussian, mean, std_dev, mean, std_dev, {mean, std_dev});
}

Marginal Marginal::lognormal(double mean, double cov) {
  require_positive(mean, "lognormal mean");
  require_positive(cov, "cov");
  const double sigma2 = std::log1p(cov * cov);
  const double mu = std::log(mean) - 0.5 * sigma2;
  return Marginal(Family::Lognormal, mu, std::sqrt(sigma2), mean, cov * mean, {mean, cov});
}

Marginal Marginal::gumbel(double mean, double cov) {
  require_finite(mean);
  require_positive(cov, "cov");
  const double std_dev = std::abs(mean) * cov;
  require_positive(std_dev, "gumbel std");
  const double scale = std_dev * std::sqrt(6.0) / std::numbers::pi;
  const double location = mean - std::numbers::egamma * scale;
  return Marginal(Family::Gumbel, location, scale, mean, std_dev, {mean, cov});
}

Marginal Marginal::make(Family family, double first, double second) {
  switch (family) {
  case Family::Uniform:
    return uniform(first, second);
  case Family::Gaussian:
    return gaussian(first, second);
  case Family::Lognormal:
    return lognormal(first, second);
  case Family::Gumbel:
    return gumbel(first, second);
  }
  throw Error("unknown distribution family");
}

bool Marginal::in_support(double x) const {
  if (std::isnan(x)) return false;
  switch (family_) {
  case Family::Uniform:
    return x >= p1_ && x <= p2_;
  case Family::Lognormal:
    return x > 0.0 && std::isfinite(x);
  default:
    return std::isfinite(x);
  }
}

double Marginal::cdf(double x) const {
  if (std::isnan(x)) {
    throw Error("non-finite input");
  }
  switch (family_) {
  case Family::Uniform:
    if (x <= p1_) return 0.0;
    if (x >= p2_) return 1.0;
    return (x - p1_) / (p2_ - p1_);
  case Family::Gaussian:
    return normal_cdf((x - p1_) / p2_);
  case Family::Lognormal:
    if (x <= 0.0) return 0.0;
    return normal_cdf((std::log(x) - p1_) / p2_);
  case Family::Gumbel:
    return std::exp(-std::exp(-(x - p1_) / p2_));
  }
  return 0.0;
}

double Marginal::inv_cdf(double u) const {
  if (std::isnan(u) || u < 0.0 || u > 1.0) {
    throw Error("domain error: quantile outside [0,1]");
  }
  if ((u == 0.0 || u == 1.0) && !bounded()) {
    throw Error("unbounded quantile");
  }
  switch (family_) {
  case Family::Uniform:
    return p1_ + u * (p2_ - p1_);
  case Family::Gaussian:
    return p1_ + p2_ * normal_quantile(u);
  case Family::Lognormal:
    return std::exp(p1_ + p2_ * normal_quantile(u));
  case Family::Gumbel:
    // -log(u) via log1p keeps precision for u close to 1.
    return p1_ - p2_ * std::log(-std::log1p(u - 1.0));
  }
  return 0.0;
}

InputModel::InputModel(std::vector<Marginal> marginals, std::vector<std::string> names)
    : marginals_(std::move(marginals)), names_(std::move(names)) {
  if (marginals_.empty()) {
    throw Error("input model needs at least one marginal");
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
      names_.push_back("x" + std::to_string(i + 1));
    }
  }
  if (names_.size() != marginals_.size()) {
    throw Error("input model names and marginals differ in length");
  }
}

Eigen::VectorXd InputModel::to_quantile(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw Error("dimension mismatch");
  }
  Eigen::VectorXd u(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    u[i] = marginals_[i].cdf(x[i]);
  }
  return u;
}

Eigen::VectorXd InputModel::from_quantile(std::span<const double> u) const {
  if (u.size() != dim()) {
    throw Error("dimension mismatch");
  }
  Eigen::VectorXd x(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    x[i] = marginals_[i].inv_cdf(u[i]);
  }
  return x;
}

Eigen::MatrixXd InputModel::to_quantile(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim()) {
    throw Error("dimension mismatch");
  }
  Eigen::MatrixXd u(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      u(i, j) = marginals_[j].cdf(x(i, j));
    }
  }
  return u;
}

Eigen::MatrixXd InputModel::from_quantile(const Eigen::MatrixXd& u) const {
  if (static_cast<std::size_t>(u.cols()) != dim()) {
    throw Error("dimension mismatch");
  }
  Eigen::MatrixXd x(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      x(i, j) = marginals_[j].inv_cdf(u(i, j));
    }
  }
  return x;
}

Eigen::MatrixXd InputModel::sample_quantile(std::size_t n, std::uint64_t seed) const {
  if (n == 0) {
    throw Error("sample size must be at least 1");
  }
  std::mt19937_64 gen(seed);
  Eigen::MatrixXd u(n, dim());
  // Row-major draw order so that a prefix of rows is independent of n.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim(); ++j) {
      u(i, j) = uniform_open01(gen());
    }
  }
  return u;
}

Eigen::MatrixXd InputModel::sample(std::size_t n, std::uint64_t seed) const {
  return from_quantile(sample_quantile(n, seed));
}

} // namespace sse
