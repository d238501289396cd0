#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sse {

enum class Family { Uniform, Gaussian, Lognormal, Gumbel };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// A univariate marginal distribution. Construction goes through the named
// factories, which validate the user-facing moments and resolve the
// distribution parameters once.
class Marginal {
public:
  static Marginal uniform(double lower, double upper);
  static Marginal gaussian(double mean, double std_dev);
  static Marginal lognormal(double mean, double cov);
  // Gumbel for maxima, parametrized by mean and coefficient of variation.
  static Marginal gumbel(double mean, double cov);
  // Dispatches to the factory of the family with its two declared numbers.
  static Marginal make(Family family, double first, double second);

  Family family() const { return family_; }

  // User-facing moments.
  double mean() const { return mean_; }
  double std_dev() const { return std_dev_; }

  // Resolved parameters:
  //   Uniform   -> (a, b)
  //   Gaussian  -> (mean, std)
  //   Lognormal -> (mu, sigma) of the underlying normal
  //   Gumbel    -> (location, scale)
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  bool bounded() const { return family_ == Family::Uniform; }
  bool in_support(double x) const;

  double cdf(double x) const;
  double inv_cdf(double u) const;

  // The two numbers a user writes in a config file for this family
  // (a, b), (mean, std) or (mean, cov).
  std::pair<double, double> declared() const { return declared_; }

private:
  Marginal(Family family, double p1, double p2, double mean, double std_dev,
           std::pair<double, double> declared)
      : family_(family), p1_(p1), p2_(p2), mean_(mean), std_dev_(std_dev), declared_(declared) {}

  Family family_;
  double p1_;
  double p2_;
  double mean_;
  double std_dev_;
  std::pair<double, double> declared_;
};

// Ordered list of independent marginals; the isoprobabilistic map to the unit
// hypercube is the componentwise CDF.
class InputModel {
public:
  explicit InputModel(std::vector<Marginal> marginals, std::vector<std::string> names = {});

  std::size_t dim() const { return marginals_.size(); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const Marginal& marginal(std::size_t i) const { return marginals_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  Eigen::VectorXd to_quantile(std::span<const double> x) const;
  Eigen::VectorXd from_quantile(std::span<const double> u) const;

  // Row-wise versions for N x M designs.
  Eigen::MatrixXd to_quantile(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd from_quantile(const Eigen::MatrixXd& u) const;

  // n x M sample by inverse-CDF transform of open-interval uniforms drawn
  // from std::mt19937_64 (see uniform_open01).
  Eigen::MatrixXd sample(std::size_t n, std::uint64_t seed) const;

  // n x M uniforms on (0,1)^M from the same generator.
  Eigen::MatrixXd sample_quantile(std::size_t n, std::uint64_t seed) const;

private:
  std::vector<Marginal> marginals_;
  std::vector<std::string> names_;
};

// Maps a 64-bit generator output to (0,1): top 53 bits, shifted by half an ulp.
inline double uniform_open01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal CDF and quantile.
double normal_cdf(double z);
double normal_quantile(double u);

} // namespace sse
