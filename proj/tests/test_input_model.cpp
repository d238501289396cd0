#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "sse/error.hpp"
#include "sse/input_model.hpp"

using namespace sse;

namespace {

void expect_error(const std::function<void()>& f, const std::string& fragment) {
  try {
    f();
    FAIL() << "expected error containing '" << fragment << "'";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

} // namespace

TEST(Marginal, UniformCdf) {
  EXPECT_DOUBLE_EQ(Marginal::uniform(0, 1).cdf(0.3), 0.3);
  EXPECT_DOUBLE_EQ(Marginal::uniform(2, 4).inv_cdf(0.5), 3.0);
  EXPECT_DOUBLE_EQ(Marginal::uniform(2, 4).inv_cdf(0.0), 2.0);
  EXPECT_DOUBLE_EQ(Marginal::uniform(2, 4).inv_cdf(1.0), 4.0);
}

TEST(Marginal, GaussianSymmetry) {
  const auto g = Marginal::gaussian(0, 1);
  EXPECT_DOUBLE_EQ(g.cdf(0.0), 0.5);
  EXPECT_NEAR(g.inv_cdf(0.5), 0.0, 1e-15);
  EXPECT_NEAR(g.cdf(1.0), 0.84134474606854294859, 1e-15);
}

TEST(Marginal, LognormalMedian) {
  const auto l = Marginal::lognormal(1.5, 0.1);
  const double median = std::exp(std::log(1.5) - std::log(1.01) / 2);
  EXPECT_NEAR(median, 1.4925557853149837035, 1e-14);
  EXPECT_NEAR(l.cdf(median), 0.5, 1e-14);
  EXPECT_NEAR(l.inv_cdf(0.5), 1.4925557853149837035, 1e-13);
}

TEST(Marginal, GumbelMedian) {
  const auto g = Marginal::gumbel(430, 0.2);
  EXPECT_NEAR(g.inv_cdf(0.5), 415.87155400486715923, 1e-10);
  EXPECT_NEAR(g.cdf(415.87155400486715923), 0.5, 1e-14);
  const double beta = 430 * 0.2 * std::sqrt(6.0) / std::numbers::pi;
  EXPECT_NEAR(g.param2(), beta, 1e-12);
  EXPECT_NEAR(g.param1(), 430 - std::numbers::egamma * beta, 1e-10);
}

TEST(Marginal, ResolvedMomentsRoundTrip) {
  for (const auto& m : {Marginal::lognormal(0.01, 0.5), Marginal::lognormal(100, 0.1), Marginal::gumbel(430, 0.2),
                        Marginal::gaussian(10, 0.5), Marginal::uniform(-1, 3)}) {
    double mean = 0, sd = 0;
    switch (m.family()) {
      case Family::Lognormal: {
        const double mu = m.param1(), s = m.param2();
        mean = std::exp(mu + s * s / 2);
        sd = mean * std::sqrt(std::expm1(s * s));
        break;
      }
      case Family::Gumbel:
        mean = m.param1() + std::numbers::egamma * m.param2();
        sd = m.param2() * std::numbers::pi / std::sqrt(6.0);
        break;
      case Family::Gaussian:
        mean = m.param1();
        sd = m.param2();
        break;
      case Family::Uniform:
        mean = 0.5 * (m.param1() + m.param2());
        sd = (m.param2() - m.param1()) / std::sqrt(12.0);
        break;
    }
    EXPECT_NEAR(mean, m.mean(), 1e-12 * std::abs(m.mean()) + 1e-15);
    EXPECT_NEAR(sd, m.std_dev(), 1e-12 * m.std_dev());
  }
}

TEST(Marginal, InvalidParameters) {
  EXPECT_THROW(Marginal::uniform(1, 1), Error);
  EXPECT_THROW(Marginal::gaussian(0, 0), Error);
  EXPECT_THROW(Marginal::lognormal(-1, 0.1), Error);
  EXPECT_THROW(Marginal::lognormal(1, 0), Error);
  EXPECT_THROW(Marginal::gumbel(1, -0.1), Error);
}

TEST(Marginal, Errors) {
  expect_error([] { Marginal::gaussian(0, 1).cdf(std::nan("")); }, "non-finite input");
  expect_error([] { Marginal::gaussian(0, 1).inv_cdf(1.5); }, "domain error");
  expect_error([] { Marginal::gaussian(0, 1).inv_cdf(-0.1); }, "domain error");
  expect_error([] { Marginal::gaussian(0, 1).inv_cdf(0.0); }, "unbounded quantile");
  expect_error([] { Marginal::lognormal(1, 0.1).inv_cdf(1.0); }, "unbounded quantile");
  expect_error([] { Marginal::gumbel(1, 0.1).inv_cdf(0.0); }, "unbounded quantile");
}

TEST(Marginal, InverseCdfRoundTrip) {
  std::mt19937_64 rng(5);
  for (const auto& m : {Marginal::uniform(2, 4), Marginal::gaussian(1, 2), Marginal::lognormal(1.5, 0.1),
                        Marginal::gumbel(430, 0.2)}) {
    for (int k = 0; k < 2000; ++k) {
      const double u = uniform_open01(rng());
      const double u2 = m.cdf(m.inv_cdf(u));
      EXPECT_NEAR(u2, u, 1e-12 * std::max(u, 1e-3)) << to_string(m.family()) << " u=" << u;
    }
  }
}

TEST(Marginal, CdfMonotone) {
  std::mt19937_64 rng(11);
  for (const auto& m : {Marginal::gaussian(0, 1), Marginal::lognormal(1.5, 0.3), Marginal::gumbel(430, 0.2)}) {
    std::vector<double> xs;
    for (int k = 0; k < 1000; ++k) xs.push_back(m.inv_cdf(uniform_open01(rng())) * (1 + 1e-3 * (k % 3)));
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 1; k < xs.size(); ++k) EXPECT_LE(m.cdf(xs[k - 1]), m.cdf(xs[k]));
  }
}

TEST(Marginal, SampleMomentsMatchDeclared) {
  constexpr std::size_t n = 10'000'000;
  for (const auto& m : {Marginal::uniform(0, 1), Marginal::gaussian(10, 0.5), Marginal::lognormal(0.02, 0.5),
                        Marginal::gumbel(430, 0.2)}) {
    const InputModel im({m});
    const Eigen::MatrixXd x = im.sample(n, 123);
    const double mean = x.col(0).mean();
    const double var = (x.col(0).array() - mean).square().sum() / (n - 1);
    const double sd = std::sqrt(var);
    EXPECT_NEAR(mean, m.mean(), 4 * m.std_dev() / std::sqrt(double(n))) << to_string(m.family());
    // Standard error of the sample std, excess kurtosis ignored up to a factor.
    EXPECT_NEAR(sd, m.std_dev(), 4 * 3 * m.std_dev() / std::sqrt(2.0 * n)) << to_string(m.family());
  }
}

TEST(InputModel, ToQuantileExamples) {
  const InputModel u2({Marginal::uniform(0, 1), Marginal::uniform(0, 1)});
  const std::vector<double> x{0.2, 0.9};
  const auto u = u2.to_quantile(x);
  EXPECT_DOUBLE_EQ(u[0], 0.2);
  EXPECT_DOUBLE_EQ(u[1], 0.9);

  const InputModel mixed({Marginal::gaussian(0, 1), Marginal::uniform(0, 1)});
  const std::vector<double> x2{1.0, 0.25};
  const auto q = mixed.to_quantile(x2);
  EXPECT_NEAR(q[0], 0.84134474606854294859, 1e-15);
  EXPECT_DOUBLE_EQ(q[1], 0.25);
  const auto back = mixed.from_quantile(std::vector<double>{q[0], q[1]});
  EXPECT_NEAR(back[0], 1.0, 1e-12);
  EXPECT_NEAR(back[1], 0.25, 1e-15);
}

TEST(InputModel, DefaultNames) {
  const InputModel im({Marginal::uniform(0, 1), Marginal::uniform(0, 1)});
  EXPECT_EQ(im.names(), (std::vector<std::string>{"x1", "x2"}));
}

TEST(InputModel, RoundTripOnRandomPoints) {
  const InputModel im({Marginal::gaussian(1, 2), Marginal::lognormal(1.5, 0.1), Marginal::gumbel(430, 0.2),
                       Marginal::uniform(-3, 5)});
  const Eigen::MatrixXd x = im.sample(10000, 77);
  const Eigen::MatrixXd back = im.from_quantile(im.to_quantile(x));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      EXPECT_NEAR(back(i, j), x(i, j), 1e-10 * std::max(1.0, std::abs(x(i, j))));
    }
  }
}

TEST(InputModel, SamplingDeterministic) {
  const InputModel im({Marginal::gaussian(0, 1), Marginal::gumbel(430, 0.2)});
  EXPECT_EQ(im.sample(100, 42), im.sample(100, 42));
  EXPECT_NE(im.sample(100, 42), im.sample(100, 43));
  EXPECT_THROW(im.sample(0, 1), Error);
}

TEST(InputModel, UniformSampleMean) {
  const InputModel im({Marginal::uniform(0, 1)});
  const Eigen::MatrixXd x = im.sample(1'000'000, 9);
  EXPECT_NEAR(x.col(0).mean(), 0.5, 0.002);
}

TEST(InputModel, QuantileSamplesInsideOpenCube) {
  const InputModel im({Marginal::gaussian(0, 1), Marginal::gaussian(0, 1)});
  const Eigen::MatrixXd u = im.sample_quantile(10000, 3);
  EXPECT_GT(u.minCoeff(), 0.0);
  EXPECT_LT(u.maxCoeff(), 1.0);
}
