#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sse/benchmarks.hpp"
#include "sse/error.hpp"
#include "sse/serialization.hpp"

using namespace sse;

namespace {

SseModel trained_model() {
  const InputModel im({Marginal::gaussian(1, 0.3), Marginal::lognormal(2, 0.2), Marginal::gumbel(430, 0.2)});
  const Eigen::MatrixXd x = im.sample(400, 21);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y[i] = std::sin(3 * x(i, 0)) * x(i, 1) + 1e-3 * x(i, 2) + (x(i, 0) > 1.2 ? 0.5 : 0.0);
  }
  return train(im, x, y, SseConfig{});
}

std::string error_of(const std::string& text) {
  try {
    deserialize(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST(Fnv1a, KnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Serialization, RoundTripPredictsBitIdentically) {
  const SseModel m = trained_model();
  const std::string text = serialize(m);
  const SseModel r = deserialize(text);
  EXPECT_EQ(serialize(r), text);
  ASSERT_EQ(r.nodes().size(), m.nodes().size());
  const Eigen::MatrixXd probe = m.input_model().sample(5000, 99);
  const Eigen::VectorXd a = m.predict(probe);
  const Eigen::VectorXd b = r.predict(probe);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_EQ(gen_error_estimate(m).relative, gen_error_estimate(r).relative);
  EXPECT_EQ(r.input_model().names(), m.input_model().names());
}

TEST(Serialization, FileRoundTrip) {
  const SseModel m = trained_model();
  const auto path = std::filesystem::temp_directory_path() / "sse_serialization_test.json";
  save_model(m, path.string());
  const SseModel r = load_model(path.string());
  EXPECT_EQ(serialize(r), serialize(m));
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path.string()), Error);
}

TEST(Serialization, CorruptedPayloadDetected) {
  nlohmann::json doc = nlohmann::json::parse(serialize(trained_model()));
  auto& c = doc["payload"]["subdomains"][0]["expansion"]["coefficients"][0];
  c = c.get<double>() + 1e-9;
  EXPECT_EQ(error_of(doc.dump()), "model checksum failure");
}

TEST(Serialization, VersionMismatch) {
  nlohmann::json doc = nlohmann::json::parse(serialize(trained_model()));
  doc["version"] = kModelFormatVersion + 1;
  EXPECT_EQ(error_of(doc.dump()), "model version mismatch");
}

TEST(Serialization, MalformedDocuments) {
  EXPECT_NE(error_of("{not json").find("malformed model"), std::string::npos);
  EXPECT_NE(error_of("{\"format\":\"other\"}").find("malformed model"), std::string::npos);
  nlohmann::json doc = nlohmann::json::parse(serialize(trained_model()));
  doc.erase("checksum");
  EXPECT_NE(error_of(doc.dump()).find("malformed model"), std::string::npos);
}

TEST(Serialization, InputModelJson) {
  const InputModel im = oscillator_input();
  const InputModel back = input_model_from_json(input_model_to_json(im));
  EXPECT_EQ(back.names(), im.names());
  ASSERT_EQ(back.dim(), im.dim());
  for (std::size_t i = 0; i < im.dim(); ++i) {
    EXPECT_EQ(back.marginal(i).family(), im.marginal(i).family());
    EXPECT_EQ(back.marginal(i).mean(), im.marginal(i).mean());
    EXPECT_EQ(back.marginal(i).std_dev(), im.marginal(i).std_dev());
  }
}
