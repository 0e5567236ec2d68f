#include "specadapt/model_io.hpp"

#include <gtest/gtest.h>

#include <bit>

#include "json.hpp"
#include "specadapt/error.hpp"
#include "test_util.hpp"

namespace specadapt {
namespace {

using testing::TempDir;

Checkpoint make_checkpoint(Eigen::Index dim, Eigen::Index k, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd rows(40, dim);
  for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = g(rng);
  Checkpoint c;
  c.pipeline.reduction = fit_pca(rows, PcaOptions{.k = k, .tol = 1e-10, .seed = seed});
  c.pipeline.network = init_model(k, 16, 12, seed, 0.3);
  c.pipeline.network.layers.for_each([&](DenseLayer& l) {
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * g(rng);
  });
  c.meta.seeds = {{"init", seed}, {"split", seed + 1}};
  c.meta.config = {{"epochs", "100"}, {"k", std::to_string(k)}};
  c.meta.created = "2024-01-01T00:00:00Z";
  return c;
}

Spectrum random_spectrum(std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Spectrum s;
  for (std::size_t i = 0; i < dim; ++i) s.intensities.push_back(u(rng));
  return s;
}

TEST(HexEncoding, Examples) {
  EXPECT_EQ(encode_double(1.0), "3ff0000000000000");
  EXPECT_EQ(encode_double(0.0), "0000000000000000");
  EXPECT_EQ(encode_double(-2.0), "c000000000000000");
  EXPECT_EQ(decode_double("3ff0000000000000"), 1.0);
  const double tricky = 0.1 + 0.2;
  EXPECT_EQ(std::bit_cast<std::uint64_t>(decode_double(encode_double(tricky))),
            std::bit_cast<std::uint64_t>(tricky));
  EXPECT_TRUE(std::signbit(decode_double(encode_double(-0.0))));
  EXPECT_THROW(decode_double("3ff000000000000"), Error);
  EXPECT_THROW(decode_double("3ff000000000000g"), Error);
  EXPECT_THROW(decode_double("3FF0000000000000x"), Error);
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  TempDir dir;
  const auto c = make_checkpoint(20, 5, 3);
  save_checkpoint(c, dir / "a.json");
  save_checkpoint(load_checkpoint(dir / "a.json"), dir / "b.json");
  const auto a = testing::read_file(dir / "a.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, testing::read_file(dir / "b.json"));
}

TEST(Checkpoint, SchemaKeys) {
  const auto doc = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(10, 3, 1)));
  for (const char* key : {"version", "normalization", "reduction", "network", "meta"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["version"], 1);
  EXPECT_EQ(doc["reduction"]["shape"], nlohmann::json::array({3, 10}));
  EXPECT_EQ(doc["reduction"]["components"].size(), 30u);
  EXPECT_EQ(doc["network"]["feature1"]["shape"], nlohmann::json::array({16, 3}));
  EXPECT_EQ(doc["reduction"]["mean"][0].get<std::string>().size(), 16u);
}

TEST(Checkpoint, RowMajorLayout) {
  auto c = make_checkpoint(10, 3, 1);
  c.pipeline.network.layers.feature1.weights(0, 1) = 1.0;
  c.pipeline.network.layers.feature1.weights(1, 0) = -2.0;
  const auto doc = nlohmann::json::parse(checkpoint_to_string(c));
  EXPECT_EQ(doc["network"]["feature1"]["weights"][1], "3ff0000000000000");
  EXPECT_EQ(doc["network"]["feature1"]["weights"][3], "c000000000000000");
}

TEST(Checkpoint, PredictionsBitIdenticalAfterRoundTrip) {
  TempDir dir;
  const auto c = make_checkpoint(20, 5, 7);
  save_checkpoint(c, dir / "m.json");
  const auto back = load_checkpoint(dir / "m.json");
  EXPECT_TRUE(back.pipeline.network == c.pipeline.network);
  EXPECT_EQ(back.pipeline.reduction.components(), c.pipeline.reduction.components());
  EXPECT_EQ(back.meta.seeds, c.meta.seeds);
  EXPECT_EQ(back.meta.config, c.meta.config);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_spectrum(20, rng);
    EXPECT_EQ(c.pipeline.predict(s), back.pipeline.predict(s));
    Rng unused(0);
    const Eigen::VectorXd p1 = forward_label(c.pipeline.network, c.pipeline.features(s), false, unused);
    const Eigen::VectorXd p2 =
        forward_label(back.pipeline.network, back.pipeline.features(s), false, unused);
    for (Eigen::Index j = 0; j < p1.size(); ++j) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(p1(j)), std::bit_cast<std::uint64_t>(p2(j)));
    }
  }
}

TEST(Checkpoint, TruncatedFileIsRejected) {
  TempDir dir;
  const auto text = checkpoint_to_string(make_checkpoint(20, 5, 2));
  testing::write_file(dir / "t.json", text.substr(0, text.size() / 2));
  EXPECT_THROW(load_checkpoint(dir / "t.json"), Error);
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), Error);
}

TEST(Checkpoint, UnknownVersionIsRejected) {
  auto doc = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(10, 3, 2)));
  doc["version"] = 999;
  try {
    checkpoint_from_string(doc.dump());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported checkpoint version 999"), std::string::npos);
  }
}

TEST(Checkpoint, MalformedValuesAreRejected) {
  const auto good = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(10, 3, 2)));
  auto bad_hex = good;
  bad_hex["reduction"]["mean"][0] = "zz";
  EXPECT_THROW(checkpoint_from_string(bad_hex.dump()), Error);
  auto short_array = good;
  short_array["network"]["label_head"]["bias"].erase(0);
  EXPECT_THROW(checkpoint_from_string(short_array.dump()), Error);
  auto no_meta = good;
  no_meta.erase("meta");
  EXPECT_THROW(checkpoint_from_string(no_meta.dump()), Error);
}

TEST(Checkpoint, DimensionMismatchIsRejected) {
  // A reduction of width 4 spliced in front of a network expecting 3 inputs.
  auto doc = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(10, 3, 2)));
  const auto other = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(10, 4, 2)));
  doc["reduction"] = other["reduction"];
  EXPECT_THROW(checkpoint_from_string(doc.dump()), DimensionError);

  auto c = make_checkpoint(10, 3, 2);
  c.pipeline.network = init_model(4, 8, 12, 1);
  EXPECT_THROW(checkpoint_to_string(c), DimensionError);
}

TEST(Timestamp, Iso8601Utc) {
  const auto t = utc_timestamp();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}

}  // namespace
}  // namespace specadapt
