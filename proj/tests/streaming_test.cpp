#include "specadapt/streaming.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "specadapt/error.hpp"
#include "test_util.hpp"

namespace specadapt {
namespace {

using testing::TempDir;

// Samples whose class is the position of the largest coordinate, with a
// second half drifting away from the first.
FeatureSet make_stream(std::size_t n, int classes, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 0.8);
  const auto d = static_cast<Eigen::Index>(classes);
  FeatureSet f(Eigen::MatrixXd(d, static_cast<Eigen::Index>(n)), std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(classes));
    const double drift = i >= n / 2 ? 0.7 : 0.0;
    for (Eigen::Index r = 0; r < d; ++r) {
      f.x(r, static_cast<Eigen::Index>(i)) = (r == y ? 2.0 : 0.0) + drift + g(rng);
    }
    f.labels[i] = y;
  }
  return f;
}

MlpAdaptModel one_hot_model(int classes) {
  auto m = init_model(classes, classes, classes, 0);
  m.layers.for_each([](DenseLayer& l) {
    l.weights.setZero();
    l.bias.setZero();
  });
  m.layers.feature1.weights.setIdentity();
  m.layers.feature2.weights.setIdentity();
  m.layers.label_head.weights = 10.0 * Eigen::MatrixXd::Identity(classes, classes);
  return m;
}

StreamConfig small_config(bool adapt) {
  StreamConfig cfg;
  cfg.chunk_size = 100;
  cfg.n_chunks = 6;
  cfg.ustm_capacity = 20;
  cfg.adapt = adapt;
  cfg.retrain.epochs = 3;
  cfg.retrain.batch_size = 16;
  cfg.retrain.seed = 5;
  return cfg;
}

struct Fixture {
  FeatureSet source = make_stream(300, 3, 1);
  FeatureSet stream = make_stream(600, 3, 2);
  MlpAdaptModel model = init_model(3, 8, 3, 3);
  Lltm lltm{source};
};

TEST(PrequentialRun, TenChunkRecords) {
  const auto stream = make_stream(25000, 3, 4);
  const auto m = init_model(3, 8, 3, 1);
  const Lltm lltm(make_stream(200, 3, 5));
  StreamConfig cfg;
  cfg.adapt = false;
  auto run = prequential_run(m, stream, lltm, cfg);
  ASSERT_EQ(run.report.chunks.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(run.report.chunks[i].chunk_index, i);
    EXPECT_EQ(run.report.chunks[i].n_samples, 2500u);
  }
  cfg.adapt = true;
  cfg.retrain.epochs = 1;
  EXPECT_EQ(prequential_run(m, stream, lltm, cfg).report.chunks.size(), 10u);
}

TEST(PrequentialRun, BaselineLeavesModelUnchanged) {
  Fixture f;
  const auto run = prequential_run(f.model, f.stream, f.lltm, small_config(false));
  EXPECT_TRUE(run.final_model == f.model);
  for (const auto& r : run.report.chunks) {
    EXPECT_EQ(r.retrain_seconds, 0.0);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
  }
}

TEST(PrequentialRun, OracleStubScoresOne) {
  FeatureSet stream(Eigen::MatrixXd::Zero(4, 400), std::vector<int>(400));
  for (Eigen::Index i = 0; i < 400; ++i) {
    stream.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 4);
    stream.x(i % 4, i) = 1.0;
  }
  const auto m = one_hot_model(4);
  StreamConfig cfg;
  cfg.chunk_size = 40;
  cfg.adapt = false;
  const auto run = prequential_run(m, stream, Lltm(stream), cfg);
  for (const auto& r : run.report.chunks) EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(run.report.average_accuracy, 1.0);
}

TEST(PrequentialRun, AverageIsMeanOfChunks) {
  Fixture f;
  const auto run = prequential_run(f.model, f.stream, f.lltm, small_config(true));
  double sum = 0.0;
  for (const auto& r : run.report.chunks) sum += r.accuracy;
  EXPECT_NEAR(run.report.average_accuracy, sum / 6.0, 1e-12);
  EXPECT_FALSE(run.final_model == f.model);
  for (const auto& r : run.report.chunks) EXPECT_GT(r.retrain_seconds, 0.0);
}

TEST(PrequentialRun, LabelPermutationLeavesTrajectoryUnchanged) {
  Fixture f;
  FeatureSet permuted = f.stream;
  Rng rng(99);
  std::shuffle(permuted.labels.begin(), permuted.labels.end(), rng);
  ASSERT_NE(permuted.labels, f.stream.labels);

  std::vector<MlpAdaptModel> a, b;
  prequential_run(f.model, f.stream, f.lltm, small_config(true),
                  [&](std::size_t, const Ustm&, const MlpAdaptModel& m) { a.push_back(m); });
  prequential_run(f.model, permuted, f.lltm, small_config(true),
                  [&](std::size_t, const Ustm&, const MlpAdaptModel& m) { b.push_back(m); });
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(b.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]) << "chunk " << i;
}

TEST(PrequentialRun, TestThenTrainOrdering) {
  Fixture f;
  const auto cfg = small_config(true);
  std::vector<MlpAdaptModel> models{f.model};
  std::vector<Eigen::MatrixXd> memories;
  const auto run = prequential_run(f.model, f.stream, f.lltm, cfg,
                                   [&](std::size_t c, const Ustm& u, const MlpAdaptModel& m) {
                                     EXPECT_EQ(c, memories.size());
                                     memories.push_back(u.matrix());
                                     models.push_back(m);
                                   });
  for (std::size_t c = 0; c < cfg.n_chunks; ++c) {
    std::vector<std::size_t> idx(cfg.chunk_size);
    std::iota(idx.begin(), idx.end(), c * cfg.chunk_size);
    const auto chunk = f.stream.select(idx);
    // Score comes from the model trained before this chunk arrived.
    EXPECT_EQ(run.report.chunks[c].accuracy, evaluate_accuracy(models[c], chunk));
    // The memory feeding retrain c holds the tail of chunk c only.
    const auto tail = chunk.x.rightCols(static_cast<Eigen::Index>(cfg.ustm_capacity));
    EXPECT_EQ(memories[c], tail);
  }
}

TEST(PrequentialRun, UniformFillDrawsFromCurrentChunk) {
  Fixture f;
  auto cfg = small_config(true);
  cfg.fill = UstmFill::kUniform;
  prequential_run(f.model, f.stream, f.lltm, cfg,
                  [&](std::size_t c, const Ustm& u, const MlpAdaptModel&) {
                    ASSERT_EQ(u.size(), cfg.ustm_capacity);
                    const auto begin = static_cast<Eigen::Index>(c * cfg.chunk_size);
                    for (std::size_t i = 0; i < u.size(); ++i) {
                      bool found = false;
                      for (Eigen::Index k = 0; k < 100 && !found; ++k) {
                        found = f.stream.x.col(begin + k) == u.at(i);
                      }
                      EXPECT_TRUE(found);
                    }
                  });
}

TEST(PrequentialRun, Errors) {
  Fixture f;
  auto cfg = small_config(false);
  cfg.n_chunks = 7;
  EXPECT_THROW(prequential_run(f.model, f.stream, f.lltm, cfg), Error);
  EXPECT_THROW(prequential_run(f.model, f.stream.without_labels(), f.lltm, small_config(false)),
               Error);
  EXPECT_THROW(prequential_run(init_model(4, 8, 3, 1), f.stream, f.lltm, small_config(false)),
               DimensionError);
}

StreamReport report_of(std::vector<double> acc) {
  StreamReport r;
  for (std::size_t i = 0; i < acc.size(); ++i) r.chunks.push_back({i, 500, acc[i], 0.5, 0.01});
  r.average_accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / acc.size();
  return r;
}

TEST(CompareReports, Examples) {
  const auto a = report_of({0.9, 0.8, 0.95});
  const auto same = compare_reports(a, a);
  for (double d : same.deltas) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(same.average_delta, 0.0);

  const auto adapt = report_of(std::vector<double>(10, 0.9));
  const auto base = report_of(std::vector<double>(10, 0.88));
  EXPECT_NEAR(compare_reports(adapt, base).average_delta, 0.02, 1e-12);

  EXPECT_THROW(compare_reports(adapt, report_of(std::vector<double>(9, 0.9))), Error);
}

TEST(ReportCsv, RoundTripAndFormat) {
  TempDir dir;
  auto r = report_of({0.5, 0.25, 0.123456789});
  r.chunks[1].retrain_seconds = 1.23456;
  write_report(r, dir / "r.csv");
  const auto text = testing::read_file(dir / "r.csv");
  EXPECT_EQ(text,
            "chunk,n,accuracy,retrain_seconds,inference_seconds\n"
            "0,500,0.500000,0.500,0.010\n"
            "1,500,0.250000,1.235,0.010\n"
            "2,500,0.123457,0.500,0.010\n"
            "# average_accuracy=0.291152\n");
  const auto back = read_report(dir / "r.csv");
  ASSERT_EQ(back.chunks.size(), 3u);
  EXPECT_EQ(back.chunks[2].accuracy, 0.123457);
  EXPECT_EQ(back.average_accuracy, 0.291152);

  testing::write_file(dir / "bad.csv", "chunk,n\n");
  EXPECT_THROW(read_report(dir / "bad.csv"), ParseError);
  testing::write_file(dir / "bad2.csv",
                      "chunk,n,accuracy,retrain_seconds,inference_seconds\n0,1,x,0,0\n");
  EXPECT_THROW(read_report(dir / "bad2.csv"), ParseError);
}

TEST(ReportCsv, ComparisonCsv) {
  TempDir dir;
  auto a = report_of({0.9, 0.921});
  auto b = report_of({0.9, 0.9});
  write_comparison(compare_reports(a, b), dir / "c.csv");
  EXPECT_EQ(testing::read_file(dir / "c.csv"),
            "chunk,acc_a,acc_b,delta\n0,0.900000,0.900000,0.000000\n1,0.921000,0.900000,0.021000\n");
}

}  // namespace
}  // namespace specadapt
