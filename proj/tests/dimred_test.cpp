#include "specadapt/dimred.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace specadapt {
namespace {

Eigen::MatrixXd random_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed, bool anisotropic) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(rng) * (anisotropic ? 1.0 + j : 1.0);
  }
  return x;
}

double orthonormality_error(const Eigen::MatrixXd& c) {
  Eigen::MatrixXd gram = c * c.transpose();
  return (gram - Eigen::MatrixXd::Identity(c.rows(), c.rows())).cwiseAbs().maxCoeff();
}

SpectraSet rows_to_set(const Eigen::MatrixXd& x) {
  SpectraSet set(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::RowVectorXd r = x.row(i);
    set.add({{r.data(), r.data() + r.size()}, {}});
  }
  return set;
}

TEST(FitPca, LineDirection) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  auto m = fit_pca(x, {.k = 1, .tol = 1e-14});
  EXPECT_NEAR(m.components()(0, 0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.components()(0, 1), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.mean()(0), 2.0, 1e-15);
}

TEST(FitPca, CompleteBasisReconstructs) {
  auto x = random_rows(12, 5, 4, true);
  auto m = fit_pca(x, {.k = 5, .tol = 1e-13, .seed = 2});
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::RowVectorXd r = x.row(i);
    auto z = m.transform(std::span<const double>(r.data(), 5));
    Eigen::VectorXd back = m.reconstruct(z);
    EXPECT_LT((back - r.transpose()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(FitPca, MatchesDenseEigenSolver) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto x = random_rows(50, 8, seed, false);
    auto m = fit_pca(x, {.k = 3, .max_iter = 200000, .tol = 1e-13, .seed = seed});
    auto ref = oracle::dense_principal_axes(x, 3);
    for (Eigen::Index r = 0; r < 3; ++r) {
      const double same = (m.components().row(r) - ref.row(r)).cwiseAbs().maxCoeff();
      const double flipped = (m.components().row(r) + ref.row(r)).cwiseAbs().maxCoeff();
      EXPECT_LT(std::min(same, flipped), 1e-6) << "seed " << seed << " component " << r;
    }
  }
}

TEST(FitPca, SignConvention) {
  auto x = random_rows(40, 6, 9, true);
  auto m = fit_pca(x, {.k = 4, .tol = 1e-12});
  for (Eigen::Index r = 0; r < 4; ++r) {
    Eigen::Index arg = 0;
    m.components().row(r).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.components()(r, arg), 0.0);
  }
}

TEST(FitPca, Errors) {
  auto x = random_rows(5, 3, 1, false);
  EXPECT_THROW(fit_pca(x, {.k = 0}), Error);
  EXPECT_THROW(fit_pca(x, {.k = 4}), Error);  // > D
  auto y = random_rows(3, 6, 1, false);
  EXPECT_THROW(fit_pca(y, {.k = 3}), Error);  // > n - 1
  EXPECT_THROW(fit_pca(Eigen::MatrixXd(0, 3), {.k = 1}), Error);
  auto z = random_rows(50, 8, 1, false);
  try {
    fit_pca(z, {.k = 2, .max_iter = 2, .tol = 1e-15});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(FitPca, OrthonormalAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto x = random_rows(30 + static_cast<Eigen::Index>(seed), 7, seed, seed % 2 == 0);
    PcaOptions opt{.k = 5, .tol = 1e-10, .seed = seed};
    auto a = fit_pca(x, opt);
    auto b = fit_pca(x, opt);
    EXPECT_LT(orthonormality_error(a.components()), 1e-8);
    EXPECT_EQ(a.components(), b.components());
    EXPECT_EQ(a.mean(), b.mean());
  }
}

TEST(FitPca, ReconstructionErrorNonincreasingInK) {
  auto x = random_rows(40, 8, 21, true);
  double previous = INFINITY;
  for (Eigen::Index k = 1; k <= 8; ++k) {
    auto m = fit_pca(x, {.k = k, .tol = 1e-12});
    double err = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Eigen::RowVectorXd r = x.row(i);
      err += (m.reconstruct(m.transform(std::span<const double>(r.data(), 8))) - r.transpose())
                 .squaredNorm();
    }
    err /= static_cast<double>(x.rows());
    EXPECT_LE(err, previous + 1e-12) << "k=" << k;
    previous = err;
  }
}

TEST(FitPca, ImplicitCovarianceForWideData) {
  // Wider than the explicit-covariance limit: goes through the data matrix.
  auto x = random_rows(6, 2100, 8, false);
  auto m = fit_pca(x, {.k = 3, .tol = 1e-10});
  EXPECT_LT(orthonormality_error(m.components()), 1e-8);
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd gram = centered * centered.transpose() / 5.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  auto ev = explained_variance(m, rows_to_set(x));
  EXPECT_NEAR(ev[0], es.eigenvalues()(5), 1e-6 * es.eigenvalues()(5));
}

TEST(Transform, Examples) {
  auto x = random_rows(20, 4, 3, true);
  auto m = fit_pca(x, {.k = 2});
  std::vector<double> mean(m.mean().data(), m.mean().data() + 4);
  EXPECT_EQ(m.transform(mean), Eigen::VectorXd::Zero(2));

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 4);
  c(0, 0) = 1.0;
  Eigen::VectorXd mu(4);
  mu << 0.5, 1, 2, 3;
  PcaModel coord(mu, c);
  std::vector<double> v{3.25, 9, 9, 9};
  EXPECT_EQ(coord.transform(v)(0), 3.25 - 0.5);

  EXPECT_THROW(coord.transform(std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(Transform, MatchesMatrixProductOracle) {
  auto x = random_rows(30, 6, 12, true);
  auto m = fit_pca(x, {.k = 4});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(6);
    for (auto& v : s) v = g(rng);
    auto z = m.transform(s);
    for (Eigen::Index r = 0; r < 4; ++r) {
      double dot = 0;
      for (Eigen::Index j = 0; j < 6; ++j) {
        dot += m.components()(r, j) * (s[static_cast<std::size_t>(j)] - m.mean()(j));
      }
      EXPECT_NEAR(z(r), dot, 1e-12);
    }
  }
}

TEST(Transform, IsAffine) {
  auto x = random_rows(30, 6, 13, true);
  auto m = fit_pca(x, {.k = 3});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(6), b(6);
    Eigen::VectorXd diff(6);
    for (int j = 0; j < 6; ++j) {
      a[j] = g(rng);
      b[j] = g(rng);
      diff(j) = a[j] - b[j];
    }
    Eigen::VectorXd lhs = m.transform(a) - m.transform(b);
    EXPECT_LT((lhs - m.components() * diff).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ExplainedVariance, Examples) {
  Eigen::MatrixXd line(3, 2);
  line << 1, 1, 2, 2, 3, 3;
  auto m = fit_pca(line, {.k = 1, .tol = 1e-14});
  // Projections are -sqrt2, 0, sqrt2: sample variance 2.
  auto ev = explained_variance(m, rows_to_set(line));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_NEAR(ev[0], 2.0, 1e-12);

  auto iso = random_rows(10000, 2, 77, false);
  auto mi = fit_pca(iso, {.k = 2});
  auto evi = explained_variance(mi, rows_to_set(iso));
  EXPECT_GE(evi[0], evi[1]);
  EXPECT_LT(evi[0] / evi[1], 1.2);

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 3, 0.7);
  auto mf = fit_pca(flat, {.k = 2});
  for (double v : explained_variance(mf, rows_to_set(flat))) EXPECT_EQ(v, 0.0);
  EXPECT_LT(orthonormality_error(mf.components()), 1e-8);

  EXPECT_THROW(explained_variance(m, SpectraSet(2)), Error);
}

TEST(DefaultComponents, Rules) {
  EXPECT_EQ(default_components(20000, 40002), 100);
  EXPECT_EQ(default_components(50, 40002), 49);
  EXPECT_EQ(default_components(2000, 64), 32);
  EXPECT_EQ(default_components(10, 64), 9);
  EXPECT_EQ(default_components(2000, 8), 8);
}

}  // namespace
}  // namespace specadapt
