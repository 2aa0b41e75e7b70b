#include "mibci/baselines.hpp"
#include "mibci/errors.hpp"
#include "mibci/lda.hpp"
#include "mibci/metrics.hpp"
#include "mibci/mibif.hpp"
#include "mibci/rng.hpp"
#include "mibci/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mibci;

namespace {

std::vector<Label> alternating(std::size_t n) {
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? Label::Left : Label::Right;
  return y;
}

// Direct Parzen MI in bits, written from the textbook definition.
double reference_mi(const std::vector<double>& f, const std::vector<Label>& y) {
  const double n = static_cast<double>(f.size());
  double mean = 0;
  for (double v : f) mean += v;
  mean /= n;
  double var = 0;
  for (double v : f) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / (n - 1));
  if (sigma == 0) return 0.0;
  const double h = std::pow(4.0 / (3.0 * n), 0.2) * sigma;
  double n_left = 0;
  for (auto l : y) n_left += l == Label::Left;
  const double p_left = n_left / n, p_right = 1 - p_left;
  const double hy = -(p_left * std::log2(p_left) + p_right * std::log2(p_right));
  double hyf = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double dl = 0, dr = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double g = std::exp(-0.5 * std::pow((f[i] - f[k]) / h, 2));
      (y[k] == Label::Left ? dl : dr) += g;
    }
    dl /= n_left;
    dr /= (n - n_left);
    const double pl = p_left * dl / (p_left * dl + p_right * dr);
    for (double p : {pl, 1 - pl}) {
      if (p > 0) hyf -= p * std::log2(p);
    }
  }
  return std::max(0.0, hy - hyf / n);
}

}  // namespace

TEST(Lda, SymmetricOneDimensional) {
  Eigen::MatrixXd x(4, 1);
  x << -1.5, 1.5, -0.5, 0.5;
  const std::vector<Label> y{Label::Left, Label::Right, Label::Left, Label::Right};
  const LdaModel m = fit_lda(x, y);
  EXPECT_NEAR(-m.bias / m.weights(0), 0.0, 1e-12);
  EXPECT_GT(m.weights(0), 0.0);
}

TEST(Lda, MatchesTextbookFisher) {
  Rng rng(4);
  Eigen::MatrixXd x(60, 3);
  const auto y = alternating(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = rng.normal() + (y[i] == Label::Right ? 0.5 * k : 0.0);
  }
  Eigen::Vector3d mu_l = Eigen::Vector3d::Zero(), mu_r = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < 60; ++i) (y[i] == Label::Left ? mu_l : mu_r) += x.row(i).transpose() / 30.0;
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (Eigen::Index i = 0; i < 60; ++i) {
    const Eigen::Vector3d d = x.row(i).transpose() - (y[i] == Label::Left ? mu_l : mu_r);
    s += d * d.transpose() / 60.0;
  }
  s += 1e-6 * s.diagonal().mean() * Eigen::Matrix3d::Identity();
  const Eigen::Vector3d w = s.inverse() * (mu_r - mu_l);
  const LdaModel m = fit_lda(x, y);
  EXPECT_TRUE(m.weights.isApprox(w, 1e-10));
  EXPECT_NEAR(m.bias, -w.dot(mu_l + mu_r) / 2, 1e-10);
}

TEST(Lda, SeparatedGaussians) {
  Rng rng(2026);
  Eigen::MatrixXd x(200, 2);
  const auto y = alternating(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    const double offset = y[i] == Label::Right ? 3.0 : 0.0;
    x(i, 0) = rng.normal() + offset;
    x(i, 1) = rng.normal() + offset;
  }
  const LdaModel m = fit_lda(x, y);
  const auto pred = m.predict_rows(x);
  EXPECT_GE(confusion(y, pred).accuracy(), 0.98);
}

TEST(Lda, DuplicatedPointsAndScaling) {
  Rng rng(8);
  Eigen::MatrixXd x(40, 3);
  const auto y = alternating(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = rng.normal() + (y[i] == Label::Right ? 1.0 : 0.0);
  }
  Eigen::MatrixXd x2(80, 3);
  x2 << x, x;
  std::vector<Label> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const LdaModel a = fit_lda(x, y), b = fit_lda(x2, y2);
  EXPECT_TRUE(a.weights.isApprox(b.weights, 1e-12));
  EXPECT_NEAR(a.bias, b.bias, 1e-12);

  const LdaModel c = fit_lda(4.0 * x, y);
  EXPECT_EQ(a.predict_rows(x), c.predict_rows(4.0 * x));
  EXPECT_THROW(fit_lda(x.topRows(1), std::vector<Label>{Label::Left}), ConfigError);
}

TEST(MutualInformation, Examples) {
  const auto y = alternating(200);
  std::vector<double> perfect(200), noise(200), constant(200, 3.0);
  Rng rng(12);
  for (std::size_t i = 0; i < 200; ++i) {
    perfect[i] = y[i] == Label::Right ? 1.0 : -1.0;
    noise[i] = rng.normal();
  }
  EXPECT_NEAR(mutual_information(perfect, y), 1.0, 0.05);
  EXPECT_LE(mutual_information(noise, y), 0.05);
  EXPECT_EQ(mutual_information(constant, y), 0.0);
  EXPECT_NEAR(mutual_information(perfect, y), reference_mi(perfect, y), 1e-9);
  EXPECT_NEAR(mutual_information(noise, y), reference_mi(noise, y), 1e-9);

  std::vector<double> mixed(200);
  for (std::size_t i = 0; i < 200; ++i) mixed[i] = perfect[i] + 0.8 * rng.normal();
  EXPECT_NEAR(mutual_information(mixed, y), reference_mi(mixed, y), 1e-9);
  EXPECT_THROW(mutual_information(std::vector<double>{1.0, 2.0, 3.0},
                                  std::vector<Label>{Label::Left, Label::Right, Label::Right}),
               ConfigError);
}

TEST(Mibif, PerfectFeatureAndPartner) {
  const auto y = alternating(120);
  Rng rng(5);
  Eigen::MatrixXd x(120, 36);
  for (Eigen::Index i = 0; i < 120; ++i) {
    for (Eigen::Index k = 0; k < 36; ++k) x(i, k) = rng.normal();
    x(i, 9) = y[i] == Label::Right ? 1.0 : -1.0;
  }
  const MibifSelector sel = fit_mibif(x, y, 1, 2);
  EXPECT_EQ(sel.selected, (std::vector<std::size_t>{9, 10}));
  EXPECT_EQ(csp_partner(9, 2), 10u);
  EXPECT_EQ(csp_partner(8, 2), 11u);
  EXPECT_EQ(sel.apply(x).cols(), 2);
  EXPECT_EQ(sel.apply(x).col(0), x.col(9));

  // Strictly monotone transform of every column keeps the top feature.
  const Eigen::MatrixXd cubed = x.array().cube();
  EXPECT_EQ(fit_mibif(cubed, y, 1, 2).selected, sel.selected);
}

TEST(Mibif, PairCompletionBound) {
  const auto y = alternating(100);
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd x(100, 36);
    for (Eigen::Index i = 0; i < 100; ++i) {
      for (Eigen::Index k = 0; k < 36; ++k) {
        x(i, k) = rng.normal() + (y[i] == Label::Right ? 0.1 * (k % 5) : 0.0);
      }
    }
    const MibifSelector sel = fit_mibif(x, y, 4, 2);
    EXPECT_GE(sel.selected.size(), 4u);
    EXPECT_LE(sel.selected.size(), 8u);
    EXPECT_TRUE(std::is_sorted(sel.selected.begin(), sel.selected.end()));
    for (auto j : sel.selected) {
      EXPECT_TRUE(std::binary_search(sel.selected.begin(), sel.selected.end(), csp_partner(j, 2)));
    }
    for (Eigen::Index k = 0; k < 36; ++k) EXPECT_GE(sel.scores(k), 0.0);
  }
}

TEST(Mibif, TiesAndErrors) {
  const auto y = alternating(20);
  Eigen::MatrixXd x(20, 8);
  for (Eigen::Index i = 0; i < 20; ++i) x.row(i).setConstant(static_cast<double>(i % 3));
  const MibifSelector sel = fit_mibif(x, y, 2, 2);
  EXPECT_EQ(sel.selected, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_THROW(fit_mibif(x, y, 0, 2), ConfigError);
  EXPECT_THROW(fit_mibif(x, y, 9, 2), ConfigError);
}

TEST(Baselines, ZeroPerturbationStudy) {
  SynthSpec spec;
  spec.n_subjects = 4;
  spec.trials_per_class = 30;
  const StudyDataset study = synth_study(spec, 7);
  for (int test : {1, 4}) {
    const MethodOutcome csp = run_csp_baseline(study, test);
    EXPECT_GE(csp.kappa, 0.9) << test;
    EXPECT_EQ(csp.n_features, 4u);
    EXPECT_EQ(csp.confusion.total(), 60);
    std::vector<int> expected;
    for (int s = 1; s <= 4; ++s) {
      if (s != test) expected.push_back(s);
    }
    EXPECT_EQ(csp.training_subjects, expected);

    const MethodOutcome fb = run_fbcsp_baseline(study, test);
    EXPECT_GE(fb.kappa, 0.9) << test;
    EXPECT_GE(fb.n_features, 4u);
    EXPECT_LE(fb.n_features, 8u);
    EXPECT_EQ(fb.training_subjects, expected);
  }
}

TEST(Baselines, CacheMustHoldTheRightBank) {
  SynthSpec spec;
  spec.n_subjects = 3;
  spec.trials_per_class = 4;
  spec.trial_seconds = 0.5;
  const StudyDataset study = synth_study(spec, 1);
  const BandCovarianceCache fbcsp(study, build_fbcsp_bank());
  EXPECT_THROW(run_csp_baseline(fbcsp, 1), ConfigError);
  const BandCovarianceCache broad(study, build_broadband_bank());
  EXPECT_THROW(run_fbcsp_baseline(broad, 1), ConfigError);
  EXPECT_THROW(run_csp_baseline(study, 99), DataError);
}
