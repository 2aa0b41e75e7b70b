#include "mibci/errors.hpp"
#include "mibci/metrics.hpp"
#include "mibci/rng.hpp"
#include "mibci/sae.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

using namespace mibci;

namespace {

template <class Fn>
void for_each_weight(SaeParams& p, Fn&& fn) {
  for (auto* stack : {&p.encoder, &p.decoder, &p.classifier}) {
    for (auto& layer : *stack) {
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) fn(layer.weights.data()[i]);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) fn(layer.bias.data()[i]);
    }
  }
}

std::vector<double> flatten(SaeParams p) {
  std::vector<double> v;
  for_each_weight(p, [&](double& w) { v.push_back(w); });
  return v;
}

struct Problem {
  Eigen::MatrixXd x;
  std::vector<Label> y;
};

Problem separable(int n, int d, double shift, std::uint64_t seed) {
  Rng rng(seed);
  Problem p{Eigen::MatrixXd(n, d), {}};
  for (int i = 0; i < n; ++i) {
    const Label l = i % 2 == 0 ? Label::Left : Label::Right;
    p.y.push_back(l);
    for (int k = 0; k < d; ++k) p.x(i, k) = rng.normal() + (l == Label::Right ? shift : -shift) * (k % 3 == 0);
  }
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Largest relative error between the analytic gradient and central differences
// of the loss, over every parameter. The denominator has a floor so that
// parameters with a vanishing gradient are compared absolutely.
double gradient_check(const SaeParams& params, const Problem& p, const TrainConfig& cfg, ParamScope scope) {
  const SaeParams analytic = gradients(params, p.x, p.y, cfg, scope);
  const auto a = flatten(analytic);
  SaeParams probe = params;
  std::vector<double*> slots;
  for_each_weight(probe, [&](double& w) { slots.push_back(&w); });
  // Frozen parameters (encoder/decoder under the classifier scope) are not
  // trainable there; their reported gradient is zero by contract.
  std::size_t first = 0;
  if (scope == ParamScope::Classifier) {
    SaeParams frozen = params;
    frozen.classifier.clear();
    first = flatten(frozen).size();
    for (std::size_t i = 0; i < first; ++i) {
      if (a[i] != 0.0) return 1.0;
    }
  }
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = first; i < slots.size(); ++i) {
    const double w0 = *slots[i];
    *slots[i] = w0 + h;
    const double up = composite_loss(probe, p.x, p.y, cfg, scope).total;
    *slots[i] = w0 - h;
    const double down = composite_loss(probe, p.x, p.y, cfg, scope).total;
    *slots[i] = w0;
    const double numeric = (up - down) / (2 * h);
    const double err = std::abs(a[i] - numeric) / std::max({std::abs(a[i]), std::abs(numeric), 1e-4});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

TEST(Network, StandardSettings) {
  const auto s = standard_settings();
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0], (NetworkLayout{{5, 3, 5}, {3, 3, 3, 1}}));
  EXPECT_EQ(s[2], (NetworkLayout{{20, 10, 20}, {10, 5, 5, 1}}));
  EXPECT_EQ(s[4], (NetworkLayout{{40, 20, 40}, {15, 10, 5, 1}}));
}

TEST(Network, ShapesAndParameterCount) {
  const NetworkConfig cfg = make_network_config(standard_settings()[2], 2664);
  const SaeParams p = init_params(cfg, 1);
  ASSERT_EQ(p.encoder.size(), 2u);
  EXPECT_EQ(p.encoder[0].weights.rows(), 20);
  EXPECT_EQ(p.encoder[0].weights.cols(), 2664);
  EXPECT_EQ(p.encoder[1].weights.rows(), 10);
  ASSERT_EQ(p.decoder.size(), 2u);
  EXPECT_EQ(p.decoder[0].weights.cols(), 10);
  EXPECT_EQ(p.decoder[1].weights.rows(), 2664);
  ASSERT_EQ(p.classifier.size(), 4u);
  EXPECT_EQ(p.classifier[0].weights.cols(), 10);
  EXPECT_EQ(p.classifier[3].weights.rows(), 1);
  // (2664*20+20) + (20*10+10) + (10*20+20) + (20*2664+2664) + (10*10+10) + (10*5+5) + (5*5+5) + (5+1)
  EXPECT_EQ(p.parameter_count(), 109875u);
  EXPECT_EQ(make_network_config(standard_settings()[4], 2664).code_dim(), 20);
}

TEST(Network, Validation) {
  EXPECT_THROW(make_network_config({{20, 10, 30}, {5, 1}}, 100), ConfigError);
  EXPECT_THROW(make_network_config({{20, 20}, {5, 1}}, 100), ConfigError);
  EXPECT_THROW(make_network_config({{20, 10, 20}, {5, 2}}, 100), ConfigError);
  EXPECT_THROW(make_network_config({{20, 10, 20}, {5, 1}}, 10), ConfigError);
  EXPECT_THROW(make_network_config({{20, 0, 20}, {5, 1}}, 100), ConfigError);
  EXPECT_NO_THROW(make_network_config({{20, 10, 20}, {5, 1}}, 11));
}

TEST(Init, GlorotAndDeterministic) {
  const NetworkConfig cfg = make_network_config({{8, 4, 8}, {3, 1}}, 12);
  const SaeParams a = init_params(cfg, 5), b = init_params(cfg, 5), c = init_params(cfg, 6);
  EXPECT_EQ(flatten(a), flatten(b));
  EXPECT_NE(flatten(a), flatten(c));
  for (const auto* stack : {&a.encoder, &a.decoder, &a.classifier}) {
    for (const auto& layer : *stack) {
      const double s = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
      EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), s);
      EXPECT_GT(layer.weights.cwiseAbs().maxCoeff(), 0.3 * s);
      EXPECT_TRUE(layer.bias.isZero(0.0));
    }
  }
}

TEST(Forward, ZeroWeightsAndRanges) {
  const NetworkConfig cfg = make_network_config({{6, 3, 6}, {2, 1}}, 8);
  const SaeParams zero = init_params(cfg, 1).zeros_like();
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(8, -2, 2);
  EXPECT_TRUE(encode(zero, x).isZero(0.0));
  EXPECT_EQ(encode(zero, x).size(), 3);
  EXPECT_TRUE(decode(zero, encode(zero, x)).isZero(0.0));
  EXPECT_EQ(decode(zero, encode(zero, x)).size(), 8);
  EXPECT_EQ(classify(zero, encode(zero, x)), 0.5);

  const SaeParams p = init_params(cfg, 2);
  const Eigen::VectorXd code = encode(p, 50.0 * x);
  EXPECT_LT(code.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(code, encode(p, 50.0 * x));
  const double prob = classify(p, code);
  EXPECT_GT(prob, 0.0);
  EXPECT_LT(prob, 1.0);
  EXPECT_THROW(encode(p, Eigen::VectorXd::Zero(5)), ConfigError);
}

TEST(Loss, TrivialValues) {
  const NetworkConfig cfg = make_network_config({{1}, {1}}, 2);
  SaeParams p = init_params(cfg, 1).zeros_like();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  const std::vector<Label> y{Label::Left, Label::Right, Label::Left};
  TrainConfig t;
  t.l1 = t.l2 = 0;
  t.alpha = 0;
  EXPECT_EQ(composite_loss(p, x, y, t).total, 0.0);  // zero input is reconstructed exactly
  t.alpha = 1;
  t.beta = 0;
  EXPECT_NEAR(composite_loss(p, x, y, t).total, std::log(2.0), 1e-15);
  EXPECT_THROW(composite_loss(p, Eigen::MatrixXd(0, 2), {}, t), ConfigError);
}

TEST(Loss, HandComputedSingleSample) {
  // 2 inputs -> code of width 1 -> 2 outputs; classifier 1 -> 1.
  const NetworkConfig cfg = make_network_config({{1}, {1}}, 2);
  SaeParams p = init_params(cfg, 1);
  p.encoder[0].weights << 0.3, -0.2;
  p.encoder[0].bias << 0.05;
  p.decoder[0].weights << 0.7, -0.4;
  p.decoder[0].bias << 0.1, 0.0;
  p.classifier[0].weights << 1.5;
  p.classifier[0].bias << -0.25;
  Eigen::MatrixXd x(1, 2);
  x << 0.8, -1.1;
  const std::vector<Label> y{Label::Right};
  TrainConfig t;
  t.alpha = 0.7;
  t.beta = 1.3;
  t.l1 = 0.01;
  t.l2 = 0.02;

  const double c = std::tanh(0.3 * 0.8 + (-0.2) * (-1.1) + 0.05);
  const double r0 = 0.7 * c + 0.1 - 0.8, r1 = -0.4 * c - (-1.1);
  const double prob = 1.0 / (1.0 + std::exp(-(1.5 * c - 0.25)));
  const double bce = -std::log(prob);
  const double mse = (r0 * r0 + r1 * r1) / 2.0;
  const double abs_sum = 0.3 + 0.2 + 0.7 + 0.4 + 1.5;
  const double sq_sum = 0.09 + 0.04 + 0.49 + 0.16 + 2.25;
  const double expected = 0.7 * bce + 1.3 * mse + 0.01 * abs_sum + 0.02 * sq_sum;

  const LossBreakdown q = composite_loss(p, x, y, t);
  EXPECT_NEAR(q.total, expected, 1e-12);
  EXPECT_NEAR(q.classification, bce, 1e-12);
  EXPECT_NEAR(q.reconstruction, mse, 1e-12);
  EXPECT_NEAR(q.regularization, 0.01 * abs_sum + 0.02 * sq_sum, 1e-12);

  // Classifier scope: alpha term plus classifier regularization only.
  const LossBreakdown qc = composite_loss(p, x, y, t, ParamScope::Classifier);
  EXPECT_NEAR(qc.total, 0.7 * bce + 0.01 * 1.5 + 0.02 * 2.25, 1e-12);
}

TEST(Gradients, FiniteDifferencesOnRandomConfigurations) {
  Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 4 + static_cast<int>(rng.index(8));
    const int h1 = 2 + static_cast<int>(rng.index(4));
    const int code = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::min(h1, d - 1))));
    std::vector<int> ae = trial % 3 == 0 ? std::vector<int>{code} : std::vector<int>{h1, code, h1};
    std::vector<int> clf;
    for (std::size_t k = rng.index(3); k > 0; --k) clf.push_back(1 + static_cast<int>(rng.index(4)));
    clf.push_back(1);
    const NetworkConfig cfg = make_network_config({ae, clf}, d);
    SaeParams params = init_params(cfg, 1000 + trial);
    for_each_weight(params, [&](double& w) { w += 0.1 * rng.normal(); });  // nonzero biases too
    const Problem p = separable(3 + static_cast<int>(rng.index(6)), d, 0.5, 50 + trial);
    TrainConfig t;
    t.alpha = 0.2 + rng.uniform();
    t.beta = 0.2 + rng.uniform();
    t.l1 = 0.05 * rng.uniform();
    t.l2 = 0.05 * rng.uniform();
    const double all = gradient_check(params, p, t, ParamScope::All);
    const double clf_only = gradient_check(params, p, t, ParamScope::Classifier);
    EXPECT_LT(all, 1e-6) << "trial " << trial << " full scope";
    EXPECT_LT(clf_only, 1e-6) << "trial " << trial << " classifier scope";
    worst = std::max({worst, all, clf_only});
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Gradients, ScopeAndDecoupling) {
  const NetworkConfig cfg = make_network_config({{5, 2, 5}, {3, 1}}, 7);
  const SaeParams params = init_params(cfg, 3);
  const Problem p = separable(10, 7, 1.0, 4);
  TrainConfig t;
  const SaeParams g = gradients(params, p.x, p.y, t, ParamScope::Classifier);
  for (const auto* stack : {&g.encoder, &g.decoder}) {
    for (const auto& layer : *stack) {
      EXPECT_TRUE(layer.weights.isZero(0.0));
      EXPECT_TRUE(layer.bias.isZero(0.0));
    }
  }
  // alpha = 0: classifier gradients are the regularization gradients exactly.
  t.alpha = 0.0;
  const SaeParams g0 = gradients(params, p.x, p.y, t, ParamScope::All);
  for (std::size_t i = 0; i < params.classifier.size(); ++i) {
    const Eigen::MatrixXd& w = params.classifier[i].weights;
    const Eigen::MatrixXd reg = t.l1 * w.cwiseSign() + 2.0 * t.l2 * w;
    EXPECT_EQ(g0.classifier[i].weights, reg);
    EXPECT_TRUE(g0.classifier[i].bias.isZero(0.0));
  }
}

TEST(Gradients, L1SubgradientAtZero) {
  const NetworkConfig cfg = make_network_config({{1}, {1}}, 2);
  SaeParams p = init_params(cfg, 1).zeros_like();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
  const std::vector<Label> y{Label::Left, Label::Right};
  TrainConfig t;
  t.l2 = 0.0;
  const SaeParams g = gradients(p, x, y, t);
  // Zero weights, zero input, balanced labels: every term vanishes.
  for (double v : flatten(g)) EXPECT_EQ(v, 0.0);
}

TEST(Standardizer, PopulationStd) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 5, 2, 3, 5, 2, 5, 5, 2, 7, 5, 6;
  const StandardizerStats s = fit_standardizer(x);
  EXPECT_DOUBLE_EQ(s.mean(0), 4.0);
  EXPECT_DOUBLE_EQ(s.stddev(0), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(s.stddev(1), 1.0);
  EXPECT_NEAR(s.apply(x).col(0).mean(), 0.0, 1e-15);
  EXPECT_TRUE(s.apply(x).col(1).isZero(0.0));
}

namespace {

TrainConfig quick_config(std::uint64_t seed) {
  TrainConfig t;
  t.seed = seed;
  return t;
}

}  // namespace

TEST(Training, ScheduleFreezeAndLearning) {
  const Problem p = separable(200, 12, 1.0, 7);
  const NetworkConfig net = make_network_config({{8, 4, 8}, {4, 1}}, 12);
  SaeParams at_phase1;
  int phases_seen = 0;
  const TrainResult r = train(p.x, p.y, net, quick_config(3), [&](int phase, const SaeParams& params) {
    ++phases_seen;
    if (phase == 1) at_phase1 = params;
  });
  EXPECT_EQ(phases_seen, 2);
  ASSERT_EQ(r.log.size(), 200u);
  for (int e = 0; e < 200; ++e) {
    EXPECT_EQ(r.log[e].epoch, e + 1);
    EXPECT_EQ(r.log[e].phase, e < 50 ? 1 : 2);
  }
  for (std::size_t i = 0; i < r.params.encoder.size(); ++i) {
    EXPECT_EQ(r.params.encoder[i].weights, at_phase1.encoder[i].weights);
    EXPECT_EQ(r.params.encoder[i].bias, at_phase1.encoder[i].bias);
    EXPECT_EQ(r.params.decoder[i].weights, at_phase1.decoder[i].weights);
    EXPECT_EQ(r.params.decoder[i].bias, at_phase1.decoder[i].bias);
  }
  EXPECT_NE(r.params.classifier[0].weights, at_phase1.classifier[0].weights);

  double head = 0, tail = 0;
  for (int e = 0; e < 20; ++e) {
    head += r.log[e].q;
    tail += r.log[180 + e].q;
  }
  EXPECT_LT(tail, head);
  EXPECT_LT(r.log[49].q_r, r.log[0].q_r);

  const auto pred = predict_rows(r.params, r.stats, p.x);
  EXPECT_GE(confusion(p.y, pred).accuracy(), 0.9);
  const Problem test = separable(200, 12, 1.0, 8);
  EXPECT_GE(confusion(test.y, predict_rows(r.params, r.stats, test.x)).accuracy(), 0.9);
}

TEST(Training, DeterministicCheckpoints) {
  const Problem p = separable(64, 10, 0.8, 11);
  const NetworkConfig net = make_network_config({{6, 3, 6}, {3, 1}}, 10);
  const auto dir = std::filesystem::temp_directory_path();
  const TrainResult a = train(p.x, p.y, net, quick_config(21));
  const TrainResult b = train(p.x, p.y, net, quick_config(21));
  save_checkpoint(dir / "mibci_sae_a.bin", a.params, a.stats);
  save_checkpoint(dir / "mibci_sae_b.bin", b.params, b.stats);
  EXPECT_EQ(slurp(dir / "mibci_sae_a.bin"), slurp(dir / "mibci_sae_b.bin"));
  const TrainResult c = train(p.x, p.y, net, quick_config(22));
  EXPECT_NE(flatten(a.params), flatten(c.params));

  const auto [params, stats] = load_checkpoint(dir / "mibci_sae_a.bin");
  EXPECT_EQ(flatten(params), flatten(a.params));
  EXPECT_EQ(params.config, a.params.config);
  EXPECT_EQ(stats.mean, a.stats.mean);
  EXPECT_EQ(stats.stddev, a.stats.stddev);

  write_training_log(dir / "mibci_sae_log.csv", a.log);
  std::ifstream in(dir / "mibci_sae_log.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epoch,phase,Q,Q_c,Q_r,reg");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 200);
}

TEST(Training, Errors) {
  const Problem p = separable(10, 6, 1.0, 1);
  const NetworkConfig net = make_network_config({{3}, {1}}, 6);
  const std::vector<Label> one_class(10, Label::Left);
  EXPECT_THROW(train(p.x, one_class, net, quick_config(1)), ConfigError);
  TrainConfig bad = quick_config(1);
  bad.alpha = bad.beta = 0.0;
  EXPECT_THROW(validate_train_config(bad), ConfigError);
  bad = quick_config(1);
  bad.lr = 0.0;
  EXPECT_THROW(validate_train_config(bad), ConfigError);
  bad = quick_config(1);
  bad.batch = 0;
  EXPECT_THROW(validate_train_config(bad), ConfigError);
}

TEST(Predict, ThresholdConvention) {
  const NetworkConfig net = make_network_config({{3}, {1}}, 6);
  const SaeParams zero = init_params(net, 1).zeros_like();
  const StandardizerStats stats{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6)};
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 6);
  EXPECT_EQ(predict_probability(zero, stats, x.row(0).transpose()), 0.5);
  for (auto l : predict_rows(zero, stats, x)) EXPECT_EQ(l, Label::Right);
}
