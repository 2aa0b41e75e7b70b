#include "mibci/sae.hpp"

#include "mibci/errors.hpp"
#include "mibci/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace mibci {

std::vector<NetworkLayout> standard_settings() {
  return {
      {{5, 3, 5}, {3, 3, 3, 1}},
      {{10, 5, 10}, {5, 5, 5, 1}},
      {{20, 10, 20}, {10, 5, 5, 1}},
      {{30, 15, 30}, {15, 10, 5, 1}},
      {{40, 20, 40}, {15, 10, 5, 1}},
  };
}

void validate_network(const NetworkConfig& config) {
  const auto& ae = config.ae_nodes;
  if (config.input_dim < 1) throw ConfigError("network input_dim must be >= 1");
  if (ae.empty() || ae.size() % 2 == 0) throw ConfigError("ae_nodes must have odd length");
  if (!std::equal(ae.begin(), ae.end(), ae.rbegin())) throw ConfigError("ae_nodes must be palindromic");
  if (config.clf_nodes.empty() || config.clf_nodes.back() != 1) {
    throw ConfigError("clf_nodes must end in 1");
  }
  for (int w : ae) if (w < 1) throw ConfigError("layer widths must be >= 1");
  for (int w : config.clf_nodes) if (w < 1) throw ConfigError("layer widths must be >= 1");
  if (config.code_dim() >= config.input_dim) {
    throw ConfigError("code width " + std::to_string(config.code_dim()) +
                      " must be smaller than input width " + std::to_string(config.input_dim));
  }
}

NetworkConfig make_network_config(const NetworkLayout& layout, int input_dim) {
  NetworkConfig c{input_dim, layout.ae_nodes, layout.clf_nodes};
  validate_network(c);
  return c;
}

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !(cfg.beta >= 0.0) || (cfg.alpha == 0.0 && cfg.beta == 0.0)) {
    throw ConfigError("alpha and beta must be >= 0 and not both 0");
  }
  if (!(cfg.l1 >= 0.0) || !(cfg.l2 >= 0.0)) throw ConfigError("l1 and l2 must be >= 0");
  if (!(cfg.lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (cfg.batch < 1) throw ConfigError("batch must be >= 1");
  if (cfg.joint_epochs < 0 || cfg.clf_epochs < 0) throw ConfigError("epoch counts must be >= 0");
}

namespace {

std::vector<int> encoder_widths(const NetworkConfig& c) {
  std::vector<int> w{c.input_dim};
  w.insert(w.end(), c.ae_nodes.begin(), c.ae_nodes.begin() + static_cast<long>(c.ae_nodes.size() / 2 + 1));
  return w;
}

std::vector<int> decoder_widths(const NetworkConfig& c) {
  std::vector<int> w(c.ae_nodes.begin() + static_cast<long>(c.ae_nodes.size() / 2), c.ae_nodes.end());
  w.push_back(c.input_dim);
  return w;
}

std::vector<int> classifier_widths(const NetworkConfig& c) {
  std::vector<int> w{c.code_dim()};
  w.insert(w.end(), c.clf_nodes.begin(), c.clf_nodes.end());
  return w;
}

std::vector<DenseLayer> make_stack(const std::vector<int>& widths, Rng* rng) {
  std::vector<DenseLayer> stack;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer layer;
    const int in = widths[i], out = widths[i + 1];
    layer.weights.resize(out, in);
    layer.bias = Eigen::VectorXd::Zero(out);
    if (rng) {
      const double s = std::sqrt(6.0 / static_cast<double>(in + out));
      for (Eigen::Index r = 0; r < out; ++r) {
        for (Eigen::Index k = 0; k < in; ++k) layer.weights(r, k) = rng->uniform(-s, s);
      }
    } else {
      layer.weights.setZero();
    }
    stack.push_back(std::move(layer));
  }
  return stack;
}

void sigmoid_inplace(Eigen::MatrixXd& z) {
  z = z.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

// Activations a[0] = input, a[l + 1] = f(W_l a[l] + b_l).
enum class Output { Tanh, Linear, Sigmoid };

void forward_stack(const std::vector<DenseLayer>& stack, const Eigen::MatrixXd& input, Output last,
                   std::vector<Eigen::MatrixXd>& a) {
  a.resize(stack.size() + 1);
  a[0] = input;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    Eigen::MatrixXd z = stack[l].weights * a[l];
    z.colwise() += stack[l].bias;
    const bool is_last = l + 1 == stack.size();
    if (!is_last || last == Output::Tanh) {
      z = z.array().tanh();
    } else if (last == Output::Sigmoid) {
      sigmoid_inplace(z);
    }
    a[l + 1] = std::move(z);
  }
}

// Backpropagates dZ of the last layer through the stack; returns dL/d(input).
// The last layer's activation derivative is already folded into dz_last.
Eigen::MatrixXd backward_stack(const std::vector<DenseLayer>& stack,
                               const std::vector<Eigen::MatrixXd>& a, Eigen::MatrixXd dz,
                               std::vector<DenseLayer>& grad, bool need_input_grad) {
  for (std::size_t l = stack.size(); l-- > 0;) {
    grad[l].weights.noalias() += dz * a[l].transpose();
    grad[l].bias += dz.rowwise().sum();
    if (l == 0 && !need_input_grad) return {};
    Eigen::MatrixXd da = stack[l].weights.transpose() * dz;
    if (l == 0) return da;
    dz = (da.array() * (1.0 - a[l].array().square())).matrix();
  }
  return {};
}

double stack_reg(const std::vector<DenseLayer>& stack, double l1, double l2) {
  double r = 0.0;
  for (const auto& layer : stack) {
    r += l1 * layer.weights.cwiseAbs().sum() + l2 * layer.weights.squaredNorm();
  }
  return r;
}

void add_reg_grad(const std::vector<DenseLayer>& stack, double l1, double l2,
                  std::vector<DenseLayer>& grad) {
  for (std::size_t l = 0; l < stack.size(); ++l) {
    const auto& w = stack[l].weights;
    grad[l].weights += l1 * w.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }) +
                       2.0 * l2 * w;
  }
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double bce_sum(const Eigen::RowVectorXd& p, const Eigen::RowVectorXd& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pc = clamp_probability(p(i));
    s -= y(i) * std::log(pc) + (1.0 - y(i)) * std::log(1.0 - pc);
  }
  return s;
}

Eigen::RowVectorXd bce_logit_grad(const Eigen::RowVectorXd& p, const Eigen::RowVectorXd& y,
                                  double scale) {
  Eigen::RowVectorXd g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const bool clamped = p(i) < kProbabilityClamp || p(i) > 1.0 - kProbabilityClamp;
    g(i) = clamped ? 0.0 : scale * (p(i) - y(i));
  }
  return g;
}

Eigen::RowVectorXd targets(std::span<const Label> labels) {
  Eigen::RowVectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = label_value(labels[i]);
  return y;
}

struct Workspace {
  std::vector<Eigen::MatrixXd> enc, dec, clf;
};

// Column-major batch (features x samples) core shared by the public API and train().
LossBreakdown loss_cols(const SaeParams& p, const Eigen::MatrixXd& xc, const Eigen::RowVectorXd& y,
                        const TrainConfig& cfg, ParamScope scope, Workspace& ws,
                        SaeParams* grad) {
  const auto n = static_cast<double>(xc.cols());
  const auto d = static_cast<double>(xc.rows());
  forward_stack(p.encoder, xc, Output::Tanh, ws.enc);
  const Eigen::MatrixXd& code = ws.enc.back();
  forward_stack(p.classifier, code, Output::Sigmoid, ws.clf);
  const Eigen::RowVectorXd prob = ws.clf.back().row(0);

  LossBreakdown loss;
  loss.classification = bce_sum(prob, y) / n;
  if (scope == ParamScope::All) {
    forward_stack(p.decoder, code, Output::Linear, ws.dec);
    loss.reconstruction = (ws.dec.back() - xc).squaredNorm() / (d * n);
    loss.regularization = stack_reg(p.encoder, cfg.l1, cfg.l2) + stack_reg(p.decoder, cfg.l1, cfg.l2) +
                          stack_reg(p.classifier, cfg.l1, cfg.l2);
    loss.total = cfg.alpha * loss.classification + cfg.beta * loss.reconstruction + loss.regularization;
  } else {
    loss.regularization = stack_reg(p.classifier, cfg.l1, cfg.l2);
    loss.total = cfg.alpha * loss.classification + loss.regularization;
  }
  if (!grad) return loss;

  const Eigen::MatrixXd dz_clf = bce_logit_grad(prob, y, cfg.alpha / n);
  const bool all = scope == ParamScope::All;
  Eigen::MatrixXd dcode = backward_stack(p.classifier, ws.clf, dz_clf, grad->classifier, all);
  add_reg_grad(p.classifier, cfg.l1, cfg.l2, grad->classifier);
  if (!all) return loss;

  const Eigen::MatrixXd dz_dec = (cfg.beta * 2.0 / (d * n)) * (ws.dec.back() - xc);
  dcode += backward_stack(p.decoder, ws.dec, dz_dec, grad->decoder, true);
  add_reg_grad(p.decoder, cfg.l1, cfg.l2, grad->decoder);

  const Eigen::MatrixXd dz_code = (dcode.array() * (1.0 - code.array().square())).matrix();
  backward_stack(p.encoder, ws.enc, dz_code, grad->encoder, false);
  add_reg_grad(p.encoder, cfg.l1, cfg.l2, grad->encoder);
  return loss;
}

void check_batch(const SaeParams& p, const Eigen::MatrixXd& x, std::span<const Label> labels) {
  if (x.rows() == 0) throw ConfigError("empty batch");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ConfigError("batch label count mismatch");
  if (x.cols() != p.config.input_dim) throw ConfigError("input dimension mismatch");
}

void sgd_step(std::vector<DenseLayer>& params, const std::vector<DenseLayer>& grad, double lr) {
  for (std::size_t l = 0; l < params.size(); ++l) {
    params[l].weights -= lr * grad[l].weights;
    params[l].bias -= lr * grad[l].bias;
  }
}

void zero(std::vector<DenseLayer>& stack) {
  for (auto& l : stack) {
    l.weights.setZero();
    l.bias.setZero();
  }
}

}  // namespace

std::size_t SaeParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* stack : {&encoder, &decoder, &classifier}) {
    for (const auto& l : *stack) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  }
  return n;
}

SaeParams SaeParams::zeros_like() const {
  SaeParams z{config, make_stack(encoder_widths(config), nullptr),
              make_stack(decoder_widths(config), nullptr), make_stack(classifier_widths(config), nullptr)};
  return z;
}

SaeParams init_params(const NetworkConfig& config, std::uint64_t seed) {
  validate_network(config);
  Rng rng(derive_seed(seed, 0x1417));
  SaeParams p;
  p.config = config;
  p.encoder = make_stack(encoder_widths(config), &rng);
  p.decoder = make_stack(decoder_widths(config), &rng);
  p.classifier = make_stack(classifier_widths(config), &rng);
  return p;
}

Eigen::VectorXd encode(const SaeParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.config.input_dim) throw ConfigError("input dimension mismatch");
  std::vector<Eigen::MatrixXd> a;
  forward_stack(params.encoder, x, Output::Tanh, a);
  return a.back().col(0);
}

Eigen::VectorXd decode(const SaeParams& params, const Eigen::VectorXd& code) {
  if (code.size() != params.config.code_dim()) throw ConfigError("code dimension mismatch");
  std::vector<Eigen::MatrixXd> a;
  forward_stack(params.decoder, code, Output::Linear, a);
  return a.back().col(0);
}

double classify(const SaeParams& params, const Eigen::VectorXd& code) {
  if (code.size() != params.config.code_dim()) throw ConfigError("code dimension mismatch");
  std::vector<Eigen::MatrixXd> a;
  forward_stack(params.classifier, code, Output::Sigmoid, a);
  return a.back()(0, 0);
}

LossBreakdown composite_loss(const SaeParams& params, const Eigen::MatrixXd& x,
                             std::span<const Label> labels, const TrainConfig& cfg, ParamScope scope) {
  check_batch(params, x, labels);
  Workspace ws;
  return loss_cols(params, x.transpose(), targets(labels), cfg, scope, ws, nullptr);
}

SaeParams gradients(const SaeParams& params, const Eigen::MatrixXd& x, std::span<const Label> labels,
                    const TrainConfig& cfg, ParamScope scope) {
  check_batch(params, x, labels);
  Workspace ws;
  SaeParams grad = params.zeros_like();
  loss_cols(params, x.transpose(), targets(labels), cfg, scope, ws, &grad);
  return grad;
}

Eigen::MatrixXd StandardizerStats::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) throw ConfigError("feature dimension does not match standardizer");
  return ((rows.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array()).matrix();
}

Eigen::VectorXd StandardizerStats::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) throw ConfigError("feature dimension does not match standardizer");
  return ((x - mean).array() / stddev.array()).matrix();
}

StandardizerStats fit_standardizer(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw ConfigError("cannot standardize an empty set");
  StandardizerStats s;
  s.mean = rows.colwise().mean().transpose();
  s.stddev = ((rows.rowwise() - s.mean.transpose()).colwise().squaredNorm() /
              static_cast<double>(rows.rows()))
                 .cwiseSqrt()
                 .transpose();
  for (Eigen::Index j = 0; j < s.stddev.size(); ++j) {
    if (!(s.stddev(j) > 0.0)) s.stddev(j) = 1.0;
  }
  return s;
}

TrainResult train(const Eigen::MatrixXd& features, std::span<const Label> labels,
                  const NetworkConfig& net, const TrainConfig& cfg, const TrainObserver& observer) {
  validate_network(net);
  validate_train_config(cfg);
  if (features.cols() != net.input_dim) throw ConfigError("feature dimension does not match network");
  if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.empty()) {
    throw ConfigError("training set is empty or label count mismatches");
  }
  const auto n_right = std::count(labels.begin(), labels.end(), Label::Right);
  if (n_right == 0 || n_right == static_cast<long>(labels.size())) {
    throw ConfigError("training set contains a single class");
  }

  TrainResult result;
  result.stats = fit_standardizer(features);
  const Eigen::MatrixXd xc = result.stats.apply(features).transpose();
  const Eigen::RowVectorXd y = targets(labels);
  const auto n = static_cast<std::size_t>(xc.cols());
  result.params = init_params(net, cfg.seed);
  SaeParams& p = result.params;

  Rng shuffle_rng(derive_seed(cfg.seed, 0x5f1e));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  SaeParams grad = p.zeros_like();
  Workspace ws;
  const auto batch = static_cast<std::size_t>(cfg.batch);

  auto gather = [&](const Eigen::MatrixXd& src, std::size_t start, std::size_t len,
                    Eigen::MatrixXd& xb, Eigen::RowVectorXd& yb) {
    xb.resize(src.rows(), static_cast<Eigen::Index>(len));
    yb.resize(static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i) {
      xb.col(static_cast<Eigen::Index>(i)) = src.col(order[start + i]);
      yb(static_cast<Eigen::Index>(i)) = y(order[start + i]);
    }
  };

  Eigen::MatrixXd xb;
  Eigen::RowVectorXd yb;
  for (int epoch = 1; epoch <= cfg.joint_epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double sum_c = 0.0, sum_r = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      gather(xc, start, len, xb, yb);
      zero(grad.encoder);
      zero(grad.decoder);
      zero(grad.classifier);
      const auto loss = loss_cols(p, xb, yb, cfg, ParamScope::All, ws, &grad);
      sum_c += loss.classification * static_cast<double>(len);
      sum_r += loss.reconstruction * static_cast<double>(len);
      sgd_step(p.encoder, grad.encoder, cfg.lr);
      sgd_step(p.decoder, grad.decoder, cfg.lr);
      sgd_step(p.classifier, grad.classifier, cfg.lr);
    }
    TrainLogEntry e{epoch, 1, 0.0, sum_c / static_cast<double>(n), sum_r / static_cast<double>(n),
                    stack_reg(p.encoder, cfg.l1, cfg.l2) + stack_reg(p.decoder, cfg.l1, cfg.l2) +
                        stack_reg(p.classifier, cfg.l1, cfg.l2)};
    e.q = cfg.alpha * e.q_c + cfg.beta * e.q_r + e.reg;
    result.log.push_back(e);
  }
  if (observer) observer(1, p);

  // Frozen autoencoder: codes, reconstruction error and its regularization are fixed.
  std::vector<Eigen::MatrixXd> enc, dec;
  forward_stack(p.encoder, xc, Output::Tanh, enc);
  const Eigen::MatrixXd codes = enc.back();
  forward_stack(p.decoder, codes, Output::Linear, dec);
  const double frozen_q_r = (dec.back() - xc).squaredNorm() / static_cast<double>(xc.size());
  const double frozen_reg = stack_reg(p.encoder, cfg.l1, cfg.l2) + stack_reg(p.decoder, cfg.l1, cfg.l2);
  enc.clear();
  dec.clear();

  std::vector<Eigen::MatrixXd> clf_acts;
  for (int epoch = 1; epoch <= cfg.clf_epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double sum_c = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      gather(codes, start, len, xb, yb);
      zero(grad.classifier);
      forward_stack(p.classifier, xb, Output::Sigmoid, clf_acts);
      const Eigen::RowVectorXd prob = clf_acts.back().row(0);
      sum_c += bce_sum(prob, yb);
      backward_stack(p.classifier, clf_acts, bce_logit_grad(prob, yb, cfg.alpha / static_cast<double>(len)),
                     grad.classifier, false);
      add_reg_grad(p.classifier, cfg.l1, cfg.l2, grad.classifier);
      sgd_step(p.classifier, grad.classifier, cfg.lr);
    }
    TrainLogEntry e{cfg.joint_epochs + epoch, 2, 0.0, sum_c / static_cast<double>(n), frozen_q_r,
                    frozen_reg + stack_reg(p.classifier, cfg.l1, cfg.l2)};
    e.q = cfg.alpha * e.q_c + cfg.beta * e.q_r + e.reg;
    result.log.push_back(e);
  }
  if (observer) observer(2, p);
  return result;
}

double predict_probability(const SaeParams& params, const StandardizerStats& stats,
                           const Eigen::VectorXd& raw_features) {
  return classify(params, encode(params, stats.apply(raw_features)));
}

Label predict(const SaeParams& params, const StandardizerStats& stats,
              const Eigen::VectorXd& raw_features) {
  return predict_probability(params, stats, raw_features) >= 0.5 ? Label::Right : Label::Left;
}

std::vector<Label> predict_rows(const SaeParams& params, const StandardizerStats& stats,
                                const Eigen::MatrixXd& raw_features) {
  const Eigen::MatrixXd xc = stats.apply(raw_features).transpose();
  std::vector<Eigen::MatrixXd> enc, clf;
  forward_stack(params.encoder, xc, Output::Tanh, enc);
  forward_stack(params.classifier, enc.back(), Output::Sigmoid, clf);
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(xc.cols()));
  for (Eigen::Index i = 0; i < xc.cols(); ++i) {
    out.push_back(clf.back()(0, i) >= 0.5 ? Label::Right : Label::Left);
  }
  return out;
}

namespace {

constexpr char kSaeMagic[4] = {'S', 'A', 'E', '1'};
constexpr std::uint32_t kSaeVersion = 1;

struct Writer {
  std::ofstream& out;
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  void ints(const std::vector<int>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (int x : v) u32(static_cast<std::uint32_t>(x));
  }
  void vec(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void mat(const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
};

struct Reader {
  std::ifstream& in;
  unsigned char byte() {
    const int ch = in.get();
    if (ch == std::char_traits<char>::eof()) throw DataError("truncated SAE checkpoint");
    return static_cast<unsigned char>(ch);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  double f64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::vector<int> ints() {
    std::vector<int> v(u32());
    for (auto& x : v) x = static_cast<int>(u32());
    return v;
  }
  void vec(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
  }
  void mat(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    }
  }
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const SaeParams& params,
                     const StandardizerStats& stats) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  Writer w{out};
  out.write(kSaeMagic, 4);
  w.u32(kSaeVersion);
  w.u32(static_cast<std::uint32_t>(params.config.input_dim));
  w.ints(params.config.ae_nodes);
  w.ints(params.config.clf_nodes);
  w.vec(stats.mean);
  w.vec(stats.stddev);
  for (const auto* stack : {&params.encoder, &params.decoder, &params.classifier}) {
    for (const auto& l : *stack) {
      w.mat(l.weights);
      w.vec(l.bias);
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

std::pair<SaeParams, StandardizerStats> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::char_traits<char>::compare(magic, kSaeMagic, 4) != 0) {
    throw DataError("not an SAE1 checkpoint");
  }
  Reader r{in};
  if (r.u32() != kSaeVersion) throw DataError("unsupported SAE checkpoint version");
  NetworkConfig config;
  config.input_dim = static_cast<int>(r.u32());
  config.ae_nodes = r.ints();
  config.clf_nodes = r.ints();
  try {
    validate_network(config);
  } catch (const ConfigError& e) {
    throw DataError(std::string("corrupt SAE checkpoint: ") + e.what());
  }
  StandardizerStats stats;
  stats.mean.resize(config.input_dim);
  stats.stddev.resize(config.input_dim);
  r.vec(stats.mean);
  r.vec(stats.stddev);
  SaeParams params = SaeParams{config, {}, {}, {}}.zeros_like();
  for (auto* stack : {&params.encoder, &params.decoder, &params.classifier}) {
    for (auto& l : *stack) {
      r.mat(l.weights);
      r.vec(l.bias);
    }
  }
  return {std::move(params), std::move(stats)};
}

void write_training_log(const std::filesystem::path& path, std::span<const TrainLogEntry> log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,phase,Q,Q_c,Q_r,reg\n";
  char line[256];
  for (const auto& e : log) {
    std::snprintf(line, sizeof(line), "%d,%d,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.phase, e.q, e.q_c,
                  e.q_r, e.reg);
    out << line;
  }
}

}  // namespace mibci
