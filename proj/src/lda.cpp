#include "mibci/lda.hpp"

#include "mibci/errors.hpp"

namespace mibci {

std::vector<Label> LdaModel::predict_rows(const Eigen::MatrixXd& features) const {
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) out.push_back(predict(features.row(i).transpose()));
  return out;
}

LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const Label> labels) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw ConfigError("LDA: label count mismatch");
  if (d < 1) throw ConfigError("LDA: empty feature vectors");

  Eigen::VectorXd mean_left = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean_right = Eigen::VectorXd::Zero(d);
  double n_left = 0, n_right = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] == Label::Left) {
      mean_left += features.row(i).transpose();
      n_left += 1;
    } else {
      mean_right += features.row(i).transpose();
      n_right += 1;
    }
  }
  if (n_left == 0 || n_right == 0) throw ConfigError("LDA needs samples of both classes");
  mean_left /= n_left;
  mean_right /= n_right;

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& mu = labels[static_cast<std::size_t>(i)] == Label::Left ? mean_left : mean_right;
    const Eigen::VectorXd centered = features.row(i).transpose() - mu;
    scatter.noalias() += centered * centered.transpose();
  }
  scatter /= static_cast<double>(n);
  const double gamma = kLdaShrinkage * scatter.diagonal().mean();
  scatter.diagonal().array() += gamma;

  LdaModel model;
  model.weights = scatter.ldlt().solve(mean_right - mean_left);
  model.bias = -0.5 * model.weights.dot(mean_left + mean_right);
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw NumericalError("LDA produced non-finite weights");
  }
  return model;
}

}  // namespace mibci
