#pragma once

#include "mibci/types.hpp"

#include <span>

namespace mibci {

// Two-class Fisher discriminant. decision(x) = w^T x + b is positive on the
// right-hand side of the boundary.
struct LdaModel {
  Eigen::VectorXd weights;
  double bias{0.0};

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  Label predict(const Eigen::VectorXd& x) const {
    return decision(x) >= 0.0 ? Label::Right : Label::Left;
  }
  std::vector<Label> predict_rows(const Eigen::MatrixXd& features) const;
};

inline constexpr double kLdaShrinkage = 1e-6;

// w = (S + gamma I)^-1 (mu_right - mu_left), S the pooled maximum-likelihood
// within-class covariance, gamma = 1e-6 * mean(diag S); the boundary sits at the
// midpoint of the projected class means. Rows of `features` are samples.
// Throws ConfigError when a class is missing.
LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const Label> labels);

}  // namespace mibci
