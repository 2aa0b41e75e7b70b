#pragma once

#include "mibci/types.hpp"

#include <span>

namespace mibci {

// Left is the positive class.
struct ConfusionMatrix {
  long tp{0};  // truth left, predicted left
  long fp{0};  // truth right, predicted left
  long fn{0};  // truth left, predicted right
  long tn{0};  // truth right, predicted right

  long total() const { return tp + fp + fn + tn; }
  double accuracy() const;
};

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted);

// Cohen's kappa, (p_o - p_e) / (1 - p_e). Defined as 0 when p_e == 1.
// Throws ConfigError for an empty matrix.
double kappa(const ConfusionMatrix& cm);

}  // namespace mibci
