#include "mibci/metrics.hpp"

#include "mibci/errors.hpp"

namespace mibci {

double ConfusionMatrix::accuracy() const {
  return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
}

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw ConfigError("confusion: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t_left = truth[i] == Label::Left;
    const bool p_left = predicted[i] == Label::Left;
    if (t_left && p_left) ++cm.tp;
    else if (!t_left && p_left) ++cm.fp;
    else if (t_left) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double kappa(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0) throw ConfigError("kappa: negative counts");
  const double n = static_cast<double>(cm.total());
  if (n <= 0.0) throw ConfigError("kappa: empty confusion matrix");
  const double p_o = static_cast<double>(cm.tp + cm.tn) / n;
  const double pred_left = static_cast<double>(cm.tp + cm.fp);
  const double pred_right = static_cast<double>(cm.fn + cm.tn);
  const double true_left = static_cast<double>(cm.tp + cm.fn);
  const double true_right = static_cast<double>(cm.fp + cm.tn);
  const double p_e = (pred_left * true_left + pred_right * true_right) / (n * n);
  if (p_e >= 1.0) return 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace mibci
