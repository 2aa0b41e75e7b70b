#pragma once

#include "mibci/types.hpp"

#include <span>
#include <vector>

namespace mibci {

// I(F; Y) in bits from Gaussian Parzen windows with Silverman's bandwidth
// h = (4 / 3n)^(1/5) * sigma over the whole column; H(Y|F) is averaged over the
// samples themselves. Clamped to >= 0. A zero-variance column gives 0.
// Throws ConfigError with fewer than 2 samples per class.
double mutual_information(std::span<const double> feature, std::span<const Label> labels);

// Mutual-information-based best individual feature selection.
struct MibifSelector {
  Eigen::VectorXd scores;              // bits per feature column
  std::vector<std::size_t> selected;   // ascending column indices
  std::size_t k{0};

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

// Partner of column j inside its band block of 2m features: the filter from the
// other end of the CSP spectrum.
inline std::size_t csp_partner(std::size_t j, int m) {
  const auto block = static_cast<std::size_t>(2 * m);
  return (j / block) * block + (block - 1 - j % block);
}

// Ranks columns by MI (ties: lower index first), keeps the top k, then adds each
// kept column's CSP partner. Throws ConfigError when k < 1 or k > columns.
MibifSelector fit_mibif(const Eigen::MatrixXd& features, std::span<const Label> labels,
                        std::size_t k, int m);

}  // namespace mibci
