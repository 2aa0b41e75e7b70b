#include "mibci/mibif.hpp"

#include "mibci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mibci {

double mutual_information(std::span<const double> feature, std::span<const Label> labels) {
  const std::size_t n = feature.size();
  if (labels.size() != n) throw ConfigError("mutual_information: label count mismatch");
  std::size_t n_right = 0;
  for (auto l : labels) n_right += l == Label::Right ? 1 : 0;
  const std::size_t n_left = n - n_right;
  if (n_left < 2 || n_right < 2) throw ConfigError("mutual_information needs >= 2 samples per class");

  const double mean = std::accumulate(feature.begin(), feature.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : feature) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0)) return 0.0;
  const double h = std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2) * sigma;

  const double p_left = static_cast<double>(n_left) / static_cast<double>(n);
  const double p_right = 1.0 - p_left;
  const double h_y = -(p_left * std::log2(p_left) + p_right * std::log2(p_right));

  // The kernel normalization and class priors cancel in P(w | f_j) once the class
  // densities are written as sums over class members divided by n.
  double h_y_given_f = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double dens_left = 0.0, dens_right = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (feature[j] - feature[i]) / h;
      const double k = std::exp(-0.5 * u * u);
      (labels[i] == Label::Left ? dens_left : dens_right) += k;
    }
    const double total = dens_left + dens_right;
    for (double dens : {dens_left, dens_right}) {
      const double p = dens / total;
      if (p > 0.0) h_y_given_f -= p * std::log2(p);
    }
  }
  h_y_given_f /= static_cast<double>(n);
  return std::max(0.0, h_y - h_y_given_f);
}

Eigen::MatrixXd MibifSelector::apply(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = features.col(static_cast<Eigen::Index>(selected[c]));
  }
  return out;
}

MibifSelector fit_mibif(const Eigen::MatrixXd& features, std::span<const Label> labels,
                        std::size_t k, int m) {
  const auto d = static_cast<std::size_t>(features.cols());
  if (k < 1) throw ConfigError("MIBIF: k must be >= 1");
  if (k > d) throw ConfigError("MIBIF: k=" + std::to_string(k) + " exceeds " + std::to_string(d) + " features");
  if (m < 1 || d % static_cast<std::size_t>(2 * m) != 0) {
    throw ConfigError("MIBIF: feature count is not a multiple of 2m");
  }

  MibifSelector sel;
  sel.k = k;
  sel.scores.resize(static_cast<Eigen::Index>(d));
  std::vector<double> column(static_cast<std::size_t>(features.rows()));
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = features.col(static_cast<Eigen::Index>(j));
    std::copy(col.begin(), col.end(), column.begin());
    sel.scores(static_cast<Eigen::Index>(j)) = mutual_information(column, labels);
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sel.scores(static_cast<Eigen::Index>(a)) > sel.scores(static_cast<Eigen::Index>(b));
  });
  std::set<std::size_t> chosen;
  for (std::size_t r = 0; r < k; ++r) {
    chosen.insert(order[r]);
    chosen.insert(csp_partner(order[r], m));
  }
  sel.selected.assign(chosen.begin(), chosen.end());
  return sel;
}

}  // namespace mibci
