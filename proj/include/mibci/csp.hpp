#pragma once

#include "mibci/filter_bank.hpp"
#include "mibci/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace mibci {

// Fitted common spatial patterns for one band.
//
// filters holds 2m rows: the first m maximize class-1 (left) variance relative to
// the composite, the last m maximize class-2 (right) variance. eigenvalues are the
// matching generalized eigenvalues, sorted descending.
struct CspModel {
  Eigen::MatrixXd filters;
  Eigen::VectorXd eigenvalues;
  int m{0};
  BandSpec band{};
};

// Ridge added to the composite covariance, relative to its trace.
inline constexpr double kCspRidge = 1e-9;

// X X^T / trace(X X^T). Throws NumericalError for an all-zero trial.
Eigen::MatrixXd spatial_covariance(const Trial& trial);
Eigen::MatrixXd normalize_trace(const Eigen::MatrixXd& raw_covariance);

// Solves C1 w = lambda (C1 + C2) w by whitening the ridge-regularized composite,
// keeping the m largest and m smallest eigenvalues. Inputs are the class-mean
// trace-normalized covariances. Filter signs follow first-nonzero-positive.
CspModel fit_csp_from_means(const Eigen::MatrixXd& mean_left, const Eigen::MatrixXd& mean_right,
                            int m);

// Trials are used as given (filter them first). Throws ConfigError if 2m > C or
// a class is empty.
CspModel fit_csp(std::span<const Trial> left, std::span<const Trial> right, int m);

// f_j = log(var(z_j) / sum_k var(z_k)) with z = W X and var the mean square.
// Throws NumericalError when a projected channel has zero variance.
Eigen::VectorXd csp_features(const CspModel& model, const Trial& trial);

// Same features from the raw covariance X X^T / T of the filtered trial.
Eigen::VectorXd csp_features_from_covariance(const CspModel& model,
                                             const Eigen::MatrixXd& raw_covariance);

// Filters the trial with every band of the bank and concatenates the per-band
// features in bank order; length 2mK.
Eigen::VectorXd extract_fused_features(const FilterBankSpec& bank, std::span<const CspModel> models,
                                       const Trial& trial);

// Versioned binary dump: "CSP1" | u32 version | u32 m | u32 C | i32 low | i32 high |
// f64 eigenvalues[2m] | f64 filters[2m x C] row-major.
void write_csp_model(std::ostream& out, const CspModel& model);
CspModel read_csp_model(std::istream& in);
void save_csp_models(const std::filesystem::path& path, std::span<const CspModel> models);
std::vector<CspModel> load_csp_models(const std::filesystem::path& path);

}  // namespace mibci
