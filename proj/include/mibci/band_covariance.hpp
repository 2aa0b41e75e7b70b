#pragma once

#include "mibci/csp.hpp"
#include "mibci/filter_bank.hpp"
#include "mibci/types.hpp"

#include <span>
#include <vector>

namespace mibci {

// Position of one trial inside a StudyDataset (subject is the vector position,
// not the subject id).
struct TrialKey {
  std::size_t subject{0};
  Session session{Session::Train};
  std::size_t index{0};
};

// Band-filtered raw covariances X_b X_b^T / T for every trial of a study and every
// band of a bank. CSP fitting and feature extraction only need these, so each
// trial is filtered once per band no matter how many folds reuse it.
// Storage is the packed upper triangle: n_trials * K * C(C+1)/2 doubles.
class BandCovarianceCache {
 public:
  BandCovarianceCache(const StudyDataset& study, FilterBankSpec bank, int jobs = 1);

  const FilterBankSpec& bank() const { return bank_; }
  Eigen::Index n_channels() const { return channels_; }
  const StudyDataset& study() const { return *study_; }

  Eigen::MatrixXd raw_covariance(const TrialKey& key, std::size_t band) const;
  const Trial& trial(const TrialKey& key) const;

  std::vector<TrialKey> session_keys(std::size_t subject, Session session) const;

 private:
  std::size_t slot(const TrialKey& key) const;

  const StudyDataset* study_;
  FilterBankSpec bank_;
  Eigen::Index channels_{0};
  std::size_t packed_{0};
  std::vector<std::size_t> offsets_;  // first slot of each (subject, session)
  std::vector<double> data_;
};

// One CSP model per band, fit on the given trials.
std::vector<CspModel> fit_band_models(const BandCovarianceCache& cache,
                                      std::span<const TrialKey> training, int m);

// Rows are trials, columns the fused 2mK features in bank order.
Eigen::MatrixXd fused_feature_matrix(const BandCovarianceCache& cache,
                                     std::span<const CspModel> models,
                                     std::span<const TrialKey> keys);

std::vector<Label> labels_of(const BandCovarianceCache& cache, std::span<const TrialKey> keys);

}  // namespace mibci
