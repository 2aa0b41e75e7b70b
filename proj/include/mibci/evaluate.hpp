#pragma once

#include "mibci/band_covariance.hpp"
#include "mibci/baselines.hpp"
#include "mibci/sae.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string_view>

namespace mibci {

enum class MethodKind { Csp, Fbcsp, Sisae };

std::string_view method_name(MethodKind kind);
// "CSP", "FBCSP" or "SISAE" (any case); throws ConfigError for anything else.
MethodKind parse_method(std::string_view name);

struct MethodSpec {
  MethodKind kind{MethodKind::Csp};
  std::size_t fbcsp_k{kMibifK};
  NetworkLayout layout;  // SISAE only
  TrainConfig train;     // SISAE only
};

// Band covariances per bank, built on first use and shared by every job.
// The SISAE bank aliases the FBCSP or broadband cache when they coincide.
class FeatureCaches {
 public:
  FeatureCaches(const StudyDataset& study, FilterBankSpec sisae_bank, int jobs = 1);

  const StudyDataset& study() const { return *study_; }
  const BandCovarianceCache& broadband();
  const BandCovarianceCache& fbcsp();
  const BandCovarianceCache& sisae();

 private:
  struct Slot {
    std::once_flag once;
    std::unique_ptr<BandCovarianceCache> cache;
  };
  const BandCovarianceCache& get(Slot& slot, const FilterBankSpec& bank);

  const StudyDataset* study_;
  FilterBankSpec sisae_bank_;
  int jobs_;
  Slot broadband_, fbcsp_, sisae_;
};

// SISAE over a given bank: per-band CSP (m = 2) fit on the training keys, fused
// features, supervised autoencoder, prediction on the evaluation keys.
MethodOutcome run_sisae(const BandCovarianceCache& cache, std::span<const TrialKey> training,
                        std::span<const TrialKey> evaluation, const NetworkLayout& layout,
                        const TrainConfig& train);

// Trains on the pooled train sessions of every other subject and scores the
// held-out subject's test session.
MethodOutcome evaluate_method(FeatureCaches& caches, int test_subject, const MethodSpec& method);

}  // namespace mibci
