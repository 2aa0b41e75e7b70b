#pragma once

#include "mibci/band_covariance.hpp"
#include "mibci/lda.hpp"
#include "mibci/metrics.hpp"
#include "mibci/mibif.hpp"

#include <vector>

namespace mibci {

inline constexpr int kCspPairs = 2;
inline constexpr std::size_t kMibifK = 4;

struct MethodOutcome {
  double kappa{0.0};
  ConfusionMatrix confusion;
  std::vector<int> training_subjects;  // ids whose train sessions were pooled
  std::size_t n_features{0};           // dimension seen by the classifier
};

// Train sessions of every subject except test_subject, and that subject's test session.
std::vector<TrialKey> pooled_training_keys(const BandCovarianceCache& cache, int test_subject);
std::vector<TrialKey> held_out_test_keys(const BandCovarianceCache& cache, int test_subject);
std::vector<int> subject_ids_of(const BandCovarianceCache& cache, std::span<const TrialKey> keys);

// Broadband [4,40] CSP (m = 2) + LDA. The cache must hold the broadband bank.
MethodOutcome run_csp_baseline(const BandCovarianceCache& broadband, int test_subject);
MethodOutcome run_csp_baseline(const StudyDataset& study, int test_subject);

// Nine-band FBCSP (m = 2 per band) + MIBIF(k) + LDA. The cache must hold the FBCSP bank.
MethodOutcome run_fbcsp_baseline(const BandCovarianceCache& fbcsp, int test_subject,
                                 std::size_t k = kMibifK);
MethodOutcome run_fbcsp_baseline(const StudyDataset& study, int test_subject,
                                 std::size_t k = kMibifK);

}  // namespace mibci
