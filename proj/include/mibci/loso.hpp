#pragma once

#include "mibci/band_covariance.hpp"
#include "mibci/sae.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mibci {

// One cross-validation fold inside the subjects left after removing the test
// subject: train on all but one of them, score that one's train session.
struct FoldResult {
  int test_subject{0};
  int validation_subject{0};
  std::vector<int> training_subjects;   // ids actually pooled for training
  std::vector<double> setting_kappa;    // one per setting
};

struct LosoResult {
  int test_subject{0};
  std::vector<FoldResult> folds;        // ascending validation subject id
  Eigen::MatrixXd kappa;                // settings x folds
  std::vector<double> setting_mean;     // mean over folds, per setting
  double mean_across_settings{0.0};
  double std_across_settings{0.0};      // sample std of setting_mean
  std::size_t best_setting{0};          // 0-based; highest mean, lowest index on ties
};

// Seed of the SAE trained for (test, validation, setting), derived from cfg.seed.
std::uint64_t fold_seed(std::uint64_t seed, int test_subject, int validation_subject,
                        std::size_t setting);

// Runs every setting on one fold; the per-band CSP models are fit once per fold.
FoldResult run_fold(const BandCovarianceCache& cache, int test_subject, int validation_subject,
                    std::span<const NetworkLayout> settings, const TrainConfig& train_cfg);

// Orders and summarizes the folds of one test subject.
LosoResult assemble_loso(int test_subject, std::vector<FoldResult> folds, std::size_t n_settings);

struct LosoOptions {
  int jobs{1};
  // Returns a stored fold to skip recomputation (resume), or nullopt.
  std::function<std::optional<FoldResult>(int test, int validation)> lookup;
  // Called once per newly computed fold, possibly from worker threads.
  std::function<void(const FoldResult&)> on_fold;
};

// Validation subjects of a LOSO run for test_subject (every other subject, ascending).
std::vector<int> validation_subjects(const StudyDataset& study, int test_subject);

// Leave-one-subject-out cross-validation for one test subject. Requires at least
// 3 subjects; throws ConfigError otherwise. The test subject's trials never enter
// a fold.
LosoResult loso_cv(const BandCovarianceCache& cache, int test_subject,
                   std::span<const NetworkLayout> settings, const TrainConfig& train_cfg,
                   const LosoOptions& options = {});

// All folds of several test subjects as one job list.
std::vector<LosoResult> loso_cv_many(const BandCovarianceCache& cache, std::span<const int> test_subjects,
                                     std::span<const NetworkLayout> settings,
                                     const TrainConfig& train_cfg, const LosoOptions& options = {});

}  // namespace mibci
