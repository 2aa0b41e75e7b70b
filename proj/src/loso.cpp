#include "mibci/loso.hpp"

#include "mibci/baselines.hpp"
#include "mibci/errors.hpp"
#include "mibci/evaluate.hpp"
#include "mibci/parallel.hpp"
#include "mibci/rng.hpp"
#include "mibci/stats.hpp"

#include <algorithm>

namespace mibci {

std::uint64_t fold_seed(std::uint64_t seed, int test_subject, int validation_subject,
                        std::size_t setting) {
  const auto fold = static_cast<std::uint64_t>(test_subject) * 1000003ULL +
                    static_cast<std::uint64_t>(validation_subject);
  return derive_seed(seed, fold, setting);
}

std::vector<int> validation_subjects(const StudyDataset& study, int test_subject) {
  study.subject_index(test_subject);
  std::vector<int> ids;
  for (int id : study.subject_ids()) {
    if (id != test_subject) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

FoldResult run_fold(const BandCovarianceCache& cache, int test_subject, int validation_subject,
                    std::span<const NetworkLayout> settings, const TrainConfig& train_cfg) {
  const auto& study = cache.study();
  if (study.subjects.size() < 3) throw ConfigError("LOSO needs at least 3 subjects");
  if (validation_subject == test_subject) throw ConfigError("validation subject equals test subject");
  const std::size_t test_pos = study.subject_index(test_subject);
  const std::size_t val_pos = study.subject_index(validation_subject);

  std::vector<TrialKey> training;
  for (std::size_t s = 0; s < study.subjects.size(); ++s) {
    if (s == test_pos || s == val_pos) continue;
    const auto keys = cache.session_keys(s, Session::Train);
    training.insert(training.end(), keys.begin(), keys.end());
  }
  const auto validation = cache.session_keys(val_pos, Session::Train);

  const auto models = fit_band_models(cache, training, kCspPairs);
  const Eigen::MatrixXd x_train = fused_feature_matrix(cache, models, training);
  const Eigen::MatrixXd x_val = fused_feature_matrix(cache, models, validation);
  const auto y_train = labels_of(cache, training);
  const auto y_val = labels_of(cache, validation);

  FoldResult fold;
  fold.test_subject = test_subject;
  fold.validation_subject = validation_subject;
  fold.training_subjects = subject_ids_of(cache, training);
  for (std::size_t k = 0; k < settings.size(); ++k) {
    TrainConfig cfg = train_cfg;
    cfg.seed = fold_seed(train_cfg.seed, test_subject, validation_subject, k);
    const auto net = make_network_config(settings[k], static_cast<int>(x_train.cols()));
    const auto trained = train(x_train, y_train, net, cfg);
    fold.setting_kappa.push_back(kappa(confusion(y_val, predict_rows(trained.params, trained.stats, x_val))));
  }
  return fold;
}

LosoResult assemble_loso(int test_subject, std::vector<FoldResult> folds, std::size_t n_settings) {
  std::sort(folds.begin(), folds.end(),
            [](const FoldResult& a, const FoldResult& b) { return a.validation_subject < b.validation_subject; });
  LosoResult r;
  r.test_subject = test_subject;
  r.kappa.resize(static_cast<Eigen::Index>(n_settings), static_cast<Eigen::Index>(folds.size()));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].setting_kappa.size() != n_settings) throw ConfigError("fold has wrong setting count");
    for (std::size_t k = 0; k < n_settings; ++k) {
      r.kappa(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f)) = folds[f].setting_kappa[k];
    }
  }
  for (std::size_t k = 0; k < n_settings; ++k) {
    r.setting_mean.push_back(folds.empty() ? 0.0 : r.kappa.row(static_cast<Eigen::Index>(k)).mean());
  }
  r.mean_across_settings = mean_of(r.setting_mean);
  r.std_across_settings = sample_stddev(r.setting_mean);
  r.best_setting = 0;
  for (std::size_t k = 1; k < n_settings; ++k) {
    if (r.setting_mean[k] > r.setting_mean[r.best_setting]) r.best_setting = k;
  }
  r.folds = std::move(folds);
  return r;
}

std::vector<LosoResult> loso_cv_many(const BandCovarianceCache& cache, std::span<const int> test_subjects,
                                     std::span<const NetworkLayout> settings,
                                     const TrainConfig& train_cfg, const LosoOptions& options) {
  const auto& study = cache.study();
  if (study.subjects.size() < 3) throw ConfigError("LOSO needs at least 3 subjects");
  if (settings.empty()) throw ConfigError("LOSO needs at least one network setting");

  struct Job {
    std::size_t test_slot;
    int test;
    int validation;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < test_subjects.size(); ++t) {
    for (int v : validation_subjects(study, test_subjects[t])) jobs.push_back({t, test_subjects[t], v});
  }

  std::vector<FoldResult> done(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const auto& job = jobs[i];
    if (options.lookup) {
      if (auto stored = options.lookup(job.test, job.validation)) {
        done[i] = std::move(*stored);
        return;
      }
    }
    done[i] = run_fold(cache, job.test, job.validation, settings, train_cfg);
    if (options.on_fold) options.on_fold(done[i]);
  });

  std::vector<std::vector<FoldResult>> grouped(test_subjects.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) grouped[jobs[i].test_slot].push_back(std::move(done[i]));
  std::vector<LosoResult> results;
  for (std::size_t t = 0; t < test_subjects.size(); ++t) {
    results.push_back(assemble_loso(test_subjects[t], std::move(grouped[t]), settings.size()));
  }
  return results;
}

LosoResult loso_cv(const BandCovarianceCache& cache, int test_subject,
                   std::span<const NetworkLayout> settings, const TrainConfig& train_cfg,
                   const LosoOptions& options) {
  const int ids[] = {test_subject};
  return std::move(loso_cv_many(cache, ids, settings, train_cfg, options).front());
}

}  // namespace mibci
