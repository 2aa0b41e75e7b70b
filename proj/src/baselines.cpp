#include "mibci/baselines.hpp"

#include "mibci/errors.hpp"

#include <set>

namespace mibci {

std::vector<TrialKey> pooled_training_keys(const BandCovarianceCache& cache, int test_subject) {
  const auto& study = cache.study();
  const std::size_t test_pos = study.subject_index(test_subject);
  std::vector<TrialKey> keys;
  for (std::size_t s = 0; s < study.subjects.size(); ++s) {
    if (s == test_pos) continue;
    const auto k = cache.session_keys(s, Session::Train);
    keys.insert(keys.end(), k.begin(), k.end());
  }
  return keys;
}

std::vector<TrialKey> held_out_test_keys(const BandCovarianceCache& cache, int test_subject) {
  return cache.session_keys(cache.study().subject_index(test_subject), Session::Test);
}

std::vector<int> subject_ids_of(const BandCovarianceCache& cache, std::span<const TrialKey> keys) {
  std::set<int> ids;
  for (const auto& k : keys) ids.insert(cache.trial(k).subject_id);
  return {ids.begin(), ids.end()};
}

namespace {

MethodOutcome score(const LdaModel& lda, const Eigen::MatrixXd& test_features,
                   std::span<const Label> truth) {
  MethodOutcome out;
  const auto predicted = lda.predict_rows(test_features);
  out.confusion = confusion(truth, predicted);
  out.kappa = kappa(out.confusion);
  return out;
}

}  // namespace

MethodOutcome run_csp_baseline(const BandCovarianceCache& broadband, int test_subject) {
  if (broadband.bank().bands != build_broadband_bank().bands) {
    throw ConfigError("CSP baseline needs the broadband [4,40] bank");
  }
  const auto train = pooled_training_keys(broadband, test_subject);
  const auto test = held_out_test_keys(broadband, test_subject);
  const auto models = fit_band_models(broadband, train, kCspPairs);
  const Eigen::MatrixXd x_train = fused_feature_matrix(broadband, models, train);
  const auto lda = fit_lda(x_train, labels_of(broadband, train));
  auto out = score(lda, fused_feature_matrix(broadband, models, test), labels_of(broadband, test));
  out.training_subjects = subject_ids_of(broadband, train);
  out.n_features = static_cast<std::size_t>(x_train.cols());
  return out;
}

MethodOutcome run_csp_baseline(const StudyDataset& study, int test_subject) {
  return run_csp_baseline(BandCovarianceCache(study, build_broadband_bank()), test_subject);
}

MethodOutcome run_fbcsp_baseline(const BandCovarianceCache& fbcsp, int test_subject, std::size_t k) {
  if (fbcsp.bank().bands != build_fbcsp_bank().bands) {
    throw ConfigError("FBCSP baseline needs the nine-band bank");
  }
  const auto train = pooled_training_keys(fbcsp, test_subject);
  const auto test = held_out_test_keys(fbcsp, test_subject);
  const auto models = fit_band_models(fbcsp, train, kCspPairs);
  const Eigen::MatrixXd x_train = fused_feature_matrix(fbcsp, models, train);
  const auto y_train = labels_of(fbcsp, train);
  const auto selector = fit_mibif(x_train, y_train, k, kCspPairs);
  const auto lda = fit_lda(selector.apply(x_train), y_train);
  auto out = score(lda, selector.apply(fused_feature_matrix(fbcsp, models, test)),
                   labels_of(fbcsp, test));
  out.training_subjects = subject_ids_of(fbcsp, train);
  out.n_features = selector.selected.size();
  return out;
}

MethodOutcome run_fbcsp_baseline(const StudyDataset& study, int test_subject, std::size_t k) {
  return run_fbcsp_baseline(BandCovarianceCache(study, build_fbcsp_bank()), test_subject, k);
}

}  // namespace mibci
