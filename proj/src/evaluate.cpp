#include "mibci/evaluate.hpp"

#include "mibci/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace mibci {

std::string_view method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::Csp: return "CSP";
    case MethodKind::Fbcsp: return "FBCSP";
    case MethodKind::Sisae: return "SISAE";
  }
  return "?";
}

MethodKind parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "CSP") return MethodKind::Csp;
  if (upper == "FBCSP") return MethodKind::Fbcsp;
  if (upper == "SISAE") return MethodKind::Sisae;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

FeatureCaches::FeatureCaches(const StudyDataset& study, FilterBankSpec sisae_bank, int jobs)
    : study_(&study), sisae_bank_(std::move(sisae_bank)), jobs_(jobs) {}

const BandCovarianceCache& FeatureCaches::get(Slot& slot, const FilterBankSpec& bank) {
  std::call_once(slot.once, [&] {
    slot.cache = std::make_unique<BandCovarianceCache>(*study_, bank, jobs_);
  });
  return *slot.cache;
}

const BandCovarianceCache& FeatureCaches::broadband() { return get(broadband_, build_broadband_bank()); }
const BandCovarianceCache& FeatureCaches::fbcsp() { return get(fbcsp_, build_fbcsp_bank()); }

const BandCovarianceCache& FeatureCaches::sisae() {
  if (sisae_bank_.bands == build_fbcsp_bank().bands) return fbcsp();
  if (sisae_bank_.bands == build_broadband_bank().bands) return broadband();
  return get(sisae_, sisae_bank_);
}

MethodOutcome run_sisae(const BandCovarianceCache& cache, std::span<const TrialKey> training,
                        std::span<const TrialKey> evaluation, const NetworkLayout& layout,
                        const TrainConfig& train_cfg) {
  const auto models = fit_band_models(cache, training, kCspPairs);
  const Eigen::MatrixXd x_train = fused_feature_matrix(cache, models, training);
  const auto net = make_network_config(layout, static_cast<int>(x_train.cols()));
  const auto trained = train(x_train, labels_of(cache, training), net, train_cfg);

  const Eigen::MatrixXd x_eval = fused_feature_matrix(cache, models, evaluation);
  const auto predicted = predict_rows(trained.params, trained.stats, x_eval);
  MethodOutcome out;
  out.confusion = confusion(labels_of(cache, evaluation), predicted);
  out.kappa = kappa(out.confusion);
  out.training_subjects = subject_ids_of(cache, training);
  out.n_features = static_cast<std::size_t>(x_train.cols());
  return out;
}

MethodOutcome evaluate_method(FeatureCaches& caches, int test_subject, const MethodSpec& method) {
  switch (method.kind) {
    case MethodKind::Csp:
      return run_csp_baseline(caches.broadband(), test_subject);
    case MethodKind::Fbcsp:
      return run_fbcsp_baseline(caches.fbcsp(), test_subject, method.fbcsp_k);
    case MethodKind::Sisae: {
      const auto& cache = caches.sisae();
      return run_sisae(cache, pooled_training_keys(cache, test_subject),
                       held_out_test_keys(cache, test_subject), method.layout, method.train);
    }
  }
  throw ConfigError("unknown method id");
}

}  // namespace mibci
