#include "mibci/band_covariance.hpp"

#include "mibci/butterworth.hpp"
#include "mibci/errors.hpp"
#include "mibci/parallel.hpp"

namespace mibci {

namespace {

const std::vector<Trial>& session_trials(const SubjectDataset& s, Session session) {
  return session == Session::Train ? s.train_trials : s.test_trials;
}

}  // namespace

BandCovarianceCache::BandCovarianceCache(const StudyDataset& study, FilterBankSpec bank, int jobs)
    : study_(&study), bank_(std::move(bank)), channels_(study.n_channels()) {
  const auto c = static_cast<std::size_t>(channels_);
  packed_ = c * (c + 1) / 2;

  std::size_t n_trials = 0;
  for (const auto& s : study.subjects) {
    for (Session session : {Session::Train, Session::Test}) {
      offsets_.push_back(n_trials);
      n_trials += session_trials(s, session).size();
    }
  }
  std::vector<const Trial*> flat;
  flat.reserve(n_trials);
  for (const auto& s : study.subjects) {
    for (const auto& t : s.train_trials) flat.push_back(&t);
    for (const auto& t : s.test_trials) flat.push_back(&t);
  }

  const double fs = study.fs();
  std::vector<SosFilter> filters;
  filters.reserve(bank_.size());
  for (const auto& band : bank_.bands) filters.push_back(design_butterworth_bandpass(band, fs));

  data_.assign(n_trials * bank_.size() * packed_, 0.0);
  parallel_for(n_trials, jobs, [&](std::size_t i) {
    const Trial& t = *flat[i];
    if (t.n_channels() != channels_) throw DataError("channel count mismatch in study");
    Eigen::MatrixXd x;
    for (std::size_t b = 0; b < filters.size(); ++b) {
      x = t.samples;
      filter_rows(filters[b], x);
      const Eigen::MatrixXd cov = x * x.transpose() / static_cast<double>(x.cols());
      double* out = data_.data() + (i * bank_.size() + b) * packed_;
      for (Eigen::Index r = 0; r < channels_; ++r) {
        for (Eigen::Index k = r; k < channels_; ++k) *out++ = cov(r, k);
      }
    }
  });
}

std::size_t BandCovarianceCache::slot(const TrialKey& key) const {
  return offsets_.at(2 * key.subject + static_cast<std::size_t>(key.session)) + key.index;
}

const Trial& BandCovarianceCache::trial(const TrialKey& key) const {
  return session_trials(study_->subjects.at(key.subject), key.session).at(key.index);
}

Eigen::MatrixXd BandCovarianceCache::raw_covariance(const TrialKey& key, std::size_t band) const {
  const double* p = data_.data() + (slot(key) * bank_.size() + band) * packed_;
  Eigen::MatrixXd cov(channels_, channels_);
  for (Eigen::Index r = 0; r < channels_; ++r) {
    for (Eigen::Index k = r; k < channels_; ++k) {
      cov(r, k) = *p;
      cov(k, r) = *p++;
    }
  }
  return cov;
}

std::vector<TrialKey> BandCovarianceCache::session_keys(std::size_t subject, Session session) const {
  const auto n = session_trials(study_->subjects.at(subject), session).size();
  std::vector<TrialKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) keys.push_back({subject, session, i});
  return keys;
}

std::vector<CspModel> fit_band_models(const BandCovarianceCache& cache,
                                      std::span<const TrialKey> training, int m) {
  const Eigen::Index c = cache.n_channels();
  std::vector<CspModel> models;
  models.reserve(cache.bank().size());
  for (std::size_t b = 0; b < cache.bank().size(); ++b) {
    Eigen::MatrixXd sum_left = Eigen::MatrixXd::Zero(c, c);
    Eigen::MatrixXd sum_right = Eigen::MatrixXd::Zero(c, c);
    std::size_t n_left = 0, n_right = 0;
    for (const auto& key : training) {
      const Eigen::MatrixXd cov = normalize_trace(cache.raw_covariance(key, b));
      if (cache.trial(key).label == Label::Left) {
        sum_left += cov;
        ++n_left;
      } else {
        sum_right += cov;
        ++n_right;
      }
    }
    if (n_left == 0 || n_right == 0) throw ConfigError("CSP needs trials of both classes");
    CspModel model = fit_csp_from_means(sum_left / static_cast<double>(n_left),
                                        sum_right / static_cast<double>(n_right), m);
    model.band = cache.bank().bands[b];
    models.push_back(std::move(model));
  }
  return models;
}

Eigen::MatrixXd fused_feature_matrix(const BandCovarianceCache& cache,
                                     std::span<const CspModel> models,
                                     std::span<const TrialKey> keys) {
  if (models.size() != cache.bank().size()) throw ConfigError("model count does not match bank size");
  if (models.empty()) return {};
  const int m = models.front().m;
  Eigen::MatrixXd features(static_cast<Eigen::Index>(keys.size()),
                           2 * m * static_cast<Eigen::Index>(models.size()));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t b = 0; b < models.size(); ++b) {
      features.row(static_cast<Eigen::Index>(i)).segment(2 * m * static_cast<Eigen::Index>(b), 2 * m) =
          csp_features_from_covariance(models[b], cache.raw_covariance(keys[i], b)).transpose();
    }
  }
  return features;
}

std::vector<Label> labels_of(const BandCovarianceCache& cache, std::span<const TrialKey> keys) {
  std::vector<Label> labels;
  labels.reserve(keys.size());
  for (const auto& k : keys) labels.push_back(cache.trial(k).label);
  return labels;
}

}  // namespace mibci
