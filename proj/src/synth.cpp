#include "mibci/synth.hpp"

#include "mibci/errors.hpp"
#include "mibci/rng.hpp"

#include <cmath>
#include <numbers>

namespace mibci {

namespace {

constexpr std::uint64_t kMixingSeed = 0x5eed0fa11ULL;
constexpr std::uint64_t kBackgroundSeed = 0xbac6c0deULL;
constexpr std::uint64_t kSubjectStream = 1;
constexpr std::uint64_t kSessionStream = 2;
constexpr int kComponentsPerSource = 12;

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return {};
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols) throw ConfigError("ragged mixing matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> default_mixing(int n_channels, double erd_factor) {
  Rng rng(kMixingSeed);
  const Eigen::Index c = n_channels;
  Eigen::MatrixXd base = Eigen::MatrixXd::Identity(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) base(i, k) += 0.4 * rng.normal();
  }
  base.colwise().normalize();

  Eigen::VectorXd left = Eigen::VectorXd::Ones(c);
  Eigen::VectorXd right = Eigen::VectorXd::Ones(c);
  left(0) = erd_factor;
  right(1) = erd_factor;
  return {base * left.asDiagonal(), base * right.asDiagonal()};
}

SynthSpec resolve_synth_spec(SynthSpec spec) {
  if (spec.n_subjects < 1) throw ConfigError("synth: n_subjects must be >= 1");
  if (spec.n_channels < 2) throw ConfigError("synth: n_channels must be >= 2");
  if (spec.trials_per_class < 1) throw ConfigError("synth: trials_per_class must be >= 1");
  if (!(spec.fs >= kMinSamplingRate)) throw ConfigError("synth: fs must be >= 81 Hz");
  if (!(spec.trial_seconds * spec.fs >= 2.0)) throw ConfigError("synth: trial too short");
  if (!(spec.mu_low_hz > 0.0 && spec.mu_high_hz > spec.mu_low_hz &&
        spec.mu_high_hz + spec.band_shift_hz < spec.fs / 2.0)) {
    throw ConfigError("synth: invalid mu band");
  }
  if (!(spec.rotation_strength >= 0.0) || !(spec.band_shift_hz >= 0.0) ||
      !(spec.noise_level >= 0.0) || !(spec.trial_jitter >= 0.0)) {
    throw ConfigError("synth: perturbation and noise parameters must be >= 0");
  }
  if (spec.band_shift_hz >= spec.mu_low_hz) throw ConfigError("synth: band shift exceeds mu band");
  if (!(spec.background_level >= 0.0)) throw ConfigError("synth: background_level must be >= 0");
  if (!(spec.background_low_hz > 0.0 && spec.background_high_hz > spec.background_low_hz &&
        spec.background_high_hz < spec.fs / 2.0)) {
    throw ConfigError("synth: invalid background band");
  }
  if (spec.mixing_left.size() == 0 || spec.mixing_right.size() == 0) {
    auto [l, r] = default_mixing(spec.n_channels, spec.erd_factor);
    if (spec.mixing_left.size() == 0) spec.mixing_left = l;
    if (spec.mixing_right.size() == 0) spec.mixing_right = r;
  }
  for (const auto* m : {&spec.mixing_left, &spec.mixing_right}) {
    if (m->rows() != spec.n_channels || m->cols() != spec.n_channels) {
      throw ConfigError("synth: mixing matrices must be n_channels x n_channels");
    }
    if (!m->allFinite() || Eigen::FullPivLU<Eigen::MatrixXd>(*m).rank() != spec.n_channels) {
      throw ConfigError("synth: mixing matrices must be full rank");
    }
  }
  return spec;
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.n_subjects = j.value("n_subjects", s.n_subjects);
    s.n_channels = j.value("n_channels", s.n_channels);
    s.trials_per_class = j.value("trials_per_class", s.trials_per_class);
    s.fs = j.value("fs", s.fs);
    s.trial_seconds = j.value("trial_seconds", s.trial_seconds);
    if (j.contains("mu_band")) {
      s.mu_low_hz = j["mu_band"].at(0).get<double>();
      s.mu_high_hz = j["mu_band"].at(1).get<double>();
    }
    s.erd_factor = j.value("erd_factor", s.erd_factor);
    if (j.contains("mixing_left")) s.mixing_left = matrix_from_json(j["mixing_left"]);
    if (j.contains("mixing_right")) s.mixing_right = matrix_from_json(j["mixing_right"]);
    s.rotation_strength = j.value("rotation_strength", s.rotation_strength);
    s.band_shift_hz = j.value("band_shift_hz", s.band_shift_hz);
    s.noise_level = j.value("noise_level", s.noise_level);
    s.trial_jitter = j.value("trial_jitter", s.trial_jitter);
    s.amplitude_uv = j.value("amplitude_uv", s.amplitude_uv);
    s.background_level = j.value("background_level", s.background_level);
    if (j.contains("background_band")) {
      s.background_low_hz = j["background_band"].at(0).get<double>();
      s.background_high_hz = j["background_band"].at(1).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  return resolve_synth_spec(std::move(s));
}

nlohmann::json synth_spec_to_json(const SynthSpec& spec) {
  return {
      {"n_subjects", spec.n_subjects},
      {"n_channels", spec.n_channels},
      {"trials_per_class", spec.trials_per_class},
      {"fs", spec.fs},
      {"trial_seconds", spec.trial_seconds},
      {"mu_band", {spec.mu_low_hz, spec.mu_high_hz}},
      {"erd_factor", spec.erd_factor},
      {"mixing_left", matrix_to_json(spec.mixing_left)},
      {"mixing_right", matrix_to_json(spec.mixing_right)},
      {"rotation_strength", spec.rotation_strength},
      {"band_shift_hz", spec.band_shift_hz},
      {"noise_level", spec.noise_level},
      {"trial_jitter", spec.trial_jitter},
      {"amplitude_uv", spec.amplitude_uv},
      {"background_level", spec.background_level},
      {"background_band", {spec.background_low_hz, spec.background_high_hz}},
  };
}

Eigen::MatrixXd subject_rotation(int n_channels, double strength, std::uint64_t seed) {
  const Eigen::Index c = n_channels;
  if (strength == 0.0) return Eigen::MatrixXd::Identity(c, c);
  Rng rng(seed);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      k(i, j) = rng.normal();
      k(j, i) = -k(i, j);
    }
  }
  // Cayley transform: eigenvalues +-i*mu of K become rotation angles 2*atan(mu).
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.transpose() * k);
  const double mu_max = std::sqrt(eig.eigenvalues().maxCoeff());
  k *= std::tan(strength / 2.0) / mu_max;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c, c);
  return (id - k).partialPivLu().solve(id + k);
}

namespace {

struct SubjectParams {
  Eigen::MatrixXd mixing_left;
  Eigen::MatrixXd mixing_right;
  Eigen::MatrixXd mixing_background;
  double band_shift{0.0};
};

Eigen::MatrixXd background_mixing(int n_channels) {
  Rng rng(kBackgroundSeed);
  Eigen::MatrixXd m(n_channels, n_channels);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = rng.normal();
  }
  m.colwise().normalize();
  return m;
}

// Rows are unit-RMS sums of random sinusoids in [lo, hi], each scaled by a
// log-normal per-trial gain.
Eigen::MatrixXd band_sources(Eigen::Index c, Eigen::Index t_len, double lo, double hi, double fs,
                             double jitter, Rng& rng) {
  Eigen::MatrixXd sources = Eigen::MatrixXd::Zero(c, t_len);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (int q = 0; q < kComponentsPerSource; ++q) {
      const double f = rng.uniform(lo, hi);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double amp = std::abs(rng.normal()) + 0.1;
      const double w = 2.0 * std::numbers::pi * f / fs;
      for (Eigen::Index t = 0; t < t_len; ++t) {
        sources(j, t) += amp * std::sin(w * static_cast<double>(t) + phase);
      }
    }
    const double rms = std::sqrt(sources.row(j).squaredNorm() / static_cast<double>(t_len));
    const double gain = std::exp(jitter * rng.normal());
    sources.row(j) *= gain / rms;
  }
  return sources;
}

Trial make_trial(const SynthSpec& spec, const SubjectParams& subject, Label label, int subject_id,
                 Rng& rng) {
  const Eigen::Index c = spec.n_channels;
  const auto t_len = static_cast<Eigen::Index>(std::llround(spec.trial_seconds * spec.fs));
  const double lo = spec.mu_low_hz + subject.band_shift;
  const double hi = spec.mu_high_hz + subject.band_shift;

  const Eigen::MatrixXd sources = band_sources(c, t_len, lo, hi, spec.fs, spec.trial_jitter, rng);
  const auto& mixing = label == Label::Left ? subject.mixing_left : subject.mixing_right;
  Trial trial;
  trial.samples = mixing * sources;
  if (spec.background_level > 0.0) {
    trial.samples += spec.background_level * subject.mixing_background *
                     band_sources(c, t_len, spec.background_low_hz, spec.background_high_hz, spec.fs,
                                  spec.trial_jitter, rng);
  }
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index t = 0; t < t_len; ++t) trial.samples(i, t) += spec.noise_level * rng.normal();
  }
  trial.samples *= spec.amplitude_uv;
  trial.label = label;
  trial.subject_id = subject_id;
  trial.fs = spec.fs;
  return trial;
}

}  // namespace

StudyDataset synth_study(const SynthSpec& raw_spec, std::uint64_t seed) {
  const SynthSpec spec = resolve_synth_spec(raw_spec);
  StudyDataset study;
  study.subjects.reserve(static_cast<std::size_t>(spec.n_subjects));
  for (int i = 0; i < spec.n_subjects; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    Rng subject_rng(derive_seed(seed, kSubjectStream, index));
    const Eigen::MatrixXd rotation =
        subject_rotation(spec.n_channels, spec.rotation_strength, subject_rng.index(~0ULL >> 1));
    SubjectParams params{rotation * spec.mixing_left, rotation * spec.mixing_right,
                         rotation * background_mixing(spec.n_channels),
                         spec.band_shift_hz * subject_rng.uniform(-1.0, 1.0)};

    SubjectDataset subject;
    subject.subject_id = i + 1;
    for (int session = 0; session < 2; ++session) {
      Rng rng(derive_seed(seed, kSessionStream + static_cast<std::uint64_t>(session), index));
      auto& trials = session == 0 ? subject.train_trials : subject.test_trials;
      trials.reserve(2 * static_cast<std::size_t>(spec.trials_per_class));
      for (int n = 0; n < spec.trials_per_class; ++n) {
        trials.push_back(make_trial(spec, params, Label::Left, subject.subject_id, rng));
        trials.push_back(make_trial(spec, params, Label::Right, subject.subject_id, rng));
      }
    }
    study.subjects.push_back(std::move(subject));
  }
  return study;
}

}  // namespace mibci
