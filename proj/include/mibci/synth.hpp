#pragma once

#include "mibci/types.hpp"

#include <json.hpp>

#include <cstdint>

namespace mibci {

// Synthetic multi-subject motor-imagery EEG.
//
// Each trial mixes n_channels unit-power mu-rhythm sources, s(t) = A_k * g * r(t),
// where A_k is the class mixing matrix and g a per-trial log-normal gain per source.
// The default class matrices share one base mixing and differ in the gain of
// sources 0 and 1 (event-related desynchronization), so the classes have distinct
// spatial covariances. Every subject gets its own orthogonal perturbation R_s,
// applied to both class matrices, and its own shift of the mu band. White sensor
// noise is added last. Train and test sessions share the subject parameters and
// use independent draws.
struct SynthSpec {
  int n_subjects{9};
  int n_channels{8};
  int trials_per_class{60};
  double fs{250.0};
  double trial_seconds{2.0};
  double mu_low_hz{8.0};
  double mu_high_hz{13.0};
  double erd_factor{0.5};          // only used to build the default mixing matrices
  Eigen::MatrixXd mixing_left;     // C x C; empty means default
  Eigen::MatrixXd mixing_right;
  double rotation_strength{0.0};   // largest rotation angle of R_s, radians
  double band_shift_hz{0.0};       // subject band shift drawn from [-b, b]
  double noise_level{0.5};         // sensor noise std relative to unit source power
  double trial_jitter{0.15};       // std of the log source gains per trial
  // Class-independent background rhythm: n_channels sources in this band, mixed
  // through a fixed random matrix (also rotated by R_s), RMS relative to the mu sources.
  double background_level{0.4};
  double background_low_hz{18.0};
  double background_high_hz{30.0};
  double amplitude_uv{10.0};
};

// Default class mixing pair for the given channel count and ERD factor.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> default_mixing(int n_channels, double erd_factor);

// Fills empty mixing matrices with the defaults and checks every field.
// Throws ConfigError.
SynthSpec resolve_synth_spec(SynthSpec spec);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

// Deterministic in (spec, seed).
StudyDataset synth_study(const SynthSpec& spec, std::uint64_t seed);

// R_s for subject index i; exposed for tests.
Eigen::MatrixXd subject_rotation(int n_channels, double strength, std::uint64_t seed);

}  // namespace mibci
