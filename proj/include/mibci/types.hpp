#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mibci {

enum class Label : std::uint8_t { Left = 0, Right = 1 };

std::string_view label_name(Label label);
// Accepts "left"/"right" (any case) and "0"/"1"; throws DataError otherwise.
Label parse_label(std::string_view text);
inline double label_value(Label label) { return label == Label::Right ? 1.0 : 0.0; }

// Lowest sampling rate that keeps the 40 Hz top band edge below Nyquist.
inline constexpr double kMinSamplingRate = 81.0;

// One epoch of multichannel EEG. samples is channels x time, in microvolts.
struct Trial {
  Eigen::MatrixXd samples;
  Label label{Label::Left};
  int subject_id{0};
  double fs{250.0};

  Eigen::Index n_channels() const { return samples.rows(); }
  Eigen::Index n_samples() const { return samples.cols(); }
  double duration() const { return static_cast<double>(samples.cols()) / fs; }
};

// Throws DataError when C < 2, T < 2, fs too low, or any sample is non-finite.
void validate_trial(const Trial& trial);

struct SubjectDataset {
  int subject_id{0};
  std::vector<Trial> train_trials;  // first session
  std::vector<Trial> test_trials;   // second session, recorded on another day
};

enum class Session : std::uint8_t { Train = 0, Test = 1 };

struct StudyDataset {
  std::vector<SubjectDataset> subjects;

  Eigen::Index n_channels() const;
  double fs() const;
  std::vector<int> subject_ids() const;
  // Throws DataError for an unknown id.
  const SubjectDataset& subject(int subject_id) const;
  std::size_t subject_index(int subject_id) const;
};

// Checks per-trial validity, uniform C and fs, unique subject ids, and class balance
// of every session. Messages name the first violated invariant.
void validate_subject(const SubjectDataset& subject);
void validate_study(const StudyDataset& study);

std::size_t count_label(const std::vector<Trial>& trials, Label label);

}  // namespace mibci
