#include "mibci/types.hpp"

#include "mibci/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace mibci {

std::string_view label_name(Label label) {
  return label == Label::Left ? "left" : "right";
}

Label parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "left" || lower == "0") return Label::Left;
  if (lower == "right" || lower == "1") return Label::Right;
  throw DataError("unknown label '" + std::string(text) + "'");
}

void validate_trial(const Trial& trial) {
  if (trial.n_channels() < 2) throw DataError("trial needs at least 2 channels");
  if (trial.n_samples() < 2) throw DataError("trial needs at least 2 samples");
  if (!(trial.fs >= kMinSamplingRate)) {
    throw DataError("sampling rate " + std::to_string(trial.fs) + " Hz is below " +
                    std::to_string(kMinSamplingRate) + " Hz");
  }
  if (!trial.samples.allFinite()) throw DataError("non-finite sample in trial");
}

std::size_t count_label(const std::vector<Trial>& trials, Label label) {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [&](const Trial& t) { return t.label == label; }));
}

Eigen::Index StudyDataset::n_channels() const {
  for (const auto& s : subjects) {
    if (!s.train_trials.empty()) return s.train_trials.front().n_channels();
    if (!s.test_trials.empty()) return s.test_trials.front().n_channels();
  }
  return 0;
}

double StudyDataset::fs() const {
  for (const auto& s : subjects) {
    if (!s.train_trials.empty()) return s.train_trials.front().fs;
    if (!s.test_trials.empty()) return s.test_trials.front().fs;
  }
  return 0.0;
}

std::vector<int> StudyDataset::subject_ids() const {
  std::vector<int> ids;
  ids.reserve(subjects.size());
  for (const auto& s : subjects) ids.push_back(s.subject_id);
  return ids;
}

std::size_t StudyDataset::subject_index(int subject_id) const {
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].subject_id == subject_id) return i;
  }
  throw DataError("unknown subject id " + std::to_string(subject_id));
}

const SubjectDataset& StudyDataset::subject(int subject_id) const {
  return subjects[subject_index(subject_id)];
}

namespace {

void check_session(const std::vector<Trial>& trials, int subject_id, const char* session,
                   Eigen::Index& channels, double& fs) {
  const std::string where = "subject " + std::to_string(subject_id) + " " + session;
  if (trials.empty()) throw DataError(where + ": no trials");
  for (const auto& t : trials) {
    validate_trial(t);
    if (channels == 0) channels = t.n_channels();
    if (fs == 0.0) fs = t.fs;
    if (t.n_channels() != channels) throw DataError(where + ": channel count mismatch");
    if (t.fs != fs) throw DataError(where + ": sampling rate mismatch");
  }
  if (count_label(trials, Label::Left) != count_label(trials, Label::Right)) {
    throw DataError(where + ": classes are not balanced");
  }
}

}  // namespace

void validate_subject(const SubjectDataset& subject) {
  Eigen::Index channels = 0;
  double fs = 0.0;
  check_session(subject.train_trials, subject.subject_id, "train", channels, fs);
  check_session(subject.test_trials, subject.subject_id, "test", channels, fs);
}

void validate_study(const StudyDataset& study) {
  if (study.subjects.empty()) throw DataError("study has no subjects");
  std::set<int> ids;
  Eigen::Index channels = 0;
  double fs = 0.0;
  for (const auto& s : study.subjects) {
    if (!ids.insert(s.subject_id).second) {
      throw DataError("duplicate subject id " + std::to_string(s.subject_id));
    }
    check_session(s.train_trials, s.subject_id, "train", channels, fs);
    check_session(s.test_trials, s.subject_id, "test", channels, fs);
  }
}

}  // namespace mibci
