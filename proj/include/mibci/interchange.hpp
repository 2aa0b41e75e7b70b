#pragma once

#include "mibci/types.hpp"

#include <filesystem>
#include <vector>

namespace mibci {

// Session file layout (little-endian):
//   "MIT1" | u32 n_trials | u32 n_channels | u32 n_samples | f64 fs
//   per trial: u8 label (0 = left, 1 = right) | f64 samples[n_channels * n_samples], row-major
//
// manifest.json sits in the study directory:
//   {"format": "MIT1", "subjects": [{"id": 1, "train": "S01_train.mit", "test": "S01_test.mit"}, ...]}
// Session paths are relative to the manifest.

void write_session(const std::filesystem::path& path, const std::vector<Trial>& trials);
std::vector<Trial> read_session(const std::filesystem::path& path, int subject_id);

// Writes manifest.json plus two session files per subject into dir.
void write_study(const std::filesystem::path& dir, const StudyDataset& study);

// Loads and validates a study; all failures raise DataError.
StudyDataset load_study(const std::filesystem::path& manifest_path);

}  // namespace mibci
