#pragma once

#include "mibci/evaluate.hpp"
#include "mibci/sae.hpp"
#include "mibci/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mibci {

// One self-contained experiment description (JSON document). Exactly one data
// source; the seed is mandatory (in the file or from --seed).
struct ExperimentConfig {
  std::optional<std::filesystem::path> study_path;  // manifest.json
  std::optional<SynthSpec> synth;
  std::uint64_t synth_seed{0};
  std::vector<MethodKind> methods{MethodKind::Csp, MethodKind::Fbcsp, MethodKind::Sisae};
  std::vector<NetworkLayout> settings = standard_settings();
  TrainConfig train;
  std::uint64_t seed{0};
  std::filesystem::path out_dir{"mibci_out"};
  std::string bank{"full"};
  std::size_t fbcsp_k{kMibifK};
  std::optional<std::size_t> sisae_setting;  // 1-based fixed setting; nullopt selects by LOSO
  std::vector<int> test_subjects;            // empty means every subject
  int jobs{0};
};

// Overrides applied on top of the file, as given on the command line.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> bank;
  std::optional<int> jobs;
};

// Relative study paths resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {},
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const ConfigOverrides& overrides = {});

// Result-affecting fields only (no output directory or worker count).
nlohmann::json canonical_json(const ExperimentConfig& cfg);
// FNV-1a 64 of the canonical JSON, 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

StudyDataset load_experiment_study(const ExperimentConfig& cfg);
std::vector<int> resolve_test_subjects(const ExperimentConfig& cfg, const StudyDataset& study);

std::string_view library_version();

}  // namespace mibci
