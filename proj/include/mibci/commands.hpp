#pragma once

#include "mibci/experiment.hpp"
#include "mibci/report.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace mibci {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Runs body, reports any exception on err and maps it to an exit code.
int run_guarded(const std::function<void()>& body, std::ostream& err);

// Writes a synthetic study (manifest.json + session files) into out. spec_file
// may be empty for the default spec; it holds either a bare synth spec or an
// object with a "synth" member.
void cmd_synth(const std::optional<std::filesystem::path>& spec_file, std::uint64_t seed,
               const std::filesystem::path& out);

// CSV of the bank with the measured gain at both band edges and the largest
// pole radius of each band filter.
void cmd_bank_inspect(const std::string& bank, double fs, std::ostream& out);

struct LosoReport {
  std::vector<LosoResult> results;
  std::string table2;
};

struct CompareReport {
  ComparisonTable table;
  std::vector<LosoResult> loso;  // present when the SISAE setting was chosen by LOSO
  std::vector<TTestLine> tests;
  std::string table3;
  std::string ttests;
};

// Every output lands in cfg.out_dir. Per-fold (folds.jsonl) and per-method
// (methods.jsonl) records are appended as they finish; with resume, records
// carrying the same config hash are reused instead of recomputed.
LosoReport cmd_loso(const ExperimentConfig& cfg, bool resume, std::ostream& log);
CompareReport cmd_compare(const ExperimentConfig& cfg, bool resume, std::ostream& log);

}  // namespace mibci
