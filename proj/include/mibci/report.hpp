#pragma once

#include "mibci/evaluate.hpp"
#include "mibci/loso.hpp"
#include "mibci/stats.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mibci {

struct RunStamp {
  std::uint64_t seed{0};
  std::string config_hash;
  std::string version;
};

struct ComparisonRow {
  int subject{0};
  std::vector<double> kappa;                 // one per method, in table order
  std::optional<std::size_t> sisae_setting;  // 1-based, when SISAE ran
};

struct ComparisonTable {
  std::vector<MethodKind> methods;
  std::vector<ComparisonRow> rows;

  std::vector<double> column(std::size_t method) const;
  std::vector<double> averages() const;
  std::optional<std::size_t> index_of(MethodKind kind) const;
};

struct TTestLine {
  MethodKind first{MethodKind::Sisae};
  MethodKind second{MethodKind::Csp};
  TTestResult result;
};

// SISAE against every other method in the table (needs >= 2 subjects).
std::vector<TTestLine> sisae_t_tests(const ComparisonTable& table);

std::string table1_csv(std::span<const NetworkLayout> settings);
// subject,setting_1..setting_N,mean,std,best_setting
std::string table2_csv(std::span<const LosoResult> results);
// subject,<methods...>[,sisae_setting] then an "Avg." row
std::string table3_csv(const ComparisonTable& table);
// comparison,t,p,df,mean_difference
std::string ttest_csv(std::span<const TTestLine> lines);

std::string markdown_report(const RunStamp& stamp, std::span<const NetworkLayout> settings,
                            std::span<const LosoResult> loso, const ComparisonTable* comparison,
                            std::span<const TTestLine> tests);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mibci
