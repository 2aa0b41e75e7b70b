#include "mibci/report.hpp"

#include "mibci/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mibci {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string k4(double v) { return fmt("%.4f", v); }

std::string join_ints(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

std::vector<double> ComparisonTable::column(std::size_t method) const {
  std::vector<double> c;
  for (const auto& r : rows) c.push_back(r.kappa.at(method));
  return c;
}

std::vector<double> ComparisonTable::averages() const {
  std::vector<double> a;
  for (std::size_t m = 0; m < methods.size(); ++m) a.push_back(mean_of(column(m)));
  return a;
}

std::optional<std::size_t> ComparisonTable::index_of(MethodKind kind) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i] == kind) return i;
  }
  return std::nullopt;
}

std::vector<TTestLine> sisae_t_tests(const ComparisonTable& table) {
  std::vector<TTestLine> lines;
  const auto sisae = table.index_of(MethodKind::Sisae);
  if (!sisae || table.rows.size() < 2) return lines;
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    if (m == *sisae) continue;
    lines.push_back({MethodKind::Sisae, table.methods[m],
                     paired_t_test(table.column(*sisae), table.column(m))});
  }
  return lines;
}

std::string table1_csv(std::span<const NetworkLayout> settings) {
  std::ostringstream out;
  out << "setting,ae_nodes,clf_nodes\n";
  for (std::size_t i = 0; i < settings.size(); ++i) {
    out << i + 1 << ",\"" << join_ints(settings[i].ae_nodes) << "\",\"" << join_ints(settings[i].clf_nodes)
        << "\"\n";
  }
  return out.str();
}

std::string table2_csv(std::span<const LosoResult> results) {
  std::ostringstream out;
  const std::size_t n = results.empty() ? 0 : results.front().setting_mean.size();
  out << "subject";
  for (std::size_t k = 0; k < n; ++k) out << ",setting_" << k + 1;
  out << ",mean,std,best_setting\n";
  for (const auto& r : results) {
    out << r.test_subject;
    for (double v : r.setting_mean) out << ',' << k4(v);
    out << ',' << k4(r.mean_across_settings) << ',' << k4(r.std_across_settings) << ','
        << r.best_setting + 1 << '\n';
  }
  return out.str();
}

std::string table3_csv(const ComparisonTable& table) {
  std::ostringstream out;
  const bool has_sisae = table.index_of(MethodKind::Sisae).has_value();
  out << "subject";
  for (auto m : table.methods) out << ',' << method_name(m);
  if (has_sisae) out << ",sisae_setting";
  out << '\n';
  for (const auto& r : table.rows) {
    out << r.subject;
    for (double v : r.kappa) out << ',' << fmt("%.3f", v);
    if (has_sisae) out << ',' << (r.sisae_setting ? std::to_string(*r.sisae_setting) : "");
    out << '\n';
  }
  out << "Avg.";
  for (double v : table.averages()) out << ',' << fmt("%.3f", v);
  if (has_sisae) out << ',';
  out << '\n';
  return out.str();
}

std::string ttest_csv(std::span<const TTestLine> lines) {
  std::ostringstream out;
  out << "comparison,t,p,df,mean_difference\n";
  for (const auto& l : lines) {
    out << method_name(l.first) << " vs " << method_name(l.second) << ',' << fmt("%.6g", l.result.t) << ','
        << fmt("%.6g", l.result.p) << ',' << l.result.df << ',' << fmt("%.6g", l.result.mean_difference)
        << '\n';
  }
  return out.str();
}

std::string markdown_report(const RunStamp& stamp, std::span<const NetworkLayout> settings,
                            std::span<const LosoResult> loso, const ComparisonTable* comparison,
                            std::span<const TTestLine> tests) {
  std::ostringstream out;
  out << "# mibci run report\n\n";
  out << "- version: " << stamp.version << "\n- seed: " << stamp.seed << "\n- config hash: "
      << stamp.config_hash << "\n\n";

  out << "## Network settings\n\n| Setting | AE nodes | Classifier nodes |\n|---|---|---|\n";
  for (std::size_t i = 0; i < settings.size(); ++i) {
    out << "| " << i + 1 << " | " << join_ints(settings[i].ae_nodes) << " | " << join_ints(settings[i].clf_nodes)
        << " |\n";
  }

  if (!loso.empty()) {
    out << "\n## LOSO cross-validation (mean kappa)\n\n| Sub. |";
    for (std::size_t k = 0; k < settings.size(); ++k) out << ' ' << k + 1 << " |";
    out << " Mean | Std |\n|---|";
    for (std::size_t k = 0; k < settings.size() + 2; ++k) out << "---|";
    out << '\n';
    for (const auto& r : loso) {
      out << "| " << r.test_subject << " |";
      for (std::size_t k = 0; k < r.setting_mean.size(); ++k) {
        const bool best = k == r.best_setting;
        out << ' ' << (best ? "**" : "") << k4(r.setting_mean[k]) << (best ? "**" : "") << " |";
      }
      out << ' ' << k4(r.mean_across_settings) << " | " << k4(r.std_across_settings) << " |\n";
    }
  }

  if (comparison) {
    out << "\n## Method comparison (kappa on held-out test sessions)\n\n| Test subject |";
    for (auto m : comparison->methods) out << ' ' << method_name(m) << " |";
    out << "\n|---|";
    for (std::size_t m = 0; m < comparison->methods.size(); ++m) out << "---|";
    out << '\n';
    for (const auto& r : comparison->rows) {
      out << "| Subject " << r.subject << " |";
      for (double v : r.kappa) out << ' ' << fmt("%.3f", v) << " |";
      out << '\n';
    }
    out << "| Avg. |";
    for (double v : comparison->averages()) out << ' ' << fmt("%.3f", v) << " |";
    out << '\n';
  }

  if (!tests.empty()) {
    out << "\n## Paired t-tests (two-tailed)\n\n";
    for (const auto& l : tests) {
      out << "- " << method_name(l.first) << " vs " << method_name(l.second) << ": t = "
          << fmt("%.4f", l.result.t) << ", df = " << l.result.df << ", p = " << fmt("%.3g", l.result.p)
          << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace mibci
