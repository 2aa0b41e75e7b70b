#include "mibci/commands.hpp"

#include "mibci/butterworth.hpp"
#include "mibci/errors.hpp"
#include "mibci/interchange.hpp"
#include "mibci/parallel.hpp"
#include "mibci/rng.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

namespace mibci {

namespace fs = std::filesystem;

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

void cmd_synth(const std::optional<fs::path>& spec_file, std::uint64_t seed, const fs::path& out) {
  SynthSpec spec;
  if (spec_file) {
    std::ifstream in(*spec_file);
    if (!in) throw ConfigError("cannot read spec " + spec_file->string());
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed spec " + spec_file->string() + ": " + e.what());
    }
    spec = synth_spec_from_json(doc.contains("synth") ? doc["synth"] : doc);
  }
  write_study(out, synth_study(resolve_synth_spec(spec), seed));
}

void cmd_bank_inspect(const std::string& bank_name, double fs, std::ostream& out) {
  const FilterBankSpec bank = bank_by_name(bank_name);
  out << "index,low_hz,high_hz,gain_low_db,gain_high_db,max_pole_radius,ok\n";
  char line[160];
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const BandSpec& b = bank.bands[i];
    const SosFilter f = design_butterworth_bandpass(b, fs);
    const double lo = magnitude_db(f, b.low_hz);
    const double hi = magnitude_db(f, b.high_hz);
    const double r = max_pole_radius(f);
    const bool ok = r < 1.0 && std::abs(lo + 3.0103) < 0.2 && std::abs(hi + 3.0103) < 0.2;
    std::snprintf(line, sizeof(line), "%zu,%d,%d,%.4f,%.4f,%.6f,%d\n", i, b.low_hz, b.high_hz, lo, hi, r,
                  ok ? 1 : 0);
    out << line;
  }
}

namespace {

// Append-only JSON-lines store keyed by config hash.
class RecordLog {
 public:
  RecordLog(const fs::path& path, const std::string& hash, bool resume) : path_(path), hash_(hash) {
    fs::create_directories(path.parent_path());
    if (resume) {
      std::ifstream in(path);
      std::string text;
      while (std::getline(in, text)) {
        if (text.empty()) continue;
        try {
          auto j = nlohmann::json::parse(text);
          if (j.value("hash", std::string()) == hash_) records_.push_back(std::move(j));
        } catch (const nlohmann::json::exception&) {
          // A truncated last line from an interrupted run; it is recomputed.
        }
      }
    }
    out_.open(path, resume ? std::ios::app : std::ios::trunc);
    if (!out_) throw DataError("cannot write " + path.string());
  }

  const std::vector<nlohmann::json>& records() const { return records_; }

  void append(nlohmann::json j) {
    j["hash"] = hash_;
    std::lock_guard lock(mutex_);
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  fs::path path_;
  std::string hash_;
  std::vector<nlohmann::json> records_;
  std::ofstream out_;
  std::mutex mutex_;
};

nlohmann::json fold_json(const FoldResult& f) {
  return {{"test", f.test_subject},
          {"validation", f.validation_subject},
          {"training", f.training_subjects},
          {"kappa", f.setting_kappa}};
}

FoldResult fold_from_json(const nlohmann::json& j) {
  FoldResult f;
  f.test_subject = j.at("test").get<int>();
  f.validation_subject = j.at("validation").get<int>();
  f.training_subjects = j.at("training").get<std::vector<int>>();
  f.setting_kappa = j.at("kappa").get<std::vector<double>>();
  return f;
}

nlohmann::json run_json(const ExperimentConfig& cfg, const std::string& command) {
  return {{"command", command},
          {"version", std::string(library_version())},
          {"config_hash", config_hash(cfg)},
          {"config", canonical_json(cfg)}};
}

RunStamp stamp_of(const ExperimentConfig& cfg) {
  return {cfg.seed, config_hash(cfg), std::string(library_version())};
}

std::vector<LosoResult> run_loso(const BandCovarianceCache& cache, const ExperimentConfig& cfg,
                                 std::span<const int> tests, bool resume, std::ostream& log) {
  RecordLog folds(cfg.out_dir / "folds.jsonl", config_hash(cfg), resume);
  std::map<std::pair<int, int>, FoldResult> stored;
  for (const auto& j : folds.records()) {
    FoldResult f = fold_from_json(j);
    if (f.setting_kappa.size() != cfg.settings.size()) continue;
    stored[{f.test_subject, f.validation_subject}] = std::move(f);
  }
  if (!stored.empty()) log << "resuming with " << stored.size() << " stored folds\n";

  std::mutex log_mutex;
  LosoOptions opts;
  opts.jobs = resolve_jobs(cfg.jobs);
  opts.lookup = [&](int test, int val) -> std::optional<FoldResult> {
    auto it = stored.find({test, val});
    if (it == stored.end()) return std::nullopt;
    return it->second;
  };
  opts.on_fold = [&](const FoldResult& f) {
    folds.append(fold_json(f));
    std::lock_guard lock(log_mutex);
    log << "fold test=" << f.test_subject << " validation=" << f.validation_subject << " done\n";
  };
  return loso_cv_many(cache, tests, cfg.settings, cfg.train, opts);
}

}  // namespace

LosoReport cmd_loso(const ExperimentConfig& cfg, bool resume, std::ostream& log) {
  const StudyDataset study = load_experiment_study(cfg);
  const auto tests = resolve_test_subjects(cfg, study);
  const int jobs = resolve_jobs(cfg.jobs);
  log << "building band covariances (" << cfg.bank << " bank)\n";
  const BandCovarianceCache cache(study, bank_by_name(cfg.bank), jobs);

  LosoReport report;
  report.results = run_loso(cache, cfg, tests, resume, log);
  report.table2 = table2_csv(report.results);

  write_text_file(cfg.out_dir / "table2.csv", report.table2);
  write_text_file(cfg.out_dir / "table1.csv", table1_csv(cfg.settings));
  write_text_file(cfg.out_dir / "report.md",
                  markdown_report(stamp_of(cfg), cfg.settings, report.results, nullptr, {}));
  write_text_file(cfg.out_dir / "run.json", run_json(cfg, "loso").dump(2) + "\n");
  return report;
}

CompareReport cmd_compare(const ExperimentConfig& cfg, bool resume, std::ostream& log) {
  const StudyDataset study = load_experiment_study(cfg);
  const auto tests = resolve_test_subjects(cfg, study);
  const int jobs = resolve_jobs(cfg.jobs);
  FeatureCaches caches(study, bank_by_name(cfg.bank), jobs);

  CompareReport report;
  report.table.methods = cfg.methods;

  const bool has_sisae = std::find(cfg.methods.begin(), cfg.methods.end(), MethodKind::Sisae) != cfg.methods.end();
  std::map<int, std::size_t> chosen;  // test subject -> 0-based setting
  if (has_sisae) {
    if (cfg.sisae_setting) {
      for (int t : tests) chosen[t] = *cfg.sisae_setting - 1;
    } else {
      log << "selecting the SISAE setting by LOSO cross-validation\n";
      report.loso = run_loso(caches.sisae(), cfg, tests, resume, log);
      for (const auto& r : report.loso) chosen[r.test_subject] = r.best_setting;
    }
  }

  RecordLog methods(cfg.out_dir / "methods.jsonl", config_hash(cfg), resume);
  std::map<std::pair<int, std::string>, double> stored;
  for (const auto& j : methods.records()) {
    stored[{j.at("test").get<int>(), j.at("method").get<std::string>()}] = j.at("kappa").get<double>();
  }

  struct Job {
    int test;
    std::size_t method;
  };
  std::vector<Job> jobs_list;
  for (int t : tests) {
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) jobs_list.push_back({t, m});
  }
  std::vector<double> kappa(jobs_list.size(), 0.0);
  std::mutex log_mutex;

  // Build caches up front so worker threads only read them.
  for (auto m : cfg.methods) {
    if (m == MethodKind::Csp) caches.broadband();
    if (m == MethodKind::Fbcsp) caches.fbcsp();
    if (m == MethodKind::Sisae) caches.sisae();
  }

  parallel_for(jobs_list.size(), jobs, [&](std::size_t i) {
    const Job& job = jobs_list[i];
    const MethodKind kind = cfg.methods[job.method];
    const std::string name(method_name(kind));
    if (auto it = stored.find({job.test, name}); it != stored.end()) {
      kappa[i] = it->second;
      return;
    }
    MethodSpec spec;
    spec.kind = kind;
    spec.fbcsp_k = cfg.fbcsp_k;
    nlohmann::json rec{{"test", job.test}, {"method", name}};
    if (kind == MethodKind::Sisae) {
      const std::size_t s = chosen.at(job.test);
      spec.layout = cfg.settings[s];
      spec.train = cfg.train;
      spec.train.seed = derive_seed(cfg.seed, 0x7e57, static_cast<std::uint64_t>(job.test));
      rec["setting"] = s + 1;
    }
    const MethodOutcome outcome = evaluate_method(caches, job.test, spec);
    kappa[i] = outcome.kappa;
    rec["kappa"] = outcome.kappa;
    rec["confusion"] = {outcome.confusion.tp, outcome.confusion.fp, outcome.confusion.fn, outcome.confusion.tn};
    rec["training"] = outcome.training_subjects;
    rec["n_features"] = outcome.n_features;
    methods.append(rec);
    std::lock_guard lock(log_mutex);
    log << name << " test=" << job.test << " kappa=" << outcome.kappa << '\n';
  });

  for (std::size_t ti = 0; ti < tests.size(); ++ti) {
    ComparisonRow row;
    row.subject = tests[ti];
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) row.kappa.push_back(kappa[ti * cfg.methods.size() + m]);
    if (has_sisae) row.sisae_setting = chosen.at(tests[ti]) + 1;
    report.table.rows.push_back(std::move(row));
  }
  report.tests = sisae_t_tests(report.table);
  report.table3 = table3_csv(report.table);
  report.ttests = ttest_csv(report.tests);

  write_text_file(cfg.out_dir / "table3.csv", report.table3);
  write_text_file(cfg.out_dir / "ttest.csv", report.ttests);
  if (!report.loso.empty()) write_text_file(cfg.out_dir / "table2.csv", table2_csv(report.loso));
  write_text_file(cfg.out_dir / "table1.csv", table1_csv(cfg.settings));
  write_text_file(cfg.out_dir / "report.md", markdown_report(stamp_of(cfg), cfg.settings, report.loso,
                                                            &report.table, report.tests));
  write_text_file(cfg.out_dir / "run.json", run_json(cfg, "compare").dump(2) + "\n");
  return report;
}

}  // namespace mibci
