#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code{-1};
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mibci_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunResult run(const std::string& args, const fs::path& dir, const std::string& env = {}) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = env + " \"" MIBCI_CLI_PATH "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  out << j.dump(2);
}

nlohmann::json small_experiment() {
  return {{"synth", {{"n_subjects", 4}, {"n_channels", 6}, {"trials_per_class", 10}, {"trial_seconds", 1.0}}},
          {"seed", 5},
          {"bank", "fbcsp"},
          {"settings", {{{"ae_nodes", {5, 3, 5}}, {"clf_nodes", {3, 1}}},
                        {{"ae_nodes", {8, 4, 8}}, {"clf_nodes", {4, 1}}}}},
          {"train", {{"joint_epochs", 3}, {"clf_epochs", 5}}}};
}

}  // namespace

TEST(CliSynth, DefaultSpecWritesNineSubjects) {
  const fs::path dir = scratch("synth_default");
  const RunResult r = run("synth --seed 1 --out \"" + (dir / "study").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(dir / "study" / "manifest.json"));
  EXPECT_EQ(manifest["format"], "MIT1");
  EXPECT_EQ(manifest["subjects"].size(), 9u);
  EXPECT_TRUE(fs::exists(dir / "study" / "S09_test.mit"));
}

TEST(CliSynth, SpecFileAndByteIdenticalReruns) {
  const fs::path dir = scratch("synth_spec");
  write_json(dir / "spec.json", {{"n_subjects", 3}, {"trials_per_class", 4}, {"trial_seconds", 0.5}});
  const std::string spec = " --spec \"" + (dir / "spec.json").string() + "\"";
  ASSERT_EQ(run("synth --seed 9" + spec + " --out \"" + (dir / "a").string() + "\"", dir).code, 0);
  ASSERT_EQ(run("synth --seed 9" + spec + " --out \"" + (dir / "b").string() + "\"", dir).code, 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["subjects"].size(), 3u);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename())) << entry.path();
  }
}

TEST(CliBank, InspectFullBank) {
  const fs::path dir = scratch("bank");
  const RunResult r = run("bank inspect --bank full --fs 250", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "index,low_hz,high_hz,gain_low_db,gain_high_db,max_pole_radius,ok");
  int rows = 0, ok = 0;
  while (std::getline(lines, line)) {
    ++rows;
    ok += line.back() == '1';
  }
  EXPECT_EQ(rows, 666);
  EXPECT_EQ(ok, 666);
  EXPECT_NE(run("bank inspect --bank wide", dir).code, 0);
}

TEST(CliErrors, ExitCodes) {
  const fs::path dir = scratch("errors");
  auto cfg = small_experiment();
  cfg.erase("synth");
  cfg["study"] = (dir / "nowhere" / "manifest.json").string();
  write_json(dir / "missing_study.json", cfg);
  RunResult r = run("loso --config \"" + (dir / "missing_study.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("missing file"), std::string::npos) << r.err;

  cfg = small_experiment();
  cfg.erase("seed");
  write_json(dir / "no_seed.json", cfg);
  r = run("loso --config \"" + (dir / "no_seed.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos);

  cfg = small_experiment();
  cfg["study"] = "x";
  write_json(dir / "two_sources.json", cfg);
  EXPECT_EQ(run("compare --config \"" + (dir / "two_sources.json").string() + "\"", dir).code, 2);

  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run("loso --config \"" + (dir / "broken.json").string() + "\"", dir).code, 2);
  EXPECT_EQ(run("loso --config \"" + (dir / "no_seed.json").string() + "\" --bank wide", dir).code, 2);
  EXPECT_EQ(run("frobnicate", dir).code, 2);

  cfg = small_experiment();
  cfg["synth"]["amplitude_uv"] = 0.0;  // all-zero trials: covariance has no trace
  write_json(dir / "silent.json", cfg);
  r = run("compare --config \"" + (dir / "silent.json").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST(CliLoso, TableAndDeterministicRerun) {
  const fs::path dir = scratch("loso");
  write_json(dir / "cfg.json", small_experiment());
  const std::string base = "loso --config \"" + (dir / "cfg.json").string() + "\" --out \"";
  const RunResult a = run(base + (dir / "a").string() + "\" --jobs 1", dir);
  ASSERT_EQ(a.code, 0) << a.err;
  const RunResult b = run(base + (dir / "b").string() + "\"", dir, "MI_PIPELINE_JOBS=2");
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string table = slurp(dir / "a" / "table2.csv");
  EXPECT_EQ(table, a.out);
  EXPECT_EQ(table, slurp(dir / "b" / "table2.csv"));
  EXPECT_EQ(slurp(dir / "a" / "report.md"), slurp(dir / "b" / "report.md"));
  EXPECT_EQ(slurp(dir / "a" / "run.json"), slurp(dir / "b" / "run.json"));

  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "subject,setting_1,setting_2,mean,std,best_setting");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);

  std::ifstream folds(dir / "a" / "folds.jsonl");
  int n_folds = 0;
  for (std::string l; std::getline(folds, l);) {
    const auto j = nlohmann::json::parse(l);
    EXPECT_EQ(j["kappa"].size(), 2u);
    EXPECT_EQ(j["training"].size(), 2u);
    ++n_folds;
  }
  EXPECT_EQ(n_folds, 12);

  // --seed overrides the file and changes the hash.
  const RunResult c = run(base + (dir / "c").string() + "\" --seed 6", dir);
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(nlohmann::json::parse(slurp(dir / "c" / "run.json"))["config_hash"],
            nlohmann::json::parse(slurp(dir / "a" / "run.json"))["config_hash"]);
}

TEST(CliLoso, ResumeReusesStoredFolds) {
  const fs::path dir = scratch("resume");
  write_json(dir / "cfg.json", small_experiment());
  const std::string cmd = "loso --config \"" + (dir / "cfg.json").string() + "\" --out \"" + (dir / "o").string() + "\"";
  ASSERT_EQ(run(cmd, dir).code, 0);
  const std::string full = slurp(dir / "o" / "table2.csv");

  // Keep the first five folds and a torn sixth line, as after an interruption.
  std::ifstream in(dir / "o" / "folds.jsonl");
  std::vector<std::string> kept;
  for (std::string l; std::getline(in, l) && kept.size() < 5;) kept.push_back(l);
  in.close();
  {
    std::ofstream out(dir / "o" / "folds.jsonl", std::ios::trunc);
    for (const auto& l : kept) out << l << '\n';
    out << "{\"hash\":\"trunc";
  }
  fs::remove(dir / "o" / "table2.csv");
  const RunResult r = run(cmd + " --resume", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("resuming with 5 stored folds"), std::string::npos) << r.err;
  EXPECT_EQ(slurp(dir / "o" / "table2.csv"), full);
}

TEST(CliCompare, TablesTTestsAndReport) {
  const fs::path dir = scratch("compare");
  auto cfg = small_experiment();
  cfg["sisae_setting"] = 1;
  write_json(dir / "cfg.json", cfg);
  const std::string base = "compare --config \"" + (dir / "cfg.json").string() + "\" --out \"";
  const RunResult a = run(base + (dir / "a").string() + "\"", dir);
  ASSERT_EQ(a.code, 0) << a.err;
  const RunResult b = run(base + (dir / "b").string() + "\" --jobs 3", dir);
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"table3.csv", "ttest.csv", "report.md", "run.json", "table1.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const std::string table = slurp(dir / "a" / "table3.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "subject,CSP,FBCSP,SISAE,sisae_setting");
  EXPECT_NE(table.find("\nAvg.,"), std::string::npos);
  const std::string tt = slurp(dir / "a" / "ttest.csv");
  EXPECT_NE(tt.find("SISAE vs CSP"), std::string::npos);
  EXPECT_NE(tt.find("SISAE vs FBCSP"), std::string::npos);
  const std::string md = slurp(dir / "a" / "report.md");
  EXPECT_NE(md.find("seed: 5"), std::string::npos);
  EXPECT_NE(md.find("config hash"), std::string::npos);
  EXPECT_NE(md.find("version"), std::string::npos);
}

TEST(CliCompare, CrossValidatedSettingSelection) {
  const fs::path dir = scratch("compare_cv");
  auto cfg = small_experiment();
  cfg["methods"] = {"SISAE"};
  cfg["test_subjects"] = {2};
  write_json(dir / "cfg.json", cfg);
  const RunResult r =
      run("compare --config \"" + (dir / "cfg.json").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table2 = slurp(dir / "o" / "table2.csv");
  const auto table3 = slurp(dir / "o" / "table3.csv");
  // The chosen setting is the cross-validation winner.
  const std::string row2 = table2.substr(table2.find('\n') + 1);
  const std::string best = row2.substr(row2.rfind(',') + 1, 1);
  const std::string row3 = table3.substr(table3.find('\n') + 1);
  EXPECT_EQ(row3.substr(0, row3.find('\n')).back(), best[0]);
}
