#include "mibci/experiment.hpp"

#include "mibci/errors.hpp"
#include "mibci/interchange.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#ifndef MIBCI_VERSION
#define MIBCI_VERSION "0.0.0"
#endif

namespace mibci {

std::string_view library_version() { return MIBCI_VERSION; }

namespace {

TrainConfig parse_train(const nlohmann::json& j, TrainConfig t) {
  t.alpha = j.value("alpha", t.alpha);
  t.beta = j.value("beta", t.beta);
  t.l1 = j.value("l1", t.l1);
  t.l2 = j.value("l2", t.l2);
  t.lr = j.value("lr", t.lr);
  t.batch = j.value("batch", t.batch);
  t.joint_epochs = j.value("joint_epochs", t.joint_epochs);
  t.clf_epochs = j.value("clf_epochs", t.clf_epochs);
  return t;
}

nlohmann::json train_json(const TrainConfig& t) {
  return {{"alpha", t.alpha}, {"beta", t.beta}, {"l1", t.l1}, {"l2", t.l2}, {"lr", t.lr},
          {"batch", t.batch}, {"joint_epochs", t.joint_epochs}, {"clf_epochs", t.clf_epochs}};
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const ConfigOverrides& overrides,
                                         const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    const bool has_study = doc.contains("study");
    const bool has_synth = doc.contains("synth");
    if (has_study == has_synth) throw ConfigError("config needs exactly one of 'study' or 'synth'");
    if (has_study) {
      std::filesystem::path p = doc["study"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.study_path = p;
    } else {
      cfg.synth = synth_spec_from_json(doc["synth"]);
    }

    if (overrides.seed) {
      cfg.seed = *overrides.seed;
    } else if (doc.contains("seed")) {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    } else {
      throw ConfigError("seed is mandatory (config 'seed' or --seed)");
    }
    cfg.synth_seed = doc.value("synth_seed", cfg.seed);

    if (doc.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : doc["methods"]) cfg.methods.push_back(parse_method(m.get<std::string>()));
      if (cfg.methods.empty()) throw ConfigError("method list is empty");
    }
    if (doc.contains("settings")) {
      cfg.settings.clear();
      for (const auto& s : doc["settings"]) {
        cfg.settings.push_back({s.at("ae_nodes").get<std::vector<int>>(), s.at("clf_nodes").get<std::vector<int>>()});
      }
      if (cfg.settings.empty()) throw ConfigError("settings list is empty");
    }
    if (doc.contains("train")) cfg.train = parse_train(doc["train"], cfg.train);
    cfg.train.seed = cfg.seed;
    if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();
    cfg.bank = doc.value("bank", cfg.bank);
    cfg.fbcsp_k = doc.value("fbcsp_k", cfg.fbcsp_k);
    if (doc.contains("sisae_setting")) {
      const auto& s = doc["sisae_setting"];
      if (s.is_string()) {
        if (s.get<std::string>() != "cv") throw ConfigError("sisae_setting must be \"cv\" or 1..N");
      } else {
        cfg.sisae_setting = s.get<std::size_t>();
      }
    }
    if (doc.contains("test_subjects")) cfg.test_subjects = doc["test_subjects"].get<std::vector<int>>();
    cfg.jobs = doc.value("jobs", cfg.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.bank) cfg.bank = *overrides.bank;
  if (overrides.jobs) cfg.jobs = *overrides.jobs;

  bank_by_name(cfg.bank);
  validate_train_config(cfg.train);
  for (const auto& s : cfg.settings) {
    // Widths only; the bottleneck check needs the feature dimension and runs later.
    make_network_config(s, std::numeric_limits<int>::max());
  }
  if (cfg.sisae_setting && (*cfg.sisae_setting < 1 || *cfg.sisae_setting > cfg.settings.size())) {
    throw ConfigError("sisae_setting out of range");
  }
  if (cfg.fbcsp_k < 1) throw ConfigError("fbcsp_k must be >= 1");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(doc, overrides, path.parent_path());
}

nlohmann::json canonical_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  if (cfg.study_path) j["study"] = cfg.study_path->lexically_normal().string();
  if (cfg.synth) {
    j["synth"] = synth_spec_to_json(*cfg.synth);
    j["synth_seed"] = cfg.synth_seed;
  }
  j["seed"] = cfg.seed;
  auto methods = nlohmann::json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(method_name(m)));
  j["methods"] = methods;
  auto settings = nlohmann::json::array();
  for (const auto& s : cfg.settings) settings.push_back({{"ae_nodes", s.ae_nodes}, {"clf_nodes", s.clf_nodes}});
  j["settings"] = settings;
  j["train"] = train_json(cfg.train);
  j["bank"] = cfg.bank;
  j["fbcsp_k"] = cfg.fbcsp_k;
  if (cfg.sisae_setting) j["sisae_setting"] = *cfg.sisae_setting;
  else j["sisae_setting"] = "cv";
  j["test_subjects"] = cfg.test_subjects;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StudyDataset load_experiment_study(const ExperimentConfig& cfg) {
  if (cfg.study_path) return load_study(*cfg.study_path);
  return synth_study(*cfg.synth, cfg.synth_seed);
}

std::vector<int> resolve_test_subjects(const ExperimentConfig& cfg, const StudyDataset& study) {
  if (cfg.test_subjects.empty()) return study.subject_ids();
  for (int id : cfg.test_subjects) {
    try {
      study.subject_index(id);
    } catch (const DataError&) {
      throw ConfigError("test subject " + std::to_string(id) + " not in study");
    }
  }
  return cfg.test_subjects;
}

}  // namespace mibci
