#include "mibci/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::string> bank;
  bool resume{false};
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads (default: MI_PIPELINE_JOBS or all cores)");
  cmd->add_option("--bank", f.bank, "filter bank for SISAE/LOSO")
      ->check(CLI::IsMember({"full", "fbcsp", "broadband"}));
  cmd->add_flag("--resume", f.resume, "reuse per-fold results of an interrupted run");
}

mibci::ExperimentConfig load(const CommonFlags& f) {
  mibci::ConfigOverrides o;
  o.seed = f.seed;
  if (f.out) o.out_dir = *f.out;
  o.bank = f.bank;
  o.jobs = f.jobs;
  return mibci::load_experiment_config(f.config, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subject-independent motor-imagery BCI pipeline"};
  app.set_version_flag("--version", std::string(mibci::library_version()));
  app.require_subcommand(1);

  std::optional<std::string> synth_spec;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic study");
  synth->add_option("--config,--spec", synth_spec, "synthetic spec (JSON); default spec if omitted");
  synth->add_option("--seed", synth_seed, "generator seed")->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  std::string bank_name = "full";
  double bank_fs = 250.0;
  auto* bank = app.add_subcommand("bank", "filter bank tools");
  bank->require_subcommand(1);
  auto* inspect = bank->add_subcommand("inspect", "print the bands and their -3 dB verification as CSV");
  inspect->add_option("--bank", bank_name, "bank")->check(CLI::IsMember({"full", "fbcsp", "broadband"}));
  inspect->add_option("--fs", bank_fs, "sampling rate (Hz)");

  CommonFlags loso_flags, compare_flags;
  auto* loso = app.add_subcommand("loso", "LOSO cross-validation over the network settings");
  add_common(loso, loso_flags);
  auto* compare = app.add_subcommand("compare", "CSP / FBCSP / SISAE on held-out subjects");
  add_common(compare, compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mibci::kExitConfig;
  }

  return mibci::run_guarded(
      [&] {
        if (*synth) {
          std::optional<std::filesystem::path> spec;
          if (synth_spec) spec = *synth_spec;
          mibci::cmd_synth(spec, synth_seed, synth_out);
        } else if (*inspect) {
          mibci::cmd_bank_inspect(bank_name, bank_fs, std::cout);
        } else if (*loso) {
          const auto report = mibci::cmd_loso(load(loso_flags), loso_flags.resume, std::cerr);
          std::cout << report.table2;
        } else if (*compare) {
          const auto report = mibci::cmd_compare(load(compare_flags), compare_flags.resume, std::cerr);
          std::cout << report.table3 << '\n' << report.ttests;
        }
      },
      std::cerr);
}
