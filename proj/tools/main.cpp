#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maryland/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Maryland model: spectra, separation predicates, CWB solves and LDT probes"};
  app.require_subcommand(1);

  std::string config;
  std::string run_dir;
  maryland::cli::Overrides o;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;

  for (const char* verb : {"spectrum", "separation", "solve", "ldt"}) {
    auto* sub = app.add_subcommand(verb);
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads");
  }
  auto* report = app.add_subcommand("report", "summarise a run directory");
  report->add_option("dir", run_dir, "run directory");
  report->add_option("--out", out, "run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : maryland::cli::kConfigError;
  }

  auto* sub = app.get_subcommands().front();
  auto given = [&](const char* name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) o.seed = seed;
  if (given("--out")) o.out = out;
  if (given("--threads")) o.threads = threads;
  if (sub->get_name() == "report" && !o.out) {
    if (run_dir.empty()) {
      std::cerr << "report needs a run directory\n";
      return maryland::cli::kConfigError;
    }
    o.out = run_dir;
  }
  return maryland::cli::run_command(sub->get_name(), config, o, std::cerr);
}
