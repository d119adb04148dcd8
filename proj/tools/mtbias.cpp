// mtbias: command-line driver for the probe / translate / analyze pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mtbias/pipeline.hpp"

#ifndef MTBIAS_DEFAULT_CONFIG
#define MTBIAS_DEFAULT_CONFIG "data/sample_run.ini"
#endif

namespace pl = mtbias::pipeline;

namespace {

struct Flags {
  std::string config = MTBIAS_DEFAULT_CONFIG;
  bool mock = false;
  bool cache_only = false;
  bool resume = false;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::string cache;
  std::string out;
  std::string denominator;
};

const char* help_for(const std::string& name) {
  if (name == "corpus-build") return "match title lists and validate corpus inputs";
  if (name == "probes") return "generate probe sentences";
  if (name == "translate") return "translate probes with the configured backends";
  if (name == "analyze") return "detect gender signals and compute statistics";
  if (name == "report") return "render tables, summary and figures";
  return "run every stage in order";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gender-bias probes for Turkish/English machine translation"};
  app.set_version_flag("--version", MTBIAS_VERSION);
  app.require_subcommand(1, 1);
  Flags f;

  for (const auto& name : pl::command_names()) {
    auto* cmd = app.add_subcommand(name, help_for(name));
    cmd->add_option("--config", f.config, "run configuration file")->capture_default_str();
    cmd->add_flag("--mock", f.mock, "use the deterministic mock backends");
    cmd->add_option("--seed", f.seed, "seed for mock backends");
    cmd->add_option("--cache", f.cache, "translation cache (JSONL)");
    cmd->add_flag("--cache-only", f.cache_only, "never call live backends; misses become failed records");
    cmd->add_option("--parallelism", f.parallelism, "concurrent requests per backend")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "run output directory");
    cmd->add_flag("--resume", f.resume, "skip stages whose inputs are unchanged");
    cmd->add_option("--denominator", f.denominator, "female-share denominator")
        ->check(CLI::IsMember({"gendered", "all"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pl::kSuccess : pl::kUsage;
  }

  auto* cmd = app.get_subcommands().front();
  pl::Overrides ov;
  ov.mock = f.mock;
  ov.cache_only = f.cache_only;
  ov.resume = f.resume;
  if (cmd->count("--seed")) ov.seed = f.seed;
  if (cmd->count("--parallelism")) ov.parallelism = f.parallelism;
  if (cmd->count("--cache")) ov.cache = f.cache;
  if (cmd->count("--out")) ov.out = f.out;
  if (cmd->count("--denominator")) ov.denominator = f.denominator;
  return pl::run_command(cmd->get_name(), f.config, ov);
}
