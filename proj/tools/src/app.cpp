#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "commands.hpp"

namespace pkgpulse::cli {

int run_cli(int argc, const char* const* argv, Console io) {
  CLI::App app{"Package ecosystem bug-urgency ranking and developer recommendation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pkgpulse 0.1.0");

  std::string raw, data, out, config, run_a, run_b, eval_out;
  std::optional<std::uint64_t> seed;

  auto* ingest = app.add_subcommand("ingest", "Normalize a raw Debian/Ubuntu archive snapshot");
  ingest->add_option("--data", raw, "Raw input directory")->required();
  ingest->add_option("--out", out, "Normalized output directory")->required();

  SynthConfig synth_cfg;
  std::string synth_mode = "coupled";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic normalized corpus");
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--releases,-T", synth_cfg.releases, "Number of releases (>= 8)");
  synth->add_option("--packages,-n", synth_cfg.packages, "Packages alive by the last release (>= 20)");
  synth->add_option("--developers", synth_cfg.developers, "Developer pool size (0: packages / 2)");
  synth->add_option("--coupling,-c", synth_cfg.coupling, "Weight on mean neighbor bugs at t-1");
  synth->add_option("--retention,-r", synth_cfg.retention, "Per-release developer retention probability");
  synth->add_option("--mode", synth_mode, "coupled or persistent")->check(CLI::IsMember({"coupled", "persistent"}));
  synth->add_option("--out", out, "Normalized output directory")->required();

  auto add_run = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--data", data, "Normalized dataset directory")->required();
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out, "Directory receiving run directories")->required();
    sub->add_option("--seed", seed, "Overrides the config seed");
    return sub;
  };
  auto* urgency = add_run("urgency", "Rank packages by predicted next-release bug count");
  auto* devrec = add_run("devrec", "Recommend developers for each package");
  auto* baseline = add_run("baseline", "Run an upper-bound, majority or sequence-of-sets baseline");

  auto* eval = app.add_subcommand("eval", "Compare two run directories");
  eval->add_option("run_a", run_a, "First run directory")->required();
  eval->add_option("run_b", run_b, "Second run directory")->required();
  eval->add_option("--out", eval_out, "Write the comparison here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*ingest) return cmd_ingest(raw, out, io);
  if (*synth) {
    synth_cfg.mode = synth_mode == "persistent" ? SynthMode::Persistent : SynthMode::Coupled;
    return cmd_synth(synth_cfg, out, io);
  }
  if (*urgency) return cmd_urgency(data, config, out, seed, io);
  if (*devrec) return cmd_devrec(data, config, out, seed, io);
  if (*baseline) return cmd_baseline(data, config, out, seed, io);
  if (*eval) return cmd_eval(run_a, run_b, eval_out.empty() ? std::nullopt : std::optional<fs::path>(eval_out), io);
  return kExitUsage;
}

}  // namespace pkgpulse::cli
