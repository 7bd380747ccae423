#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "ooc/cli.hpp"
#include "ooc/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"out-of-cluster loss estimation via block bootstrap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ooc::kArtifactVersion);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  auto* config_opt = app.add_option("--config", config_path,
                                    "JSON run configuration");
  config_opt->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "override the run seed");
  auto* threads_opt =
      app.add_option("--threads", threads, "override the worker count");
  auto* out_opt = app.add_option("--out", out, "override the output directory");

  app.add_subcommand("simulate",
                     "generate a clustered dataset and its reference loss");
  app.add_subcommand("estimate",
                     "estimate out-of-cluster loss with the configured method");
  app.add_subcommand("sweep",
                     "sweep injected leakage levels and fit shape diagnostics");
  app.add_subcommand("test", "run the dependency-leakage t-test");
  app.add_subcommand("bench",
                     "time the solver stage across methods and sizes");
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad command line is a config error
  }

  ooc::CliOverrides overrides;
  if (seed_opt->count() > 0) overrides.seed = seed;
  if (threads_opt->count() > 0) overrides.threads = threads;
  if (out_opt->count() > 0) overrides.out = out;
  const std::string command = app.get_subcommands().front()->get_name();
  return ooc::run_cli(command, config_path, overrides);
}
