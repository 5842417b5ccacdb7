// clonekit <command> --task <file.json> [--set key=value ...] [--out <path>]
//          [--format json|csv] [--tol <real>] [--seed <int>]

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "clonekit/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace ck = clonekit::cli;
  CLI::App app{"Probabilistic cloning machines with supplementary information"};
  app.set_version_flag("--version", std::string("clonekit ") + ck::tool_version);

  ck::RunOptions opts;
  std::string format;
  double tol = 0.0;
  std::uint64_t seed = 0;
  app.add_option("command", opts.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(ck::command_names()));
  app.add_option("--task", opts.task_path, "Task file (JSON); a previous report also works")
      ->required();
  app.add_option("--set", opts.overrides, "Override a task field, key=value (dotted keys)")
      ->take_all();
  auto* out_opt = app.add_option("--out", "Write the report here instead of stdout");
  auto* fmt_opt = app.add_option("--format", format, "json or csv (csv: sweep only)")
                      ->check(CLI::IsMember({"json", "csv"}));
  auto* tol_opt = app.add_option("--tol", tol, "Numerical tolerance");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ck::exit_validation;
  }
  if (*out_opt) opts.out_path = out_opt->as<std::string>();
  if (*fmt_opt) opts.format = format;
  if (*tol_opt) opts.tol = tol;
  if (*seed_opt) opts.seed = seed;
  if (const char* env = std::getenv("CLONEKIT_TOL")) opts.env_tol = std::string(env);
  return ck::run(opts, std::cout, std::cerr);
}
