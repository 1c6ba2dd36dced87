#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "runner.hpp"

namespace cli = fmt_engine::cli;

namespace {

int threads_from_env() {
  const char* env = std::getenv("FMT_ENGINE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const int n = std::stoi(env);
    return n >= 1 ? n : 1;
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring FMT_ENGINE_THREADS='" << env << "'\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fmt-engine: fundamental measure theory for hard convex bodies"};
  app.set_version_flag("--version", std::string(FMT_ENGINE_VERSION));

  std::string task;
  std::string config_path;
  std::string out_dir;
  std::string manifest_path;
  int threads = 0;

  app.add_option("task", task,
                 "measures | weights-check | excluded-volume | virial | eos | profile | identity-suite");
  app.add_option("--config,-c", config_path, "TOML run configuration");
  app.add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads,-j", threads, "worker threads (default: FMT_ENGINE_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--manifest", manifest_path, "re-run the task recorded in a manifest.json and compare outputs");
  app.footer(
      "Exit status: 0 ok, 2 usage, 3 config or input validation, 4 numerical failure,\n"
      "5 file I/O, 6 a task-level validation failed.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (threads == 0) threads = threads_from_env();
  const std::optional<std::filesystem::path> out =
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);

  if (!manifest_path.empty()) {
    if (!task.empty() || !config_path.empty()) {
      std::cerr << "error: --manifest takes neither a task nor --config\n";
      return cli::kExitUsage;
    }
    return cli::rerun_manifest(manifest_path, out, threads, std::cerr).exit_code;
  }
  if (task.empty() || config_path.empty()) {
    std::cerr << "error: need <task> and --config (see --help)\n";
    return cli::kExitUsage;
  }

  cli::RunRequest req;
  try {
    req.task = cli::parse_task(task);
  } catch (const cli::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: " << config_path << ": cannot open\n";
    return cli::kExitIo;
  }
  std::ostringstream text;
  text << in.rdbuf();
  req.config_text = text.str();
  req.config_dir = std::filesystem::path(config_path).parent_path();
  if (req.config_dir.empty()) req.config_dir = ".";
  req.out_dir = out;
  req.threads = threads;
  return cli::run(req, std::cerr).exit_code;
}
