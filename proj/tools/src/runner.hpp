#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace fmt_engine::cli {

/// Process exit statuses. Stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitSchema = 3,       // bad config or invalid geometry input
  kExitNumeric = 4,      // domain or convergence error inside a task
  kExitIo = 5,           // unreadable input, unwritable output
  kExitValidation = 6,   // task ran but a task-level validation failed
};

struct RunRequest {
  Task task = Task::measures;
  std::string config_text;
  std::filesystem::path config_dir;
  std::optional<std::filesystem::path> out_dir;
  int threads = 1;
};

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::vector<std::string> notes;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> outputs;  // relative to out_dir, manifest excluded
  std::vector<Check> checks;
  std::string error;
};

/// Runs one task and writes its tables, validation.csv and manifest.json.
/// Never throws; failures are mapped to the exit codes above. Progress and
/// errors go to `log`.
RunOutcome run(const RunRequest& request, std::ostream& log);

/// Re-runs the task recorded in a manifest and compares the output hashes.
/// Exit status kExitValidation if any output differs.
RunOutcome rerun_manifest(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& out_dir,
                          int threads, std::ostream& log);

/// Shortest text that round-trips the double.
std::string format_number(double value);

std::string render_csv(const Table& table);
std::string render_json(const Table& table);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace fmt_engine::cli
