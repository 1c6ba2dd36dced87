#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fmt_engine/error.hpp"
#include "fmt_engine/fmt_model.hpp"
#include "fmt_engine/geometry.hpp"

namespace fmt_engine::cli {

inline constexpr const char* kSchema = "fmt-engine/1";

enum class Task { measures, weights_check, excluded_volume, virial, eos, profile, identity_suite };

std::string task_name(Task task);
/// Throws SchemaError for unknown names.
Task parse_task(const std::string& name);

/// Invalid run configuration; the message starts with the offending field path.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct BodySpec {
  std::string type;  // sphere, spheroid, icosphere, mesh
  double radius = 1.0;
  double equatorial = 1.0;
  double polar = 1.0;
  int level = 3;
  std::filesystem::path path;
};

struct McSpec {
  std::uint64_t n_samples = 0;
  std::optional<std::uint64_t> seed;
  int resolution = 4096;
  int max_rank = 2;
};

struct GridSpec {
  std::optional<double> dz;  // default R / 100
  double length = 20.0;      // in units of length, not diameters
};

struct ProfileSpec {
  double radius = 0.5;
  std::vector<double> eta;
  double mixing = 0.05;
  double tolerance = 1e-8;
  long max_iterations = 100'000;
};

struct OutputSpec {
  std::string format = "csv";  // csv or json
  std::filesystem::path dir;
};

struct RunConfig {
  std::optional<Task> task;
  std::vector<BodySpec> bodies;
  FreeEnergyModel model = FreeEnergyModel::rosenfeld_original();
  McSpec mc;
  GridSpec grid;
  std::vector<double> eos_eta;
  ProfileSpec profile;
  int weights_resolution = 8192;
  OutputSpec output;
  std::filesystem::path base_dir;
};

/// Parse and validate TOML text. Relative paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Task-specific requirements (bodies present, explicit seed for MC tasks...).
void validate_for_task(const RunConfig& config, Task task);

ConvexBody build_body(const BodySpec& spec);

/// Coefficient table from JSON text with the CoefficientTable field names.
CoefficientTable coefficients_from_json(const std::string& json_text);
std::string coefficients_to_json(const CoefficientTable& table);

}  // namespace fmt_engine::cli
