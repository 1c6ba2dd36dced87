#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "config.hpp"
#include "runner.hpp"

using namespace fmt_engine;
using namespace fmt_engine::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fmt_engine_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

RunOutcome run_text(Task task, const std::string& text, const fs::path& out, int threads = 1) {
  std::ostringstream log;
  RunRequest r;
  r.task = task;
  r.config_text = text;
  r.config_dir = out;
  r.out_dir = out;
  r.threads = threads;
  return run(r, log);
}

int shell(const std::string& args) {
  const int status = std::system((std::string(FMT_ENGINE_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kVirialSmall = R"(schema = "fmt-engine/1"
[[bodies]]
type = "sphere"
radius = 1.0
[mc]
n_samples = 100000
seed = 42
)";

}  // namespace

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse_config(R"(schema = "fmt-engine/1"
task = "profile"
[model]
variant = "tarazona"
[grid]
dz = 0.01
length = 12.0
[profile]
eta_min = 0.1
eta_max = 0.3
eta_step = 0.1
[output]
format = "json"
dir = "out"
)",
                                   "/base");
  ASSERT_TRUE(c.task.has_value());
  EXPECT_EQ(*c.task, Task::profile);
  EXPECT_EQ(c.model.variant(), ModelVariant::tarazona_tensor);
  EXPECT_EQ(c.profile.eta.size(), 3u);
  EXPECT_NEAR(c.profile.eta[2], 0.3, 1e-12);
  EXPECT_EQ(c.output.dir, fs::path("/base/out"));
  EXPECT_EQ(c.output.format, "json");
}

TEST(Config, SchemaErrorsNameTheField) {
  const std::pair<const char*, const char*> cases[] = {
      {"task = \"eos\"", "schema"},
      {"schema = \"fmt-engine/0\"", "schema"},
      {"schema = \"fmt-engine/1\"\n[mc]\nn_sample = 5", "mc.n_sample"},
      {"schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"cube\"", "bodies[0].type"},
      {"schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"sphere\"\nradius = -1", "bodies[0].radius"},
      {"schema = \"fmt-engine/1\"\n[profile]\neta = [0.1, 1.2]", "profile.eta[1]"},
      {"schema = \"fmt-engine/1\"\n[model]\nvariant = \"rosenfeld\"\n[model.coefficients]\nchi = 1.0",
       "model.coefficients"},
      {"schema = \"fmt-engine/1\"\n[output]\nformat = \"xml\"", "output.format"},
  };
  for (const auto& [text, field] : cases) {
    try {
      parse_config(text, ".");
      ADD_FAILURE() << "accepted: " << text;
    } catch (const SchemaError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field, 0), 0u) << e.what();
    }
  }
}

TEST(Config, MonteCarloTasksNeedSeed) {
  const RunConfig c = parse_config("schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"sphere\"\n[mc]\nn_samples = 100000\n", ".");
  try {
    validate_for_task(c, Task::virial);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("mc.seed", 0), 0u);
  }
  EXPECT_NO_THROW(validate_for_task(c, Task::measures));
}

TEST(Config, CoefficientJsonRoundTrip) {
  const CoefficientTable t = CoefficientTable::tarazona();
  const CoefficientTable u = coefficients_from_json(coefficients_to_json(t));
  EXPECT_EQ(u.tr_s2_cubed, t.tr_s2_cubed);
  EXPECT_EQ(u.s1_s2_s1, t.s1_s2_s1);
  EXPECT_EQ(u.dimension, 3);
  EXPECT_THROW(coefficients_from_json("{\"bogus\": 1}"), SchemaError);
}

TEST(Run, MeasuresSphereRow) {
  const fs::path out = scratch("measures");
  const RunOutcome o =
      run_text(Task::measures, "schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"sphere\"\nradius = 1.0\n", out);
  ASSERT_EQ(o.exit_code, kExitOk) << o.error;
  std::istringstream csv(slurp(out / "measures.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "body,V,S,M,chi,angle_defect_over_2pi");
  double v, s, m;
  int chi;
  ASSERT_EQ(std::sscanf(row.c_str(), "sphere(R=1),%lf,%lf,%lf,%d", &v, &s, &m, &chi), 4) << row;
  EXPECT_NEAR(v, 4.18879, 1e-5);
  EXPECT_NEAR(s, 12.56637, 1e-5);
  EXPECT_NEAR(m, 12.56637, 1e-5);
  EXPECT_EQ(chi, 2);
}

TEST(Run, EosSweepIsMonotoneAndMatchesClosedForm) {
  const fs::path out = scratch("eos");
  const RunOutcome o = run_text(Task::eos, R"(schema = "fmt-engine/1"
[[bodies]]
type = "sphere"
radius = 0.5
[eos]
eta_min = 0.05
eta_max = 0.45
eta_step = 0.05
)",
                                out);
  ASSERT_EQ(o.exit_code, kExitOk) << o.error;
  std::istringstream csv(slurp(out / "eos.csv"));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  double previous = 0.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    double eta, rho, p, z, mu, zref;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &eta, &rho, &p, &z, &mu, &zref), 6);
    EXPECT_GT(z, previous);
    EXPECT_NEAR(z, (1 + eta + eta * eta) / std::pow(1 - eta, 3), 1e-10 * z);
    previous = z;
    ++rows;
  }
  EXPECT_EQ(rows, 9);
}

TEST(Run, VirialIsByteIdenticalAcrossRunsAndThreads) {
  const fs::path a = scratch("virial_a"), b = scratch("virial_b");
  ASSERT_EQ(run_text(Task::virial, kVirialSmall, a, 1).exit_code, kExitOk);
  ASSERT_EQ(run_text(Task::virial, kVirialSmall, b, 3).exit_code, kExitOk);
  EXPECT_EQ(slurp(a / "virial.csv"), slurp(b / "virial.csv"));
  EXPECT_EQ(slurp(a / "validation.csv"), slurp(b / "validation.csv"));
}

TEST(Run, ManifestReproducesOutputs) {
  const fs::path a = scratch("manifest");
  ASSERT_EQ(run_text(Task::virial, kVirialSmall, a).exit_code, kExitOk);
  const std::string manifest = slurp(a / "manifest.json");
  EXPECT_NE(manifest.find("\"config_hash\": \"" + fnv1a_hex(kVirialSmall) + "\""), std::string::npos);
  EXPECT_NE(manifest.find("\"version\""), std::string::npos);
  EXPECT_NE(manifest.find("\"wall_time_s\""), std::string::npos);
  std::ostringstream log;
  const RunOutcome o = rerun_manifest(a / "manifest.json", a / "again", 2, log);
  EXPECT_EQ(o.exit_code, kExitOk) << log.str();
  EXPECT_EQ(slurp(a / "virial.csv"), slurp(a / "again" / "virial.csv"));
}

TEST(Run, JsonOutputFormat) {
  const fs::path out = scratch("json");
  const RunOutcome o = run_text(
      Task::measures, "schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"sphere\"\n[output]\nformat = \"json\"\n", out);
  ASSERT_EQ(o.exit_code, kExitOk);
  const std::string j = slurp(out / "measures.json");
  EXPECT_NE(j.find("\"records\""), std::string::npos);
  EXPECT_NE(j.find("\"angle_defect_over_2pi\": null"), std::string::npos);
}

TEST(Run, TaskMismatchIsSchemaError) {
  const fs::path out = scratch("mismatch");
  EXPECT_EQ(run_text(Task::eos, "schema = \"fmt-engine/1\"\ntask = \"virial\"\n", out).exit_code, kExitSchema);
}

TEST(Run, NumericErrorsCarryTaskContext) {
  const fs::path out = scratch("numeric");
  const RunOutcome o = run_text(Task::profile, R"(schema = "fmt-engine/1"
[grid]
length = 5.0
[profile]
eta = [0.2]
)",
                                out);
  EXPECT_EQ(o.exit_code, kExitNumeric);
  EXPECT_EQ(o.error.rfind("task profile:", 0), 0u) << o.error;
}

TEST(Run, MissingMeshIsIoError) {
  const fs::path out = scratch("mesh");
  EXPECT_EQ(run_text(Task::measures, "schema = \"fmt-engine/1\"\n[[bodies]]\ntype = \"mesh\"\npath = \"nope.off\"\n", out)
                .exit_code,
            kExitIo);
}

TEST(Run, FailedValidationExitsSix) {
  const fs::path out = scratch("validation");
  const RunOutcome o = run_text(Task::weights_check, R"(schema = "fmt-engine/1"
[[bodies]]
type = "spheroid"
equatorial = 1.0
polar = 3.0
[weights]
resolution = 32
)",
                                out);
  EXPECT_EQ(o.exit_code, kExitValidation);
}

TEST(Executable, ExitStatuses) {
  const fs::path out = scratch("exe");
  const std::string cfg = std::string(FMT_ENGINE_CONFIGS);
  EXPECT_EQ(shell("measures --config " + cfg + "/measures.toml --out " + out.string()), kExitOk);
  EXPECT_EQ(shell(""), kExitUsage);
  EXPECT_EQ(shell("unknown-task --config " + cfg + "/measures.toml"), kExitUsage);
  EXPECT_EQ(shell("measures --config /nonexistent.toml"), kExitIo);
  EXPECT_EQ(shell("eos --config " + cfg + "/measures.toml --out " + out.string()), kExitSchema);
  EXPECT_EQ(shell("--manifest " + (out / "manifest.json").string() + " --out " + (out / "rerun").string()), kExitOk);
}

TEST(Executable, ThreadsFromEnvironment) {
  const fs::path a = scratch("env_a"), b = scratch("env_b");
  std::ofstream(a / "v.toml") << kVirialSmall;
  EXPECT_EQ(shell("virial --config " + (a / "v.toml").string() + " --out " + a.string()), kExitOk);
  setenv("FMT_ENGINE_THREADS", "2", 1);
  EXPECT_EQ(shell("virial --config " + (a / "v.toml").string() + " --out " + b.string()), kExitOk);
  unsetenv("FMT_ENGINE_THREADS");
  EXPECT_EQ(slurp(a / "virial.csv"), slurp(b / "virial.csv"));
  EXPECT_NE(slurp(b / "manifest.json").find("\"threads\": 2"), std::string::npos);
}
