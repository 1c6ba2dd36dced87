#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "fmt_engine/mesh.hpp"
#include "fmt_engine/mesh_io.hpp"

namespace fmt_engine::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) { throw SchemaError(path + ": " + why); }

// Rejects keys outside `allowed` so that typos do not pass silently.
void check_keys(const toml::table& table, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, node] : table) {
    if (!allowed.count(std::string(key.str()))) fail(path.empty() ? std::string(key.str()) : path + "." + std::string(key.str()), "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const toml::table* sub_table(const toml::table& root, const std::string& key) {
  const toml::node* node = root.get(key);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) fail(key, "expected a table");
  return node->as_table();
}

std::optional<double> get_number(const toml::table& t, const std::string& path, const std::string& key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (auto v = node->value<double>()) {
    if (!std::isfinite(*v)) fail(join(path, key), "must be finite");
    return *v;
  }
  fail(join(path, key), "expected a number");
}

double positive(const toml::table& t, const std::string& path, const std::string& key, double fallback) {
  const double v = get_number(t, path, key).value_or(fallback);
  if (!(v > 0.0)) fail(join(path, key), "must be > 0");
  return v;
}

std::optional<std::int64_t> get_integer(const toml::table& t, const std::string& path, const std::string& key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (!node->is_integer()) fail(join(path, key), "expected an integer");
  return node->as_integer()->get();
}

std::optional<std::string> get_string(const toml::table& t, const std::string& path, const std::string& key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (!node->is_string()) fail(join(path, key), "expected a string");
  return node->as_string()->get();
}

std::vector<double> number_list(const toml::table& t, const std::string& path, const std::string& key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return {};
  if (const auto* arr = node->as_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      auto v = (*arr)[i].value<double>();
      if (!v || !std::isfinite(*v)) fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a finite number");
      out.push_back(*v);
    }
    return out;
  }
  if (auto v = node->value<double>()) return {*v};
  fail(join(path, key), "expected a number or an array of numbers");
}

// eta = [...] or eta_min/eta_max/eta_step.
std::vector<double> eta_values(const toml::table& t, const std::string& path) {
  std::vector<double> eta = number_list(t, path, "eta");
  const auto lo = get_number(t, path, "eta_min");
  const auto hi = get_number(t, path, "eta_max");
  const auto step = get_number(t, path, "eta_step");
  if (lo || hi || step) {
    if (!eta.empty()) fail(join(path, "eta"), "give either eta or eta_min/eta_max/eta_step");
    if (!lo || !hi || !step) fail(join(path, "eta_step"), "eta_min, eta_max and eta_step go together");
    if (!(*step > 0.0) || *hi < *lo) fail(join(path, "eta_step"), "need eta_step > 0 and eta_max >= eta_min");
    const long n = std::lround(std::floor((*hi - *lo) / *step + 1e-9));
    for (long i = 0; i <= n; ++i) eta.push_back(*lo + i * *step);
  }
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] >= 0.0 && eta[i] < 1.0)) fail(join(path, "eta") + "[" + std::to_string(i) + "]", "must satisfy 0 <= eta < 1");
  }
  return eta;
}

BodySpec parse_body(const toml::table& t, const std::string& path, const std::filesystem::path& base) {
  BodySpec b;
  const auto type = get_string(t, path, "type");
  if (!type) fail(join(path, "type"), "missing (sphere, spheroid, icosphere or mesh)");
  b.type = *type;
  if (b.type == "sphere") {
    check_keys(t, path, {"type", "radius"});
    b.radius = positive(t, path, "radius", 1.0);
  } else if (b.type == "spheroid") {
    check_keys(t, path, {"type", "equatorial", "polar"});
    b.equatorial = positive(t, path, "equatorial", 1.0);
    b.polar = positive(t, path, "polar", 1.0);
  } else if (b.type == "icosphere") {
    check_keys(t, path, {"type", "radius", "level"});
    b.radius = positive(t, path, "radius", 1.0);
    b.level = static_cast<int>(get_integer(t, path, "level").value_or(3));
    if (b.level < 0 || b.level > 7) fail(join(path, "level"), "must lie in 0..7");
  } else if (b.type == "mesh") {
    check_keys(t, path, {"type", "path"});
    const auto p = get_string(t, path, "path");
    if (!p) fail(join(path, "path"), "missing mesh file (.off or .stl)");
    b.path = std::filesystem::path(*p).is_absolute() ? std::filesystem::path(*p) : base / *p;
  } else {
    fail(join(path, "type"), "unknown body type '" + b.type + "'");
  }
  return b;
}

FreeEnergyModel parse_model(const toml::table& t, const std::filesystem::path& base) {
  const std::string path = "model";
  check_keys(t, path, {"variant", "coefficients", "coefficients_json"});
  const std::string variant = get_string(t, path, "variant").value_or("rosenfeld");
  ModelVariant v;
  try {
    v = parse_model_variant(variant);
  } catch (const Error& e) {
    fail(join(path, "variant"), e.what());
  }
  const bool has_inline = t.get("coefficients") != nullptr;
  const bool has_file = t.get("coefficients_json") != nullptr;
  if (v != ModelVariant::generalized) {
    if (has_inline || has_file) fail(join(path, "coefficients"), "only the generalized variant takes coefficients");
    return v == ModelVariant::tarazona_tensor ? FreeEnergyModel::tarazona_tensor() : FreeEnergyModel::rosenfeld_original();
  }
  if (has_inline == has_file) fail(join(path, "coefficients"), "generalized variant needs exactly one of coefficients or coefficients_json");
  CoefficientTable table;
  if (has_file) {
    const auto rel = *get_string(t, path, "coefficients_json");
    const std::filesystem::path file = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : base / rel;
    std::ifstream in(file);
    if (!in) throw IoError(file.string() + ": cannot open coefficient table");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      table = coefficients_from_json(ss.str());
    } catch (const SchemaError& e) {
      fail(join(path, "coefficients_json"), e.what());
    }
  } else {
    const toml::node* node = t.get("coefficients");
    if (!node->is_table()) fail(join(path, "coefficients"), "expected a table");
    const auto& c = *node->as_table();
    const std::string cp = join(path, "coefficients");
    check_keys(c, cp, {"chi", "k0s0", "k1s1", "s0_cubed", "s0_s1s1", "s1_s2_s1", "tr_s2_cubed", "s0_tr_s2_sq", "dimension"});
    table.chi = get_number(c, cp, "chi").value_or(table.chi);
    table.k0s0 = get_number(c, cp, "k0s0").value_or(table.k0s0);
    table.k1s1 = get_number(c, cp, "k1s1").value_or(table.k1s1);
    table.s0_cubed = get_number(c, cp, "s0_cubed").value_or(table.s0_cubed);
    table.s0_s1s1 = get_number(c, cp, "s0_s1s1").value_or(table.s0_s1s1);
    table.s1_s2_s1 = get_number(c, cp, "s1_s2_s1").value_or(table.s1_s2_s1);
    table.tr_s2_cubed = get_number(c, cp, "tr_s2_cubed").value_or(table.tr_s2_cubed);
    table.s0_tr_s2_sq = get_number(c, cp, "s0_tr_s2_sq").value_or(table.s0_tr_s2_sq);
    table.dimension = static_cast<int>(get_integer(c, cp, "dimension").value_or(3));
  }
  try {
    return FreeEnergyModel::generalized(table);
  } catch (const DomainError& e) {
    fail(join(path, "coefficients"), e.what());
  }
}

}  // namespace

std::string task_name(Task task) {
  switch (task) {
    case Task::measures: return "measures";
    case Task::weights_check: return "weights-check";
    case Task::excluded_volume: return "excluded-volume";
    case Task::virial: return "virial";
    case Task::eos: return "eos";
    case Task::profile: return "profile";
    case Task::identity_suite: return "identity-suite";
  }
  return "unknown";
}

Task parse_task(const std::string& name) {
  for (Task t : {Task::measures, Task::weights_check, Task::excluded_volume, Task::virial, Task::eos, Task::profile,
                 Task::identity_suite}) {
    if (task_name(t) == name) return t;
  }
  throw SchemaError("task: unknown task '" + name + "'");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "<config>:" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw SchemaError(os.str());
  }
  check_keys(root, "", {"schema", "task", "bodies", "model", "mc", "grid", "eos", "profile", "weights", "output"});

  const auto schema = get_string(root, "", "schema");
  if (!schema) fail("schema", "missing; expected \"" + std::string(kSchema) + "\"");
  if (*schema != kSchema) fail("schema", "unsupported schema '" + *schema + "', expected \"" + std::string(kSchema) + "\"");

  RunConfig c;
  c.base_dir = base_dir;
  if (auto task = get_string(root, "", "task")) c.task = parse_task(*task);

  if (const toml::node* node = root.get("bodies")) {
    const auto* arr = node->as_array();
    if (arr == nullptr) fail("bodies", "expected an array of tables ([[bodies]])");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = "bodies[" + std::to_string(i) + "]";
      const auto* t = (*arr)[i].as_table();
      if (t == nullptr) fail(path, "expected a table");
      c.bodies.push_back(parse_body(*t, path, base_dir));
    }
  }

  if (const auto* t = sub_table(root, "model")) c.model = parse_model(*t, base_dir);

  if (const auto* t = sub_table(root, "mc")) {
    check_keys(*t, "mc", {"n_samples", "seed", "resolution", "max_rank"});
    if (auto n = get_integer(*t, "mc", "n_samples")) {
      if (*n < 1000) fail("mc.n_samples", "must be >= 1000");
      c.mc.n_samples = static_cast<std::uint64_t>(*n);
    }
    if (auto s = get_integer(*t, "mc", "seed")) {
      if (*s < 0) fail("mc.seed", "must be >= 0");
      c.mc.seed = static_cast<std::uint64_t>(*s);
    }
    if (auto r = get_integer(*t, "mc", "resolution")) {
      if (*r < 32) fail("mc.resolution", "must be >= 32");
      c.mc.resolution = static_cast<int>(*r);
    }
    if (auto l = get_integer(*t, "mc", "max_rank")) {
      if (*l < 0 || *l > 64) fail("mc.max_rank", "must lie in 0..64");
      c.mc.max_rank = static_cast<int>(*l);
    }
  }

  if (const auto* t = sub_table(root, "grid")) {
    check_keys(*t, "grid", {"dz", "length"});
    if (auto dz = get_number(*t, "grid", "dz")) {
      if (!(*dz > 0.0)) fail("grid.dz", "must be > 0");
      c.grid.dz = *dz;
    }
    c.grid.length = positive(*t, "grid", "length", c.grid.length);
  }

  if (const auto* t = sub_table(root, "eos")) {
    check_keys(*t, "eos", {"eta", "eta_min", "eta_max", "eta_step"});
    c.eos_eta = eta_values(*t, "eos");
  }

  if (const auto* t = sub_table(root, "profile")) {
    check_keys(*t, "profile", {"radius", "eta", "eta_min", "eta_max", "eta_step", "mixing", "tolerance", "max_iterations"});
    c.profile.radius = positive(*t, "profile", "radius", c.profile.radius);
    c.profile.eta = eta_values(*t, "profile");
    c.profile.mixing = positive(*t, "profile", "mixing", c.profile.mixing);
    if (c.profile.mixing > 1.0) fail("profile.mixing", "must lie in (0, 1]");
    c.profile.tolerance = positive(*t, "profile", "tolerance", c.profile.tolerance);
    if (auto m = get_integer(*t, "profile", "max_iterations")) {
      if (*m < 1) fail("profile.max_iterations", "must be >= 1");
      c.profile.max_iterations = static_cast<long>(*m);
    }
  }

  if (const auto* t = sub_table(root, "weights")) {
    check_keys(*t, "weights", {"resolution"});
    if (auto r = get_integer(*t, "weights", "resolution")) {
      if (*r < 32) fail("weights.resolution", "must be >= 32");
      c.weights_resolution = static_cast<int>(*r);
    }
  }

  if (const auto* t = sub_table(root, "output")) {
    check_keys(*t, "output", {"format", "dir"});
    c.output.format = get_string(*t, "output", "format").value_or("csv");
    if (c.output.format != "csv" && c.output.format != "json") fail("output.format", "expected \"csv\" or \"json\"");
    if (auto d = get_string(*t, "output", "dir")) {
      c.output.dir = std::filesystem::path(*d).is_absolute() ? std::filesystem::path(*d) : base_dir / *d;
    }
  }
  return c;
}

void validate_for_task(const RunConfig& c, Task task) {
  const bool needs_bodies = task == Task::measures || task == Task::weights_check || task == Task::excluded_volume ||
                            task == Task::virial || task == Task::eos;
  if (needs_bodies && c.bodies.empty()) fail("bodies", "task " + task_name(task) + " needs at least one [[bodies]] entry");
  if (task == Task::excluded_volume && c.bodies.size() > 2) fail("bodies", "excluded-volume takes one or two bodies");
  if (task == Task::virial && c.bodies.size() != 1) fail("bodies", "virial takes exactly one body");
  if (task == Task::eos && c.bodies.size() != 1) fail("bodies", "eos takes exactly one body");
  const bool needs_mc = task == Task::excluded_volume || task == Task::virial || task == Task::identity_suite;
  if (needs_mc) {
    if (!c.mc.seed) fail("mc.seed", "task " + task_name(task) + " requires an explicit seed");
    if (c.mc.n_samples == 0) fail("mc.n_samples", "task " + task_name(task) + " requires n_samples");
  }
  if (task == Task::excluded_volume && c.mc.n_samples < 10'000) fail("mc.n_samples", "excluded-volume needs >= 10000");
  if (task == Task::virial && c.mc.n_samples < 100'000) fail("mc.n_samples", "virial needs >= 100000");
  if (task == Task::eos && c.eos_eta.empty()) fail("eos.eta", "eos needs at least one packing fraction");
  if (task == Task::profile && c.profile.eta.empty()) fail("profile.eta", "profile needs at least one packing fraction");
}

ConvexBody build_body(const BodySpec& s) {
  if (s.type == "sphere") return ConvexBody::sphere(s.radius);
  if (s.type == "spheroid") return ConvexBody::spheroid(s.equatorial, s.polar);
  if (s.type == "icosphere") return ConvexBody::mesh(make_icosphere(s.radius, s.level));
  return ConvexBody::mesh(read_mesh(s.path));
}

CoefficientTable coefficients_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("coefficients: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("coefficients: expected a JSON object");
  CoefficientTable t;
  const std::set<std::string> allowed = {"chi", "k0s0", "k1s1", "s0_cubed", "s0_s1s1", "s1_s2_s1", "tr_s2_cubed", "s0_tr_s2_sq", "dimension"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw SchemaError("coefficients." + key + ": unknown key");
    if (!value.is_number()) throw SchemaError("coefficients." + key + ": expected a number");
  }
  auto num = [&](const char* key, double fallback) { return j.contains(key) ? j[key].get<double>() : fallback; };
  t.chi = num("chi", t.chi);
  t.k0s0 = num("k0s0", t.k0s0);
  t.k1s1 = num("k1s1", t.k1s1);
  t.s0_cubed = num("s0_cubed", t.s0_cubed);
  t.s0_s1s1 = num("s0_s1s1", t.s0_s1s1);
  t.s1_s2_s1 = num("s1_s2_s1", t.s1_s2_s1);
  t.tr_s2_cubed = num("tr_s2_cubed", t.tr_s2_cubed);
  t.s0_tr_s2_sq = num("s0_tr_s2_sq", t.s0_tr_s2_sq);
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer()) throw SchemaError("coefficients.dimension: expected an integer");
    t.dimension = j["dimension"].get<int>();
  }
  return t;
}

std::string coefficients_to_json(const CoefficientTable& t) {
  nlohmann::ordered_json j;
  j["chi"] = t.chi;
  j["k0s0"] = t.k0s0;
  j["k1s1"] = t.k1s1;
  j["s0_cubed"] = t.s0_cubed;
  j["s0_s1s1"] = t.s0_s1s1;
  j["s1_s2_s1"] = t.s1_s2_s1;
  j["tr_s2_cubed"] = t.tr_s2_cubed;
  j["s0_tr_s2_sq"] = t.s0_tr_s2_sq;
  j["dimension"] = t.dimension;
  return j.dump(2);
}

}  // namespace fmt_engine::cli
