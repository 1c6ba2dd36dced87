#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fmt_engine/identities.hpp"
#include "fmt_engine/kinematic.hpp"
#include "fmt_engine/mesh.hpp"
#include "fmt_engine/planar_dft.hpp"
#include "fmt_engine/weights.hpp"

#ifndef FMT_ENGINE_VERSION
#define FMT_ENGINE_VERSION "unknown"
#endif

namespace fmt_engine::cli {

namespace fs = std::filesystem;

namespace {

struct TaskOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::vector<Check> checks;
};

class TaskContext {
 public:
  TaskContext(const RunConfig& config, int threads) : config_(config), threads_(threads) {}

  const RunConfig& config() const { return config_; }
  int threads() const { return threads_; }

  MCOptions mc() const {
    MCOptions o;
    o.n_samples = config_.mc.n_samples;
    o.seed = config_.mc.seed.value_or(0);
    o.threads = threads_;
    return o;
  }

  void table(TaskOutput& out, const std::string& stem, const Table& t) const {
    if (config_.output.format == "json") {
      out.files.emplace_back(stem + ".json", render_json(t));
    } else {
      out.files.emplace_back(stem + ".csv", render_csv(t));
    }
  }

 private:
  const RunConfig& config_;
  int threads_;
};

void check(TaskOutput& out, std::string name, bool pass, std::string detail) {
  out.checks.push_back({std::move(name), pass, std::move(detail)});
}

bool close(double value, double expected, double rel_tol) {
  return std::abs(value - expected) <= rel_tol * std::max(1.0, std::abs(expected));
}

std::string sigma_detail(double value, double expected, double stderr) {
  return fmt::format("{} vs {} ({:.2f} stderr)", format_number(value), format_number(expected),
                     stderr > 0.0 ? std::abs(value - expected) / stderr : 0.0);
}

// --- measures ---------------------------------------------------------------

TaskOutput task_measures(const TaskContext& ctx) {
  TaskOutput out;
  Table t;
  t.columns = {"body", "V", "S", "M", "chi", "angle_defect_over_2pi"};
  for (const BodySpec& spec : ctx.config().bodies) {
    const ConvexBody body = build_body(spec);
    const MinkowskiMeasures m = minkowski_measures(body);
    Cell defect = std::string();
    if (const auto* mesh = std::get_if<TriangleMesh>(&body.shape())) {
      const double d = angle_defect_sum(*mesh);
      defect = d / (2.0 * kPi);
      check(out, body.label() + " gauss_bonnet", std::abs(d - 2.0 * kPi * m.euler_surface) <= 1e-9,
            fmt::format("angle defect {} vs 2 pi chi = {}", format_number(d), format_number(2.0 * kPi * m.euler_surface)));
    }
    if (spec.type == "sphere") {
      const double r = spec.radius;
      const bool ok = close(m.volume, 4.0 * kPi * r * r * r / 3.0, 1e-10) && close(m.surface, 4.0 * kPi * r * r, 1e-10) &&
                      close(m.mean_curvature_integral, 4.0 * kPi * r, 1e-10);
      check(out, body.label() + " closed_form", ok, "V, S, M against 4 pi R^3/3, 4 pi R^2, 4 pi R to 1e-10");
    }
    check(out, body.label() + " euler_characteristic", m.euler_surface == 2,
          fmt::format("chi = {}", m.euler_surface));
    t.rows.push_back({body.label(), m.volume, m.surface, m.mean_curvature_integral,
                      static_cast<std::int64_t>(m.euler_surface), defect});
  }
  ctx.table(out, "measures", t);
  return out;
}

// --- weights-check ----------------------------------------------------------

TaskOutput task_weights_check(const TaskContext& ctx) {
  TaskOutput out;
  Table t;
  t.notes = {fmt::format("quadrature resolution {}", ctx.config().weights_resolution)};
  t.columns = {"body", "weight", "value", "expected", "abs_error", "tolerance"};
  for (const BodySpec& spec : ctx.config().bodies) {
    const ConvexBody body = build_body(spec);
    const MinkowskiMeasures m = minkowski_measures(body);
    const int res = ctx.config().weights_resolution;
    // Vertex curvature estimates on meshes only approximate the smooth sums.
    const double loose = body.is_mesh() ? 2e-2 : 1e-8;
    const double exact = body.is_mesh() ? 1e-9 : 1e-8;
    struct Rule {
      const char* name;
      double value;
      double expected;
      double tol;
    };
    const Rule rules[] = {
        {"chi", fundamental_measure(body, WeightIndex::chi(), res).scalar(), 1.0, loose},
        {"sigma0", fundamental_measure(body, WeightIndex::sigma(0), res).scalar(), m.surface, exact},
        {"sigma1_norm", fundamental_measure(body, WeightIndex::sigma(1), res).vector().norm(), 0.0, loose},
        {"sigma2_trace", fundamental_measure(body, WeightIndex::sigma(2), res).tensor().trace(), m.surface, exact},
        {"kappa0", fundamental_measure(body, WeightIndex::kappa(0), res).scalar(), m.mean_curvature_integral / (4.0 * kPi),
         loose},
        {"v", fundamental_measure(body, WeightIndex::v(), res).scalar(), m.volume, exact},
    };
    for (const Rule& r : rules) {
      const double err = std::abs(r.value - r.expected);
      const double scale = std::max(1.0, std::abs(r.expected));
      check(out, body.label() + " " + r.name, err <= r.tol * scale,
            fmt::format("|{} - {}| = {}", format_number(r.value), format_number(r.expected), format_number(err)));
      t.rows.push_back({body.label(), std::string(r.name), r.value, r.expected, err, r.tol * scale});
    }
  }
  ctx.table(out, "weights", t);
  return out;
}

// --- excluded-volume --------------------------------------------------------

TaskOutput task_excluded_volume(const TaskContext& ctx) {
  TaskOutput out;
  const auto& bodies = ctx.config().bodies;
  const ConvexBody a = build_body(bodies[0]);
  const ConvexBody b = build_body(bodies.size() > 1 ? bodies[1] : bodies[0]);
  const double analytic = excluded_volume_analytic(a, b);
  const MCEstimate mc = excluded_volume_mc(a, b, ctx.mc());

  Table t;
  t.columns = {"estimator", "body_a", "body_b", "n_samples", "seed", "mean", "stderr"};
  t.rows.push_back({std::string("analytic"), a.label(), b.label(), std::int64_t{0}, std::int64_t{0}, analytic, 0.0});
  t.rows.push_back({std::string("monte_carlo"), a.label(), b.label(), static_cast<std::int64_t>(mc.n_samples),
                    static_cast<std::int64_t>(mc.seed), mc.mean, mc.stderr});
  check(out, "mc_vs_analytic_3sigma", std::abs(mc.mean - analytic) <= 3.0 * mc.stderr,
        sigma_detail(mc.mean, analytic, mc.stderr));
  ctx.table(out, "excluded_volume", t);
  return out;
}

// --- virial -----------------------------------------------------------------

TaskOutput task_virial(const TaskContext& ctx) {
  TaskOutput out;
  const RunConfig& cfg = ctx.config();
  const ConvexBody body = build_body(cfg.bodies[0]);
  const double v = minkowski_measures(body).volume;
  const MCOptions opts = ctx.mc();

  Table t;
  t.notes = {"B3 = (1/3) integral f12 f13 f23; reduced values are B2/v and B3/v^2",
             "stack terms use the 0-loop weights; the triple term subtracts the Gram determinant"};
  t.columns = {"quantity", "method", "value", "stderr", "reduced", "reduced_stderr"};
  auto row = [&](const char* q, const std::string& method, double value, double stderr, int power) {
    const double norm = power == 1 ? v : v * v;
    t.rows.push_back({std::string(q), method, value, stderr, value / norm, stderr / norm});
  };

  const MCEstimate b2a = second_virial(body, body, VirialMethod::analytic);
  const MCEstimate b2m = second_virial(body, body, VirialMethod::monte_carlo, opts);
  row("B2", "analytic", b2a.mean, 0.0, 1);
  row("B2", "monte_carlo", b2m.mean, b2m.stderr, 1);

  const MCEstimate b3 = third_virial_mc(body, opts);
  row("B3", "monte_carlo_exact", b3.mean, b3.stderr, 2);

  const StackVirialEstimate st = third_virial_stack_mc(body, opts, cfg.mc.resolution, cfg.mc.max_rank);
  row("B3", "stack_total", st.total.mean, st.total.stderr, 2);
  row("B3", "stack_chi", st.chi.mean, st.chi.stderr, 2);
  row("B3", "stack_pair", st.pair.mean, st.pair.stderr, 2);
  row("B3", "stack_triple", st.triple.mean, st.triple.stderr, 2);
  row("B3", "stack_triple_product", st.triple_product.mean, st.triple_product.stderr, 2);
  row("B3", "stack_triple_determinant", st.triple_determinant.mean, st.triple_determinant.stderr, 2);

  std::vector<FreeEnergyModel> models = {FreeEnergyModel::rosenfeld_original(), FreeEnergyModel::tarazona_tensor()};
  if (cfg.model.variant() == ModelVariant::generalized) models.push_back(cfg.model);
  for (const FreeEnergyModel& model : models) {
    const VirialCoefficients vc = virial_series_bulk(body, model);
    row("B2", "series_" + model.name(), vc.b2, 0.0, 1);
    row("B3", "series_" + model.name(), vc.b3, 0.0, 2);
    if (body.is_sphere() && model.variant() != ModelVariant::generalized) {
      check(out, "sphere_b3_series_" + model.name(), close(vc.b3_reduced, 10.0, 1e-10),
            fmt::format("B3/v^2 = {}", format_number(vc.b3_reduced)));
    }
  }

  check(out, "b2_mc_vs_analytic_3sigma", std::abs(b2m.mean - b2a.mean) <= 3.0 * b2m.stderr,
        sigma_detail(b2m.mean, b2a.mean, b2m.stderr));
  if (body.is_sphere()) {
    check(out, "sphere_b2_analytic", close(b2a.mean / v, 4.0, 1e-10), fmt::format("B2/v = {}", format_number(b2a.mean / v)));
    const double b3_ref = 10.0 * v * v;
    check(out, "sphere_b3_exact_3sigma", std::abs(b3.mean - b3_ref) <= 3.0 * b3.stderr,
          sigma_detail(b3.mean, b3_ref, b3.stderr));
    check(out, "sphere_b3_stack_3sigma", std::abs(st.total.mean - b3_ref) <= 3.0 * st.total.stderr,
          sigma_detail(st.total.mean, b3_ref, st.total.stderr));
  }
  ctx.table(out, "virial", t);
  return out;
}

// --- eos --------------------------------------------------------------------

TaskOutput task_eos(const TaskContext& ctx) {
  TaskOutput out;
  const RunConfig& cfg = ctx.config();
  const ConvexBody body = build_body(cfg.bodies[0]);
  Table t;
  t.notes = {"model " + cfg.model.name() + ", body " + body.label()};
  t.columns = {"eta", "rho", "beta_p", "Z", "beta_mu_ex", "Z_reference"};
  double previous = -1.0;
  bool monotone = true;
  double worst = 0.0;
  for (double eta : cfg.eos_eta) {
    const BulkState s = bulk_eos(body, eta, cfg.model);
    Cell reference = std::string();
    if (body.is_sphere()) {
      const double z = (1.0 + eta + eta * eta) / std::pow(1.0 - eta, 3);
      reference = z;
      worst = std::max(worst, std::abs(s.compressibility - z) / z);
    }
    if (s.compressibility < previous) monotone = false;
    previous = s.compressibility;
    t.rows.push_back({eta, s.rho, s.beta_pressure, s.compressibility, s.beta_mu_ex, reference});
  }
  const std::vector<double> sorted_check(cfg.eos_eta);
  if (std::is_sorted(sorted_check.begin(), sorted_check.end())) {
    check(out, "z_monotone", monotone, "Z non-decreasing along the eta sweep");
  }
  const bool fixed_coefficients = cfg.model.variant() != ModelVariant::generalized;
  if (body.is_sphere() && fixed_coefficients) {
    check(out, "sphere_z_closed_form", worst <= 1e-10,
          fmt::format("max relative deviation from (1+eta+eta^2)/(1-eta)^3: {}", format_number(worst)));
  }
  ctx.table(out, "eos", t);
  return out;
}

// --- profile ----------------------------------------------------------------

struct ProfilePoint {
  double eta = 0.0;
  double rho_bulk = 0.0;
  BulkState bulk;
  PicardResult result;
  std::vector<double> n_v;
  double contact = 0.0;
  double far_field = 0.0;
  double omega = 0.0;
};

ProfilePoint solve_point(const RunConfig& cfg, double eta) {
  const double r = cfg.profile.radius;
  const double dz = cfg.grid.dz.value_or(r / 100.0);
  const int n = static_cast<int>(std::lround(cfg.grid.length / dz));
  const Grid1D grid = Grid1D::make(dz, n);
  const std::vector<double> wall = hard_wall_potential(grid, r);

  ProfilePoint p;
  p.eta = eta;
  p.bulk = bulk_eos(ConvexBody::sphere(r), eta, cfg.model);
  p.rho_bulk = p.bulk.rho;
  PicardParams params;
  params.mixing = cfg.profile.mixing;
  params.tolerance = cfg.profile.tolerance;
  params.max_iterations = cfg.profile.max_iterations;
  p.result = picard_solve(cfg.model, r, grid, wall, p.rho_bulk, params);

  const PlanarKernels kernels = planar_kernels(r, grid);
  const PlanarFields fields = weighted_density_fields(p.result.profile, kernels);
  p.n_v.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p.n_v[static_cast<std::size_t>(i)] = fields.at(i).n_v;
  p.contact = contact_density(p.result.profile, wall);
  for (int i = 0; i < n; ++i) {
    if (grid.z(i) > 8.0 * r && p.rho_bulk > 0.0) {
      p.far_field = std::max(p.far_field, std::abs(p.result.profile.rho[static_cast<std::size_t>(i)] - p.rho_bulk) / p.rho_bulk);
    }
  }
  const double beta_mu = (p.rho_bulk > 0.0 ? std::log(p.rho_bulk) : 0.0) + p.result.bulk_mu_ex;
  p.omega = grand_potential(p.result.profile, cfg.model, kernels, beta_mu, wall);
  return p;
}

// Independent state points in parallel; results and errors keep input order.
std::vector<ProfilePoint> solve_points(const RunConfig& cfg, int threads) {
  const std::size_t n = cfg.profile.eta.size();
  std::vector<ProfilePoint> points(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        points[i] = solve_point(cfg, cfg.profile.eta[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("eta = {}: {}", format_number(cfg.profile.eta[i]), e.what()));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(fmt::format("eta = {}: {}", format_number(cfg.profile.eta[i]), e.what()), e.history());
    }
  }
  return points;
}

TaskOutput task_profile(const TaskContext& ctx) {
  TaskOutput out;
  const RunConfig& cfg = ctx.config();
  const double r = cfg.profile.radius;
  const double dz = cfg.grid.dz.value_or(r / 100.0);
  const std::vector<ProfilePoint> points = solve_points(cfg, ctx.threads());

  Table summary;
  summary.notes = {"hard wall at z = 0 excludes sphere centres with z < R",
                   fmt::format("model {}, R = {}, dz = {}, length = {}", cfg.model.name(), format_number(r),
                               format_number(dz), format_number(cfg.grid.length))};
  summary.columns = {"eta", "rho_bulk", "beta_p", "contact_density", "contact_rel_error", "far_field_rel_dev",
                     "iterations", "residual", "omega"};
  for (const ProfilePoint& p : points) {
    const std::string stem = fmt::format("profile_eta{:.4f}", p.eta);
    Table prof;
    prof.columns = {"z", "rho", "n_v", "mu_ex"};
    const Grid1D& grid = p.result.profile.grid;
    for (int i = 0; i < grid.n_points; ++i) {
      const auto k = static_cast<std::size_t>(i);
      prof.rows.push_back({grid.z(i), p.result.profile.rho[k], p.n_v[k], p.result.mu_ex[k]});
    }
    ctx.table(out, stem, prof);

    nlohmann::ordered_json meta;
    meta["model"] = cfg.model.name();
    meta["eta"] = p.eta;
    meta["rho_bulk"] = p.rho_bulk;
    meta["radius"] = r;
    meta["grid"] = {{"dz", grid.dz}, {"n_points", grid.n_points}, {"origin", grid.origin}};
    meta["wall"] = "hard wall at z = 0, centres excluded for z < R";
    meta["iterations"] = p.result.iterations;
    meta["residual"] = p.result.residual;
    meta["final_mixing"] = p.result.final_mixing;
    meta["beta_mu_ex_bulk"] = p.result.bulk_mu_ex;
    meta["beta_p"] = p.bulk.beta_pressure;
    meta["contact_density"] = p.contact;
    out.files.emplace_back(stem + ".meta.json", meta.dump(2) + "\n");

    const double rel = (p.contact - p.bulk.beta_pressure) / p.bulk.beta_pressure;
    summary.rows.push_back({p.eta, p.rho_bulk, p.bulk.beta_pressure, p.contact, rel, p.far_field,
                            static_cast<std::int64_t>(p.result.iterations), p.result.residual, p.omega});
    check(out, fmt::format("contact_theorem_eta{:.4f}", p.eta), std::abs(rel) <= 5e-3,
          fmt::format("rho(R)/beta p - 1 = {}", format_number(rel)));
  }
  ctx.table(out, "profile_summary", summary);
  return out;
}

// --- identity-suite ---------------------------------------------------------

TaskOutput task_identity_suite(const TaskContext& ctx) {
  TaskOutput out;
  const auto results = run_identity_suite(ctx.config().mc.n_samples, ctx.config().mc.seed.value_or(0));
  Table t;
  t.columns = {"check", "n_samples", "max_error", "tolerance", "pass"};
  for (const IdentityCheck& c : results) {
    t.rows.push_back({c.name, static_cast<std::int64_t>(c.n_samples), c.max_error, c.tolerance, c.pass});
    check(out, c.name, c.pass, fmt::format("max error {} (tolerance {})", format_number(c.max_error), format_number(c.tolerance)));
  }
  ctx.table(out, "identities", t);
  return out;
}

TaskOutput dispatch(Task task, const TaskContext& ctx) {
  switch (task) {
    case Task::measures: return task_measures(ctx);
    case Task::weights_check: return task_weights_check(ctx);
    case Task::excluded_volume: return task_excluded_volume(ctx);
    case Task::virial: return task_virial(ctx);
    case Task::eos: return task_eos(ctx);
    case Task::profile: return task_profile(ctx);
    case Task::identity_suite: return task_identity_suite(ctx);
  }
  throw SchemaError("task: unhandled");
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return std::to_string(v);
      },
      c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f << contents;
  if (!f) throw IoError(path.string() + ": write failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunOutcome fail_with(RunOutcome o, int code, const std::string& message, std::ostream& log) {
  o.exit_code = code;
  o.error = message;
  log << "error: " << message << "\n";
  return o;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

std::string render_csv(const Table& t) {
  std::string s;
  for (const auto& note : t.notes) s += "# " + note + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + csv_field(t.columns[i]);
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_field(cell_text(row[i]));
    s += "\n";
  }
  return s;
}

std::string render_json(const Table& t) {
  nlohmann::ordered_json j;
  j["notes"] = t.notes;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
              if (v.empty()) rec[t.columns[i]] = nullptr;
              else rec[t.columns[i]] = v;
            } else {
              rec[t.columns[i]] = v;
            }
          },
          row[i]);
    }
    j["records"].push_back(rec);
  }
  return j.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

RunOutcome run(const RunRequest& req, std::ostream& log) {
  RunOutcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::string name = task_name(req.task);

  RunConfig cfg;
  try {
    cfg = parse_config(req.config_text, req.config_dir);
    if (cfg.task && *cfg.task != req.task) {
      throw SchemaError("task: config declares '" + task_name(*cfg.task) + "' but '" + name + "' was requested");
    }
    validate_for_task(cfg, req.task);
  } catch (const SchemaError& e) {
    return fail_with(o, kExitSchema, e.what(), log);
  } catch (const IoError& e) {
    return fail_with(o, kExitIo, e.what(), log);
  }

  if (req.out_dir) o.out_dir = *req.out_dir;
  else if (!cfg.output.dir.empty()) o.out_dir = cfg.output.dir;
  else o.out_dir = fs::path("fmt-engine-out") / name;

  TaskOutput result;
  try {
    result = dispatch(req.task, TaskContext(cfg, req.threads));
  } catch (const ValidationError& e) {
    return fail_with(o, kExitSchema, "task " + name + ": " + e.what(), log);
  } catch (const IoError& e) {
    return fail_with(o, kExitIo, "task " + name + ": " + e.what(), log);
  } catch (const ConvergenceError& e) {
    std::string msg = "task " + name + ": " + e.what();
    if (!e.history().empty()) msg += fmt::format(" (last residual {})", format_number(e.history().back()));
    return fail_with(o, kExitNumeric, msg, log);
  } catch (const Error& e) {
    return fail_with(o, kExitNumeric, "task " + name + ": " + e.what(), log);
  }

  Table validation;
  validation.columns = {"check", "pass", "detail"};
  bool all_pass = true;
  for (const Check& c : result.checks) {
    validation.rows.push_back({c.name, c.pass, c.detail});
    all_pass = all_pass && c.pass;
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  result.files.emplace_back("validation.csv", render_csv(validation));
  o.checks = result.checks;
  o.exit_code = all_pass ? kExitOk : kExitValidation;

  nlohmann::ordered_json manifest;
  try {
    fs::create_directories(o.out_dir);
    manifest["schema"] = kSchema;
    manifest["version"] = FMT_ENGINE_VERSION;
    manifest["task"] = name;
    manifest["config_hash"] = fnv1a_hex(req.config_text);
    manifest["config_dir"] = fs::absolute(req.config_dir).lexically_normal().string();
    manifest["config"] = req.config_text;
    manifest["threads"] = req.threads;
    manifest["outputs"] = nlohmann::ordered_json::array();
    for (const auto& [file, contents] : result.files) {
      write_file(o.out_dir / file, contents);
      o.outputs.emplace_back(file);
      manifest["outputs"].push_back({{"file", file}, {"fnv1a", fnv1a_hex(contents)}});
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["wall_time_s"] = wall;
    manifest["exit_code"] = o.exit_code;
    write_file(o.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const fs::filesystem_error& e) {
    return fail_with(o, kExitIo, e.what(), log);
  } catch (const IoError& e) {
    return fail_with(o, kExitIo, e.what(), log);
  }
  log << name << ": " << result.files.size() << " files in " << o.out_dir.string() << "\n";
  return o;
}

RunOutcome rerun_manifest(const fs::path& manifest_path, const std::optional<fs::path>& out_dir, int threads,
                          std::ostream& log) {
  RunOutcome o;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const IoError& e) {
    return fail_with(o, kExitIo, e.what(), log);
  } catch (const nlohmann::json::exception& e) {
    return fail_with(o, kExitSchema, "manifest: " + std::string(e.what()), log);
  }
  RunRequest req;
  std::vector<std::pair<std::string, std::string>> expected;
  try {
    if (m.at("schema").get<std::string>() != kSchema) throw SchemaError("manifest.schema: unsupported");
    req.task = parse_task(m.at("task").get<std::string>());
    req.config_text = m.at("config").get<std::string>();
    req.config_dir = m.at("config_dir").get<std::string>();
    for (const auto& e : m.at("outputs")) expected.emplace_back(e.at("file").get<std::string>(), e.at("fnv1a").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    return fail_with(o, kExitSchema, "manifest: " + std::string(e.what()), log);
  } catch (const SchemaError& e) {
    return fail_with(o, kExitSchema, std::string("manifest: ") + e.what(), log);
  }
  req.out_dir = out_dir.value_or(manifest_path.parent_path() / "rerun");
  req.threads = threads;
  o = run(req, log);
  if (o.exit_code != kExitOk && o.exit_code != kExitValidation) return o;

  int mismatches = 0;
  for (const auto& [file, hash] : expected) {
    std::string actual;
    try {
      actual = fnv1a_hex(read_file(o.out_dir / file));
    } catch (const IoError&) {
      actual = "missing";
    }
    if (actual != hash) {
      ++mismatches;
      log << "MISMATCH " << file << ": " << actual << " vs " << hash << "\n";
    }
  }
  o.checks.push_back({"manifest_reproduced", mismatches == 0,
                      fmt::format("{} of {} outputs identical", expected.size() - mismatches, expected.size())});
  log << (mismatches == 0 ? "PASS " : "FAIL ") << o.checks.back().name << ": " << o.checks.back().detail << "\n";
  if (mismatches != 0) o.exit_code = kExitValidation;
  return o;
}

}  // namespace fmt_engine::cli
