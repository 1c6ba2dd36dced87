#include "fmt_engine/planar_dft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fmt_engine/error.hpp"
#include "fmt_engine/geometry.hpp"

namespace fmt_engine {

namespace {

// Cell integrals of 1, R^2 - s^2, s and s^2 over |s| <= R.
struct BaseKernels {
  int half_width = 0;
  std::vector<double> step, parabola, odd, square;
};

BaseKernels base_kernels(double r, double dz) {
  BaseKernels b;
  b.half_width = static_cast<int>(std::floor(r / dz + 0.5));
  const int size = 2 * b.half_width + 1;
  b.step.assign(size, 0.0);
  b.parabola.assign(size, 0.0);
  b.odd.assign(size, 0.0);
  b.square.assign(size, 0.0);
  for (int m = -b.half_width; m <= b.half_width; ++m) {
    const double lo = std::max(-r, (m - 0.5) * dz);
    const double hi = std::min(r, (m + 0.5) * dz);
    if (!(hi > lo)) continue;
    const int k = m + b.half_width;
    const double cube = (hi * hi * hi - lo * lo * lo) / 3.0;
    b.step[k] = hi - lo;
    b.parabola[k] = r * r * (hi - lo) - cube;
    b.odd[k] = 0.5 * (hi * hi - lo * lo);
    b.square[k] = cube;
  }
  return b;
}

std::vector<double> scaled(const std::vector<double>& v, double f) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * f;
  return out;
}

double sphere_volume(double r) { return 4.0 * kPi * r * r * r / 3.0; }

}  // namespace

Grid1D Grid1D::make(double dz, int n_points, double origin) {
  if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("grid spacing dz must be > 0");
  if (n_points < 64) {
    std::ostringstream os;
    os << "grid needs at least 64 points, got " << n_points;
    throw DomainError(os.str());
  }
  if (!std::isfinite(origin)) throw DomainError("grid origin must be finite");
  return Grid1D{dz, n_points, origin};
}

PlanarKernels planar_kernels(double radius, const Grid1D& grid) {
  if (!(radius >= 3.0 * grid.dz) || !std::isfinite(radius)) {
    std::ostringstream os;
    os << "sphere radius " << radius << " is under-resolved: need R >= 3 dz = " << 3.0 * grid.dz;
    throw DomainError(os.str());
  }
  const BaseKernels b = base_kernels(radius, grid.dz);
  PlanarKernels k;
  k.radius = radius;
  k.dz = grid.dz;
  k.half_width = b.half_width;
  k.chi = scaled(b.step, 1.0 / (2.0 * radius));
  k.k0 = scaled(b.step, 0.5);
  k.s0 = scaled(b.step, 2.0 * kPi * radius);
  k.v = scaled(b.parabola, kPi);
  k.s1z = scaled(b.odd, 2.0 * kPi);
  k.k1z = scaled(b.odd, 1.0 / (2.0 * radius));
  k.s2zz = scaled(b.square, 2.0 * kPi / radius);
  k.s2perp = scaled(b.parabola, kPi / radius);
  return k;
}

PlanarFields weighted_density_fields(const DensityProfile& profile, const PlanarKernels& kernels) {
  const int n = profile.grid.n_points;
  const int h = kernels.half_width;
  if (static_cast<int>(profile.rho.size()) != n) throw DomainError("density profile size does not match its grid");
  if (kernels.size() > n) {
    std::ostringstream os;
    os << "kernel support of " << kernels.size() << " nodes exceeds the grid of " << n << " nodes";
    throw DomainError(os.str());
  }
  const BaseKernels b = base_kernels(kernels.radius, kernels.dz);
  const double r = kernels.radius;

  // Density on [-2h, n + 2h).
  std::vector<double> ext(static_cast<std::size_t>(n + 4 * h));
  for (int k = 0; k < n + 4 * h; ++k) {
    const int i = k - 2 * h;
    ext[k] = i < 0 ? profile.left_fill : (i >= n ? profile.right_fill : profile.rho[i]);
  }

  PlanarFields f;
  f.offset = h;
  f.dz = profile.grid.dz;
  f.n.resize(static_cast<std::size_t>(n + 2 * h));
  for (int i = -h; i < n + h; ++i) {
    double step = 0.0, par = 0.0, odd = 0.0, sq = 0.0;
    const double* rho = &ext[static_cast<std::size_t>(i + 2 * h)];
    for (int m = -h; m <= h; ++m) {
      const double x = rho[-m];
      const int k = m + h;
      step += x * b.step[k];
      par += x * b.parabola[k];
      odd += x * b.odd[k];
      sq += x * b.square[k];
    }
    WeightedDensities& w = f.n[static_cast<std::size_t>(i + h)];
    w.n_chi = step / (2.0 * r);
    w.n_k0 = 0.5 * step;
    w.n_s0 = 2.0 * kPi * r * step;
    w.n_v = kPi * par;
    w.n_s1 = Vec3(0.0, 0.0, 2.0 * kPi * odd);
    w.n_k1 = Vec3(0.0, 0.0, odd / (2.0 * r));
    const double perp = kPi * par / r;
    w.n_s2 = Vec3(perp, perp, 2.0 * kPi * sq / r).asDiagonal();
  }
  return f;
}

std::vector<double> mu_ex_field(const PlanarFields& fields, const FreeEnergyModel& model,
                                const PlanarKernels& kernels) {
  const int h = kernels.half_width;
  const int n = static_cast<int>(fields.n.size()) - 2 * h;
  const double r = kernels.radius;
  const BaseKernels b = base_kernels(r, kernels.dz);

  std::vector<double> a(fields.n.size()), pv(fields.n.size()), c(fields.n.size()), d(fields.n.size());
  for (int i = -h; i < n + h; ++i) {
    const WeightedDensities& w = fields.at(i);
    if (!(w.n_v < 1.0)) {
      std::ostringstream os;
      os.precision(12);
      os << "n_v = " << w.n_v << " >= 1 at node " << i;
      throw DomainError(os.str());
    }
    const DensityGradient g = phi_gradient(w, model);
    const std::size_t k = static_cast<std::size_t>(i + h);
    a[k] = g.n_chi / (2.0 * r) + 0.5 * g.n_k0 + 2.0 * kPi * r * g.n_s0;
    pv[k] = kPi * g.n_v + kPi / r * (g.n_s2(0, 0) + g.n_s2(1, 1));
    c[k] = 2.0 * kPi * g.n_s1.z() + g.n_k1.z() / (2.0 * r);
    d[k] = 2.0 * kPi / r * g.n_s2(2, 2);
  }

  std::vector<double> mu(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int m = -h; m <= h; ++m) {
      const std::size_t i = static_cast<std::size_t>(j + m + h);
      const int k = m + h;
      sum += a[i] * b.step[k] + pv[i] * b.parabola[k] + c[i] * b.odd[k] + d[i] * b.square[k];
    }
    mu[j] = sum;
  }
  return mu;
}

double excess_free_energy(const PlanarFields& fields, const FreeEnergyModel& model) {
  double sum = 0.0;
  for (const auto& w : fields.n) sum += phi_excess(w, model);
  return fields.dz * sum;
}

std::vector<double> hard_wall_potential(const Grid1D& grid, double radius) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_points), 0.0);
  for (int i = 0; i < grid.n_points; ++i) {
    if (grid.z(i) < radius) v[i] = std::numeric_limits<double>::infinity();
  }
  return v;
}

PicardResult picard_solve(const FreeEnergyModel& model, double radius, const Grid1D& grid,
                          const std::vector<double>& beta_v_ext, double rho_bulk, const PicardParams& params) {
  if (!(params.mixing > 0.0 && params.mixing <= 1.0)) throw DomainError("Picard mixing must lie in (0, 1]");
  if (!(params.tolerance > 0.0)) throw DomainError("Picard tolerance must be > 0");
  if (params.max_iterations < 1) throw DomainError("Picard max_iterations must be >= 1");
  if (!(rho_bulk > 0.0) || !std::isfinite(rho_bulk)) throw DomainError("bulk density must be > 0");
  if (static_cast<int>(beta_v_ext.size()) != grid.n_points) {
    throw DomainError("external potential size does not match the grid");
  }
  if (grid.extent() < 20.0 * radius) {
    std::ostringstream os;
    os << "grid extent " << grid.extent() << " is below 10 particle diameters (" << 20.0 * radius << ")";
    throw DomainError(os.str());
  }
  const ConvexBody sphere = ConvexBody::sphere(radius);
  const double eta = rho_bulk * sphere_volume(radius);
  const double mu_bulk = bulk_eos(sphere, eta, model).beta_mu_ex;
  const PlanarKernels kernels = planar_kernels(radius, grid);

  std::vector<double> boltzmann(beta_v_ext.size());
  for (std::size_t i = 0; i < beta_v_ext.size(); ++i) boltzmann[i] = std::exp(-beta_v_ext[i]);

  PicardResult res;
  DensityProfile& p = res.profile;
  p.grid = grid;
  p.left_fill = rho_bulk * boltzmann.front();
  p.right_fill = rho_bulk * boltzmann.back();
  p.rho.resize(boltzmann.size());
  for (std::size_t i = 0; i < boltzmann.size(); ++i) p.rho[i] = boltzmann[i] > 0.0 ? rho_bulk : 0.0;

  double alpha = params.mixing;
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> target(p.rho.size());
  std::vector<double> last_good = p.rho;
  bool have_mu = false;
  for (long iter = 1; iter <= params.max_iterations; ++iter) {
    std::vector<double> mu;
    try {
      mu = mu_ex_field(weighted_density_fields(p, kernels), model, kernels);
    } catch (const DomainError&) {
      if (!have_mu) throw;
      // The last mixed step left the domain: retreat and mix more gently.
      p.rho = last_good;
      alpha *= 0.5;
      if (alpha < 1e-12) throw ConvergenceError("Picard mixing underflow", res.residual_history);
      continue;
    }
    have_mu = true;
    double residual = 0.0;
    for (std::size_t i = 0; i < p.rho.size(); ++i) {
      target[i] = boltzmann[i] > 0.0 ? rho_bulk * boltzmann[i] * std::exp(mu_bulk - mu[i]) : 0.0;
      residual = std::max(residual, std::abs(target[i] - p.rho[i]));
    }
    residual /= rho_bulk;
    res.residual_history.push_back(residual);
    if (params.on_iteration) params.on_iteration(iter, residual);
    if (!std::isfinite(residual)) throw ConvergenceError("Picard residual is not finite", res.residual_history);
    if (residual < params.tolerance) {
      res.iterations = iter;
      res.residual = residual;
      res.final_mixing = alpha;
      res.bulk_mu_ex = mu_bulk;
      res.mu_ex = std::move(mu);
      return res;
    }
    if (residual > 2.0 * previous) alpha = std::max(0.5 * alpha, 1e-12);
    previous = residual;
    last_good = p.rho;
    for (std::size_t i = 0; i < p.rho.size(); ++i) p.rho[i] = (1.0 - alpha) * p.rho[i] + alpha * target[i];
  }
  std::ostringstream os;
  os << "Picard iteration did not reach tolerance " << params.tolerance << " in " << params.max_iterations
     << " iterations (last residual " << res.residual_history.back() << ")";
  throw ConvergenceError(os.str(), res.residual_history);
}

double grand_potential(const DensityProfile& profile, const FreeEnergyModel& model, const PlanarKernels& kernels,
                       double beta_mu, const std::vector<double>& beta_v_ext) {
  const PlanarFields f = weighted_density_fields(profile, kernels);
  double sum = 0.0;
  for (int i = 0; i < profile.grid.n_points; ++i) {
    const double rho = profile.rho[i];
    sum += phi_excess(f.at(i), model);
    if (rho > 0.0) sum += rho * (std::log(rho) - 1.0) - rho * (beta_mu - beta_v_ext[i]);
  }
  return profile.grid.dz * sum;
}

double contact_density(const DensityProfile& profile, const std::vector<double>& beta_v_ext) {
  std::size_t first = 0;
  while (first < beta_v_ext.size() && std::isinf(beta_v_ext[first])) ++first;
  if (first + 1 >= profile.rho.size()) throw DomainError("no admitted cells next to the wall");
  return 1.5 * profile.rho[first] - 0.5 * profile.rho[first + 1];
}

}  // namespace fmt_engine
