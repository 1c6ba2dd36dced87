#pragma once

#include <functional>
#include <vector>

#include "fmt_engine/fmt_model.hpp"

namespace fmt_engine {

/// Cell-centred 1D grid: node i sits at origin + (i + 1/2) dz.
struct Grid1D {
  double dz = 0.01;
  int n_points = 0;
  double origin = 0.0;

  double z(int i) const { return origin + (i + 0.5) * dz; }
  double extent() const { return dz * n_points; }

  /// Throws DomainError unless dz > 0 and n_points >= 64.
  static Grid1D make(double dz, int n_points, double origin = 0.0);
};

/// Density on the grid. Outside the grid the density is continued by the
/// constant fill values.
struct DensityProfile {
  Grid1D grid;
  std::vector<double> rho;
  double left_fill = 0.0;
  double right_fill = 0.0;
};

/// Cell-integrated z-projections of the sphere weights, index m + half_width
/// for the offset m in [-half_width, half_width]:
///   chi 1/(2R), k0 1/2, s0 2 pi R, v pi (R^2 - s^2), s1z 2 pi s, k1z s/(2R),
///   s2zz 2 pi s^2 / R, s2perp pi (R^2 - s^2) / R  (xx and yy components),
/// all restricted to |s| <= R. Each entry is the exact integral over one cell.
struct PlanarKernels {
  double radius = 0.0;
  double dz = 0.0;
  int half_width = 0;
  std::vector<double> chi, k0, s0, v, s1z, k1z, s2zz, s2perp;

  int size() const { return 2 * half_width + 1; }
};

/// Throws DomainError if R < 3 dz.
PlanarKernels planar_kernels(double radius, const Grid1D& grid);

/// Weighted densities on the grid extended by half_width nodes on both sides;
/// node i of the grid is entry i + offset.
struct PlanarFields {
  int offset = 0;
  double dz = 0.0;
  std::vector<WeightedDensities> n;

  const WeightedDensities& at(int i) const { return n[static_cast<std::size_t>(i + offset)]; }
};

/// n_A(z_i) = sum_j rho_j K_A[i - j]. Throws DomainError if the kernel is
/// wider than the grid.
PlanarFields weighted_density_fields(const DensityProfile& profile, const PlanarKernels& kernels);

/// beta mu_ex(z_j) = sum_i dPhi/dn_A(z_i) K_A[i - j] on the grid nodes. Odd
/// kernels enter mirrored. Throws DomainError naming the first node with n_v >= 1.
std::vector<double> mu_ex_field(const PlanarFields& fields, const FreeEnergyModel& model,
                                const PlanarKernels& kernels);

/// Excess free energy per unit area, dz * sum of Phi over the extended nodes
/// that feel the grid (the exact potential whose gradient is mu_ex_field).
double excess_free_energy(const PlanarFields& fields, const FreeEnergyModel& model);

/// beta V_ext of a hard wall at z = 0 acting on sphere centres: +inf for
/// nodes with z < R, 0 otherwise.
std::vector<double> hard_wall_potential(const Grid1D& grid, double radius);

struct PicardParams {
  double mixing = 0.05;
  double tolerance = 1e-8;
  long max_iterations = 100'000;
  /// Called after every iteration with (iteration, residual).
  std::function<void(long, double)> on_iteration;
};

struct PicardResult {
  DensityProfile profile;
  long iterations = 0;
  double residual = 0.0;
  double final_mixing = 0.0;
  double bulk_mu_ex = 0.0;
  std::vector<double> mu_ex;
  std::vector<double> residual_history;
};

/// Solve rho = rho_b exp(beta mu_ex_b - beta mu_ex(z) - beta V(z)) for hard
/// spheres of radius R by damped Picard iteration, starting from rho_b where
/// V is finite. The mixing parameter is halved whenever the residual more
/// than doubles or a trial step leaves the domain n_v < 1.
/// Throws DomainError for bad parameters and ConvergenceError (carrying the
/// residual history) when max_iterations is reached.
PicardResult picard_solve(const FreeEnergyModel& model, double radius, const Grid1D& grid,
                          const std::vector<double>& beta_v_ext, double rho_bulk, const PicardParams& params = {});

/// Omega per unit area: dz sum_i [rho (ln rho - 1) + Phi - rho (mu - V)] over
/// the grid nodes (thermal wavelength 1, rho ln rho = 0 at rho = 0).
double grand_potential(const DensityProfile& profile, const FreeEnergyModel& model, const PlanarKernels& kernels,
                       double beta_mu, const std::vector<double>& beta_v_ext);

/// Density at the wall contact plane z = R, extrapolated linearly from the
/// first two admitted cells.
double contact_density(const DensityProfile& profile, const std::vector<double>& beta_v_ext);

}  // namespace fmt_engine
