#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fmt_engine/error.hpp"
#include "fmt_engine/identities.hpp"
#include "fmt_engine/planar_dft.hpp"

using namespace fmt_engine;

namespace {

constexpr double kR = 0.5;

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

DensityProfile uniform(const Grid1D& g, double rho) { return {g, std::vector<double>(g.n_points, rho), rho, rho}; }

// Volume of the part of a ball of radius R centred at height z that lies above 0.
double cap_volume(double z, double r) {
  if (z >= r) return 4.0 * kPi * r * r * r / 3.0;
  if (z <= -r) return 0.0;
  const double lo = -z;
  return kPi * ((r * r * r - r * r * r / 3.0) - (r * r * lo - lo * lo * lo / 3.0));
}

struct Component {
  const char* name;
  const std::vector<double> PlanarKernels::*kernel;
  double (*field)(const WeightedDensities&);
};

const Component kComponents[] = {
    {"chi", &PlanarKernels::chi, [](const WeightedDensities& w) { return w.n_chi; }},
    {"k0", &PlanarKernels::k0, [](const WeightedDensities& w) { return w.n_k0; }},
    {"s0", &PlanarKernels::s0, [](const WeightedDensities& w) { return w.n_s0; }},
    {"v", &PlanarKernels::v, [](const WeightedDensities& w) { return w.n_v; }},
    {"s1z", &PlanarKernels::s1z, [](const WeightedDensities& w) { return w.n_s1.z(); }},
    {"k1z", &PlanarKernels::k1z, [](const WeightedDensities& w) { return w.n_k1.z(); }},
    {"s2zz", &PlanarKernels::s2zz, [](const WeightedDensities& w) { return w.n_s2(2, 2); }},
    {"s2perp", &PlanarKernels::s2perp, [](const WeightedDensities& w) { return w.n_s2(0, 0); }},
};

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW(Grid1D::make(0.01, 63), DomainError);
  EXPECT_THROW(Grid1D::make(0.0, 100), DomainError);
  const Grid1D g = Grid1D::make(0.1, 100, -1.0);
  EXPECT_NEAR(g.z(0), -0.95, 1e-15);
  EXPECT_NEAR(g.extent(), 10.0, 1e-12);
}

TEST(Kernels, SumRules) {
  const Grid1D g = Grid1D::make(kR / 100, 4000);
  const PlanarKernels k = planar_kernels(kR, g);
  EXPECT_EQ(k.half_width, 100);
  EXPECT_NEAR(sum(k.v), 4.0 * kPi * kR * kR * kR / 3.0, 1e-12);
  EXPECT_NEAR(sum(k.chi), 1.0, 1e-12);
  EXPECT_NEAR(sum(k.s0), 4.0 * kPi * kR * kR, 1e-12);
  EXPECT_NEAR(sum(k.k0), kR, 1e-12);
  EXPECT_NEAR(sum(k.s1z), 0.0, 1e-14);
  EXPECT_NEAR(sum(k.k1z), 0.0, 1e-14);
  EXPECT_NEAR(sum(k.s2zz) + 2.0 * sum(k.s2perp), 4.0 * kPi * kR * kR, 1e-12);
  EXPECT_NEAR(sum(k.s2zz), 4.0 * kPi * kR * kR / 3.0, 1e-12);
  for (int m = 0; m < k.size(); ++m) {
    EXPECT_EQ(k.v[m], k.v[k.size() - 1 - m]);
    EXPECT_EQ(k.s1z[m], -k.s1z[k.size() - 1 - m]);
  }
}

TEST(Kernels, OddCellCountAtNonIntegerRadius) {
  const Grid1D g = Grid1D::make(0.013, 2000);
  const PlanarKernels k = planar_kernels(kR, g);
  EXPECT_NEAR(sum(k.v), 4.0 * kPi * kR * kR * kR / 3.0, 1e-12);
  EXPECT_NEAR(sum(k.s0), 4.0 * kPi * kR * kR, 1e-12);
}

TEST(Kernels, UnderResolvedRadiusRejected) {
  EXPECT_THROW(planar_kernels(0.02, Grid1D::make(0.01, 100)), DomainError);
}

TEST(Fields, UniformDensityReproducesBulk) {
  const Grid1D g = Grid1D::make(kR / 100, 1000);
  const double rho = 0.6;
  const PlanarFields f = weighted_density_fields(uniform(g, rho), planar_kernels(kR, g));
  const WeightedDensities b = bulk_weighted_densities(ConvexBody::sphere(kR), rho);
  for (int i : {0, 500, 999}) {
    const WeightedDensities& w = f.at(i);
    EXPECT_NEAR(w.n_v, b.n_v, 1e-12);
    EXPECT_NEAR(w.n_s0, b.n_s0, 1e-12);
    EXPECT_NEAR(w.n_k0, b.n_k0, 1e-12);
    EXPECT_NEAR(w.n_chi, b.n_chi, 1e-12);
    EXPECT_NEAR(w.n_s1.norm(), 0.0, 1e-13);
    EXPECT_TRUE(w.n_s2.isApprox(b.n_s2, 1e-12));
  }
}

TEST(Fields, StepProfileGivesSphereCapVolume) {
  const double dz = kR / 50;
  const Grid1D g = Grid1D::make(dz, 400, -4.0);
  DensityProfile p{g, std::vector<double>(400, 0.0), 0.0, 1.0};
  for (int i = 0; i < 400; ++i) p.rho[i] = g.z(i) > 0.0 ? 1.0 : 0.0;
  const PlanarFields f = weighted_density_fields(p, planar_kernels(kR, g));
  for (int i = 0; i < 400; ++i) EXPECT_NEAR(f.at(i).n_v, cap_volume(g.z(i), kR), 1e-12) << g.z(i);
}

TEST(Fields, ImpulseResponseIsKernel) {
  const Grid1D g = Grid1D::make(kR / 20, 200);
  const PlanarKernels k = planar_kernels(kR, g);
  DensityProfile p{g, std::vector<double>(200, 0.0), 0.0, 0.0};
  p.rho[100] = 1.0;
  const PlanarFields f = weighted_density_fields(p, k);
  for (int m = -k.half_width; m <= k.half_width; ++m) {
    EXPECT_EQ(f.at(100 + m).n_v, k.v[m + k.half_width]);
    EXPECT_EQ(f.at(100 + m).n_s1.z(), k.s1z[m + k.half_width]);
  }
  EXPECT_EQ(f.at(100 + k.half_width + 1).n_v, 0.0);
}

TEST(Fields, KernelWiderThanGridRejected) {
  const Grid1D g = Grid1D::make(kR / 40, 64);
  EXPECT_THROW(weighted_density_fields(uniform(g, 0.1), planar_kernels(kR, g)), DomainError);
}

TEST(Fields, ConvolutionAdjointness) {
  const Grid1D g = Grid1D::make(kR / 30, 300);
  const PlanarKernels k = planar_kernels(kR, g);
  const int h = k.half_width;
  DensityProfile p{g, std::vector<double>(300), 0.0, 0.0};
  RandomStream rng(31, 0);
  for (double& x : p.rho) x = rng.uniform();
  std::vector<double> gfun(300 + 2 * h);
  for (double& x : gfun) x = 2.0 * rng.uniform() - 1.0;
  const PlanarFields f = weighted_density_fields(p, k);
  for (const Component& c : kComponents) {
    const std::vector<double>& kern = k.*(c.kernel);
    double lhs = 0.0, rhs = 0.0;
    for (int i = -h; i < 300 + h; ++i) lhs += c.field(f.at(i)) * gfun[i + h];
    for (int j = 0; j < 300; ++j) {
      double mirrored = 0.0;
      for (int m = -h; m <= h; ++m) mirrored += gfun[j + m + h] * kern[m + h];
      rhs += p.rho[j] * mirrored;
    }
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs))) << c.name;
  }
}

TEST(MuEx, UniformBulkIsConstant) {
  const Grid1D g = Grid1D::make(kR / 100, 800);
  const PlanarKernels k = planar_kernels(kR, g);
  for (const FreeEnergyModel& m : {FreeEnergyModel::rosenfeld_original(), FreeEnergyModel::tarazona_tensor()}) {
    const double eta = 0.35, rho = eta / (4.0 * kPi * kR * kR * kR / 3.0);
    const std::vector<double> mu = mu_ex_field(weighted_density_fields(uniform(g, rho), k), m, k);
    const double expected = bulk_eos(ConvexBody::sphere(kR), eta, m).beta_mu_ex;
    for (double x : mu) EXPECT_NEAR(x, expected, 1e-10);
  }
}

TEST(MuEx, ZeroDensityGivesZeroField) {
  const Grid1D g = Grid1D::make(kR / 10, 100);
  const PlanarKernels k = planar_kernels(kR, g);
  for (double x : mu_ex_field(weighted_density_fields(uniform(g, 0.0), k), FreeEnergyModel::rosenfeld_original(), k)) {
    EXPECT_EQ(x, 0.0);
  }
}

TEST(MuEx, FunctionalDerivativeOfExcessFreeEnergy) {
  const Grid1D g = Grid1D::make(kR / 20, 200);
  const PlanarKernels k = planar_kernels(kR, g);
  DensityProfile p{g, std::vector<double>(200), 0.4, 0.9};
  for (int i = 0; i < 200; ++i) p.rho[i] = 0.6 + 0.4 * std::sin(0.21 * i) * std::exp(-0.01 * i);
  for (const FreeEnergyModel& m : {FreeEnergyModel::rosenfeld_original(), FreeEnergyModel::tarazona_tensor()}) {
    const std::vector<double> mu = mu_ex_field(weighted_density_fields(p, k), m, k);
    for (int j : {0, 7, 100, 199}) {
      const double h = 1e-5;
      DensityProfile up = p, dn = p;
      up.rho[j] += h;
      dn.rho[j] -= h;
      const double fd = (excess_free_energy(weighted_density_fields(up, k), m) -
                         excess_free_energy(weighted_density_fields(dn, k), m)) /
                        (2.0 * h * g.dz);
      EXPECT_NEAR(fd, mu[j], 1e-6 * std::max(1.0, std::abs(mu[j]))) << m.name() << " node " << j;
    }
  }
}

TEST(MuEx, PackingAboveOneNamesNode) {
  const Grid1D g = Grid1D::make(kR / 10, 100);
  const PlanarKernels k = planar_kernels(kR, g);
  DensityProfile p = uniform(g, 0.5);
  p.rho[50] = 200.0;
  try {
    mu_ex_field(weighted_density_fields(p, k), FreeEnergyModel::rosenfeld_original(), k);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Picard, NoPotentialConvergesImmediately) {
  const Grid1D g = Grid1D::make(kR / 20, 400);
  const PicardResult r = picard_solve(FreeEnergyModel::rosenfeld_original(), kR, g, std::vector<double>(400, 0.0), 0.5);
  EXPECT_LE(r.iterations, 2);
  for (double x : r.profile.rho) EXPECT_NEAR(x, 0.5, 1e-10);
}

TEST(Picard, BadParameters) {
  const Grid1D g = Grid1D::make(kR / 20, 400);
  const std::vector<double> v(400, 0.0);
  const FreeEnergyModel m = FreeEnergyModel::rosenfeld_original();
  EXPECT_THROW(picard_solve(m, kR, g, v, 0.5, PicardParams{.mixing = 0.0, .on_iteration = {}}), DomainError);
  EXPECT_THROW(picard_solve(m, kR, g, v, 0.5, PicardParams{.mixing = 1.5, .on_iteration = {}}), DomainError);
  EXPECT_THROW(picard_solve(m, kR, g, v, -1.0), DomainError);
  EXPECT_THROW(picard_solve(m, kR, Grid1D::make(kR / 20, 100), std::vector<double>(100, 0.0), 0.5), DomainError);
}

TEST(Picard, MaxIterationsCarriesHistory) {
  const Grid1D g = Grid1D::make(kR / 20, 400);
  const std::vector<double> wall = hard_wall_potential(g, kR);
  try {
    picard_solve(FreeEnergyModel::rosenfeld_original(), kR, g, wall, 0.5, PicardParams{.max_iterations = 5, .on_iteration = {}});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.history().size(), 5u);
  }
}

TEST(Picard, HardWallContactTheorem) {
  const double eta = 0.3;
  const double rho = eta / (4.0 * kPi * kR * kR * kR / 3.0);
  const Grid1D g = Grid1D::make(kR / 100, 4000);
  const std::vector<double> wall = hard_wall_potential(g, kR);
  const FreeEnergyModel m = FreeEnergyModel::rosenfeld_original();
  const PicardResult r = picard_solve(m, kR, g, wall, rho);
  const double p = bulk_eos(ConvexBody::sphere(kR), eta, m).beta_pressure;
  EXPECT_NEAR(contact_density(r.profile, wall) / p, 1.0, 5e-3);
  for (int i = 0; i < g.n_points; ++i) {
    if (g.z(i) < kR) {
      EXPECT_EQ(r.profile.rho[i], 0.0);
    }
    EXPECT_GE(r.profile.rho[i], 0.0);
  }
  const double beta_mu = std::log(rho) + r.bulk_mu_ex;
  const PlanarKernels k = planar_kernels(kR, g);
  DensityProfile start = r.profile;
  for (int i = 0; i < g.n_points; ++i) start.rho[i] = std::isinf(wall[i]) ? 0.0 : rho;
  EXPECT_LE(grand_potential(r.profile, m, k, beta_mu, wall), grand_potential(start, m, k, beta_mu, wall));
}

TEST(Picard, GridSelfConvergence) {
  const double eta = 0.2;
  const double rho = eta / (4.0 * kPi * kR * kR * kR / 3.0);
  const FreeEnergyModel m = FreeEnergyModel::rosenfeld_original();
  const Grid1D coarse = Grid1D::make(kR / 50, 1000);
  const Grid1D fine = Grid1D::make(kR / 100, 2000);
  const PicardResult a = picard_solve(m, kR, coarse, hard_wall_potential(coarse, kR), rho);
  const PicardResult b = picard_solve(m, kR, fine, hard_wall_potential(fine, kR), rho);
  double worst = 0.0;
  for (int i = 0; i < coarse.n_points; ++i) {
    // Fine cells 2i and 2i+1 tile coarse cell i; skip the cells cut by the wall.
    if (coarse.z(i) < kR + coarse.dz) continue;
    const double avg = 0.5 * (b.profile.rho[2 * i] + b.profile.rho[2 * i + 1]);
    worst = std::max(worst, std::abs(a.profile.rho[i] - avg) / rho);
  }
  EXPECT_LT(worst, 1e-3);

  const double p = bulk_eos(ConvexBody::sphere(kR), eta, m).beta_pressure;
  const double err_coarse = std::abs(contact_density(a.profile, hard_wall_potential(coarse, kR)) / p - 1.0);
  const double err_fine = std::abs(contact_density(b.profile, hard_wall_potential(fine, kR)) / p - 1.0);
  EXPECT_LT(err_fine, err_coarse);
}

TEST(GrandPotential, UniformBulkPressure) {
  const Grid1D g = Grid1D::make(kR / 50, 500);
  const PlanarKernels k = planar_kernels(kR, g);
  const FreeEnergyModel m = FreeEnergyModel::rosenfeld_original();
  const double eta = 0.3, rho = eta / (4.0 * kPi * kR * kR * kR / 3.0);
  const BulkState b = bulk_eos(ConvexBody::sphere(kR), eta, m);
  const double omega = grand_potential(uniform(g, rho), m, k, std::log(rho) + b.beta_mu_ex, std::vector<double>(500, 0.0));
  EXPECT_NEAR(-omega / g.extent(), b.beta_pressure, 1e-8);
}

TEST(GrandPotential, EmptyProfileIsZero) {
  const Grid1D g = Grid1D::make(kR / 10, 100);
  EXPECT_EQ(grand_potential(uniform(g, 0.0), FreeEnergyModel::rosenfeld_original(), planar_kernels(kR, g), 1.0,
                            std::vector<double>(100, 0.0)),
            0.0);
}
