#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "fmt_engine/error.hpp"
#include "fmt_engine/fmt_model.hpp"
#include "fmt_engine/identities.hpp"
#include "fmt_engine/weights.hpp"

using namespace fmt_engine;

namespace {

double pressure_reference(double eta) { return (1.0 + eta + eta * eta) / std::pow(1.0 - eta, 3); }

// Excess chemical potential of the same equation of state, in closed form.
double mu_reference(double eta) {
  return -std::log(1.0 - eta) + eta * (14.0 - 13.0 * eta + 5.0 * eta * eta) / (2.0 * std::pow(1.0 - eta, 3));
}

FreeEnergyModel models(int i) {
  switch (i) {
    case 0: return FreeEnergyModel::rosenfeld_original();
    case 1: return FreeEnergyModel::tarazona_tensor();
    default: {
      CoefficientTable t = CoefficientTable::tarazona();
      t.s0_s1s1 = -0.02;
      t.s1_s2_s1 = 0.01;
      return FreeEnergyModel::generalized(t);
    }
  }
}

// Central difference of phi_excess along one density component.
double fd(const WeightedDensities& n, const FreeEnergyModel& m, const std::function<double&(WeightedDensities&)>& c) {
  WeightedDensities up = n, dn = n;
  const double h = 1e-6 * std::max(1.0, std::abs(c(up)));
  c(up) += h;
  c(dn) -= h;
  return (phi_excess(up, m) - phi_excess(dn, m)) / (2.0 * h);
}

}  // namespace

TEST(GeneratingPhi, DerivativesMatchFiniteDifferences) {
  for (double x : {0.0, 0.1, 0.35, 0.6, 0.85}) {
    const GeneratingPhi g = generating_phi(x);
    const double h = 1e-5;
    const GeneratingPhi up = generating_phi(x + h), dn = generating_phi(x - h);
    EXPECT_NEAR((up.phi - dn.phi) / (2 * h), g.d1, 1e-7 * std::max(1.0, std::abs(g.d1)));
    EXPECT_NEAR((up.d1 - dn.d1) / (2 * h), g.d2, 1e-7 * std::max(1.0, std::abs(g.d2)));
    EXPECT_NEAR((up.d2 - dn.d2) / (2 * h), g.d3, 1e-7 * std::max(1.0, std::abs(g.d3)));
    EXPECT_NEAR((up.d3 - dn.d3) / (2 * h), g.d4, 1e-6 * std::max(1.0, std::abs(g.d4)));
    EXPECT_NEAR(g.d4, 2.0 / std::pow(1.0 - x, 3), 1e-12 * g.d4);
  }
  EXPECT_THROW(generating_phi(1.0), DomainError);
}

TEST(Phi, GradientMatchesFiniteDifferences) {
  for (int m = 0; m < 3; ++m) {
    const FreeEnergyModel model = models(m);
    for (std::uint64_t i = 0; i < 50; ++i) {
      RandomStream rng(21, i);
      const WeightedDensities n = random_densities(rng, 0.7);
      const DensityGradient g = phi_gradient(n, model);
      const double tol = 1e-6 * std::max(1.0, std::abs(phi_excess(n, model)));
      EXPECT_NEAR(g.n_chi, fd(n, model, [](WeightedDensities& w) -> double& { return w.n_chi; }), tol);
      EXPECT_NEAR(g.n_k0, fd(n, model, [](WeightedDensities& w) -> double& { return w.n_k0; }), tol);
      EXPECT_NEAR(g.n_s0, fd(n, model, [](WeightedDensities& w) -> double& { return w.n_s0; }), tol);
      EXPECT_NEAR(g.n_v, fd(n, model, [](WeightedDensities& w) -> double& { return w.n_v; }), tol * 10);
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(g.n_s1[k], fd(n, model, [k](WeightedDensities& w) -> double& { return w.n_s1[k]; }), tol);
        EXPECT_NEAR(g.n_k1[k], fd(n, model, [k](WeightedDensities& w) -> double& { return w.n_k1[k]; }), tol);
      }
      // Symmetric perturbation of the tensor: d/dt Phi(n + t (E_ab + E_ba)) = g_ab + g_ba.
      for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
          WeightedDensities up = n, dn = n;
          const double h = 1e-6;
          up.n_s2(a, b) += h;
          dn.n_s2(a, b) -= h;
          if (a != b) {
            up.n_s2(b, a) += h;
            dn.n_s2(b, a) -= h;
          }
          const double d = (phi_excess(up, model) - phi_excess(dn, model)) / (2.0 * h);
          const double expected = a == b ? g.n_s2(a, a) : g.n_s2(a, b) + g.n_s2(b, a);
          EXPECT_NEAR(d, expected, tol) << model.name() << " s2(" << a << "," << b << ")";
        }
      }
    }
  }
}

TEST(Phi, GeneralizedTableReproducesClosedForms) {
  const FreeEnergyModel r = FreeEnergyModel::generalized(CoefficientTable::rosenfeld());
  const FreeEnergyModel t = FreeEnergyModel::generalized(CoefficientTable::tarazona());
  for (std::uint64_t i = 0; i < 200; ++i) {
    RandomStream rng(22, i);
    const WeightedDensities n = random_densities(rng);
    const double pr = phi_excess(n, FreeEnergyModel::rosenfeld_original());
    const double pt = phi_excess(n, FreeEnergyModel::tarazona_tensor());
    EXPECT_NEAR(phi_excess(n, r), pr, 1e-12 * std::max(1.0, std::abs(pr)));
    EXPECT_NEAR(phi_excess(n, t), pt, 1e-12 * std::max(1.0, std::abs(pt)));
  }
}

TEST(Phi, RejectsPackingAtOrAboveOne) {
  WeightedDensities n;
  n.n_v = 1.0;
  EXPECT_THROW(phi_excess(n, FreeEnergyModel::rosenfeld_original()), DomainError);
  EXPECT_THROW(FreeEnergyModel::generalized(CoefficientTable{.dimension = 4}), DomainError);
}

TEST(Phi, ZeroDensityGivesZero) {
  for (int m = 0; m < 3; ++m) EXPECT_EQ(phi_excess(WeightedDensities{}, models(m)), 0.0);
}

TEST(Spt, ResidualVanishes) {
  EXPECT_TRUE(check_spt(FreeEnergyModel::rosenfeld_original(), false, 10000, 4).pass);
  EXPECT_TRUE(check_spt(FreeEnergyModel::tarazona_tensor(), true, 10000, 4).pass);
}

TEST(Spt, ResidualIsChiDeficitForGeneralTables) {
  CoefficientTable t = CoefficientTable::rosenfeld();
  t.chi = 0.5;
  const FreeEnergyModel m = FreeEnergyModel::generalized(t);
  RandomStream rng(1, 1);
  const WeightedDensities n = random_densities(rng);
  EXPECT_NEAR(spt_residual(n, m), -0.5 * n.n_chi, 1e-12 * std::max(1.0, std::abs(phi_excess(n, m))));
}

TEST(Bulk, SphereEquationOfState) {
  const ConvexBody s = ConvexBody::sphere(0.5);
  for (double eta = 0.05; eta < 0.46; eta += 0.05) {
    for (int m = 0; m < 2; ++m) {
      const BulkState b = bulk_eos(s, eta, models(m));
      EXPECT_NEAR(b.compressibility, pressure_reference(eta), 1e-10 * pressure_reference(eta));
      EXPECT_NEAR(b.beta_mu_ex, mu_reference(eta), 1e-10 * std::max(1.0, mu_reference(eta)));
    }
  }
  EXPECT_EQ(bulk_eos(s, 0.0, models(0)).compressibility, 1.0);
  EXPECT_THROW(bulk_eos(s, 1.0, models(0)), DomainError);
}

TEST(Bulk, ChemicalPotentialIsFreeEnergyDerivative) {
  for (const ConvexBody& body : {ConvexBody::sphere(0.5), ConvexBody::spheroid(1.0, 2.0)}) {
    const double v = minkowski_measures(body).volume;
    for (double eta : {0.1, 0.25, 0.4}) {
      const double rho = eta / v;
      const double h = 1e-5 * rho;
      auto f = [&](double r) { return phi_excess(bulk_weighted_densities(body, r), models(0)); };
      const double fd_mu = (f(rho + h) - f(rho - h)) / (2.0 * h);
      const double mu = bulk_eos(body, eta, models(0)).beta_mu_ex;
      EXPECT_NEAR(mu, fd_mu, 1e-8 * std::max(1.0, std::abs(mu))) << body.label() << " eta " << eta;
    }
  }
}

TEST(Bulk, PressureFromGibbsDuhem) {
  // beta p = rho + rho mu_ex - f_ex.
  const ConvexBody body = ConvexBody::spheroid(1.0, 0.5);
  const double v = minkowski_measures(body).volume;
  const double eta = 0.3, rho = eta / v;
  const BulkState b = bulk_eos(body, eta, models(0));
  const double f = phi_excess(bulk_weighted_densities(body, rho), models(0));
  EXPECT_NEAR(b.beta_pressure, rho + rho * b.beta_mu_ex - f, 1e-12 * b.beta_pressure);
}

TEST(Bulk, SphereWeightedDensities) {
  const double r = 0.5, rho = 0.7;
  const WeightedDensities n = bulk_weighted_densities(ConvexBody::sphere(r), rho);
  EXPECT_NEAR(n.n_v, rho * 4.0 * kPi * r * r * r / 3.0, 1e-14);
  EXPECT_NEAR(n.n_s0, rho * 4.0 * kPi * r * r, 1e-14);
  EXPECT_NEAR(n.n_k0, rho * r, 1e-14);
  EXPECT_NEAR(n.n_chi, rho, 1e-14);
  EXPECT_TRUE(n.n_s2.isApprox(Mat3::Identity() * n.n_s0 / 3.0, 1e-14));
}

TEST(Virial, SeriesForSpheres) {
  for (int m = 0; m < 2; ++m) {
    const VirialCoefficients c = virial_series_bulk(ConvexBody::sphere(1.0), models(m));
    EXPECT_NEAR(c.b2_reduced, 4.0, 1e-10);
    EXPECT_NEAR(c.b3_reduced, 10.0, 1e-10);
    EXPECT_EQ(c.b1, 1.0);
  }
}

TEST(Virial, SeriesSecondCoefficientIsHalfExcludedVolume) {
  const ConvexBody s = ConvexBody::spheroid(1.0, 2.0);
  const VirialCoefficients c = virial_series_bulk(s, models(0));
  EXPECT_NEAR(c.b2, 76.0430737832782 / 2.0, 1e-9);
}

TEST(Virial, TarazonaPhi3Examples) {
  EXPECT_NEAR(tarazona_phi3(Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()), 0.0, 1e-15);
  const Vec3 n = Vec3::UnitZ();
  EXPECT_NEAR(tarazona_phi3(n, n, n), 0.0, 1e-15);
  EXPECT_NEAR(tarazona_phi3(n, -n, Vec3::UnitX()), 2.0 / (16.0 * kPi), 1e-15);
}
