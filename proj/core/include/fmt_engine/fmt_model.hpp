#pragma once

#include <string>

#include "fmt_engine/geometry.hpp"
#include "fmt_engine/types.hpp"

namespace fmt_engine {

/// Weighted densities n_A. Scalars carry the normalisation of the weights:
/// n_chi ~ 1/L^3, n_k0 and n_k1 ~ 1/L^2, n_s0, n_s1 and n_s2 ~ 1/L, n_v dimensionless.
struct WeightedDensities {
  double n_chi = 0.0;
  double n_k0 = 0.0;
  Vec3 n_k1 = Vec3::Zero();
  double n_s0 = 0.0;
  Vec3 n_s1 = Vec3::Zero();
  Mat3 n_s2 = Mat3::Zero();
  double n_v = 0.0;

  /// Sum over all components of a * b (tensors contracted fully).
  double dot(const WeightedDensities& other) const;

  WeightedDensities& operator+=(const WeightedDensities& other);
  WeightedDensities operator*(double f) const;
};

/// Same layout, holding dPhi/dn_A (tensor components treated as independent).
using DensityGradient = WeightedDensities;

/// phi(n) = (1 - n) ln(1 - n) + n and its first four derivatives.
struct GeneratingPhi {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
};

/// Throws DomainError for n_v >= 1 or non-finite n_v.
GeneratingPhi generating_phi(double n_v);

/// Coefficient table of the generalized 0-loop functional
///   Phi = chi n_chi phi' + [k0s0 n_k0 n_s0 + k1s1 n_k1.n_s1] phi''
///       + [s0_cubed n_s0^3 + s0_s1s1 n_s0 n_s1.n_s1 + s1_s2_s1 n_s1.n_s2.n_s1
///          + tr_s2_cubed tr(n_s2^3) + s0_tr_s2_sq n_s0 tr(n_s2^2)] phi'''
/// truncated after order `dimension` (1, 2 or 3) in the weights.
struct CoefficientTable {
  double chi = 1.0;
  double k0s0 = 1.0;
  double k1s1 = -1.0;
  double s0_cubed = 0.0;
  double s0_s1s1 = 0.0;
  double s1_s2_s1 = 0.0;
  double tr_s2_cubed = 0.0;
  double s0_tr_s2_sq = 0.0;
  int dimension = 3;

  static CoefficientTable rosenfeld();
  static CoefficientTable tarazona();
};

enum class ModelVariant { rosenfeld_original, tarazona_tensor, generalized };

class FreeEnergyModel {
 public:
  static FreeEnergyModel rosenfeld_original() { return FreeEnergyModel(ModelVariant::rosenfeld_original); }
  static FreeEnergyModel tarazona_tensor() { return FreeEnergyModel(ModelVariant::tarazona_tensor); }
  /// Throws DomainError if dimension is not 1, 2 or 3 or a coefficient is not finite.
  static FreeEnergyModel generalized(const CoefficientTable& table);

  ModelVariant variant() const noexcept { return variant_; }
  const CoefficientTable& coefficients() const noexcept { return table_; }
  std::string name() const;

 private:
  explicit FreeEnergyModel(ModelVariant v);
  FreeEnergyModel(ModelVariant v, const CoefficientTable& t) : variant_(v), table_(t) {}

  ModelVariant variant_;
  CoefficientTable table_;
};

/// Parse "rosenfeld", "tarazona" or "generalized" (case-sensitive).
ModelVariant parse_model_variant(const std::string& name);

/// Excess free-energy density in units of kT. Rosenfeld and Tarazona use their
/// closed forms; the generalized variant is assembled from phi derivatives.
/// Throws DomainError for n_v >= 1.
double phi_excess(const WeightedDensities& n, const FreeEnergyModel& model);

/// Analytic partial derivatives dPhi/dn_A.
DensityGradient phi_gradient(const WeightedDensities& n, const FreeEnergyModel& model);

/// Phi + dPhi/dn_v - sum_A n_A dPhi/dn_A - n_chi, the sum running over every
/// weighted density including n_v.
double spt_residual(const WeightedDensities& n, const FreeEnergyModel& model);

/// Weighted densities of the uniform fluid: n_A = rho * (integral of w_A).
/// Vectors vanish and n_s2 = rho S I / 3. Throws DomainError for rho < 0.
WeightedDensities bulk_weighted_densities(const ConvexBody& body, double rho);

struct BulkState {
  double packing_fraction = 0.0;
  double rho = 0.0;
  double beta_pressure = 0.0;
  double compressibility = 1.0;
  double beta_mu_ex = 0.0;
};

/// Bulk thermodynamics at packing fraction eta:
///   beta p = rho + sum_A n_A dPhi/dn_A - Phi,  Z = beta p / rho,
///   beta mu_ex = sum_A dPhi/dn_A * (per-particle measure of A).
/// Throws DomainError unless 0 <= eta < 1.
BulkState bulk_eos(const ConvexBody& body, double eta, const FreeEnergyModel& model);

/// Taylor coefficients of beta p(rho) = rho + B2 rho^2 + B3 rho^3 + ...
struct VirialCoefficients {
  double b1 = 1.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b2_reduced = 0.0;  // B2 / v
  double b3_reduced = 0.0;  // B3 / v^2
};

/// Coefficients up to `order` (1, 2 or 3); unused ones stay zero.
VirialCoefficients virial_series_bulk(const ConvexBody& body, const FreeEnergyModel& model, int order = 3);

/// (1/16pi) [(1 - c12)(1 - c13)(1 - c23) - M3] for unit normals.
double tarazona_phi3(const Vec3& n1, const Vec3& n2, const Vec3& n3);

}  // namespace fmt_engine
