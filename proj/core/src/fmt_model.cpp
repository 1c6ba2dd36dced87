#include "fmt_engine/fmt_model.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "fmt_engine/error.hpp"
#include "fmt_engine/weights.hpp"

namespace fmt_engine {

namespace {

void require_admissible(double n_v) {
  if (!std::isfinite(n_v) || n_v >= 1.0) {
    std::ostringstream os;
    os.precision(17);
    os << "packing fraction n_v = " << n_v << " outside the domain n_v < 1";
    throw DomainError(os.str());
  }
}

// Polynomial parts of the generalized form (without the phi factors).
struct Parts {
  double linear = 0.0;
  double quadratic = 0.0;
  double cubic = 0.0;
};

Parts parts(const WeightedDensities& n, const CoefficientTable& c) {
  Parts p;
  p.linear = c.chi * n.n_chi;
  if (c.dimension >= 2) p.quadratic = c.k0s0 * n.n_k0 * n.n_s0 + c.k1s1 * n.n_k1.dot(n.n_s1);
  if (c.dimension >= 3) {
    const Mat3& t = n.n_s2;
    const Mat3 t2 = t * t;
    p.cubic = c.s0_cubed * n.n_s0 * n.n_s0 * n.n_s0 + c.s0_s1s1 * n.n_s0 * n.n_s1.squaredNorm() +
              c.s1_s2_s1 * n.n_s1.dot(t * n.n_s1) + c.tr_s2_cubed * (t2 * t).trace() +
              c.s0_tr_s2_sq * n.n_s0 * t2.trace();
  }
  return p;
}

}  // namespace

double WeightedDensities::dot(const WeightedDensities& o) const {
  return n_chi * o.n_chi + n_k0 * o.n_k0 + n_k1.dot(o.n_k1) + n_s0 * o.n_s0 + n_s1.dot(o.n_s1) +
         (n_s2.array() * o.n_s2.array()).sum() + n_v * o.n_v;
}

WeightedDensities& WeightedDensities::operator+=(const WeightedDensities& o) {
  n_chi += o.n_chi;
  n_k0 += o.n_k0;
  n_k1 += o.n_k1;
  n_s0 += o.n_s0;
  n_s1 += o.n_s1;
  n_s2 += o.n_s2;
  n_v += o.n_v;
  return *this;
}

WeightedDensities WeightedDensities::operator*(double f) const {
  WeightedDensities r = *this;
  r.n_chi *= f;
  r.n_k0 *= f;
  r.n_k1 *= f;
  r.n_s0 *= f;
  r.n_s1 *= f;
  r.n_s2 *= f;
  r.n_v *= f;
  return r;
}

GeneratingPhi generating_phi(double n_v) {
  require_admissible(n_v);
  const double m = 1.0 - n_v;
  const double log_m = std::log1p(-n_v);
  GeneratingPhi g;
  g.phi = m * log_m + n_v;
  g.d1 = -log_m;
  g.d2 = 1.0 / m;
  g.d3 = 1.0 / (m * m);
  g.d4 = 2.0 / (m * m * m);
  return g;
}

CoefficientTable CoefficientTable::rosenfeld() {
  CoefficientTable c;
  c.s0_cubed = 1.0 / (24.0 * kPi);
  c.s0_s1s1 = -3.0 / (24.0 * kPi);
  return c;
}

CoefficientTable CoefficientTable::tarazona() {
  const double f = 3.0 / (16.0 * kPi);
  CoefficientTable c;
  c.s0_s1s1 = -f;
  c.s1_s2_s1 = f;
  c.tr_s2_cubed = -f;
  c.s0_tr_s2_sq = f;
  return c;
}

FreeEnergyModel::FreeEnergyModel(ModelVariant v)
    : variant_(v), table_(v == ModelVariant::tarazona_tensor ? CoefficientTable::tarazona() : CoefficientTable::rosenfeld()) {}

FreeEnergyModel FreeEnergyModel::generalized(const CoefficientTable& t) {
  if (t.dimension < 1 || t.dimension > 3) {
    std::ostringstream os;
    os << "generalized model supports dimension 1, 2 or 3, got " << t.dimension;
    throw DomainError(os.str());
  }
  for (double x : {t.chi, t.k0s0, t.k1s1, t.s0_cubed, t.s0_s1s1, t.s1_s2_s1, t.tr_s2_cubed, t.s0_tr_s2_sq}) {
    if (!std::isfinite(x)) throw DomainError("generalized model coefficients must be finite");
  }
  return FreeEnergyModel(ModelVariant::generalized, t);
}

std::string FreeEnergyModel::name() const {
  switch (variant_) {
    case ModelVariant::rosenfeld_original: return "rosenfeld";
    case ModelVariant::tarazona_tensor: return "tarazona";
    case ModelVariant::generalized: return "generalized";
  }
  return "unknown";
}

ModelVariant parse_model_variant(const std::string& name) {
  if (name == "rosenfeld") return ModelVariant::rosenfeld_original;
  if (name == "tarazona") return ModelVariant::tarazona_tensor;
  if (name == "generalized") return ModelVariant::generalized;
  throw ValidationError("unknown model variant '" + name + "' (expected rosenfeld, tarazona or generalized)");
}

double phi_excess(const WeightedDensities& n, const FreeEnergyModel& model) {
  require_admissible(n.n_v);
  const double m = 1.0 - n.n_v;
  const double log_m = std::log1p(-n.n_v);
  switch (model.variant()) {
    case ModelVariant::rosenfeld_original:
      return -n.n_chi * log_m + (n.n_k0 * n.n_s0 - n.n_k1.dot(n.n_s1)) / m +
             (n.n_s0 * n.n_s0 * n.n_s0 - 3.0 * n.n_s0 * n.n_s1.dot(n.n_s1)) / (24.0 * kPi * m * m);
    case ModelVariant::tarazona_tensor: {
      const Mat3& t = n.n_s2;
      const double third = n.n_s0 * n.n_s1.dot(n.n_s1) - n.n_s1.dot(t * n.n_s1) + (t * t * t).trace() -
                           n.n_s0 * (t * t).trace();
      return -n.n_chi * log_m + (n.n_k0 * n.n_s0 - n.n_k1.dot(n.n_s1)) / m - 3.0 / (16.0 * kPi) * third / (m * m);
    }
    case ModelVariant::generalized: {
      const GeneratingPhi g = generating_phi(n.n_v);
      const Parts p = parts(n, model.coefficients());
      return p.linear * g.d1 + p.quadratic * g.d2 + p.cubic * g.d3;
    }
  }
  return 0.0;
}

DensityGradient phi_gradient(const WeightedDensities& n, const FreeEnergyModel& model) {
  const GeneratingPhi g = generating_phi(n.n_v);
  const CoefficientTable& c = model.coefficients();
  const Parts p = parts(n, c);
  DensityGradient d;
  d.n_chi = c.chi * g.d1;
  if (c.dimension >= 2) {
    d.n_k0 = c.k0s0 * n.n_s0 * g.d2;
    d.n_s0 = c.k0s0 * n.n_k0 * g.d2;
    d.n_k1 = c.k1s1 * n.n_s1 * g.d2;
    d.n_s1 = c.k1s1 * n.n_k1 * g.d2;
  }
  if (c.dimension >= 3) {
    const Mat3& t = n.n_s2;
    const Mat3 t2 = t * t;
    const double s0 = n.n_s0;
    const Vec3& s1 = n.n_s1;
    d.n_s0 += (3.0 * c.s0_cubed * s0 * s0 + c.s0_s1s1 * s1.squaredNorm() + c.s0_tr_s2_sq * t2.trace()) * g.d3;
    d.n_s1 += (2.0 * c.s0_s1s1 * s0 * s1 + c.s1_s2_s1 * (t + t.transpose()) * s1) * g.d3;
    d.n_s2 = (c.s1_s2_s1 * s1 * s1.transpose() + 3.0 * c.tr_s2_cubed * t2.transpose() +
              2.0 * c.s0_tr_s2_sq * s0 * t.transpose()) *
             g.d3;
  }
  d.n_v = p.linear * g.d2 + p.quadratic * g.d3 + p.cubic * g.d4;
  return d;
}

double spt_residual(const WeightedDensities& n, const FreeEnergyModel& model) {
  const double phi = phi_excess(n, model);
  const DensityGradient d = phi_gradient(n, model);
  return phi + d.n_v - n.dot(d) - n.n_chi;
}

WeightedDensities bulk_weighted_densities(const ConvexBody& body, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("number density must be >= 0");
  const MinkowskiMeasures m = minkowski_measures(body);
  WeightedDensities n;
  n.n_chi = rho * 0.5 * m.euler_surface;
  n.n_k0 = rho * m.mean_curvature_integral / (4.0 * kPi);
  n.n_s0 = rho * m.surface;
  n.n_s2 = Mat3::Identity() * (rho * m.surface / 3.0);
  n.n_v = rho * m.volume;
  return n;
}

BulkState bulk_eos(const ConvexBody& body, double eta, const FreeEnergyModel& model) {
  if (!(eta >= 0.0) || eta >= 1.0) {
    std::ostringstream os;
    os << "packing fraction must satisfy 0 <= eta < 1, got " << eta;
    throw DomainError(os.str());
  }
  const double v = minkowski_measures(body).volume;
  const WeightedDensities unit = bulk_weighted_densities(body, 1.0);
  BulkState s;
  s.packing_fraction = eta;
  s.rho = eta / v;
  const WeightedDensities n = unit * s.rho;
  const double phi = phi_excess(n, model);
  const DensityGradient d = phi_gradient(n, model);
  s.beta_mu_ex = unit.dot(d);
  s.beta_pressure = s.rho + s.rho * s.beta_mu_ex - phi;
  s.compressibility = s.rho > 0.0 ? s.beta_pressure / s.rho : 1.0;
  return s;
}

VirialCoefficients virial_series_bulk(const ConvexBody& body, const FreeEnergyModel& model, int order) {
  if (order < 1 || order > 3) throw DomainError("virial_series_bulk supports order 1, 2 or 3");
  const double v = minkowski_measures(body).volume;
  const Parts p = parts(bulk_weighted_densities(body, 1.0), model.coefficients());
  VirialCoefficients b;
  if (order >= 2) {
    b.b2 = p.linear * v + p.quadratic;
    b.b2_reduced = b.b2 / v;
  }
  if (order >= 3) {
    b.b3 = p.linear * v * v + 2.0 * p.quadratic * v + 2.0 * p.cubic;
    b.b3_reduced = b.b3 / (v * v);
  }
  return b;
}

double tarazona_phi3(const Vec3& n1, const Vec3& n2, const Vec3& n3) {
  const std::array<Vec3, 3> n = {n1, n2, n3};
  return (three_body_euler_form(n1, n2, n3) - intersection_determinant(n)) / (16.0 * kPi);
}

}  // namespace fmt_engine
