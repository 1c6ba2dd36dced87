#include "fmt_engine/kinematic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <vector>

#include "fmt_engine/error.hpp"
#include "fmt_engine/gjk.hpp"
#include "fmt_engine/weights.hpp"

namespace fmt_engine {

namespace {

constexpr std::uint64_t kChunk = 1024;
constexpr double kBoxMargin = 1e-6;

// Mean and sum of squared deviations, merged in a fixed order.
struct Welford {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }

  MCEstimate estimate(std::uint64_t seed) const {
    MCEstimate e;
    e.mean = mean;
    e.n_samples = static_cast<std::uint64_t>(n);
    e.seed = seed;
    e.stderr = n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    return e;
  }
};

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs sample(i, out) for i in [0, n) and accumulates each of the K outputs.
// Chunks are fixed-size and reduced in index order, so the result does not
// depend on the thread count.
template <std::size_t K, class Sample>
std::array<Welford, K> run_samples(std::uint64_t n, int threads, Sample sample) {
  const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::array<Welford, K>> partial(n_chunks);
  std::vector<std::exception_ptr> errors(n_chunks);

  auto work = [&](std::uint64_t first_chunk, std::uint64_t stride) {
    std::array<double, K> out{};
    for (std::uint64_t c = first_chunk; c < n_chunks; c += stride) {
      try {
        const std::uint64_t end = std::min(n, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < end; ++i) {
          sample(i, out);
          for (std::size_t k = 0; k < K; ++k) partial[c][k].add(out[k]);
        }
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const int t = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::uint64_t>(1, n_chunks))));
  if (t == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int w = 0; w < t; ++w) pool.emplace_back(work, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(t));
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::array<Welford, K> total{};
  for (const auto& chunk : partial) {
    for (std::size_t k = 0; k < K; ++k) total[k].merge(chunk[k]);
  }
  return total;
}

void require_samples(std::uint64_t n, std::uint64_t minimum, const char* what) {
  if (n < minimum) {
    std::ostringstream os;
    os << what << " needs n_samples >= " << minimum << ", got " << n;
    throw DomainError(os.str());
  }
}

double inradius_bound(const ConvexBody& body) {
  if (const auto* s = std::get_if<Sphere>(&body.shape())) return s->radius;
  if (const auto* s = std::get_if<Spheroid>(&body.shape())) return std::min(s->equatorial, s->polar);
  return 0.0;
}

std::string describe(const Pose& p) {
  std::ostringstream os;
  os.precision(17);
  os << "{q=(" << p.rotation.w() << "," << p.rotation.x() << "," << p.rotation.y() << "," << p.rotation.z()
     << "), t=(" << p.translation.x() << "," << p.translation.y() << "," << p.translation.z() << ")}";
  return os.str();
}

// Area-weighted patch sampler over a fixed boundary quadrature.
class PatchSampler {
 public:
  PatchSampler(const ConvexBody& body, int resolution) : patches_(surface_quadrature(body, resolution)) {
    cumulative_.reserve(patches_.size());
    double acc = 0.0;
    for (const auto& p : patches_) {
      acc += p.area;
      cumulative_.push_back(acc);
    }
    area_ = acc;
  }

  const SurfacePatch& draw(RandomStream& rng) const {
    const double u = rng.uniform() * area_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return patches_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  double area() const { return area_; }

 private:
  std::vector<SurfacePatch> patches_;
  std::vector<double> cumulative_;
  double area_ = 0.0;
};

}  // namespace

double sphere_volume_Ok(int k) {
  if (k < 1) {
    std::ostringstream os;
    os << "sphere_volume_Ok requires k >= 1, got " << k;
    throw DomainError(os.str());
  }
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

Pose sample_pose(RandomStream& rng, const TranslationBox& box) {
  if (!box.lower.allFinite() || !box.upper.allFinite() || (box.upper.array() < box.lower.array()).any()) {
    throw DomainError("translation box is empty or not finite");
  }
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double t2 = 2.0 * kPi * u2;
  const double t3 = 2.0 * kPi * u3;
  Pose p;
  p.rotation = Eigen::Quaterniond(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2), b * std::sin(t3));
  p.rotation.normalize();
  for (int i = 0; i < 3; ++i) p.translation[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
  return p;
}

bool intersects(const ConvexBody& a, const Pose& pose_a, const ConvexBody& b, const Pose& pose_b) {
  const Vec3 d = pose_b.translation - pose_a.translation;
  const double dist = d.norm();
  const double ra = a.circumradius();
  const double rb = b.circumradius();
  if (a.is_sphere() && b.is_sphere()) return dist <= ra + rb;
  if (dist > ra + rb) return false;
  if (dist <= inradius_bound(a) + inradius_bound(b)) return true;

  const Mat3 rot_a = pose_a.matrix();
  const Mat3 rot_b = pose_b.matrix();
  SupportMap sa = [&](const Vec3& u) -> Vec3 {
    return rot_a * support_point(a, rot_a.transpose() * u) + pose_a.translation;
  };
  SupportMap sb = [&](const Vec3& u) -> Vec3 {
    return rot_b * support_point(b, rot_b.transpose() * u) + pose_b.translation;
  };
  try {
    return gjk_overlap(sa, sb, dist > 0.0 ? Vec3(d) : Vec3(Vec3::UnitX()), ra + rb);
  } catch (const ConvergenceError& e) {
    std::ostringstream os;
    os << e.what() << " for " << a.label() << " at " << describe(pose_a) << " and " << b.label() << " at "
       << describe(pose_b);
    throw ConvergenceError(os.str(), e.history());
  }
}

double excluded_volume_analytic(const ConvexBody& a, const ConvexBody& b) {
  const MinkowskiMeasures ma = minkowski_measures(a);
  const MinkowskiMeasures mb = minkowski_measures(b);
  return ma.volume + mb.volume + (ma.mean_curvature_integral * mb.surface + mb.mean_curvature_integral * ma.surface) /
                                     (4.0 * kPi);
}

MCEstimate overlap_fraction(const ConvexBody& a, const ConvexBody& b, double half_width, const MCOptions& options) {
  if (!(half_width >= 0.0) || !std::isfinite(half_width)) throw DomainError("box half-width must be >= 0");
  const TranslationBox origin = TranslationBox::cube(0.0);
  const TranslationBox box = TranslationBox::cube(half_width);
  const auto acc = run_samples<1>(options.n_samples, options.threads, [&](std::uint64_t i, std::array<double, 1>& out) {
    RandomStream ra(options.seed, i, 0);
    RandomStream rb(options.seed, i, 1);
    const Pose pa = sample_pose(ra, origin);
    const Pose pb = sample_pose(rb, box);
    out[0] = intersects(a, pa, b, pb) ? 1.0 : 0.0;
  });
  return acc[0].estimate(options.seed);
}

MCEstimate excluded_volume_mc(const ConvexBody& a, const ConvexBody& b, const MCOptions& options,
                              std::optional<double> half_width) {
  require_samples(options.n_samples, 10'000, "excluded_volume_mc");
  const double reach = a.circumradius() + b.circumradius();
  const double h = half_width.value_or(reach + kBoxMargin);
  if (h < reach) {
    std::ostringstream os;
    os.precision(12);
    os << "translation box half-width " << h << " is smaller than the circumradius sum " << reach;
    throw DomainError(os.str());
  }
  MCEstimate e = overlap_fraction(a, b, h, options);
  const double box_volume = std::pow(2.0 * h, 3);
  e.mean *= box_volume;
  e.stderr *= box_volume;
  return e;
}

MCEstimate second_virial(const ConvexBody& a, const ConvexBody& b, VirialMethod method, const MCOptions& options) {
  if (method == VirialMethod::analytic) {
    MCEstimate e;
    e.mean = 0.5 * excluded_volume_analytic(a, b);
    e.seed = options.seed;
    return e;
  }
  MCEstimate e = excluded_volume_mc(a, b, options);
  e.mean *= 0.5;
  e.stderr *= 0.5;
  return e;
}

MCEstimate third_virial_mc(const ConvexBody& body, const MCOptions& options) {
  require_samples(options.n_samples, 100'000, "third_virial_mc");
  const double h = 2.0 * body.circumradius() + kBoxMargin;
  const double scale = std::pow(2.0 * h, 6) / 3.0;
  const TranslationBox origin = TranslationBox::cube(0.0);
  const TranslationBox box = TranslationBox::cube(h);
  const auto acc = run_samples<1>(options.n_samples, options.threads, [&](std::uint64_t i, std::array<double, 1>& out) {
    RandomStream r1(options.seed, i, 0);
    RandomStream r2(options.seed, i, 1);
    RandomStream r3(options.seed, i, 2);
    const Pose p1 = sample_pose(r1, origin);
    const Pose p2 = sample_pose(r2, box);
    const Pose p3 = sample_pose(r3, box);
    const bool hit = intersects(body, p1, body, p2) && intersects(body, p1, body, p3) && intersects(body, p2, body, p3);
    out[0] = hit ? scale : 0.0;
  });
  return acc[0].estimate(options.seed);
}

StackVirialEstimate third_virial_stack_mc(const ConvexBody& body, const MCOptions& options, int resolution,
                                          int max_rank) {
  require_samples(options.n_samples, 100'000, "third_virial_stack_mc");
  const PatchSampler sampler(body, resolution);
  const double v = minkowski_measures(body).volume;
  const double s = sampler.area();
  const double chi_scale = s * v * v / (4.0 * kPi);
  const double pair_scale = v * s * s / (4.0 * kPi);
  const double triple_scale = s * s * s / (8.0 * kPi);
  const TranslationBox origin = TranslationBox::cube(0.0);

  enum { total, chi, pair, triple, product, determinant };
  const auto acc = run_samples<6>(options.n_samples, options.threads, [&](std::uint64_t i, std::array<double, 6>& out) {
    RandomStream r1(options.seed, i, 0);
    RandomStream r2(options.seed, i, 1);
    RandomStream r3(options.seed, i, 2);
    const SurfacePatch& p1 = sampler.draw(r1);
    const SurfacePatch p2 = sampler.draw(r2).rotated(sample_pose(r2, origin).matrix());
    const SurfacePatch p3 = sampler.draw(r3).rotated(sample_pose(r3, origin).matrix());

    const Vec3 normals[3] = {p1.normal, p2.normal, p3.normal};
    out[chi] = chi_scale * p1.gaussian_curvature();
    out[pair] = pair_scale * two_body_weight_expansion(p1, p2, max_rank);
    out[product] = triple_scale * three_body_euler_form(normals[0], normals[1], normals[2]);
    out[determinant] = triple_scale * intersection_determinant(normals);
    out[triple] = out[product] - out[determinant];
    out[total] = out[chi] + out[pair] + out[triple];
  });
  StackVirialEstimate e;
  e.total = acc[total].estimate(options.seed);
  e.chi = acc[chi].estimate(options.seed);
  e.pair = acc[pair].estimate(options.seed);
  e.triple = acc[triple].estimate(options.seed);
  e.triple_product = acc[product].estimate(options.seed);
  e.triple_determinant = acc[determinant].estimate(options.seed);
  return e;
}

}  // namespace fmt_engine
