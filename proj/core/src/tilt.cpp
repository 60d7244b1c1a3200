/*
   Copyright 2026 the ddsa authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include "ddsa/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "ddsa/covariance.hpp"
#include "ddsa/errors.hpp"
#include "ddsa/parallel.hpp"
#include "ddsa/sfb.hpp"

namespace ddsa {

namespace {

// Blend polynomial in tau = t - 1/2 on [0, 1]:
//   p(tau) = 1/2 + tau - (5/2) tau^4 + 3 tau^5 - tau^6,
// the unique degree-<=7 interpolant matching value and three derivatives of
// the identity at tau = 0 and of the constant 1 at tau = 1 (the tau^7
// coefficient comes out zero). See scripts/regen_saturation_coeffs.py.
const std::vector<double> kBlendCoeffs = {0.5, 1.0, 0.0, 0.0, -2.5, 3.0, -1.0, 0.0};

double blend_value(double tau) {
  const double t4 = tau * tau * tau * tau;
  return 0.5 + tau + t4 * (-2.5 + tau * (3.0 - tau));
}
double blend_d1(double tau) {
  const double t3 = tau * tau * tau;
  return 1.0 + t3 * (-10.0 + tau * (15.0 - 6.0 * tau));
}
double blend_d2(double tau) {
  const double t2 = tau * tau;
  return t2 * (-30.0 + tau * (60.0 - 30.0 * tau));
}
double blend_d3(double tau) { return tau * (-60.0 + tau * (180.0 - 120.0 * tau)); }

}  // namespace

SaturationFunction SaturationFunction::c3_blend() { return SaturationFunction(false); }
SaturationFunction SaturationFunction::identity() { return SaturationFunction(true); }

const std::vector<double>& SaturationFunction::blend_coefficients() const { return kBlendCoeffs; }

double SaturationFunction::value(double t) const {
  if (identity_) return t;
  const double a = std::abs(t);
  if (a <= 0.5) return t;
  const double s = t < 0.0 ? -1.0 : 1.0;
  if (a >= 1.5) return s;
  return s * blend_value(a - 0.5);
}

double SaturationFunction::d1(double t) const {
  if (identity_) return 1.0;
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.5) return 0.0;
  return blend_d1(a - 0.5);
}

double SaturationFunction::d2(double t) const {
  if (identity_) return 0.0;
  const double a = std::abs(t);
  if (a <= 0.5 || a >= 1.5) return 0.0;
  const double s = t < 0.0 ? -1.0 : 1.0;
  return s * blend_d2(a - 0.5);
}

double SaturationFunction::d3(double t) const {
  if (identity_) return 0.0;
  const double a = std::abs(t);
  if (a <= 0.5 || a >= 1.5) return 0.0;
  return blend_d3(a - 0.5);
}

TiltSpec TiltSpec::canonical(Vector direction) {
  TiltSpec spec;
  spec.direction = std::move(direction);
  spec.map_kind = MapKind::CanonicalNoise;
  return spec;
}

TiltSpec TiltSpec::with_direction(Vector direction) const {
  TiltSpec spec = *this;
  spec.direction = std::move(direction);
  return spec;
}

Vector tilt_g(const Problem& p, const TiltSpec& tilt, const Vector& x, const Vector& z) {
  if (tilt.map_kind == TiltSpec::MapKind::Custom) {
    if (!tilt.custom_map) throw InvalidArgument("custom tilt map requires a handle");
    return tilt.custom_map(x, z);
  }
  // canonical noise: G(x,z) - G_x(x); the mean field must be analytic so the
  // map is exactly mean-zero rather than mean-zero up to sampling error
  return p.decision().eval(x, z) - mean_field(p, x, x, Analytic{});
}

double normalizer(const Problem& p, const TiltSpec& tilt, const Vector& x, std::int64_t samples,
                  std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("normalizer requires samples >= 1");
  const Vector& u = tilt.direction;
  RandomStream rng(seed);
  double acc = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vector z = p.dist().sample(x, rng);
    acc += tilt.saturation.value(u.dot(tilt_g(p, tilt, x, z)));
  }
  return 1.0 + acc / static_cast<double>(samples);
}

Vector sample_tilted(const Problem& p, const TiltSpec& tilt, const Vector& x, RandomStream& rng,
                     std::int64_t* proposals) {
  const Vector& u = tilt.direction;
  constexpr std::int64_t kMaxProposals = 1000000;
  for (std::int64_t trial = 0; trial < kMaxProposals; ++trial) {
    const Vector z = p.dist().sample(x, rng);
    const double w = 1.0 + tilt.saturation.value(u.dot(tilt_g(p, tilt, x, z)));
    // envelope: 0 <= w <= 2, so w/2 is a valid acceptance probability
    const double accept = rng.next_uniform();
    if (accept <= 0.5 * w) {
      if (proposals != nullptr) *proposals += trial + 1;
      return z;
    }
  }
  throw DegenerateTilt("tilted rejection sampler exhausted its proposal budget (C ~ 0)");
}

namespace {

// Importance-weighted mean of z under the tilt at decision x with fixed
// seed (the common-random-numbers evaluation). Only valid for affine G,
// where the weighted data mean is a sufficient statistic of the mean field.
Vector weighted_data_mean(const Problem& p, const TiltSpec& tilt, const Vector& u, const Vector& x,
                          std::int64_t samples, std::uint64_t seed) {
  RandomStream rng(seed);
  Vector zsum = Vector::Zero(p.data_dimension());
  double wsum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vector z = p.dist().sample(x, rng);
    const double w = 1.0 + tilt.saturation.value(u.dot(tilt_g(p, tilt, x, z)));
    zsum += w * z;
    wsum += w;
  }
  if (wsum <= 0.0) throw DegenerateTilt("tilt weights sum to zero");
  return zsum / wsum;
}

// Tilted mean field E_{z ~ D^u(x)} G(y, z) under common random numbers.
Vector tilted_mean_field(const Problem& p, const TiltSpec& tilt, const Vector& u, const Vector& x,
                         const Vector& y, std::int64_t samples, std::uint64_t seed) {
  if (p.decision().is_affine()) {
    const Vector zbar = weighted_data_mean(p, tilt, u, x, samples, seed);
    return p.decision().x_jacobian() * y + p.decision().z_jacobian() * zbar +
           p.decision().affine_offset();
  }
  RandomStream rng(seed);
  Vector gsum = Vector::Zero(p.dimension());
  double wsum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vector z = p.dist().sample(x, rng);
    const double w = 1.0 + tilt.saturation.value(u.dot(tilt_g(p, tilt, x, z)));
    gsum += w * p.decision().eval(y, z);
    wsum += w;
  }
  if (wsum <= 0.0) throw DegenerateTilt("tilt weights sum to zero");
  return gsum / wsum;
}

Vector solve_tilted_inner(const Problem& p, const TiltSpec& tilt, const Vector& u, const Vector& x,
                          double tol, std::int64_t max_iter, std::int64_t samples,
                          std::uint64_t seed) {
  const double step = p.alpha() / (p.lipschitz_bar() * p.lipschitz_bar());
  if (p.decision().is_affine()) {
    // one weighted pass gives the empirical mean field exactly
    const Vector zbar = weighted_data_mean(p, tilt, u, x, samples, seed);
    const Matrix& jx = p.decision().x_jacobian();
    const Vector shift = p.decision().z_jacobian() * zbar + p.decision().affine_offset();
    Vector y = p.set().project(x);
    for (std::int64_t it = 0; it < max_iter; ++it) {
      Vector next = p.set().project(y - step * (jx * y + shift));
      const double delta = (next - y).norm();
      y = std::move(next);
      if (delta <= tol) return y;
    }
    throw NonConvergence("tilted inner solver exceeded its iteration cap", tol);
  }
  Vector y = p.set().project(x);
  double delta = 0.0;
  for (std::int64_t it = 0; it < max_iter; ++it) {
    const Vector g = tilted_mean_field(p, tilt, u, x, y, samples, seed);
    Vector next = p.set().project(y - step * g);
    delta = (next - y).norm();
    y = std::move(next);
    if (delta <= tol) return y;
  }
  throw NonConvergence("tilted inner solver exceeded its iteration cap", delta);
}

}  // namespace

EquilibriumReport perturbed_equilibrium(const Problem& p, const TiltSpec& tilt, const Vector& u,
                                        const Vector& x_init,
                                        const TiltedEquilibriumOptions& opts) {
  EquilibriumOptions outer = opts.outer;
  // mark the mode as Monte-Carlo so the fixed-point loop applies its
  // noise-floor plateau detection
  outer.mode = MonteCarloMode{opts.samples, opts.seed, 1};
  auto sol = [&](const Vector& x) {
    return solve_tilted_inner(p, tilt, u, x, outer.inner_tol, outer.max_inner, opts.samples,
                              opts.seed);
  };
  EquilibriumReport report = find_fixed_point(sol, p, p.set().project(x_init), outer);
  const Vector g = tilted_mean_field(p, tilt, u, report.x_star, report.x_star, opts.samples,
                                     opts.seed);
  report.residual_norm = (report.x_star - p.set().project(report.x_star - g)).norm();
  report.interior =
      p.set().interior_distance(report.x_star) > 1e-10 * (1.0 + report.x_star.norm());
  return report;
}

Matrix sigma_cross(const Problem& p, const TiltSpec& tilt, const Vector& x_star,
                   std::int64_t samples, std::uint64_t seed) {
  if (tilt.map_kind == TiltSpec::MapKind::CanonicalNoise && p.decision().is_affine() &&
      !p.dist().is_custom()) {
    // g = Jz (z - m(x)), G(x*, z) = R(x*) + Jz (z - m(x*)); E[g] = 0 kills
    // the cross term, leaving Jz Cov Jz^T
    const Matrix& jz = p.decision().z_jacobian();
    return jz * p.dist().noise_covariance() * jz.transpose();
  }
  if (samples < 1)
    throw InvalidArgument("sigma_cross needs Monte-Carlo samples for this tilt/problem pair");
  RandomStream rng(seed);
  Matrix acc = Matrix::Zero(p.dimension(), p.dimension());
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vector z = p.dist().sample(x_star, rng);
    acc += tilt_g(p, tilt, x_star, z) * p.decision().eval(x_star, z).transpose();
  }
  return acc / static_cast<double>(samples);
}

ShiftTable equilibrium_shift_check(const Problem& p, const TiltSpec& tilt,
                                   const std::vector<double>& u_norms, const Vector& u_direction,
                                   const Vector& x_init, const TiltedEquilibriumOptions& opts) {
  if (u_norms.size() < 1) throw InvalidArgument("shift check requires at least one u norm");
  if (u_direction.norm() <= 0.0) throw InvalidArgument("shift check requires a nonzero direction");
  const Vector dir = u_direction / u_direction.norm();

  ShiftTable table;
  const EquilibriumReport base =
      perturbed_equilibrium(p, tilt.with_direction(Vector::Zero(dir.size())),
                            Vector::Zero(dir.size()), x_init, opts);
  table.x_star_base = base.x_star;
  if (p.decision().is_affine() && !p.dist().is_custom()) {
    table.w = estimate_w(p, base.x_star, WAnalytic{}).w;
  } else {
    table.w = estimate_w(p, base.x_star, WCentralDifference{0.0, MonteCarloMode{opts.samples, opts.seed, 1}}).w;
  }
  table.sigma_cross = sigma_cross(p, tilt, base.x_star, opts.samples, splitmix64_at(opts.seed, 7));
  Eigen::FullPivLU<Matrix> lu(table.w);
  if (!lu.isInvertible()) throw SingularJacobian("shift check: W is singular");

  double smallest = std::numeric_limits<double>::infinity();
  for (double norm : u_norms) {
    ShiftRow row;
    row.u_norm = norm;
    row.u = norm * dir;
    if (norm == 0.0) {
      row.x_star_u = base.x_star;
      row.ratio = 0.0;  // convention
    } else {
      const TiltSpec spec = tilt.with_direction(row.u);
      row.x_star_u = perturbed_equilibrium(p, spec, row.u, x_init, opts).x_star;
      const Vector predicted_shift = -lu.solve(table.sigma_cross.transpose() * row.u);
      row.ratio = (row.x_star_u - base.x_star - predicted_shift).norm() / norm;
      smallest = std::min(smallest, norm);
    }
    table.rows.push_back(std::move(row));
  }

  // Monte-Carlo floor: replay the smallest tilt with a reseeded sample set
  // and measure the spread of the solved equilibrium.
  if (std::isfinite(smallest) && smallest > 0.0) {
    const Vector u = smallest * dir;
    TiltedEquilibriumOptions reseeded = opts;
    reseeded.seed = splitmix64_at(opts.seed, 0x5eed);
    const Vector a = perturbed_equilibrium(p, tilt.with_direction(u), u, x_init, opts).x_star;
    const Vector b = perturbed_equilibrium(p, tilt.with_direction(u), u, x_init, reseeded).x_star;
    table.noise_floor = (a - b).norm() / smallest;
  }
  return table;
}

namespace {

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& cells) const {
    return static_cast<std::size_t>(fnv1a(cells.data(), cells.size() * sizeof(std::int64_t)));
  }
};

// Read-mostly concurrent normalizer cache. Inserts are idempotent: the inner
// Monte-Carlo seed is a function of the cell, so two threads computing the
// same cell produce the same value.
class NormalizerCache {
 public:
  NormalizerCache(std::int64_t budget, std::uint64_t base_seed)
      : budget_(budget), base_seed_(base_seed) {}

  bool lookup(const std::vector<std::int64_t>& cells, double& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(cells);
    if (it == map_.end()) return false;
    value = it->second;
    return true;
  }

  bool full() {
    std::lock_guard<std::mutex> lock(mutex_);
    return static_cast<std::int64_t>(map_.size()) >= budget_;
  }

  void insert(const std::vector<std::int64_t>& cells, double value) {
    std::lock_guard<std::mutex> lock(mutex_);
    map_.emplace(cells, value);
  }

  std::uint64_t cell_seed(const std::vector<std::int64_t>& cells) const {
    return fnv1a(cells.data(), cells.size() * sizeof(std::int64_t), base_seed_);
  }

  std::int64_t size() {
    std::lock_guard<std::mutex> lock(mutex_);
    return static_cast<std::int64_t>(map_.size());
  }

 private:
  std::int64_t budget_;
  std::uint64_t base_seed_;
  std::mutex mutex_;
  std::unordered_map<std::vector<std::int64_t>, double, CellHash> map_;
};

}  // namespace

LanReport lan_statistic(const Problem& p, const TiltSpec& tilt, const Vector& u, std::int64_t k,
                        const StepSchedule& schedule, const Vector& x0, std::int64_t replicas,
                        std::uint64_t master_seed, const LanOptions& opts) {
  if (k < 1) throw InvalidArgument("lan_statistic requires k >= 1");
  if (replicas < 2) throw InvalidArgument("lan_statistic requires at least 2 replicas");
  const int d = p.dimension();
  if (static_cast<int>(u.size()) != d) throw InvalidArgument("lan_statistic: u dimension mismatch");

  const double sqrt_k = std::sqrt(static_cast<double>(k));
  const Vector u_eff = u / sqrt_k;  // the tilt actually applied at sample size k
  const bool zero_tilt = u.isZero(0.0);
  const TiltSpec tilt_eff = tilt.with_direction(u_eff);

  // For the canonical noise tilt on the Gaussian built-ins, u'g_x(z) is an
  // x-free symmetric Gaussian scalar, so the odd saturation integrates to
  // zero and C_x^u = 1 exactly at every iterate. Custom tilt maps and custom
  // samplers go through the per-iterate Monte-Carlo cache instead.
  const bool unit_normalizer = tilt.map_kind == TiltSpec::MapKind::CanonicalNoise &&
                               p.decision().is_affine() && !p.dist().is_custom();

  LanReport report;
  report.k = k;
  report.replicas = replicas;
  report.z_samples.resize(replicas, d);
  report.log_lr.resize(replicas);

  NormalizerCache cache(opts.normalizer_budget,
                        splitmix64_at(master_seed ^ 0x6e6f726dULL, 0));
  std::vector<Matrix> sg_per_replica(static_cast<std::size_t>(replicas));
  std::vector<std::int64_t> fallbacks(static_cast<std::size_t>(replicas), 0);

  parallel_for(replicas, opts.workers, [&](std::int64_t r) {
    RandomStream rng = RandomStream::substream(master_seed, static_cast<std::uint64_t>(r));
    Vector zsum = Vector::Zero(d);
    Matrix sg = Matrix::Zero(d, d);
    double log_lr = 0.0;
    std::vector<std::int64_t> cells(static_cast<std::size_t>(d));

    RecordPlan plan;  // no checkpoints needed
    run_sfb_observed(
        p, x0, schedule, k, rng, plan,
        [&](std::int64_t, const Vector& x, const Vector& z, const Vector& gval) {
          Vector g;
          if (tilt.map_kind == TiltSpec::MapKind::CanonicalNoise) {
            g = gval - mean_field(p, x, x, Analytic{});
          } else {
            g = tilt.custom_map(x, z);
          }
          zsum += g;
          sg += g * g.transpose();
          if (zero_tilt) return;  // log C = 0 and log(1 + h(0)) = 0 exactly

          log_lr += std::log1p(tilt.saturation.value(u_eff.dot(g)));
          if (unit_normalizer) return;  // log C = 0 exactly

          for (int i = 0; i < d; ++i)
            cells[static_cast<std::size_t>(i)] = std::llround(x(i) / opts.cache_grid);
          double c_value = 1.0;
          if (!cache.lookup(cells, c_value)) {
            if (cache.full()) {
              // budget exhausted: C = 1 (exact for odd h under symmetric
              // noise); folded into the reported uncertainty below
              ++fallbacks[static_cast<std::size_t>(r)];
              c_value = 1.0;
            } else {
              c_value = normalizer(p, tilt_eff, x, opts.normalizer_samples, cache.cell_seed(cells));
              cache.insert(cells, c_value);
            }
          }
          log_lr -= std::log(c_value);
        });

    report.z_samples.row(r) = (zsum / sqrt_k).transpose();
    report.log_lr(r) = log_lr;
    sg_per_replica[static_cast<std::size_t>(r)] = sg;
  });

  Matrix sg_total = Matrix::Zero(d, d);
  for (const auto& sg : sg_per_replica) sg_total += sg;
  report.sigma_g = sg_total / static_cast<double>(replicas * k);

  const Vector z_mean = report.z_samples.colwise().mean();
  const Matrix z_centered = report.z_samples.rowwise() - z_mean.transpose();
  report.zk_covariance =
      (z_centered.transpose() * z_centered) / static_cast<double>(replicas - 1);

  report.predicted_mean = -0.5 * u.dot(report.sigma_g * u);
  report.predicted_variance = u.dot(report.sigma_g * u);
  report.observed_mean = report.log_lr.mean();
  const double var =
      (report.log_lr.array() - report.observed_mean).square().sum() /
      static_cast<double>(replicas - 1);
  report.observed_variance = var;
  report.se_mean = std::sqrt(var / static_cast<double>(replicas));
  report.se_variance = var * std::sqrt(2.0 / static_cast<double>(replicas - 1));
  report.normalizer_cells = cache.size();
  for (auto f : fallbacks) report.normalizer_fallbacks += f;
  if (report.normalizer_fallbacks > 0) {
    // each skipped normalizer contributes at most ~ u_eff' Sigma_g u_eff / 2
    const double per_step = 0.5 * u_eff.dot(report.sigma_g * u_eff);
    report.se_mean += per_step * static_cast<double>(report.normalizer_fallbacks) /
                      static_cast<double>(replicas);
  }
  return report;
}

FDivergenceEstimate f_divergence_estimate(const Problem& p, const TiltSpec& tilt, const Vector& u,
                                          FDivergenceKind kind, const Vector& x,
                                          std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw InsufficientSamples("f_divergence_estimate requires samples >= 2");
  const TiltSpec spec = tilt.with_direction(u);

  auto f = [kind](double t) {
    if (kind == FDivergenceKind::KullbackLeibler) return t > 0.0 ? t * std::log(t) : 0.0;
    return (t - 1.0) * (t - 1.0);
  };

  RandomStream rng(seed);
  std::vector<double> hs(static_cast<std::size_t>(samples));
  Matrix sg = Matrix::Zero(u.size(), u.size());
  double hsum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Vector z = p.dist().sample(x, rng);
    const Vector g = tilt_g(p, spec, x, z);
    sg += g * g.transpose();
    const double h = spec.saturation.value(u.dot(g));
    hs[static_cast<std::size_t>(i)] = h;
    hsum += h;
  }
  const double c = 1.0 + hsum / static_cast<double>(samples);
  if (!(c > 0.0)) throw DegenerateTilt("f-divergence: estimated normalizer is not positive");

  double acc = 0.0, acc2 = 0.0;
  for (double h : hs) {
    const double val = f((1.0 + h) / c);
    acc += val;
    acc2 += val * val;
  }
  FDivergenceEstimate est;
  est.samples = samples;
  est.value = acc / static_cast<double>(samples);
  const double var =
      std::max(0.0, acc2 / static_cast<double>(samples) - est.value * est.value);
  est.std_error = std::sqrt(var / static_cast<double>(samples));
  const double fpp1 = kind == FDivergenceKind::KullbackLeibler ? 1.0 : 2.0;
  est.prediction = 0.5 * fpp1 * u.dot((sg / static_cast<double>(samples)) * u);
  return est;
}

MinimaxProbe minimax_risk_probe(const Problem& p, const TiltSpec& tilt,
                                const std::vector<Vector>& u_grid, std::int64_t k,
                                const StepSchedule& schedule, const Vector& x0, LossKind loss,
                                const Matrix& asymptotic_cov, std::uint64_t master_seed,
                                const MinimaxOptions& opts) {
  if (u_grid.empty()) throw InvalidArgument("minimax probe requires a nonempty u grid");
  if (opts.replicas < 2) throw InvalidArgument("minimax probe requires at least 2 replicas");

  auto loss_fn = [&](const Vector& v) {
    if (loss == LossKind::SquaredNorm) return v.squaredNorm();
    return std::isinf(opts.indicator_radius) ? 0.0
                                             : (v.norm() > opts.indicator_radius ? 1.0 : 0.0);
  };

  MinimaxProbe probe;
  const double sqrt_k = std::sqrt(static_cast<double>(k));

  for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
    const Vector& u = u_grid[ui];
    const TiltSpec spec = tilt.with_direction(u);
    RiskRow row;
    row.u = u;
    row.x_star_u =
        perturbed_equilibrium(p, spec, u, x0, opts.equilibrium).x_star;

    Vector risks(opts.replicas);
    const std::uint64_t grid_seed = splitmix64_at(master_seed, static_cast<std::uint64_t>(ui));
    parallel_for(opts.replicas, opts.workers, [&](std::int64_t r) {
      RandomStream rng = RandomStream::substream(grid_seed, static_cast<std::uint64_t>(r));
      Vector x = x0;
      Vector xbar = x0;
      for (std::int64_t t = 0; t < k; ++t) {
        const Vector z = u.isZero(0.0) ? p.dist().sample(x, rng) : sample_tilted(p, spec, x, rng);
        const Vector g = p.decision().eval(x, z);
        if (!g.allFinite())
          throw NumericalFailure("non-finite operator value in tilted trajectory", t);
        xbar += (x - xbar) / static_cast<double>(t + 1);
        x = p.set().project(x - schedule.eta(t) * g);
      }
      risks(r) = loss_fn(sqrt_k * (xbar - row.x_star_u));
    });
    row.risk = risks.mean();
    const double var = (risks.array() - row.risk).square().sum() /
                       static_cast<double>(opts.replicas - 1);
    row.std_error = std::sqrt(var / static_cast<double>(opts.replicas));
    probe.rows.push_back(std::move(row));
  }

  probe.max_risk = 0.0;
  for (const auto& row : probe.rows) probe.max_risk = std::max(probe.max_risk, row.risk);

  const Matrix root = symmetric_sqrt(asymptotic_cov);
  RandomStream rng(splitmix64_at(master_seed, 0xbe9c));
  double acc = 0.0, acc2 = 0.0;
  Vector w(asymptotic_cov.rows());
  for (std::int64_t i = 0; i < opts.benchmark_samples; ++i) {
    rng.fill_standard_normal(w);
    const double val = loss_fn(root * w);
    acc += val;
    acc2 += val * val;
  }
  probe.benchmark = acc / static_cast<double>(opts.benchmark_samples);
  const double bvar = std::max(
      0.0, acc2 / static_cast<double>(opts.benchmark_samples) - probe.benchmark * probe.benchmark);
  probe.benchmark_std_error = std::sqrt(bvar / static_cast<double>(opts.benchmark_samples));
  probe.max_risk_minus_benchmark = probe.max_risk - probe.benchmark;
  return probe;
}

}  // namespace ddsa
