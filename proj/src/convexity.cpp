#include "dphase/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace dphase {

TestSpace euclidean_space(std::size_t dim) {
  return {dim, [](std::span<const double> v) {
            double s = 0.0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
          }};
}

TestSpace grid_space(const Grid& grid, double p) {
  return {grid.node_count(), [grid, p](std::span<const double> v) {
            return sobolev_norm(GridFunction(grid, {v.begin(), v.end()}), p);
          }};
}

namespace {

Point difference(std::span<const double> a, std::span<const double> b) {
  Point d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

struct TrialData {
  double gap;
  double unit;  // min(t, 1-t) |x - y|^gamma
  double tolerance;
};

TrialData evaluate(const Functional& F, const TestSpace& space,
                   std::span<const double> x, std::span<const double> y,
                   double theta, double gamma) {
  if (x.size() != space.dim || y.size() != space.dim)
    throw contract_error("hyperconvexity: point dimension mismatch");
  Point z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = theta * x[i] + (1.0 - theta) * y[i];
  const double fx = F(x), fy = F(y), fz = F(z);
  const double dist = space.norm(difference(x, y));
  return {theta * fx + (1.0 - theta) * fy - fz,
          std::min(theta, 1.0 - theta) * std::pow(dist, gamma),
          trial_tolerance * std::max({std::abs(fx), std::abs(fy), std::abs(fz)})};
}

}  // namespace

HyperconvexityTrial run_trial(const Functional& F, const TestSpace& space,
                              std::span<const double> x, std::span<const double> y,
                              double theta, double gamma, double c) {
  if (!(theta > 0.0 && theta < 1.0))
    throw contract_error(fmt::format("hyperconvexity: theta={} outside (0, 1)", theta));
  if (!(c > 0.0))
    throw contract_error(fmt::format(
        "hyperconvexity: modulus c={} must be strictly positive", c));
  if (!(gamma >= 1.0))
    throw contract_error(fmt::format("hyperconvexity: gamma={} must be >= 1", gamma));
  const TrialData d = evaluate(F, space, x, y, theta, gamma);
  HyperconvexityTrial t;
  t.x.assign(x.begin(), x.end());
  t.y.assign(y.begin(), y.end());
  t.theta = theta;
  t.gamma = gamma;
  t.c = c;
  t.gap = d.gap;
  t.penalty = c * d.unit;
  t.defect = d.gap - t.penalty;
  t.tolerance = d.tolerance;
  t.passed = t.defect >= -t.tolerance;
  return t;
}

std::string format_certificate(const ConvexityCertificate& cert) {
  std::string out;
  out += fmt::format("seed = {}\n", cert.seed);
  out += fmt::format("N = {}\n", cert.trials);
  out += fmt::format("gamma = {:.17g}\n", cert.gamma);
  out += fmt::format("c_estimate = {:.17g}\n", cert.c_estimate);
  out += fmt::format("failures = {}\n", cert.failures);
  out += fmt::format("worst_defect = {:.17g}\n", cert.worst_defect);
  if (cert.modulus_tested)
    out += fmt::format("modulus_tested = {:.17g}\n", *cert.modulus_tested);
  out += fmt::format("passed = {}\n", cert.passed() ? "true" : "false");
  return out;
}

SampledTriple sample_triple(const TestSpace& space, const SamplerConfig& cfg,
                            int index) {
  // independent stream per trial index
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  const double log_lo = std::log(cfg.min_norm);
  const double log_hi = std::log(cfg.max_norm);

  auto draw = [&] {
    Point v(space.dim);
    for (double& x : v) x = gauss(rng);
    const double norm = space.norm(v);
    const double target = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    if (norm > 0.0)
      for (double& x : v) x *= target / norm;
    return v;
  };
  SampledTriple s;
  s.x = draw();
  s.y = draw();
  // dyadic theta: theta and 1 - theta are both exact, and 1/2 is reachable
  std::uniform_int_distribution<int> k(1, 1023);
  s.theta = k(rng) / 1024.0;
  return s;
}

namespace {

std::vector<TrialData> sample_all(const Functional& F, const TestSpace& space,
                                  double gamma, const SamplerConfig& cfg) {
  if (cfg.trials < 1) throw contract_error("sampler: trial count must be >= 1");
  if (!(cfg.min_norm > 0.0 && cfg.max_norm >= cfg.min_norm))
    throw contract_error("sampler: need 0 < min_norm <= max_norm");
  std::vector<TrialData> data;
  data.reserve(cfg.trials);
  for (int i = 0; i < cfg.trials; ++i) {
    const SampledTriple s = sample_triple(space, cfg, i);
    data.push_back(evaluate(F, space, s.x, s.y, s.theta, gamma));
  }
  return data;
}

bool all_hold(const std::vector<TrialData>& data, double c) {
  return std::all_of(data.begin(), data.end(),
                     [c](const TrialData& d) { return d.gap - c * d.unit >= 0.0; });
}

ConvexityCertificate bisect(const std::vector<TrialData>& data, double gamma,
                            const SamplerConfig& cfg) {
  double ratio = 0.0;
  for (const TrialData& d : data)
    if (d.unit > 0.0) ratio = std::max(ratio, d.gap / d.unit);
  double lo = 0.0;
  double hi = ratio > 0.0 ? 10.0 * ratio : 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (all_hold(data, mid) ? lo : hi) = mid;
  }

  ConvexityCertificate cert;
  cert.trials = static_cast<int>(data.size());
  cert.seed = cfg.seed;
  cert.gamma = gamma;
  cert.c_estimate = lo;
  // counted at the estimate, or at the smallest rejected modulus if none held
  const double probe = lo > 0.0 ? lo : hi;
  cert.worst_defect = std::numeric_limits<double>::infinity();
  for (const TrialData& d : data) {
    const double defect = d.gap - probe * d.unit;
    cert.worst_defect = std::min(cert.worst_defect, defect);
    if (defect < 0.0) ++cert.failures;
  }
  return cert;
}

}  // namespace

ConvexityCertificate estimate_modulus(const Functional& F, const TestSpace& space,
                                      double gamma, const SamplerConfig& cfg) {
  if (!(gamma >= 1.0))
    throw contract_error(fmt::format("hyperconvexity: gamma={} must be >= 1", gamma));
  return bisect(sample_all(F, space, gamma, cfg), gamma, cfg);
}

ConvexityCertificate check_sum_lemma(const HyperconvexityClaim& h,
                                     const HyperconvexityClaim& g,
                                     const Functional& sum, const TestSpace& space,
                                     const SamplerConfig& cfg) {
  if (!(h.c > 0.0))
    throw contract_error("sum lemma: modulus c of h must be strictly positive");
  if (!(g.c > 0.0))
    throw contract_error("sum lemma: modulus c' of g must be strictly positive");
  if (!(g.gamma < h.gamma))
    throw contract_error("sum lemma: requires q < p for the two exponents");

  ConvexityCertificate cert = estimate_modulus(sum, space, h.gamma, cfg);
  cert.modulus_tested = h.c;
  cert.failures = 0;
  cert.worst_defect = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.trials; ++i) {
    const SampledTriple s = sample_triple(space, cfg, i);
    const HyperconvexityTrial t = run_trial(sum, space, s.x, s.y, s.theta, h.gamma, h.c);
    cert.worst_defect = std::min(cert.worst_defect, t.defect);
    if (!t.passed) ++cert.failures;
  }
  return cert;
}

}  // namespace dphase
