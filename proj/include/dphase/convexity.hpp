// convexity.hpp
//
// Sampling-based falsification of gamma-hyperconvexity,
//
//   F(t x + (1-t) y) + c min(t, 1-t) |x - y|^gamma <= t F(x) + (1-t) F(y),
//
// with a strictly positive modulus c. Certificates are evidence gathered on
// finitely many sampled triples, not proofs.

#ifndef DPHASE_CONVEXITY_HPP
#define DPHASE_CONVEXITY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dphase/grid.hpp"

namespace dphase {

using Point = std::vector<double>;
using Functional = std::function<double(std::span<const double>)>;

/// A finite-dimensional normed space: points are coordinate vectors.
struct TestSpace {
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> norm;
};

/// R^dim with the Euclidean norm.
TestSpace euclidean_space(std::size_t dim);

/// Grid functions on `grid` normed by sobolev_norm(., p).
TestSpace grid_space(const Grid& grid, double p);

struct HyperconvexityTrial {
  Point x, y;
  double theta = 0.5;
  double gamma = 1.0;
  double c = 0.0;
  double gap = 0.0;      // t F(x) + (1-t) F(y) - F(t x + (1-t) y)
  double penalty = 0.0;  // c min(t, 1-t) |x - y|^gamma
  double defect = 0.0;   // gap - penalty
  double tolerance = 0.0;
  bool passed = false;
};

/// Relative round-off allowance on the three functional values.
inline constexpr double trial_tolerance = 1e-10;

HyperconvexityTrial run_trial(const Functional& F, const TestSpace& space,
                              std::span<const double> x, std::span<const double> y,
                              double theta, double gamma, double c);

struct SamplerConfig {
  std::uint64_t seed = 0;
  int trials = 1000;
  double min_norm = 0.1;
  double max_norm = 10.0;
};

struct ConvexityCertificate {
  int trials = 0;
  int failures = 0;
  double c_estimate = 0.0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double worst_defect = 0.0;
  /// Modulus the failures were counted at, when a fixed one was tested.
  std::optional<double> modulus_tested;

  bool passed() const { return failures == 0 && c_estimate > 0.0; }
};

/// Structured text record: one `key = value` line per field.
std::string format_certificate(const ConvexityCertificate& cert);

/// The sampled triple for trial `index`; depends only on (seed, index).
struct SampledTriple {
  Point x, y;
  double theta;
};
SampledTriple sample_triple(const TestSpace& space, const SamplerConfig& cfg,
                            int index);

/// Largest c (40-step bisection) for which every sampled triple satisfies the
/// inequality. c_estimate = 0 and failures > 0 when no positive c survives.
ConvexityCertificate estimate_modulus(const Functional& F, const TestSpace& space,
                                      double gamma, const SamplerConfig& cfg);

struct HyperconvexityClaim {
  double gamma;
  double c;
};

/// Sum h + g with h gamma=p-hyperconvex (modulus c) and g gamma=q-hyperconvex
/// (modulus c' > 0), q < p: checks h + g is p-hyperconvex with the modulus c.
ConvexityCertificate check_sum_lemma(const HyperconvexityClaim& h,
                                     const HyperconvexityClaim& g,
                                     const Functional& sum, const TestSpace& space,
                                     const SamplerConfig& cfg);

}  // namespace dphase

#endif
