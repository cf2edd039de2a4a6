#pragma once

// Synthetic homodyne records: inverse-CDF sampling of quadrature PDFs,
// histogram tomograms, and crossovers estimated from sampled data only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/parallel.hpp"
#include "tomowass/rng.hpp"
#include "tomowass/states.hpp"
#include "tomowass/tomography.hpp"
#include "tomowass/transport.hpp"

namespace tomowass {

inline constexpr std::size_t kSamplingGridPoints = 8192;

/// Monotone cubic (Fritsch-Carlson) interpolant of the quantile function
/// x(F) through the nodes of a distribution slice.
class QuantileSampler {
 public:
  explicit QuantileSampler(const DistributionSlice& s) {
    for (std::size_t i = 0; i < s.cdf.size(); ++i) {
      if (probs_.empty() || s.cdf[i] > probs_.back() + 1e-18) {
        probs_.push_back(s.cdf[i]);
        xs_.push_back(s.grid[i]);
      }
    }
    if (probs_.size() < 2) throw Error(ErrorCode::InvalidArgument, "degenerate distribution");
    const std::size_t n = probs_.size();
    std::vector<double> secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      secant[k] = (xs_[k + 1] - xs_[k]) / (probs_[k + 1] - probs_[k]);
    }
    slopes_.assign(n, 0.0);
    slopes_[0] = secant[0];
    slopes_[n - 1] = secant[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double h0 = probs_[k] - probs_[k - 1];
      const double h1 = probs_[k + 1] - probs_[k];
      const double w0 = 2.0 * h1 + h0;
      const double w1 = h1 + 2.0 * h0;
      slopes_[k] = (w0 + w1) / (w0 / secant[k - 1] + w1 / secant[k]);
    }
  }

  double operator()(double u) const {
    if (u <= probs_.front()) return xs_.front();
    if (u >= probs_.back()) return xs_.back();
    const auto it = std::upper_bound(probs_.begin(), probs_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - probs_.begin()) - 1;
    const double h = probs_[k + 1] - probs_[k];
    const double t = (u - probs_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * xs_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
           (-2 * t3 + 3 * t2) * xs_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
  }

 private:
  std::vector<double> probs_;
  std::vector<double> xs_;
  std::vector<double> slopes_;
};

struct MeasurementRecord {
  double theta = 0.0;
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::size_t shots = 0;
  std::uint64_t stream = 0;
};

inline QuantileSampler quadrature_sampler(const FockVector& v, double theta) {
  return QuantileSampler(pdf_slice(v, theta, auto_grid(v, kGridTailTol, kSamplingGridPoints)));
}

/// `shots` quadrature outcomes in measurement order; shot i uses draw i of
/// the (seed, stream) generator.
inline MeasurementRecord sample_quadrature(const FockVector& v, double theta, std::size_t shots,
                                           std::uint64_t seed, std::uint64_t stream = 0) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  const auto sampler = quadrature_sampler(v, theta);
  const CounterRng rng(seed, stream);
  MeasurementRecord rec{theta, std::vector<double>(shots), seed, shots, stream};
  for (std::size_t i = 0; i < shots; ++i) rec.samples[i] = sampler(rng.uniform(i));
  return rec;
}

inline std::vector<double> sorted_samples(const MeasurementRecord& rec) {
  auto s = rec.samples;
  std::sort(s.begin(), s.end());
  return s;
}

struct HistogramTomogram {
  std::vector<double> theta_grid;
  std::vector<double> bin_edges;
  /// Row-major: counts[row * bins() + bin].
  std::vector<std::uint64_t> counts;
  std::size_t shots = 0;

  std::size_t rows() const noexcept { return theta_grid.size(); }
  std::size_t bins() const noexcept { return bin_edges.size() - 1; }
  std::uint64_t count(std::size_t row, std::size_t bin) const { return counts[row * bins() + bin]; }
  /// Normalized histogram value (an estimate of the PDF on that bin).
  double density(std::size_t row, std::size_t bin) const {
    return static_cast<double>(count(row, bin)) /
           (static_cast<double>(shots) * (bin_edges[bin + 1] - bin_edges[bin]));
  }
};

/// One record per angle on [0, 2 pi); row k draws from stream k of `seed`.
inline HistogramTomogram histogram_tomogram(const FockVector& v, std::size_t theta_count,
                                            std::size_t bins, std::size_t shots,
                                            std::uint64_t seed, std::size_t threads = 1) {
  if (bins < 32) throw Error(ErrorCode::InvalidArgument, "histogram needs >= 32 bins");
  if (theta_count < 1) throw Error(ErrorCode::InvalidArgument, "need at least one angle");
  HistogramTomogram h;
  h.shots = shots;
  const double half = auto_grid(v).half_width();
  h.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.bin_edges[b] = -half + 2.0 * half * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.theta_grid.resize(theta_count);
  for (std::size_t k = 0; k < theta_count; ++k) {
    h.theta_grid[k] =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(theta_count);
  }
  h.counts.assign(theta_count * bins, 0);
  detail::parallel_for(theta_count, threads, [&](std::size_t k) {
    const auto rec = sample_quadrature(v, h.theta_grid[k], shots, seed, k);
    for (double x : rec.samples) {
      const double pos = (x + half) / (2.0 * half) * static_cast<double>(bins);
      const auto b = static_cast<std::size_t>(
          std::clamp(std::floor(pos), 0.0, static_cast<double>(bins - 1)));
      ++h.counts[k * bins + b];
    }
  });
  return h;
}

struct EmpiricalCrossoverOptions {
  std::size_t shots = 1'000'000;
  std::uint64_t seed = 1;
  CrossoverOptions search{};
};

/// Parameter tolerance of the sampled-data crossover, 3/sqrt(shots).
inline double empirical_crossover_tolerance(std::size_t shots) {
  return 3.0 / std::sqrt(static_cast<double>(shots));
}

/// Crossover of W1(ref, a) and W1(ref, b) with every W1 estimated from
/// sampled records. Each of the three states owns one stream (0, 1, 2) and
/// reuses it at every parameter value, so the estimated curves are continuous
/// in the parameter.
inline CrossoverResult empirical_crossover(const StateSpec& reference, const StateSpec& a,
                                           const StateSpec& b, SweepParameter parameter,
                                           double theta, double lo, double hi,
                                           const EmpiricalCrossoverOptions& opts = {}) {
  if (opts.shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  // Sorted uniforms per stream, reused at every parameter value.
  std::vector<std::vector<double>> uniforms(3);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const CounterRng rng(opts.seed, s);
    auto& u = uniforms[s];
    u.resize(opts.shots);
    for (std::size_t i = 0; i < opts.shots; ++i) u[i] = rng.uniform(i);
    std::sort(u.begin(), u.end());
  }
  auto draw = [&](const StateSpec& spec, std::size_t stream, double p) {
    const auto sampler = quadrature_sampler(build_state(with_parameter(spec, parameter, p)), theta);
    std::vector<double> x(opts.shots);
    for (std::size_t i = 0; i < opts.shots; ++i) x[i] = sampler(uniforms[stream][i]);
    // Already ordered up to rounding inside a cubic piece.
    std::sort(x.begin(), x.end());
    return x;
  };
  // The search evaluates a(p) and b(p) back to back; one cached entry suffices.
  double cached_p = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cached;
  auto reference_at = [&](double p) -> const std::vector<double>& {
    if (!(p == cached_p)) {
      cached = draw(reference, 0, p);
      cached_p = p;
    }
    return cached;
  };
  Curve curve_a = [&](double p) { return w1_empirical(reference_at(p), draw(a, 1, p)); };
  Curve curve_b = [&](double p) { return w1_empirical(reference_at(p), draw(b, 2, p)); };

  CrossoverOptions search = opts.search;
  search.threads = 1;
  auto res = find_crossover(curve_a, curve_b, lo, hi, search);
  res.low_confidence =
      res.multiple_roots || empirical_crossover_tolerance(opts.shots) >= 0.1 * (hi - lo);
  return res;
}

}  // namespace tomowass
