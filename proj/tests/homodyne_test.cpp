#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "tomowass/homodyne.hpp"
#include "tomowass/rng.hpp"
#include "tomowass/states.hpp"
#include "tomowass/transport.hpp"

namespace tw = tomowass;

namespace {

const double kPi = std::numbers::pi;

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

tw::StateSpec svs(double r, int m = 0) {
  tw::StateSpec s;
  s.squeeze = tw::SqueezeParams(r);
  s.photon_delta = m;
  return s;
}

// Exact bin probability from a fine slice CDF, linearly interpolated.
double cdf_at(const tw::DistributionSlice& s, double x) {
  const auto& g = s.grid;
  if (x <= g.x_min()) return 0.0;
  if (x >= g.x_max()) return 1.0;
  const double pos = (x - g.x_min()) / g.spacing();
  const auto i = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(i);
  return (1 - t) * s.cdf[i] + t * s.cdf[i + 1];
}

}  // namespace

TEST(Rng, CounterBasedAndStreamSeparated) {
  const tw::CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(a.bits(i), b.bits(i));
    EXPECT_NE(a.bits(i), c.bits(i));
    EXPECT_NE(a.bits(i), d.bits(i));
    const double u = a.uniform(i);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  double s = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) s += a.uniform(i);
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
}

TEST(Sampler, QuantilesOfVacuum) {
  const auto sampler = tw::quadrature_sampler(tw::FockVector::basis(0), 0.0);
  EXPECT_NEAR(sampler(0.5), 0.0, 1e-9);
  // P(X < 1/sqrt2) = Phi(1) for the vacuum (sigma = 1/sqrt 2).
  EXPECT_NEAR(sampler(0.5 * std::erfc(-1.0 / std::sqrt(2.0))), 1.0 / std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(sampler(0.5 * std::erfc(2.0 / std::sqrt(2.0))), -std::sqrt(2.0), 1e-7);
}

TEST(SampleQuadrature, VacuumMoments) {
  const auto rec = tw::sample_quadrature(tw::FockVector::basis(0), 0.0, 1'000'000, 11);
  ASSERT_EQ(rec.samples.size(), 1'000'000u);
  EXPECT_EQ(rec.shots, 1'000'000u);
  EXPECT_LT(std::abs(mean(rec.samples)), 3 * (1 / std::sqrt(2.0)) / 1e3);
  EXPECT_NEAR(variance(rec.samples), 0.5, 0.005);
}

TEST(SampleQuadrature, SqueezedAntiSqueezedVariance) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(0.5), 0);
  const auto rec = tw::sample_quadrature(v, kPi / 2, 1'000'000, 5);
  EXPECT_NEAR(variance(rec.samples), std::exp(1.0) / 2, 0.01 * std::exp(1.0) / 2);
}

TEST(SampleQuadrature, OnePhotonAddedHasDarkCentre) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(1.0 / std::sqrt(2.0)), 1);
  const auto rec = tw::sample_quadrature(v, 0.0, 1'000'000, 3);
  const double w = 0.01;
  auto window = [&](double c) {
    return std::count_if(rec.samples.begin(), rec.samples.end(),
                         [&](double x) { return std::abs(x - c) < w / 2; });
  };
  long peak = 0;
  for (double c = -3.0; c <= 3.0; c += 0.01) peak = std::max<long>(peak, window(c));
  EXPECT_GT(peak, 1000);
  EXPECT_LT(window(0.0), peak / 100);
}

TEST(SampleQuadrature, Deterministic) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(0.4), 2);
  const auto a = tw::sample_quadrature(v, 0.3, 5000, 99);
  const auto b = tw::sample_quadrature(v, 0.3, 5000, 99);
  EXPECT_EQ(a.samples, b.samples);
  const auto c = tw::sample_quadrature(v, 0.3, 5000, 100);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_THROW(tw::sample_quadrature(v, 0.3, 0, 1), tw::Error);
}

TEST(MonteCarloW1, VacuumVersusSqueezedVacuum) {
  const auto vac = tw::FockVector::basis(0);
  const auto sq = tw::build_svs_family(tw::SqueezeParams(0.5), 0);
  const auto a = tw::sorted_samples(tw::sample_quadrature(vac, 0.0, 1'000'000, 2024, 0));
  const auto b = tw::sorted_samples(tw::sample_quadrature(sq, 0.0, 1'000'000, 2024, 1));
  EXPECT_NEAR(tw::w1_empirical(a, b), (1 - std::exp(-0.5)) / std::sqrt(kPi), 5e-3);
}

TEST(Histogram, RowsSumToShotsAndIntegrateToOne) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(0.6), 1);
  const auto h = tw::histogram_tomogram(v, 16, 64, 20000, 8);
  ASSERT_EQ(h.rows(), 16u);
  ASSERT_EQ(h.bins(), 64u);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    std::uint64_t total = 0;
    double integral = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) {
      total += h.count(r, b);
      integral += h.density(r, b) * (h.bin_edges[b + 1] - h.bin_edges[b]);
    }
    EXPECT_EQ(total, 20000u);
    EXPECT_NEAR(integral, 1.0, 1.0 / std::sqrt(20000.0));
  }
  EXPECT_THROW(tw::histogram_tomogram(v, 16, 31, 100, 1), tw::Error);
}

TEST(Histogram, VacuumRowsHomogeneous) {
  const std::size_t shots = 100000;
  const auto h = tw::histogram_tomogram(tw::FockVector::basis(0), 16, 64, shots, 17);
  // Chi-square test of homogeneity on bins with enough pooled counts.
  double chi2 = 0.0;
  std::size_t used_bins = 0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    double pooled = 0.0;
    for (std::size_t r = 0; r < h.rows(); ++r) pooled += static_cast<double>(h.count(r, b));
    const double expected = pooled / static_cast<double>(h.rows());
    if (expected < 5.0) continue;
    ++used_bins;
    for (std::size_t r = 0; r < h.rows(); ++r) {
      const double d = static_cast<double>(h.count(r, b)) - expected;
      chi2 += d * d / expected;
    }
  }
  const double dof = static_cast<double>((h.rows() - 1) * (used_bins - 1));
  const double critical = boost::math::quantile(boost::math::chi_squared(dof), 0.999);
  EXPECT_LT(chi2, critical);
}

TEST(Histogram, SqueezedVacuumBrightCentreAtZeroAndPi) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(1.0 / std::sqrt(2.0)), 0);
  const auto h = tw::histogram_tomogram(v, 16, 64, 100000, 4);
  const std::size_t c = 32;  // bin [0, w)
  const double at0 = h.density(0, c), at_pi = h.density(8, c), at_half = h.density(4, c);
  EXPECT_GT(at0, 3.0 * at_half);
  EXPECT_GT(at_pi, 3.0 * at_half);
}

TEST(Histogram, TwoPhotonsAddedDarkBandsFlankBrightCentre) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(1.0 / std::sqrt(2.0)), 2);
  const auto h = tw::histogram_tomogram(v, 16, 256, 100000, 6);
  // Zeros of the exact amplitude at theta = 0 on either side of the centre.
  const auto s = tw::pdf_slice(v, 0.0, tw::QuadratureGrid::symmetric(h.bin_edges.back(), 4097));
  std::size_t zero = 2049;
  while (!(s.pdf[zero] < s.pdf[zero - 1] && s.pdf[zero] < s.pdf[zero + 1])) ++zero;
  const double x0 = s.grid[zero];
  auto bin_of = [&](double x) {
    return static_cast<std::size_t>((x - h.bin_edges.front()) / (h.bin_edges[1] - h.bin_edges[0]));
  };
  const double centre = 0.5 * (h.density(0, bin_of(-1e-9)) + h.density(0, bin_of(1e-9)));
  EXPECT_LT(h.density(0, bin_of(x0)), 0.2 * centre);
  EXPECT_LT(h.density(0, bin_of(-x0)), 0.2 * centre);
  // Bright again beyond each dark band.
  EXPECT_GT(h.density(0, bin_of(2 * x0)), 2 * h.density(0, bin_of(x0)));
}

TEST(Histogram, ConvergesToExactPdf) {
  const std::size_t shots = 100000;
  for (int m : {0, 2}) {
    const auto v = tw::build_svs_family(tw::SqueezeParams(0.5), m);
    const auto h = tw::histogram_tomogram(v, 16, 64, shots, 21);
    for (std::size_t r = 0; r < h.rows(); ++r) {
      const auto s = tw::pdf_slice(v, h.theta_grid[r], tw::auto_grid(v, tw::kGridTailTol, 16384));
      for (std::size_t b = 0; b < h.bins(); ++b) {
        const double width = h.bin_edges[b + 1] - h.bin_edges[b];
        const double p = (cdf_at(s, h.bin_edges[b + 1]) - cdf_at(s, h.bin_edges[b])) / width;
        if (p <= 0.01) continue;
        EXPECT_LT(std::abs(h.density(r, b) - p), 5 * std::sqrt(p / (shots * width)))
            << m << " row " << r << " bin " << b;
      }
    }
  }
}

TEST(Histogram, DeterministicAcrossThreadCounts) {
  const auto v = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.8), 0);
  const auto a = tw::histogram_tomogram(v, 16, 48, 5000, 9, 1);
  const auto b = tw::histogram_tomogram(v, 16, 48, 5000, 9, 3);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.bin_edges, b.bin_edges);
}

TEST(EmpiricalCrossover, AgreesWithExactPath) {
  const auto exact = tw::find_state_crossover(svs(0.0), svs(0.0, 1), svs(0.0, 2),
                                              tw::SweepParameter::R, 0.0, 0.3, 0.6);
  tw::EmpiricalCrossoverOptions opts;
  opts.shots = 100000;
  opts.seed = 3;
  const auto a = tw::empirical_crossover(svs(0.0), svs(0.0, 1), svs(0.0, 2), tw::SweepParameter::R,
                                         0.0, 0.3, 0.6, opts);
  ASSERT_TRUE(a.found);
  EXPECT_NEAR(a.location, exact.location, tw::empirical_crossover_tolerance(opts.shots));
  EXPECT_FALSE(a.low_confidence);
  const auto b = tw::empirical_crossover(svs(0.0), svs(0.0, 1), svs(0.0, 2), tw::SweepParameter::R,
                                         0.0, 0.3, 0.6, opts);
  EXPECT_EQ(a.found, b.found);
  EXPECT_EQ(a.location, b.location);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.sign_changes, b.sign_changes);
}

TEST(EmpiricalCrossover, FewShotsAreLowConfidence) {
  tw::EmpiricalCrossoverOptions opts;
  opts.shots = 100;
  const auto res = tw::empirical_crossover(svs(0.0), svs(0.0, 1), svs(0.0, 2),
                                           tw::SweepParameter::R, 0.0, 0.3, 0.6, opts);
  EXPECT_TRUE(res.low_confidence);
}
