#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_util.hpp"
#include "tomowass/states.hpp"

namespace tw = tomowass;
using tw::complex;
using tw::testing::phase_insensitive_distance;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

// Direct (small-n) evaluation of the squeezed-vacuum amplitude with plain
// factorials, independent of the log-space path.
double svs_coefficient_direct(double r, int n) {
  return std::pow(-std::tanh(r), n) * std::sqrt(std::tgamma(2.0 * n + 1)) /
         (std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::cosh(r)));
}

double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= xs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (std::log(ys[i]) - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double fitted_kappa(int m) {
  std::vector<double> rs, vars;
  for (int i = 0; i <= 50; ++i) {
    const double r = 0.3 + 0.01 * i;
    rs.push_back(r);
    vars.push_back(tw::quadrature_variance(tw::build_svs_family(tw::SqueezeParams(r), m), 0.0));
  }
  return -fit_log_slope(rs, vars);
}

}  // namespace

TEST(SvsFamily, ZeroSqueezingIsVacuum) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(0.0), 0);
  EXPECT_EQ(v[0], complex(1.0, 0.0));
  for (std::size_t n = 1; n < v.size(); ++n) EXPECT_EQ(v[n], complex{});
}

TEST(SvsFamily, MatchesDirectEvaluation) {
  const auto v = tw::build_svs_family(tw::SqueezeParams(kR), 0);
  EXPECT_NEAR(v[0].real(), std::pow(std::cosh(kR), -0.5), 1e-14);
  EXPECT_NEAR(v[0].real(), 0.89066, 1e-5);
  EXPECT_NEAR(v[2].real(), -0.38346, 1e-5);
  for (int n = 0; n <= 10; ++n) {
    EXPECT_NEAR(v[2 * n].real(), svs_coefficient_direct(kR, n), 1e-13) << n;
    EXPECT_EQ(v[2 * n + 1], complex{});
  }
}

TEST(SvsFamily, SqueezingPhaseFollowsConvention) {
  const double phi = 0.7;
  const auto a = tw::build_svs_family(tw::SqueezeParams(0.5, phi), 0);
  const auto b = tw::build_svs_family(tw::SqueezeParams(0.5), 0);
  for (int n = 0; n < 10; ++n) {
    const complex expected = std::polar(1.0, n * phi) * b[2 * n];
    EXPECT_NEAR(std::abs(a[2 * n] - expected), 0.0, 1e-14);
  }
}

TEST(SvsFamily, NormalizedAndTruncatedWithinTolerance) {
  for (double r : {0.0, 0.1, 0.3, 0.5, kR, 0.9, 1.2}) {
    for (int m = -3; m <= 3; ++m) {
      if (r == 0.0 && m < 0) continue;
      const auto v = tw::build_svs_family(tw::SqueezeParams(r, 0.4), m);
      EXPECT_NEAR(v.norm_squared(), 1.0, 1e-12) << r << " " << m;
      EXPECT_LT(v.discarded_mass, 1e-12);
      EXPECT_EQ(v.cutoff + 1, v.size());
    }
  }
}

TEST(SvsFamily, ParitySupport) {
  for (int m = -3; m <= 3; ++m) {
    const auto v = tw::build_svs_family(tw::SqueezeParams(0.6), m);
    const std::size_t wrong = (std::abs(m) % 2 == 0) ? 1 : 0;
    for (std::size_t n = wrong; n < v.size(); n += 2) EXPECT_EQ(v[n], complex{}) << m;
  }
}

TEST(SvsFamily, LadderOracleEquivalence) {
  // Tail tolerances well below (1e-10)^2; the ladder input is tighter still
  // because lowering amplifies the high-index tail.
  const double tol = 1e-24;
  for (double r : {0.3, 0.5, 0.7071, 0.6}) {
    const auto svs = tw::build_svs_family(tw::SqueezeParams(r, 0.3), 0, 1e-32);
    for (int m = 1; m <= 3; ++m) {
      const auto added = tw::build_svs_family(tw::SqueezeParams(r, 0.3), m, tol);
      const auto raised = tw::apply_ladder(svs, tw::Ladder::Raise, m);
      EXPECT_LT(phase_insensitive_distance(added, raised), 1e-10) << r << " " << m;

      const auto subtracted = tw::build_svs_family(tw::SqueezeParams(r, 0.3), -m, tol);
      const auto lowered = tw::apply_ladder(svs, tw::Ladder::Lower, m);
      EXPECT_LT(phase_insensitive_distance(subtracted, lowered), 1e-10) << r << " " << -m;
    }
  }
}

TEST(SvsFamily, OnePhotonAddedEqualsOnePhotonSubtracted) {
  for (double r : {0.05, 0.5, 1.0}) {
    for (double phi : {0.0, 1.3}) {
      const auto plus = tw::build_svs_family(tw::SqueezeParams(r, phi), 1);
      const auto minus = tw::build_svs_family(tw::SqueezeParams(r, phi), -1);
      ASSERT_EQ(plus.size(), minus.size());
      // The printed conventions differ by the global phase -e^{i phi}.
      const complex global = -std::polar(1.0, phi);
      for (std::size_t n = 0; n < plus.size(); ++n) {
        EXPECT_NEAR(std::abs(plus[n]), std::abs(minus[n]), 1e-13);
        EXPECT_NEAR(std::abs(global * plus[n] - minus[n]), 0.0, 1e-13);
      }
    }
  }
}

TEST(SvsFamily, Errors) {
  try {
    tw::build_svs_family(tw::SqueezeParams(0.0), -1);
    FAIL();
  } catch (const tw::Error& e) {
    EXPECT_EQ(e.code(), tw::ErrorCode::SubtractFromVacuum);
  }
  try {
    tw::build_svs_family(tw::SqueezeParams(5.0), 0);
    FAIL();
  } catch (const tw::Error& e) {
    EXPECT_EQ(e.code(), tw::ErrorCode::TruncationFailure);
  }
  EXPECT_THROW(tw::build_svs_family(tw::SqueezeParams(0.5), 4), tw::Error);
  EXPECT_NO_THROW(
      tw::build_svs_family(tw::SqueezeParams(0.5), 4, 1e-12, tw::Validation::Unvalidated));
  EXPECT_THROW(tw::SqueezeParams(-0.1), tw::Error);
  EXPECT_THROW(tw::SqueezeParams(std::nan("")), tw::Error);
}

TEST(SqueezeParams, PhaseReducedModuloTwoPi) {
  EXPECT_NEAR(tw::SqueezeParams(0.1, 2 * std::numbers::pi + 0.5).phi, 0.5, 1e-15);
  EXPECT_NEAR(tw::SqueezeParams(0.1, -0.5).phi, 2 * std::numbers::pi - 0.5, 1e-15);
}

TEST(CatFamily, SmallAmplitudeLimits) {
  const auto even = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1e-8), 0);
  EXPECT_NEAR(even[0].real(), 1.0, 1e-12);
  const auto odd = tw::build_cat_family(tw::CatKind::Odd, tw::CatParams(1e-8), 0);
  EXPECT_NEAR(odd[1].real(), 1.0, 1e-12);
  const auto zero = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(0.0), 0);
  EXPECT_EQ(zero[0], complex(1.0, 0.0));
}

TEST(CatFamily, AddedPhotonNormalizations) {
  // With alpha = 1 the lowest amplitude of the added states is the bare
  // normalization factor.
  const double x = 1.0;
  const auto one = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.0), 1);
  const double m1 = 1.0 / std::sqrt(std::cosh(x) + x * std::sinh(x));
  EXPECT_NEAR(one[1].real(), m1, 1e-14);
  EXPECT_NEAR(one[1].real(), std::exp(-0.5), 1e-14);
  EXPECT_NEAR(one[1].real(), 0.60653, 1e-5);

  const auto two = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.0), 2);
  const double m2 = 1.0 / std::sqrt((2 + x * x) * std::cosh(x) + 4 * x * std::sinh(x));
  EXPECT_NEAR(two[2].real(), m2 * std::sqrt(2.0), 1e-14);
}

TEST(CatFamily, MatchesCoherentSuperposition) {
  const complex alpha(1.1, 0.4);
  const auto coh = tw::build_cat_family(tw::CatKind::Coherent, tw::CatParams(alpha), 0);
  const auto even = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(alpha), 0);
  const auto odd = tw::build_cat_family(tw::CatKind::Odd, tw::CatParams(alpha), 0);
  const double x = std::norm(alpha);
  for (std::size_t n = 0; n < 20; ++n) {
    // |alpha> +- |-alpha> keeps the even / odd coherent amplitudes.
    const double w = n % 2 == 0 ? std::sqrt(std::exp(x) / std::cosh(x))
                                : std::sqrt(std::exp(x) / std::sinh(x));
    const complex from_coh = coh[n] * w;
    EXPECT_NEAR(std::abs(from_coh - (n % 2 == 0 ? even[n] : odd[n])), 0.0, 1e-13) << n;
  }
}

TEST(CatFamily, ParityAndNormalization) {
  const auto even = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.8), 0);
  for (std::size_t n = 1; n < even.size(); n += 2) EXPECT_EQ(even[n], complex{});
  for (int m : {0, 1, 2}) {
    for (double a : {0.3, 1.8, 3.0, 6.0}) {
      const auto v = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(a), m);
      EXPECT_NEAR(v.norm_squared(), 1.0, 1e-12);
      for (std::size_t n = (m % 2 == 0 ? 1 : 0); n < v.size(); n += 2) EXPECT_EQ(v[n], complex{});
    }
  }
  const auto odd = tw::build_cat_family(tw::CatKind::Odd, tw::CatParams(1.8), 0);
  for (std::size_t n = 0; n < odd.size(); n += 2) EXPECT_EQ(odd[n], complex{});
}

TEST(CatFamily, AddedMatchesLadder) {
  const auto even = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.5), 0, 1e-24);
  for (int m : {1, 2}) {
    const auto added = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.5), m, 1e-24);
    EXPECT_LT(phase_insensitive_distance(added, tw::apply_ladder(even, tw::Ladder::Raise, m)),
              1e-10);
  }
}

TEST(CatFamily, UnsupportedAdditions) {
  auto code = [](tw::CatKind k, int m) {
    try {
      tw::build_cat_family(k, tw::CatParams(1.0), m);
    } catch (const tw::Error& e) {
      return e.code();
    }
    return tw::ErrorCode::InvariantViolation;
  };
  EXPECT_EQ(code(tw::CatKind::Odd, 1), tw::ErrorCode::UnsupportedAddition);
  EXPECT_EQ(code(tw::CatKind::Coherent, 2), tw::ErrorCode::UnsupportedAddition);
  EXPECT_EQ(code(tw::CatKind::Even, 3), tw::ErrorCode::UnsupportedAddition);
  EXPECT_EQ(code(tw::CatKind::Even, -1), tw::ErrorCode::UnsupportedAddition);
  EXPECT_THROW(tw::CatParams(12.5), tw::Error);
}

TEST(Janus, VacuumAndParity) {
  const auto zero = tw::janus_exponential(0.0);
  EXPECT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0], complex(1.0, 0.0));
  for (double f : {0.1, 0.5, 2.0, 8.0}) {
    const auto v = tw::janus_exponential(f);
    EXPECT_NEAR(v.norm_squared(), 1.0, 1e-12);
    for (std::size_t n = 1; n < v.size(); n += 2) EXPECT_EQ(v[n], complex{});
  }
  EXPECT_THROW(tw::janus_exponential(-1.0), tw::Error);
}

TEST(Janus, MatchesDenseMatrixExponential) {
  // Dense 64-dimensional G0+ and a plain Taylor series of exp(f G0+) on |0>.
  const std::size_t dim = 64;
  const double f = 0.5;
  std::vector<std::vector<double>> g(dim, std::vector<double>(dim, 0.0));
  for (std::size_t n = 0; n + 2 < dim; ++n) {
    g[n + 2][n] = std::sqrt((n + 2.0) / (n + 1.0));
  }
  std::vector<double> term(dim, 0.0), sum(dim, 0.0);
  term[0] = 1.0;
  sum[0] = 1.0;
  for (int k = 1; k < 80; ++k) {
    std::vector<double> next(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) next[i] += g[i][j] * term[j];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      term[i] = next[i] * f / k;
      sum[i] += term[i];
    }
  }
  const auto v = tw::janus_exponential(f);
  for (std::size_t k = 0; 2 * k + 2 < v.size(); ++k) {
    EXPECT_NEAR(v[2 * k + 2].real() / v[2 * k].real(), sum[2 * k + 2] / sum[2 * k], 1e-12) << k;
  }
}

TEST(Janus, AmplitudesFollowEvenCatPattern) {
  for (double f : {0.2, 0.5, 1.5}) {
    const auto v = tw::janus_exponential(f, 1e-16);
    const double x = 2.0 * f;
    const double base = v[0].real();
    for (std::size_t k = 1; 2 * k < v.size(); ++k) {
      const double ratio = v[2 * k].real() * std::sqrt(std::tgamma(2.0 * k + 1)) /
                           std::pow(x, static_cast<double>(k));
      EXPECT_NEAR(ratio / base, 1.0, 1e-10) << f << " " << k;
    }
    const auto cat = tw::build_cat_family(tw::CatKind::Even, tw::CatParams(std::sqrt(x)), 0, 1e-16);
    EXPECT_LT(phase_insensitive_distance(v, cat), 1e-10);
  }
}

TEST(Janus, CommutatorWithSquaredLowering) {
  // [a^2, G0+] on a truncation: 2 on every even number state, 3 on |1>, and
  // 2 on the other odd states.
  const std::size_t dim = 40;
  std::vector<std::vector<double>> a2(dim, std::vector<double>(dim, 0.0)), g = a2;
  for (std::size_t n = 2; n < dim; ++n) a2[n - 2][n] = std::sqrt(double(n) * (n - 1));
  for (std::size_t n = 0; n + 2 < dim; ++n) g[n + 2][n] = tw::janus_matrix_element(n);
  auto mul = [&](const auto& x, const auto& y) {
    std::vector<std::vector<double>> out(dim, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t j = 0; j < dim; ++j) out[i][j] += x[i][k] * y[k][j];
    return out;
  };
  const auto ag = mul(a2, g);
  const auto ga = mul(g, a2);
  for (std::size_t i = 0; i + 4 < dim; ++i) {
    for (std::size_t j = 0; j + 4 < dim; ++j) {
      const double c = ag[i][j] - ga[i][j];
      const double expected = i != j ? 0.0 : (i == 1 ? 3.0 : 2.0);
      EXPECT_NEAR(c, expected, 1e-12) << i << "," << j;
    }
  }
  // Hence G0+/2 is the canonical partner of a^2 on the even sector.
  for (std::size_t i = 0; i + 4 < dim; i += 2) EXPECT_NEAR((ag[i][i] - ga[i][i]) / 2.0, 1.0, 1e-12);
}

TEST(Ladder, BasisStates) {
  const auto one = tw::apply_ladder(tw::FockVector::basis(0), tw::Ladder::Raise, 1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0], complex{});
  EXPECT_EQ(one[1], complex(1.0, 0.0));
  try {
    tw::apply_ladder(tw::FockVector::basis(0), tw::Ladder::Lower, 1);
    FAIL();
  } catch (const tw::Error& e) {
    EXPECT_EQ(e.code(), tw::ErrorCode::AnnihilatedToZero);
  }
  EXPECT_THROW(tw::apply_ladder(tw::FockVector::basis(2), tw::Ladder::Lower, 3), tw::Error);
  EXPECT_NO_THROW(tw::apply_ladder(tw::FockVector::basis(2), tw::Ladder::Lower, 2));
  EXPECT_THROW(tw::apply_ladder(tw::FockVector::basis(0), tw::Ladder::Raise, 0), tw::Error);
}

TEST(Ladder, SpecExampleRaiseTwice) {
  const auto svs = tw::build_svs_family(tw::SqueezeParams(0.6), 0, 1e-24);
  const auto raised = tw::apply_ladder(svs, tw::Ladder::Raise, 2);
  const auto closed = tw::build_svs_family(tw::SqueezeParams(0.6), 2, 1e-24);
  for (std::size_t n = 0; n < closed.size(); ++n) {
    EXPECT_NEAR(std::abs(raised[n] - closed[n]), 0.0, 1e-10);
  }
}

TEST(Observables, MeanPhotonNumber) {
  EXPECT_EQ(tw::mean_photon_number(tw::FockVector::basis(0)), 0.0);
  const auto svs = tw::build_svs_family(tw::SqueezeParams(kR), 0);
  EXPECT_NEAR(tw::mean_photon_number(svs), std::pow(std::sinh(kR), 2), 1e-10);
  EXPECT_NEAR(tw::mean_photon_number(svs), 0.58910, 1e-5);
  for (int m = 1; m <= 3; ++m) {
    EXPECT_NEAR(tw::mean_photon_number(tw::build_svs_family(tw::SqueezeParams(1e-4), m)), m,
                1e-6);
  }
  // Even cat: <n> = x tanh x with x = |alpha|^2.
  const double x = 1.8 * 1.8;
  EXPECT_NEAR(tw::mean_photon_number(tw::build_cat_family(tw::CatKind::Even, tw::CatParams(1.8), 0)),
              x * std::tanh(x), 1e-10);
}

TEST(Observables, MeanPhotonStrictlyIncreasesWithAddedPhotons) {
  for (double r = 0.3; r <= 0.8 + 1e-12; r += 0.05) {
    double prev = -1.0;
    for (int m = 0; m <= 3; ++m) {
      const double n = tw::mean_photon_number(tw::build_svs_family(tw::SqueezeParams(r), m));
      EXPECT_GT(n, prev) << r << " " << m;
      prev = n;
    }
  }
}

TEST(Observables, QuadratureVariance) {
  for (double theta : {0.0, 0.4, 1.7, 3.0}) {
    EXPECT_NEAR(tw::quadrature_variance(tw::FockVector::basis(0), theta), 0.5, 1e-15);
  }
  for (double r : {0.2, 0.5, kR}) {
    const auto v = tw::build_svs_family(tw::SqueezeParams(r), 0, 1e-16);
    EXPECT_NEAR(tw::quadrature_variance(v, 0.0), std::exp(-2 * r) / 2, 1e-10);
    EXPECT_NEAR(tw::quadrature_variance(v, std::numbers::pi / 2), std::exp(2 * r) / 2, 1e-10);
  }
  // Number states: variance n + 1/2 at every angle.
  EXPECT_NEAR(tw::quadrature_variance(tw::FockVector::basis(3), 0.9), 3.5, 1e-14);
  // Coherent state: variance 1/2 with nonzero mean.
  const auto coh = tw::build_cat_family(tw::CatKind::Coherent, tw::CatParams({1.2, -0.7}), 0);
  EXPECT_NEAR(tw::quadrature_variance(coh, 0.8), 0.5, 1e-10);
}

TEST(Observables, VarianceScalingExponent) {
  EXPECT_NEAR(fitted_kappa(0), 2.0, 1e-6);
  // a+|xi> is proportional to S(xi)|1>, so its x-variance is 3 e^{-2r} / 2.
  for (double r : {0.3, 0.55, 0.8}) {
    const auto v = tw::build_svs_family(tw::SqueezeParams(r), 1, 1e-16);
    EXPECT_NEAR(tw::quadrature_variance(v, 0.0), 1.5 * std::exp(-2 * r), 1e-10);
  }
  EXPECT_NEAR(fitted_kappa(1), 2.0, 1e-6);
  // Cross-checked against a dense-matrix squeeze operator: 2.5943983.
  EXPECT_NEAR(fitted_kappa(2), 2.5943983, 1e-6);
}

TEST(Normalization, AddedClosedForms) {
  for (double r : {0.2, 0.6, 1.1}) {
    const double c = std::cosh(r);
    const tw::SqueezeParams p(r);
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Added, 1, p), std::pow(c, 3),
                1e-12 * std::pow(c, 3));
    const double n2 = 3 * std::pow(c, 5) - std::pow(c, 3);
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Added, 2, p), n2, 1e-12 * n2);
    const double n3 = 6 * std::pow(c, 4) * (5 * std::pow(c, 3) - 3 * c) / 2;
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Added, 3, p), n3, 1e-12 * n3);
  }
}

TEST(Normalization, SubtractedSeriesMatchesPolynomials) {
  for (double r : {0.3, 0.6, 0.9}) {
    const double c = std::cosh(r);
    const double s = std::sinh(r);
    const tw::SqueezeParams p(r);
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Subtracted, 1, p), c * s * s, 1e-10);
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Subtracted, 2, p),
                3 * std::pow(c, 5) - 5 * std::pow(c, 3) + 2 * c, 1e-10);
    EXPECT_NEAR(tw::normalization_constant(tw::NormKind::Subtracted, 3, p),
                3 * std::pow(s, 4) * (5 * std::pow(c, 3) - 2 * c), 1e-10);
  }
  try {
    tw::normalization_constant(tw::NormKind::Subtracted, 1, tw::SqueezeParams(0.0));
    FAIL();
  } catch (const tw::Error& e) {
    EXPECT_EQ(e.code(), tw::ErrorCode::SubtractFromVacuum);
  }
  EXPECT_THROW(tw::normalization_constant(tw::NormKind::Added, 0, tw::SqueezeParams(0.5)),
               tw::Error);
}

TEST(StateSpec, BuildDispatch) {
  tw::StateSpec s;
  s.family = tw::Family::CatOdd;
  s.cat = tw::CatParams(1.8);
  EXPECT_EQ(tw::build_state(s)[0], complex{});
  s.family = tw::Family::Svs;
  s.squeeze = tw::SqueezeParams(0.5);
  s.photon_delta = 5;
  EXPECT_THROW(tw::build_state(s), tw::Error);
  s.unvalidated = true;
  EXPECT_NO_THROW(tw::build_state(s));
  EXPECT_EQ(tw::parse_family("ecs"), tw::Family::CatEven);
  EXPECT_THROW(tw::parse_family("thermal"), tw::Error);
}
