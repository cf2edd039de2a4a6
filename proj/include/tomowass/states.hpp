#pragma once

// Squeezed-vacuum and cat families in the truncated Fock basis, together with
// the ladder operators that serve as an independent route to the same states.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/special.hpp"

namespace tomowass {

enum class CatKind { Even, Odd, Coherent };
enum class Ladder { Raise, Lower };
enum class NormKind { Added, Subtracted };
enum class Validation { Validated, Unvalidated };

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SeriesTerm {
  std::size_t index = 0;
  double log_weight = kNegInf;  // ln |c|^2, unnormalized
  complex phase{1.0, 0.0};
};

/// Sums a positive series of squared magnitudes until the next term and the
/// geometric tail bound are both below `tail_tol` relative to the running sum.
/// `term(k)` returns the k-th term; `asymptotic_ratio` is the limit of
/// successive term ratios (the ratios approach it monotonically).
template <class TermFn>
std::vector<SeriesTerm> collect_series(TermFn&& term, int first, double asymptotic_ratio,
                                       double tail_tol, double& discarded_log_weight,
                                       double& log_sum) {
  if (!(tail_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail tolerance must be > 0");
  const double log_tol = std::log(tail_tol);
  std::vector<SeriesTerm> terms;
  log_sum = kNegInf;
  discarded_log_weight = kNegInf;
  for (int k = first;; ++k) {
    SeriesTerm t = term(k);
    if (t.index > kMaxFockIndex) {
      throw Error(ErrorCode::TruncationFailure,
                  "series did not reach tail tolerance before Fock index " +
                      std::to_string(kMaxFockIndex));
    }
    terms.push_back(t);
    log_sum = special::log_add(log_sum, t.log_weight);

    const double next = term(k + 1).log_weight;
    if (next == kNegInf) break;
    const double after = term(k + 2).log_weight;
    const double q = std::max(std::exp(after - next), asymptotic_ratio);
    if (q >= 1.0) continue;
    const double tail = next - std::log1p(-q);
    if (next - log_sum < log_tol && tail - log_sum < log_tol) {
      discarded_log_weight = tail;
      break;
    }
  }
  return terms;
}

inline FockVector assemble(const std::vector<SeriesTerm>& terms, double log_norm,
                           double discarded_log_weight) {
  FockVector v;
  std::size_t top = 0;
  for (const auto& t : terms) top = std::max(top, t.index);
  v.amplitudes.assign(top + 1, complex{});
  for (const auto& t : terms) {
    v.amplitudes[t.index] = std::exp(0.5 * (t.log_weight - log_norm)) * t.phase;
  }
  v.cutoff = top;
  v.discarded_mass = std::exp(discarded_log_weight - log_norm);
  return v;
}

inline int ceil_half(int m) { return (m + 1) / 2; }

/// Unit phase e^{i n phi} (-1)^n.
inline complex squeeze_phase(int n, double phi) {
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * std::polar(1.0, n * phi);
}

/// ln N_m = ln(m! cosh^{m+1} r P_m(cosh r)).
inline double log_added_norm(int m, double r) {
  return special::log_factorial(m) + (m + 1) * special::log_cosh(r) +
         std::log(special::legendre(m, std::cosh(r)));
}

/// Terms of K_{-m}: [(2n)!/(2^n n!)]^2 tanh^{2n} r / (2n-m)!, n >= ceil(m/2).
inline SeriesTerm subtracted_term(int n, int m, double log_tanh, double phi) {
  return {static_cast<std::size_t>(2 * n - m),
          2.0 * special::log_double_factorial_odd(n) + special::n_log(2 * n, log_tanh) -
              special::log_factorial(2 * n - m),
          squeeze_phase(n, phi)};
}

inline double log_subtracted_norm(int m, double r, double tail_tol) {
  const double log_tanh = std::log(std::tanh(r));
  double discarded = kNegInf;
  double log_sum = kNegInf;
  collect_series([&](int n) { return subtracted_term(n, m, log_tanh, 0.0); }, ceil_half(m),
                 std::tanh(r) * std::tanh(r), tail_tol, discarded, log_sum);
  return special::log_add(log_sum, discarded);
}

}  // namespace detail

/// Photon-added (m > 0), photon-subtracted (m < 0) or plain (m = 0) squeezed
/// vacuum. Amplitudes follow the printed phase convention e^{in phi}(-tanh r)^n.
inline FockVector build_svs_family(SqueezeParams p, int m, double tail_tol = kDefaultTailTol,
                                   Validation validation = Validation::Validated) {
  if (std::abs(m) > 3 && validation == Validation::Validated) {
    throw Error(ErrorCode::InvalidArgument,
                "|m| > 3 is outside the validated range; pass the unvalidated flag");
  }
  const double t = std::tanh(p.r);
  const double log_tanh = std::log(t);
  double discarded = detail::kNegInf;
  double log_sum = detail::kNegInf;

  if (m >= 0) {
    auto term = [&](int n) {
      return detail::SeriesTerm{
          static_cast<std::size_t>(2 * n + m),
          special::log_factorial(2 * n + m) - 2.0 * (n * std::numbers::ln2 +
                                                     special::log_factorial(n)) +
              special::n_log(2 * n, log_tanh),
          detail::squeeze_phase(n, p.phi)};
    };
    auto terms = detail::collect_series(term, 0, t * t, tail_tol, discarded, log_sum);
    return detail::assemble(terms, detail::log_added_norm(m, p.r), discarded);
  }

  const int k = -m;
  if (p.r == 0.0) {
    throw Error(ErrorCode::SubtractFromVacuum, "cannot subtract photons from the vacuum (r = 0)");
  }
  auto term = [&](int n) { return detail::subtracted_term(n, k, log_tanh, p.phi); };
  auto terms = detail::collect_series(term, detail::ceil_half(k), t * t, tail_tol, discarded,
                                      log_sum);
  return detail::assemble(terms, special::log_add(log_sum, discarded), discarded);
}

/// Even/odd cat states and the coherent state; the even cat also supports one
/// or two added photons.
inline FockVector build_cat_family(CatKind kind, CatParams p, int m_add,
                                   double tail_tol = kDefaultTailTol) {
  const bool supported = (kind == CatKind::Even && m_add >= 0 && m_add <= 2) || m_add == 0;
  if (!supported) {
    throw Error(ErrorCode::UnsupportedAddition,
                "photon addition of " + std::to_string(m_add) + " is not available for this cat");
  }
  const double mag = std::abs(p.alpha);
  const double arg = std::arg(p.alpha);
  const double log_mag = std::log(mag);
  const double x = mag * mag;
  double discarded = detail::kNegInf;
  double log_sum = detail::kNegInf;

  switch (kind) {
    case CatKind::Even: {
      auto term = [&](int n) {
        return detail::SeriesTerm{
            static_cast<std::size_t>(2 * n + m_add),
            special::n_log(4 * n, log_mag) + special::log_factorial(2 * n + m_add) -
                2.0 * special::log_factorial(2 * n),
            std::polar(1.0, 2.0 * n * arg)};
      };
      auto terms = detail::collect_series(term, 0, 0.0, tail_tol, discarded, log_sum);
      const double e2 = std::exp(-2.0 * x);
      double log_norm = special::log_cosh(x);
      if (m_add == 1) {
        log_norm = x + std::log((1.0 + x) + e2 * (1.0 - x)) - std::numbers::ln2;
      } else if (m_add == 2) {
        log_norm = x + std::log((x + 2.0) * (x + 2.0) - 2.0 + e2 * ((x - 2.0) * (x - 2.0) - 2.0)) -
                   std::numbers::ln2;
      }
      return detail::assemble(terms, log_norm, discarded);
    }
    case CatKind::Odd: {
      if (mag == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "odd cat state is undefined at alpha = 0");
      }
      auto term = [&](int n) {
        return detail::SeriesTerm{static_cast<std::size_t>(2 * n + 1),
                                  (4 * n + 2) * log_mag - special::log_factorial(2 * n + 1),
                                  std::polar(1.0, (2.0 * n + 1.0) * arg)};
      };
      auto terms = detail::collect_series(term, 0, 0.0, tail_tol, discarded, log_sum);
      return detail::assemble(terms, special::log_sinh(x), discarded);
    }
    case CatKind::Coherent: {
      auto term = [&](int n) {
        return detail::SeriesTerm{static_cast<std::size_t>(n),
                                  special::n_log(2 * n, log_mag) - special::log_factorial(n),
                                  std::polar(1.0, n * arg)};
      };
      auto terms = detail::collect_series(term, 0, 0.0, tail_tol, discarded, log_sum);
      return detail::assemble(terms, x, discarded);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown cat kind");
}

/// Matrix element <n+2| G0+ |n> of G0+ = a+^2 (1 + a+ a)^{-1}.
inline double janus_matrix_element(std::size_t n) {
  return std::sqrt(static_cast<double>(n + 2) / static_cast<double>(n + 1));
}

/// Applies G0+ to an arbitrary vector (unnormalized result).
inline std::vector<complex> apply_janus_raising(const std::vector<complex>& v) {
  std::vector<complex> out(v.size() + 2, complex{});
  for (std::size_t n = 0; n < v.size(); ++n) out[n + 2] = janus_matrix_element(n) * v[n];
  return out;
}

/// exp(f G0+)|0>, summed term by term: the k-th series term is (f/k) G0+
/// applied to the previous one, so each term occupies the single index 2k.
inline FockVector janus_exponential(double f, double tail_tol = kDefaultTailTol) {
  if (!(f >= 0.0) || !std::isfinite(f)) {
    throw Error(ErrorCode::InvalidArgument, "janus strength f must be finite and >= 0");
  }
  const double log_f = std::log(f);
  // log of the amplitude of the k-th term, memoized since collect_series
  // looks ahead by two.
  std::vector<double> log_amp{0.0};
  auto amp = [&](int k) {
    while (static_cast<int>(log_amp.size()) <= k) {
      const int j = static_cast<int>(log_amp.size());
      log_amp.push_back(log_amp.back() + log_f - std::log(static_cast<double>(j)) +
                        std::log(janus_matrix_element(static_cast<std::size_t>(2 * j - 2))));
    }
    return log_amp[static_cast<std::size_t>(k)];
  };
  auto term = [&](int k) {
    const double la = (k == 0) ? 0.0 : (f == 0.0 ? detail::kNegInf : amp(k));
    return detail::SeriesTerm{static_cast<std::size_t>(2 * k), 2.0 * la, complex{1.0, 0.0}};
  };
  double discarded = detail::kNegInf;
  double log_sum = detail::kNegInf;
  auto terms = detail::collect_series(term, 0, 0.0, tail_tol, discarded, log_sum);
  return detail::assemble(terms, special::log_add(log_sum, discarded), discarded);
}

/// Applies a+ or a the given number of times, then renormalizes.
inline FockVector apply_ladder(const FockVector& v, Ladder direction, int times) {
  if (times < 1) throw Error(ErrorCode::InvalidArgument, "ladder count must be positive");
  std::vector<complex> cur = v.amplitudes;
  double discarded = v.discarded_mass;
  for (int step = 0; step < times; ++step) {
    std::vector<complex> next;
    if (direction == Ladder::Raise) {
      next.assign(cur.size() + 1, complex{});
      for (std::size_t n = 0; n < cur.size(); ++n) {
        next[n + 1] = std::sqrt(static_cast<double>(n + 1)) * cur[n];
      }
    } else {
      if (cur.size() <= 1) {
        next.assign(1, complex{});
      } else {
        next.assign(cur.size() - 1, complex{});
        for (std::size_t n = 1; n < cur.size(); ++n) {
          next[n - 1] = std::sqrt(static_cast<double>(n)) * cur[n];
        }
      }
    }
    cur = std::move(next);
  }
  double norm2 = 0.0;
  for (const auto& c : cur) norm2 += std::norm(c);
  if (!(norm2 > 1e-300)) {
    throw Error(ErrorCode::AnnihilatedToZero, "lowering annihilated the state");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& c : cur) c *= scale;

  FockVector out;
  out.amplitudes = std::move(cur);
  std::size_t top = 0;
  for (std::size_t n = 0; n < out.amplitudes.size(); ++n) {
    if (out.amplitudes[n] != complex{}) top = n;
  }
  out.amplitudes.resize(top + 1);
  out.cutoff = top;
  out.discarded_mass = discarded;
  return out;
}

inline double mean_photon_number(const FockVector& v) {
  double s = 0.0;
  for (std::size_t n = 1; n < v.amplitudes.size(); ++n) s += n * std::norm(v.amplitudes[n]);
  return s;
}

/// <a^k> for k = 1, 2.
inline complex lowering_expectation(const FockVector& v, int k) {
  complex s{};
  const auto& c = v.amplitudes;
  for (std::size_t n = static_cast<std::size_t>(k); n < c.size(); ++n) {
    double factor = 1.0;
    for (int j = 0; j < k; ++j) factor *= std::sqrt(static_cast<double>(n - j));
    s += std::conj(c[n - k]) * c[n] * factor;
  }
  return s;
}

/// Variance of X_theta = (a+ e^{i theta} + a e^{-i theta}) / sqrt 2; the vacuum gives 1/2.
inline double quadrature_variance(const FockVector& v, double theta) {
  const complex rot = std::polar(1.0, -theta);
  const double mean = std::sqrt(2.0) * std::real(rot * lowering_expectation(v, 1));
  const double second =
      std::real(rot * rot * lowering_expectation(v, 2)) + mean_photon_number(v) + 0.5;
  return second - mean * mean;
}

/// N_m (added) in closed Legendre form, or K_{-m} (subtracted) from its series.
inline double normalization_constant(NormKind kind, int m, SqueezeParams p,
                                     double tail_tol = 1e-16) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  if (kind == NormKind::Added) return std::exp(detail::log_added_norm(m, p.r));
  if (p.r == 0.0) {
    throw Error(ErrorCode::SubtractFromVacuum, "K_{-m} vanishes at r = 0");
  }
  return std::exp(detail::log_subtracted_norm(m, p.r, tail_tol));
}

inline FockVector build_state(const StateSpec& s) {
  switch (s.family) {
    case Family::Svs:
      return build_svs_family(s.squeeze, s.photon_delta, s.tail_tol,
                              s.unvalidated ? Validation::Unvalidated : Validation::Validated);
    case Family::CatEven:
      return build_cat_family(CatKind::Even, s.cat, s.photon_delta, s.tail_tol);
    case Family::CatOdd:
      return build_cat_family(CatKind::Odd, s.cat, s.photon_delta, s.tail_tol);
    case Family::Coherent:
      return build_cat_family(CatKind::Coherent, s.cat, s.photon_delta, s.tail_tol);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace tomowass
