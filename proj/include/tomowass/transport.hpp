#pragma once

// Wasserstein-1 distance between quadrature distributions, parameter sweeps of
// it, and location of crossovers between two W1 curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/parallel.hpp"
#include "tomowass/states.hpp"
#include "tomowass/tomography.hpp"

namespace tomowass {

namespace detail {

/// Integral of |p(t)| over [0, 1] for p(t) = a t^3 + b t^2 + c t + d.
/// Written so that negating all coefficients gives a bit-identical result.
inline double abs_cubic_integral(double a, double b, double c, double d) {
  auto p = [&](double t) { return ((a * t + b) * t + c) * t + d; };
  auto antiderivative = [&](double t) {
    return (((a / 4.0 * t + b / 3.0) * t + c / 2.0) * t + d) * t;
  };

  std::array<double, 8> cuts{};
  std::size_t n_cuts = 0;
  cuts[n_cuts++] = 0.0;
  // Critical points split [0, 1] into monotone pieces.
  std::array<double, 2> crit{};
  std::size_t n_crit = 0;
  const double qa = 3.0 * a;
  const double qb = 2.0 * b;
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      crit[n_crit++] = (-qb - s) / (2.0 * qa);
      crit[n_crit++] = (-qb + s) / (2.0 * qa);
    }
  } else if (qb != 0.0) {
    crit[n_crit++] = -c / qb;
  }
  std::sort(crit.begin(), crit.begin() + static_cast<long>(n_crit));
  for (std::size_t i = 0; i < n_crit; ++i) {
    if (crit[i] > 0.0 && crit[i] < 1.0) cuts[n_cuts++] = crit[i];
  }
  cuts[n_cuts++] = 1.0;

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < n_cuts; ++k) {
    double lo = cuts[k];
    double hi = cuts[k + 1];
    const double plo = p(lo);
    const double phi = p(hi);
    if ((plo < 0.0 && phi > 0.0) || (plo > 0.0 && phi < 0.0)) {
      double l = lo;
      double r = hi;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (l + r);
        const double pm = p(m);
        if ((pm < 0.0) == (plo < 0.0) && pm != 0.0) {
          l = m;
        } else {
          r = m;
        }
      }
      const double root = 0.5 * (l + r);
      total += std::abs(antiderivative(root) - antiderivative(lo));
      total += std::abs(antiderivative(hi) - antiderivative(root));
    } else {
      total += std::abs(antiderivative(hi) - antiderivative(lo));
    }
  }
  return total;
}

}  // namespace detail

/// W1 = integral |F - G| dx, with F - G interpolated by cubic Hermite pieces
/// whose node slopes are the PDF differences.
inline double w1_cdf(const DistributionSlice& a, const DistributionSlice& b) {
  if (!(a.grid == b.grid)) {
    throw Error(ErrorCode::GridMismatch, "W1 requires both slices on the same grid");
  }
  const double h = a.grid.spacing();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.grid.size(); ++i) {
    const double d0 = a.cdf[i] - b.cdf[i];
    const double d1 = a.cdf[i + 1] - b.cdf[i + 1];
    const double m0 = h * (a.pdf[i] - b.pdf[i]);
    const double m1 = h * (a.pdf[i + 1] - b.pdf[i + 1]);
    const double ca = 2.0 * d0 - 2.0 * d1 + m0 + m1;
    const double cb = -3.0 * d0 + 3.0 * d1 - 2.0 * m0 - m1;
    total += h * detail::abs_cubic_integral(ca, cb, m0, d0);
  }
  return total;
}

inline double w1_fock(const FockVector& a, const FockVector& b, double theta,
                      std::size_t n_points = kDefaultGridPoints) {
  const auto grid = shared_grid(a, b, n_points);
  return w1_cdf(pdf_slice(a, theta, grid), pdf_slice(b, theta, grid));
}

inline double w1_states(const StateSpec& a, const StateSpec& b, double theta,
                        std::size_t n_points = kDefaultGridPoints) {
  return w1_fock(build_state(a), build_state(b), theta, n_points);
}

/// Empirical W1 between two sorted sample lists. Equal sizes use the order
/// statistic form (1/n) sum |x_(i) - y_(i)|; unequal sizes integrate the
/// difference of the two empirical CDFs exactly.
inline double w1_empirical(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySamples, "W1 needs non-empty samples");
  if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end())) {
    throw Error(ErrorCode::InvalidArgument, "samples must be sorted ascending");
  }
  if (a.size() == b.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
  }
  const double wa = 1.0 / static_cast<double>(a.size());
  const double wb = 1.0 / static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double total = 0.0;
  double prev = std::min(a[0], b[0]);
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    total += std::abs(static_cast<double>(i) * wa - static_cast<double>(j) * wb) * (x - prev);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    prev = x;
  }
  return total;
}

// --- sweeps ---------------------------------------------------------------

enum class SweepParameter { R, Alpha };

inline std::string to_string(SweepParameter p) { return p == SweepParameter::R ? "r" : "alpha"; }

/// Copy of `s` with the swept parameter set to `value` (alpha keeps its phase).
inline StateSpec with_parameter(StateSpec s, SweepParameter p, double value) {
  if (p == SweepParameter::R) {
    s.squeeze = SqueezeParams(value, s.squeeze.phi);
  } else {
    const double arg = std::abs(s.cat.alpha) > 0.0 ? std::arg(s.cat.alpha) : 0.0;
    s.cat = CatParams(std::polar(value, arg));
  }
  return s;
}

struct SweepRange {
  SweepParameter parameter = SweepParameter::R;
  double lo = 0.3;
  double hi = 0.8;
  std::size_t steps = 51;

  std::vector<double> values() const {
    if (!(lo < hi) || steps < 2) {
      throw Error(ErrorCode::InvalidArgument, "sweep needs lo < hi and at least 2 steps");
    }
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    out.back() = hi;
    return out;
  }
};

struct LabeledState {
  std::string label;
  StateSpec spec;
  /// Cat comparisons only: pick alpha at every row so the mean photon number
  /// equals the reference's.
  bool match_reference_mean = false;
};

struct SweepColumn {
  std::string label;
  /// Missing where a state could not be built at that parameter value.
  std::vector<std::optional<double>> values;
};

struct SweepTable {
  std::string parameter_name;
  std::vector<double> parameter_values;
  std::vector<SweepColumn> columns;
};

struct SweepOptions {
  std::size_t n_points = kDefaultGridPoints;
  std::size_t threads = 1;
};

inline double matched_alpha(CatKind kind, int m_add, double nbar);

/// The comparison spec used at one sweep row.
inline StateSpec comparison_at(const StateSpec& reference_at_p, const LabeledState& comparison,
                               SweepParameter parameter, double p) {
  if (!comparison.match_reference_mean) return with_parameter(comparison.spec, parameter, p);
  StateSpec s = comparison.spec;
  const double nbar = mean_photon_number(build_state(reference_at_p));
  const CatKind kind = s.family == Family::CatOdd    ? CatKind::Odd
                       : s.family == Family::CatEven ? CatKind::Even
                                                     : CatKind::Coherent;
  if (s.family == Family::Svs) {
    throw Error(ErrorCode::InvalidArgument, "mean matching applies to cat comparisons only");
  }
  s.cat = CatParams(matched_alpha(kind, s.photon_delta, nbar));
  return s;
}

/// W1(reference(p), comparison_j(p)) at fixed theta for every p in the range.
inline SweepTable sweep_w1(const LabeledState& reference, const std::vector<LabeledState>& comparisons,
                           const SweepRange& range, double theta, SweepOptions opts = {}) {
  SweepTable table;
  table.parameter_name = to_string(range.parameter);
  table.parameter_values = range.values();
  const std::size_t rows = table.parameter_values.size();
  for (const auto& c : comparisons) {
    table.columns.push_back({reference.label + ":" + c.label,
                             std::vector<std::optional<double>>(rows)});
  }
  detail::parallel_for(rows * comparisons.size(), opts.threads, [&](std::size_t cell) {
    const std::size_t row = cell / comparisons.size();
    const std::size_t col = cell % comparisons.size();
    const double p = table.parameter_values[row];
    try {
      const StateSpec ref = with_parameter(reference.spec, range.parameter, p);
      table.columns[col].values[row] =
          w1_states(ref, comparison_at(ref, comparisons[col], range.parameter, p), theta,
                    opts.n_points);
    } catch (const Error&) {
      table.columns[col].values[row] = std::nullopt;
    }
  });
  return table;
}

// --- crossovers -------------------------------------------------------------

struct CrossoverResult {
  bool found = false;
  double location = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// |W1_a - W1_b| at the location, or the smaller endpoint value if not found.
  double residual = 0.0;
  std::size_t scan_points = 0;
  std::size_t sign_changes = 0;
  bool multiple_roots = false;
  /// Set only by the sampled-data path.
  bool low_confidence = false;
};

struct CrossoverOptions {
  std::size_t scan_points = 64;
  double parameter_tol = 1e-4;
  double residual_tol = 1e-6;
  int max_bisections = 100;
  std::size_t threads = 1;
};

using Curve = std::function<double(double)>;

/// Scans h(p) = a(p) - b(p) on a uniform grid, then bisects the first sign
/// change until the bracket is below `parameter_tol` and |h| below `residual_tol`.
inline CrossoverResult find_crossover(const Curve& curve_a, const Curve& curve_b, double lo,
                                      double hi, const CrossoverOptions& opts = {}) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "crossover bracket needs lo < hi");
  if (opts.scan_points < 2) throw Error(ErrorCode::InvalidArgument, "scan needs >= 2 points");
  auto h = [&](double p) { return curve_a(p) - curve_b(p); };

  CrossoverResult res;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.scan_points = opts.scan_points;

  const std::size_t n = opts.scan_points;
  std::vector<double> ps(n);
  std::vector<double> hs(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  ps.back() = hi;
  detail::parallel_for(n, opts.threads, [&](std::size_t i) { hs[i] = h(ps[i]); });

  std::optional<std::size_t> first;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool change = (hs[i] < 0.0 && hs[i + 1] > 0.0) || (hs[i] > 0.0 && hs[i + 1] < 0.0) ||
                        (hs[i] == 0.0 && i > 0);
    if (change) {
      ++res.sign_changes;
      if (!first) first = i;
    }
  }
  res.multiple_roots = res.sign_changes > 1;

  if (!first) {
    if (hs.front() == 0.0) {
      res.found = true;
      res.location = lo;
      res.residual = 0.0;
      res.sign_changes = 1;
      return res;
    }
    res.residual = std::min(std::abs(hs.front()), std::abs(hs.back()));
    return res;
  }

  double l = ps[*first];
  double r = ps[*first + 1];
  double hl = hs[*first];
  double mid = 0.5 * (l + r);
  double hm = h(mid);
  for (int it = 0; it < opts.max_bisections; ++it) {
    if (hm == 0.0 || (r - l < opts.parameter_tol && std::abs(hm) < opts.residual_tol)) break;
    if ((hm < 0.0) == (hl < 0.0)) {
      l = mid;
      hl = hm;
    } else {
      r = mid;
    }
    mid = 0.5 * (l + r);
    hm = h(mid);
  }
  res.found = true;
  res.location = mid;
  res.residual = std::abs(hm);
  return res;
}

/// W1(reference(p), comparison(p)) as a function of the swept parameter.
inline Curve w1_curve(StateSpec reference, StateSpec comparison, SweepParameter parameter,
                      double theta, std::size_t n_points = kDefaultGridPoints) {
  return [=](double p) {
    return w1_states(with_parameter(reference, parameter, p),
                     with_parameter(comparison, parameter, p), theta, n_points);
  };
}

/// Crossover of W1(ref, a) and W1(ref, b) over the parameter bracket.
inline CrossoverResult find_state_crossover(const StateSpec& reference, const StateSpec& a,
                                            const StateSpec& b, SweepParameter parameter,
                                            double theta, double lo, double hi,
                                            const CrossoverOptions& opts = {}) {
  return find_crossover(w1_curve(reference, a, parameter, theta),
                        w1_curve(reference, b, parameter, theta), lo, hi, opts);
}

/// The alpha >= 0 with |alpha|^2 tanh|alpha|^2 = sinh^2 r (equal mean photon
/// number for the squeezed vacuum and the even cat).
inline double equal_mean_alpha(double r) {
  if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
  const double target = std::sinh(r) * std::sinh(r);
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::cosh(r);  // x tanh x >= x - 1 with x = alpha^2
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double x = mid * mid;
    if (x * std::tanh(x) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// The r at which |xi, m> has mean photon number `nbar` (nbar >= m for m >= 0).
/// `r_max` must stay within the truncation cap at the default tail tolerance.
inline double squeeze_for_mean_photon(int m, double nbar, double r_max = 1.5) {
  auto nbar_at = [&](double r) { return mean_photon_number(build_svs_family(SqueezeParams(r), m)); };
  double lo = m >= 0 ? 0.0 : 1e-9;
  double hi = r_max;
  if (!(nbar_at(lo) <= nbar && nbar <= nbar_at(hi))) {
    throw Error(ErrorCode::InvalidArgument, "mean photon number outside the reachable range");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (nbar_at(mid) < nbar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Real alpha >= 0 at which the chosen cat state has mean photon number `nbar`.
inline double matched_alpha(CatKind kind, int m_add, double nbar) {
  auto nbar_at = [&](double a) {
    return mean_photon_number(build_cat_family(kind, CatParams(a), m_add));
  };
  double lo = kind == CatKind::Odd ? 1e-9 : 0.0;
  double hi = kMaxCatAmplitude;
  if (!(nbar_at(lo) <= nbar && nbar <= nbar_at(hi))) {
    throw Error(ErrorCode::InvalidArgument, "mean photon number outside the reachable range");
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (nbar_at(mid) < nbar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace tomowass
