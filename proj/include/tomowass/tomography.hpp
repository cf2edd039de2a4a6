#pragma once

// Quadrature wavefunctions, PDF/CDF slices and full optical tomograms.
//
// Quadrature eigenstates use the phase convention <x, theta|n> = e^{-in theta} psi_n(x)
// with psi_n the normalized oscillator eigenfunctions (vacuum variance 1/2).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/parallel.hpp"
#include "tomowass/states.hpp"

namespace tomowass {

inline constexpr std::size_t kDefaultGridPoints = 2048;
inline constexpr std::size_t kMinGridPoints = 64;
inline constexpr double kSliceMassTol = 1e-8;
inline constexpr double kGridTailTol = 1e-10;

/// Uniform symmetric grid of quadrature values. Points are placed so that
/// x[n-1-i] == -x[i] holds exactly.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;

  static QuadratureGrid symmetric(double half_width, std::size_t n_points = kDefaultGridPoints) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw Error(ErrorCode::InvalidArgument, "grid half-width must be positive");
    }
    if (n_points < kMinGridPoints) {
      throw Error(ErrorCode::InvalidArgument, "grid needs at least 64 points");
    }
    QuadratureGrid g;
    g.half_width_ = half_width;
    g.n_points_ = n_points;
    return g;
  }

  double x_min() const noexcept { return -half_width_; }
  double x_max() const noexcept { return half_width_; }
  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_points_; }
  double spacing() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_points_ - 1); }

  double operator[](std::size_t i) const noexcept {
    const double k = 2.0 * static_cast<double>(i) - static_cast<double>(n_points_ - 1);
    return half_width_ * k / static_cast<double>(n_points_ - 1);
  }

  bool operator==(const QuadratureGrid&) const = default;

 private:
  double half_width_ = 8.0;
  std::size_t n_points_ = kDefaultGridPoints;
};

/// psi_0(x) .. psi_n_max(x).
using HermiteBuffer = std::vector<double>;

namespace detail {

struct RecurrenceTable {
  std::vector<double> up;    // sqrt(2/(n+1))
  std::vector<double> back;  // sqrt(n/(n+1))
  explicit RecurrenceTable(std::size_t n) : up(n), back(n) {
    for (std::size_t k = 0; k < n; ++k) {
      const double dk = static_cast<double>(k);
      up[k] = std::sqrt(2.0 / (dk + 1.0));
      back[k] = std::sqrt(dk / (dk + 1.0));
    }
  }
};

inline const RecurrenceTable& recurrence_table() {
  static const RecurrenceTable table(4 * kMaxFockIndex);
  return table;
}

}  // namespace detail

/// Normalized oscillator eigenfunctions via the three-term recurrence
/// psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}, carried with a
/// running exponent so nothing overflows or underflows prematurely.
inline HermiteBuffer hermite_function(std::size_t n_max, double x) {
  HermiteBuffer out(n_max + 1);
  double log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
  double prev = 0.0;
  double cur = 1.0;
  auto emit = [&](std::size_t n) {
    if (log_scale > -700.0) {
      out[n] = cur * std::exp(log_scale);
    } else {
      out[n] = cur == 0.0 ? 0.0 : std::copysign(std::exp(log_scale + std::log(std::abs(cur))), cur);
    }
  };
  if (n_max >= 4 * kMaxFockIndex) {
    throw Error(ErrorCode::InvalidArgument, "Hermite order out of range");
  }
  const auto& table = detail::recurrence_table();
  emit(0);
  for (std::size_t n = 0; n < n_max; ++n) {
    const double next = x * table.up[n] * cur - table.back[n] * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
    emit(n + 1);
  }
  return out;
}

namespace detail {

/// d_n = c_n e^{-in theta}.
inline std::vector<complex> rotated_amplitudes(const FockVector& v, double theta) {
  std::vector<complex> d(v.amplitudes.size());
  for (std::size_t n = 0; n < d.size(); ++n) {
    d[n] = v.amplitudes[n] * std::polar(1.0, -static_cast<double>(n) * theta);
  }
  return d;
}

/// Coefficients e_n with sum_n e_n psi_n(x) = d/dx sum_n d_n psi_n(x), using
/// psi_n' = sqrt(n/2) psi_{n-1} - sqrt((n+1)/2) psi_{n+1}.
inline std::vector<complex> derivative_coefficients(const std::vector<complex>& d) {
  std::vector<complex> e(d.size() + 1, complex{});
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double dn = static_cast<double>(n);
    if (n + 1 < d.size()) e[n] += std::sqrt((dn + 1.0) / 2.0) * d[n + 1];
    if (n >= 1) e[n] -= std::sqrt(dn / 2.0) * d[n - 1];
  }
  if (!d.empty()) {
    const double top = static_cast<double>(d.size());
    e[d.size()] -= std::sqrt(top / 2.0) * d[d.size() - 1];
  }
  return e;
}

struct PointValue {
  complex amplitude;
  complex slope;
};

inline PointValue evaluate(const std::vector<complex>& d, const std::vector<complex>& e, double x) {
  const HermiteBuffer psi = hermite_function(e.size() - 1, x);
  PointValue out{};
  for (std::size_t n = 0; n < d.size(); ++n) out.amplitude += d[n] * psi[n];
  for (std::size_t n = 0; n < e.size(); ++n) out.slope += e[n] * psi[n];
  return out;
}

}  // namespace detail

/// <x, theta|psi> = sum_n c_n e^{-in theta} psi_n(x).
inline complex quadrature_amplitude(const FockVector& v, double theta, double x) {
  const auto d = detail::rotated_amplitudes(v, theta);
  const HermiteBuffer psi = hermite_function(d.empty() ? 0 : d.size() - 1, x);
  complex s{};
  for (std::size_t n = 0; n < d.size(); ++n) s += d[n] * psi[n];
  return s;
}

/// PDF and CDF of one quadrature on a grid. `pdf_slope` holds dpdf/dx at the
/// nodes; the CDF is the running integral of the cubic Hermite interpolant of
/// the PDF, scaled so the last node is exactly 1.
struct DistributionSlice {
  QuadratureGrid grid;
  double theta = 0.0;
  std::vector<double> pdf;
  std::vector<double> pdf_slope;
  std::vector<double> cdf;
  /// Integral of the PDF before the CDF was rescaled.
  double mass = 1.0;
};

namespace detail {

/// 4th-order central differences, falling back to 2nd order near the ends.
inline std::vector<double> finite_difference_slope(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      s[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    } else if (i >= 1 && i + 1 < n) {
      s[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    } else if (i == 0) {
      s[i] = (f[1] - f[0]) / h;
    } else {
      s[i] = (f[n - 1] - f[n - 2]) / h;
    }
  }
  return s;
}

}  // namespace detail

/// Builds a slice from PDF samples and slopes; fails with GridTooNarrow when
/// the integral is off from 1 by more than `mass_tol`.
inline DistributionSlice make_slice(const QuadratureGrid& grid, double theta,
                                    std::vector<double> pdf, std::vector<double> slope,
                                    double mass_tol = kSliceMassTol) {
  if (pdf.size() != grid.size() || slope.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "slice arrays must match the grid size");
  }
  const double h = grid.spacing();
  std::vector<double> cdf(grid.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    acc += 0.5 * h * (pdf[i] + pdf[i + 1]) + h * h / 12.0 * (slope[i] - slope[i + 1]);
    cdf[i + 1] = acc;
  }
  if (!(std::abs(acc - 1.0) <= mass_tol)) {
    throw Error(ErrorCode::GridTooNarrow,
                "PDF integrates to " + std::to_string(acc) + " on half-width " +
                    std::to_string(grid.half_width()));
  }
  double running_max = 0.0;
  for (auto& c : cdf) {
    c = std::min(1.0, std::max(running_max, c / acc));
    running_max = c;
  }
  cdf.back() = 1.0;
  return {grid, theta, std::move(pdf), std::move(slope), std::move(cdf), acc};
}

/// Overload for PDF samples without known slopes.
inline DistributionSlice make_slice(const QuadratureGrid& grid, double theta,
                                    std::vector<double> pdf, double mass_tol = kSliceMassTol) {
  auto slope = detail::finite_difference_slope(pdf, grid.spacing());
  return make_slice(grid, theta, std::move(pdf), std::move(slope), mass_tol);
}

inline DistributionSlice pdf_slice(const FockVector& v, double theta, const QuadratureGrid& grid) {
  const auto d = detail::rotated_amplitudes(v, theta);
  const auto e = detail::derivative_coefficients(d);
  std::vector<double> pdf(grid.size());
  std::vector<double> slope(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto pv = detail::evaluate(d, e, grid[i]);
    pdf[i] = std::norm(pv.amplitude);
    slope[i] = 2.0 * std::real(std::conj(pv.amplitude) * pv.slope);
  }
  return make_slice(grid, theta, std::move(pdf), std::move(slope));
}

/// Symmetric grid wide enough for every quadrature of `v`: the larger of a
/// variance-based width, the floor 8, and the classical turning point of the
/// highest retained Fock state plus a tail margin set by `tail_tol`.
inline QuadratureGrid auto_grid(const FockVector& v, double tail_tol = kGridTailTol,
                                std::size_t n_points = kDefaultGridPoints) {
  const double nbar = mean_photon_number(v);
  const double by_variance = 4.0 * std::sqrt(2.0 * nbar + 1.0);
  const double turning = std::sqrt(2.0 * static_cast<double>(v.cutoff) + 1.0);
  const double margin = std::sqrt(-std::log(tail_tol)) + 1.0;
  return QuadratureGrid::symmetric(std::max({8.0, by_variance, turning + margin}), n_points);
}

/// Smallest grid containing both states' automatic grids.
inline QuadratureGrid shared_grid(const FockVector& a, const FockVector& b,
                                  std::size_t n_points = kDefaultGridPoints) {
  const double hw = std::max(auto_grid(a).half_width(), auto_grid(b).half_width());
  return QuadratureGrid::symmetric(hw, n_points);
}

/// PDF values over (theta, x), theta sampled uniformly on [0, 2 pi).
struct Tomogram {
  std::vector<double> theta_grid;
  QuadratureGrid x_grid;
  /// Row-major: values[row * x_grid.size() + col].
  std::vector<double> values;
  /// Integral of each row before CDF rescaling.
  std::vector<double> row_mass;

  std::size_t rows() const noexcept { return theta_grid.size(); }
  std::size_t cols() const noexcept { return x_grid.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols(), cols());
  }
};

inline constexpr double kTomogramSymmetryTol = 1e-10;

inline Tomogram tomogram(const FockVector& v, std::size_t theta_count, const QuadratureGrid& grid,
                         std::size_t threads = 1) {
  if (theta_count < 16) throw Error(ErrorCode::InvalidArgument, "tomogram needs >= 16 angles");
  Tomogram t;
  t.x_grid = grid;
  t.theta_grid.resize(theta_count);
  for (std::size_t k = 0; k < theta_count; ++k) {
    t.theta_grid[k] = 2.0 * std::numbers::pi * static_cast<double>(k) /
                      static_cast<double>(theta_count);
  }
  t.values.assign(theta_count * grid.size(), 0.0);
  t.row_mass.assign(theta_count, 0.0);
  detail::parallel_for(theta_count, threads, [&](std::size_t k) {
    const auto s = pdf_slice(v, t.theta_grid[k], grid);
    t.row_mass[k] = s.mass;
    std::copy(s.pdf.begin(), s.pdf.end(), t.values.begin() + static_cast<long>(k * grid.size()));
  });

  // w(x, theta + pi) = w(-x, theta).
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < theta_count; ++k) {
    std::vector<double> mirrored;
    std::span<const double> other;
    if (theta_count % 2 == 0) {
      other = t.row((k + theta_count / 2) % theta_count);
    } else {
      mirrored = pdf_slice(v, t.theta_grid[k] + std::numbers::pi, grid).pdf;
      other = mirrored;
    }
    const auto here = t.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(other[i] - here[n - 1 - i]) > kTomogramSymmetryTol) {
        throw Error(ErrorCode::InvariantViolation, "tomogram violates w(x, theta+pi) = w(-x, theta)");
      }
    }
  }
  return t;
}

/// Rows at `theta_count` angles spread evenly over [theta_lo, theta_hi] inclusive,
/// for close-up views of part of the tomogram. Only row normalization is checked.
inline Tomogram zoomed_tomogram(const FockVector& v, double theta_lo, double theta_hi,
                                std::size_t theta_count, const QuadratureGrid& grid,
                                std::size_t threads = 1) {
  if (!(theta_lo < theta_hi)) throw Error(ErrorCode::InvalidArgument, "need theta_lo < theta_hi");
  if (theta_count < 2) throw Error(ErrorCode::InvalidArgument, "need at least two angles");
  Tomogram t;
  t.x_grid = grid;
  t.theta_grid.resize(theta_count);
  for (std::size_t k = 0; k < theta_count; ++k) {
    t.theta_grid[k] = theta_lo + (theta_hi - theta_lo) * static_cast<double>(k) /
                                     static_cast<double>(theta_count - 1);
  }
  t.values.assign(theta_count * grid.size(), 0.0);
  t.row_mass.assign(theta_count, 0.0);
  detail::parallel_for(theta_count, threads, [&](std::size_t k) {
    const auto s = pdf_slice(v, t.theta_grid[k], grid);
    t.row_mass[k] = s.mass;
    std::copy(s.pdf.begin(), s.pdf.end(), t.values.begin() + static_cast<long>(k * grid.size()));
  });
  return t;
}

}  // namespace tomowass
