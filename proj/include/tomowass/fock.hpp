#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "tomowass/error.hpp"

namespace tomowass {

using complex = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-12;
/// Highest Fock index any construction may reach.
inline constexpr std::size_t kMaxFockIndex = 512;
/// Largest cat amplitude accepted.
inline constexpr double kMaxCatAmplitude = 12.0;

/// Squeezing xi = r e^{i phi}.
struct SqueezeParams {
  double r = 0.0;
  double phi = 0.0;

  SqueezeParams() = default;
  SqueezeParams(double r_, double phi_ = 0.0) : r(r_), phi(reduce_angle(phi_)) {
    if (!(r_ >= 0.0) || !std::isfinite(r_)) {
      throw Error(ErrorCode::InvalidArgument, "squeezing magnitude r must be finite and >= 0");
    }
  }

  static double reduce_angle(double a) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "angle must be finite");
    double out = std::fmod(a, 2.0 * std::numbers::pi);
    if (out < 0.0) out += 2.0 * std::numbers::pi;
    return out;
  }
};

struct CatParams {
  complex alpha{0.0, 0.0};

  CatParams() = default;
  CatParams(complex a) : alpha(a) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || std::abs(a) > kMaxCatAmplitude) {
      throw Error(ErrorCode::InvalidArgument, "cat amplitude must be finite with |alpha| <= 12");
    }
  }
};

/// Pure state as amplitudes c_0..c_N in the truncated number basis.
struct FockVector {
  std::vector<complex> amplitudes;
  std::size_t cutoff = 0;
  double discarded_mass = 0.0;

  std::size_t size() const noexcept { return amplitudes.size(); }
  complex operator[](std::size_t n) const noexcept {
    return n < amplitudes.size() ? amplitudes[n] : complex{};
  }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
  }

  static FockVector basis(std::size_t n) {
    FockVector v;
    v.amplitudes.assign(n + 1, complex{});
    v.amplitudes[n] = 1.0;
    v.cutoff = n;
    return v;
  }
};

enum class Family { Svs, CatEven, CatOdd, Coherent };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Svs: return "svs";
    case Family::CatEven: return "cat-even";
    case Family::CatOdd: return "cat-odd";
    case Family::Coherent: return "coherent";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "svs") return Family::Svs;
  if (s == "cat-even" || s == "ecs") return Family::CatEven;
  if (s == "cat-odd" || s == "ocs") return Family::CatOdd;
  if (s == "coherent") return Family::Coherent;
  throw Error(ErrorCode::InvalidArgument, "unknown state family '" + s + "'");
}

/// Uniform addressing of every implemented state.
struct StateSpec {
  Family family = Family::Svs;
  SqueezeParams squeeze{};
  CatParams cat{};
  /// Positive = photons added, negative = photons subtracted.
  int photon_delta = 0;
  double tail_tol = kDefaultTailTol;
  /// Permits |photon_delta| > 3 for the squeezed family.
  bool unvalidated = false;

  bool is_squeezed() const noexcept { return family == Family::Svs; }
};

}  // namespace tomowass
