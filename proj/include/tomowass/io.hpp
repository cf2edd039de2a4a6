#pragma once

// File formats: state records, tomogram CSV/PGM, sweep CSV, crossover JSON,
// measurement records (CSV and binary).

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/homodyne.hpp"
#include "tomowass/tomography.hpp"
#include "tomowass/transport.hpp"

namespace tomowass::io {

/// Shortest-form is not used on purpose: every number carries 17 significant
/// digits, which round-trips any double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Writes via a temporary file and a rename so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// --- state records ----------------------------------------------------------

/// Flat record `family=svs,r=0.5,phi=0,alpha_re=0,alpha_im=0,m=1,tail_tol=1e-12`.
/// Missing keys take their defaults (phi = 0, tail_tol = 1e-12, others 0).
inline StateSpec parse_state_spec(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const auto item = text.substr(pos, comma - pos);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "expected key=value in '" + std::string(item) + "'");
      }
      kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    pos = comma + 1;
  }
  StateSpec s;
  double r = 0.0;
  double phi = 0.0;
  double are = 0.0;
  double aim = 0.0;
  for (const auto& [k, v] : kv) {
    if (k == "family") {
      s.family = parse_family(v);
    } else if (k == "r") {
      r = parse_double(v);
    } else if (k == "phi") {
      phi = parse_double(v);
    } else if (k == "alpha_re") {
      are = parse_double(v);
    } else if (k == "alpha_im") {
      aim = parse_double(v);
    } else if (k == "m") {
      s.photon_delta = static_cast<int>(parse_double(v));
      if (static_cast<double>(s.photon_delta) != parse_double(v)) {
        throw Error(ErrorCode::InvalidArgument, "m must be an integer");
      }
    } else if (k == "tail_tol") {
      s.tail_tol = parse_double(v);
    } else if (k == "unvalidated") {
      s.unvalidated = v == "1" || v == "true";
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown state key '" + k + "'");
    }
  }
  s.squeeze = SqueezeParams(r, phi);
  s.cat = CatParams(complex(are, aim));
  return s;
}

inline std::string format_state_spec(const StateSpec& s) {
  std::string out = "family=" + to_string(s.family);
  out += ",r=" + format_double(s.squeeze.r);
  out += ",phi=" + format_double(s.squeeze.phi);
  out += ",alpha_re=" + format_double(s.cat.alpha.real());
  out += ",alpha_im=" + format_double(s.cat.alpha.imag());
  out += ",m=" + std::to_string(s.photon_delta);
  out += ",tail_tol=" + format_double(s.tail_tol);
  if (s.unvalidated) out += ",unvalidated=1";
  return out;
}

/// Rows `n,re,im,prob`.
inline std::string state_csv(const FockVector& v) {
  std::string out = "n,re,im,prob\n";
  for (std::size_t n = 0; n < v.amplitudes.size(); ++n) {
    const auto c = v.amplitudes[n];
    out += std::to_string(n) + "," + format_double(c.real()) + "," + format_double(c.imag()) + "," +
           format_double(std::norm(c)) + "\n";
  }
  return out;
}

// --- tomograms ----------------------------------------------------------------

inline std::string tomogram_csv(const Tomogram& t) {
  std::string out = "theta,x,w\n";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::string theta = format_double(t.theta_grid[r]);
    for (std::size_t c = 0; c < t.cols(); ++c) {
      out += theta;
      out += ',';
      out += format_double(t.x_grid[c]);
      out += ',';
      out += format_double(t.at(r, c));
      out += '\n';
    }
  }
  return out;
}

/// Binary P5 image, rows = theta ascending, columns = x ascending, per-image
/// maximum mapped to 255.
inline std::string tomogram_pgm(const Tomogram& t) {
  double peak = 0.0;
  for (double v : t.values) peak = std::max(peak, v);
  std::string out = "P5\n" + std::to_string(t.cols()) + " " + std::to_string(t.rows()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double scaled = peak > 0.0 ? 255.0 * t.values[i] / peak : 0.0;
    out[header + i] = static_cast<char>(static_cast<unsigned char>(std::lround(scaled)));
  }
  return out;
}

/// Rows `x,pdf,cdf`.
inline std::string slice_csv(const DistributionSlice& s) {
  std::string out = "x,pdf,cdf\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    out += format_double(s.grid[i]) + "," + format_double(s.pdf[i]) + "," +
           format_double(s.cdf[i]) + "\n";
  }
  return out;
}

// --- transport ------------------------------------------------------------------

/// Header `param,<label>...`; missing cells are empty fields.
inline std::string sweep_csv(const SweepTable& t) {
  std::string out = "param";
  for (const auto& c : t.columns) out += "," + c.label;
  out += "\n";
  for (std::size_t i = 0; i < t.parameter_values.size(); ++i) {
    out += format_double(t.parameter_values[i]);
    for (const auto& c : t.columns) {
      out += ",";
      if (c.values[i]) out += format_double(*c.values[i]);
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::json to_json(const CrossoverResult& r) {
  nlohmann::json j;
  j["found"] = r.found;
  if (r.found) {
    j["location"] = r.location;
  } else {
    j["location"] = nullptr;
  }
  j["bracket_lo"] = r.bracket_lo;
  j["bracket_hi"] = r.bracket_hi;
  j["residual"] = r.residual;
  j["scan_points"] = r.scan_points;
  j["sign_changes"] = r.sign_changes;
  j["multiple_roots"] = r.multiple_roots;
  j["low_confidence"] = r.low_confidence;
  return j;
}

// --- measurement records -----------------------------------------------------------

inline constexpr char kRecordMagic[8] = {'T', 'W', 'H', 'R', 'E', 'C', '0', '1'};

inline std::string record_csv(const MeasurementRecord& rec) {
  std::string out = "theta,x\n";
  const std::string theta = format_double(rec.theta);
  for (double x : rec.samples) out += theta + "," + format_double(x) + "\n";
  return out;
}

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
}

template <class T>
T get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace detail

/// 32-byte header {magic[8], theta f64, shots u64, seed u64}, then one
/// little-endian f64 per shot.
inline std::string record_binary(const MeasurementRecord& rec) {
  std::string out(kRecordMagic, kRecordMagic + 8);
  detail::put_le(out, rec.theta);
  detail::put_le(out, static_cast<std::uint64_t>(rec.shots));
  detail::put_le(out, rec.seed);
  for (double x : rec.samples) detail::put_le(out, x);
  return out;
}

inline MeasurementRecord parse_record_binary(std::string_view bytes) {
  if (bytes.size() < 32 || std::memcmp(bytes.data(), kRecordMagic, 8) != 0) {
    throw Error(ErrorCode::InvalidArgument, "not a measurement record");
  }
  MeasurementRecord rec;
  rec.theta = detail::get_le<double>(bytes.data() + 8);
  rec.shots = detail::get_le<std::uint64_t>(bytes.data() + 16);
  rec.seed = detail::get_le<std::uint64_t>(bytes.data() + 24);
  if (bytes.size() != 32 + 8 * rec.shots) {
    throw Error(ErrorCode::InvalidArgument, "record length does not match its shot count");
  }
  rec.samples.resize(rec.shots);
  for (std::size_t i = 0; i < rec.shots; ++i) {
    rec.samples[i] = detail::get_le<double>(bytes.data() + 32 + 8 * i);
  }
  return rec;
}

}  // namespace tomowass::io
