// tomowass: command-line front end. Every file output is written atomically
// and accompanied by `<out>.meta`, a flat key=value record of the fully
// resolved configuration that reruns the command via `--config`.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomowass/tomowass.hpp"

namespace tw = tomowass;
using Meta = std::vector<std::pair<std::string, std::string>>;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
const double kDefaultR = 1.0 / std::sqrt(2.0);
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return tw::io::format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

/// Decimal radians or pi fractions: "pi", "pi/20", "3pi/4", "3*pi/4", "-pi/2".
double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  const auto p = s.find("pi");
  if (p == std::string::npos) return tw::io::parse_double(s);
  std::string head = s.substr(0, p);
  if (!head.empty() && head.back() == '*') head.pop_back();
  double num = 1.0;
  if (head == "-") {
    num = -1.0;
  } else if (!head.empty() && head != "+") {
    num = tw::io::parse_double(head);
  }
  const std::string tail = s.substr(p + 2);
  double den = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') throw tw::Error(tw::ErrorCode::InvalidArgument, "bad angle '" + text + "'");
    den = tw::io::parse_double(tail.substr(1));
    if (den == 0.0) throw tw::Error(tw::ErrorCode::InvalidArgument, "bad angle '" + text + "'");
  }
  return num * std::numbers::pi / den;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

// --- state tokens -------------------------------------------------------------

/// Short names used by pair/compare options: svs, addK, subK, ecs, ecs-addK,
/// ocs, coherent; a trailing "-eq" on a cat token matches the reference's
/// mean photon number.
struct Token {
  std::string text;
  tw::Family family = tw::Family::Svs;
  int m = 0;
  bool match_mean = false;
};

int parse_count(const std::string& digits, const std::string& token) {
  int v = 0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || v < 1) {
    throw tw::Error(tw::ErrorCode::InvalidArgument, "bad state token '" + token + "'");
  }
  return v;
}

Token parse_token(const std::string& text) {
  Token t;
  t.text = text;
  std::string s = text;
  if (s.size() > 3 && s.ends_with("-eq")) {
    t.match_mean = true;
    s.resize(s.size() - 3);
  }
  if (s == "svs") {
    t.family = tw::Family::Svs;
  } else if (s.starts_with("add")) {
    t.m = parse_count(s.substr(3), text);
  } else if (s.starts_with("sub")) {
    t.m = -parse_count(s.substr(3), text);
  } else if (s == "ecs") {
    t.family = tw::Family::CatEven;
  } else if (s.starts_with("ecs-add")) {
    t.family = tw::Family::CatEven;
    t.m = parse_count(s.substr(7), text);
  } else if (s == "ocs") {
    t.family = tw::Family::CatOdd;
  } else if (s == "coherent") {
    t.family = tw::Family::Coherent;
  } else {
    throw tw::Error(tw::ErrorCode::InvalidArgument, "unknown state token '" + text + "'");
  }
  if (t.match_mean && t.family == tw::Family::Svs) {
    throw tw::Error(tw::ErrorCode::InvalidArgument, "'-eq' applies to cat tokens only");
  }
  return t;
}

/// Parameters shared by every state named by a token.
struct BaseParams {
  double r = kDefaultR;
  double phi = 0.0;
  double alpha = 1.8;
  double alpha_im = 0.0;
  double tail_tol = tw::kDefaultTailTol;
  bool unvalidated = false;

  void add(CLI::App* app) {
    app->add_option("--r", r, "Squeezing magnitude r");
    app->add_option("--phi", phi, "Squeezing phase phi (radians)");
    app->add_option("--alpha", alpha, "Cat amplitude, real part");
    app->add_option("--alpha-im", alpha_im, "Cat amplitude, imaginary part");
    app->add_option("--tail-tol", tail_tol, "Fock truncation tail tolerance");
    app->add_flag("--unvalidated", unvalidated, "Allow |m| > 3 for squeezed states");
  }

  void meta(Meta& m) const {
    m.emplace_back("r", fmt(r));
    m.emplace_back("phi", fmt(phi));
    m.emplace_back("alpha", fmt(alpha));
    m.emplace_back("alpha-im", fmt(alpha_im));
    m.emplace_back("tail-tol", fmt(tail_tol));
    m.emplace_back("unvalidated", fmt(unvalidated));
  }

  tw::StateSpec spec(tw::Family family, int m) const {
    tw::StateSpec s;
    s.family = family;
    s.squeeze = tw::SqueezeParams(r, phi);
    s.cat = tw::CatParams(tw::complex(alpha, alpha_im));
    s.photon_delta = m;
    s.tail_tol = tail_tol;
    s.unvalidated = unvalidated;
    return s;
  }

  tw::LabeledState labeled(const Token& t) const {
    return {t.text, spec(t.family, t.m), t.match_mean};
  }
};

/// A single state given by family and photon number change.
struct StateOpts {
  BaseParams base;
  std::string family = "svs";
  int m = 0;

  void add(CLI::App* app) {
    app->add_option("--family", family, "svs | cat-even (ecs) | cat-odd (ocs) | coherent");
    base.add(app);
    app->add_option("--m", m, "Photons added (m > 0) or subtracted (m < 0)");
  }

  void meta(Meta& out) const {
    out.emplace_back("family", family);
    base.meta(out);
    out.emplace_back("m", std::to_string(m));
  }

  tw::StateSpec spec() const { return base.spec(tw::parse_family(family), m); }
};

tw::SweepParameter parameter_for(const Token& reference) {
  return reference.family == tw::Family::Svs ? tw::SweepParameter::R : tw::SweepParameter::Alpha;
}

tw::SweepParameter parse_parameter(const std::string& s) {
  if (s == "r") return tw::SweepParameter::R;
  if (s == "alpha") return tw::SweepParameter::Alpha;
  throw tw::Error(tw::ErrorCode::InvalidArgument, "parameter must be 'r' or 'alpha'");
}

/// Default reference: the plain state of the comparisons' family.
std::string default_reference(const std::vector<Token>& comparisons) {
  for (const auto& t : comparisons) {
    if (t.family != tw::Family::Svs && !t.match_mean) return "ecs";
  }
  return "svs";
}

/// Fills lo/hi left unset (NaN) with the documented defaults.
void resolve_range(tw::SweepParameter p, double& lo, double& hi) {
  if (std::isnan(lo)) lo = p == tw::SweepParameter::R ? 0.3 : 1.5;
  if (std::isnan(hi)) hi = p == tw::SweepParameter::R ? 0.8 : 2.5;
}

// --- output --------------------------------------------------------------------

Meta meta_header(const std::string& command) {
  return {{"version", tw::kVersion}, {"command", command}};
}

void emit(const std::string& out, const std::string& content, const Meta& meta) {
  std::string block = "# tomowass run metadata\n";
  for (const auto& [k, v] : meta) block += k + "=" + v + "\n";
  if (out == "-") {
    std::cout << content;
    std::cout.flush();
    std::cerr << block;
    return;
  }
  tw::io::write_file_atomic(out, content);
  tw::io::write_file_atomic(out + ".meta", block);
}

// --- subcommands ------------------------------------------------------------

struct StateCmd {
  StateOpts state;
  std::string out = "-";

  void add(CLI::App* app) {
    state.add(app);
    app->add_option("--out", out, "Output CSV (n,re,im,prob); '-' for stdout");
  }
  Meta meta() const {
    Meta m = meta_header("state");
    state.meta(m);
    m.emplace_back("out", out);
    return m;
  }
  void run() const { emit(out, tw::io::state_csv(tw::build_state(state.spec())), meta()); }
};

struct TomogramCmd {
  StateOpts state;
  std::size_t theta_count = 64;
  std::size_t points = tw::kDefaultGridPoints;
  double half_width = 0.0;
  std::string theta_lo;
  std::string theta_hi;
  std::string format = "csv";
  std::size_t threads = 1;
  std::string out = "-";

  void add(CLI::App* app) {
    state.add(app);
    app->add_option("--theta-count", theta_count, "Number of angles");
    app->add_option("--points", points, "Quadrature grid points");
    app->add_option("--half-width", half_width, "Grid half-width (0 = automatic)");
    app->add_option("--theta-lo", theta_lo, "Zoom: first angle (with --theta-hi)");
    app->add_option("--theta-hi", theta_hi, "Zoom: last angle (with --theta-lo)");
    app->add_option("--format", format, "csv | pgm")->check(CLI::IsMember({"csv", "pgm"}));
    app->add_option("--threads", threads, "Worker threads");
    app->add_option("--out", out, "Output file; '-' for stdout");
  }
  Meta meta() const {
    Meta m = meta_header("tomogram");
    state.meta(m);
    m.emplace_back("theta-count", std::to_string(theta_count));
    m.emplace_back("points", std::to_string(points));
    m.emplace_back("half-width", fmt(half_width));
    if (!theta_lo.empty()) m.emplace_back("theta-lo", theta_lo);
    if (!theta_hi.empty()) m.emplace_back("theta-hi", theta_hi);
    m.emplace_back("format", format);
    m.emplace_back("threads", std::to_string(threads));
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const auto v = tw::build_state(state.spec());
    const auto grid = half_width > 0.0 ? tw::QuadratureGrid::symmetric(half_width, points)
                                       : tw::auto_grid(v, tw::kGridTailTol, points);
    if (theta_lo.empty() != theta_hi.empty()) {
      throw tw::Error(tw::ErrorCode::InvalidArgument, "--theta-lo and --theta-hi go together");
    }
    const auto t = theta_lo.empty()
                       ? tw::tomogram(v, theta_count, grid, threads)
                       : tw::zoomed_tomogram(v, parse_angle(theta_lo), parse_angle(theta_hi),
                                             theta_count, grid, threads);
    emit(out, format == "pgm" ? tw::io::tomogram_pgm(t) : tw::io::tomogram_csv(t), meta());
  }
};

struct SliceCmd {
  StateOpts state;
  std::string theta = "0";
  std::size_t points = tw::kDefaultGridPoints;
  double half_width = 0.0;
  std::string out = "-";

  void add(CLI::App* app) {
    state.add(app);
    app->add_option("--theta", theta, "Quadrature angle (radians or pi/k)");
    app->add_option("--points", points, "Quadrature grid points");
    app->add_option("--half-width", half_width, "Grid half-width (0 = automatic)");
    app->add_option("--out", out, "Output CSV (x,pdf,cdf); '-' for stdout");
  }
  Meta meta() const {
    Meta m = meta_header("slice");
    state.meta(m);
    m.emplace_back("theta", theta);
    m.emplace_back("points", std::to_string(points));
    m.emplace_back("half-width", fmt(half_width));
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const auto v = tw::build_state(state.spec());
    const auto grid = half_width > 0.0 ? tw::QuadratureGrid::symmetric(half_width, points)
                                       : tw::auto_grid(v, tw::kGridTailTol, points);
    emit(out, tw::io::slice_csv(tw::pdf_slice(v, parse_angle(theta), grid)), meta());
  }
};

struct W1Cmd {
  BaseParams base;
  std::string ref = "svs";
  std::string cmp = "add1";
  std::string theta = "0";
  std::size_t points = tw::kDefaultGridPoints;
  std::string out = "-";

  void add(CLI::App* app) {
    base.add(app);
    app->add_option("--ref", ref, "Reference state token");
    app->add_option("--cmp", cmp, "Comparison state token");
    app->add_option("--theta", theta, "Quadrature angle (radians or pi/k)");
    app->add_option("--points", points, "Quadrature grid points");
    app->add_option("--out", out, "Output JSON; '-' for stdout");
  }
  Meta meta() const {
    Meta m = meta_header("w1");
    base.meta(m);
    m.emplace_back("ref", ref);
    m.emplace_back("cmp", cmp);
    m.emplace_back("theta", theta);
    m.emplace_back("points", std::to_string(points));
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const Token rt = parse_token(ref);
    const Token ct = parse_token(cmp);
    const auto rs = base.spec(rt.family, rt.m);
    const auto cs = tw::comparison_at(rs, base.labeled(ct), parameter_for(rt),
                                      parameter_for(rt) == tw::SweepParameter::R ? base.r : base.alpha);
    const double th = parse_angle(theta);
    nlohmann::json j;
    j["ref"] = ref;
    j["cmp"] = cmp;
    j["theta"] = th;
    j["w1"] = tw::w1_states(rs, cs, th, points);
    j["n_points"] = points;
    emit(out, j.dump(2) + "\n", meta());
  }
};

/// Options shared by sweep and the crossover commands.
struct ScanOpts {
  BaseParams base;
  std::string ref;
  std::string param;
  double lo = kNaN;
  double hi = kNaN;
  std::string theta = "0";
  std::size_t points = tw::kDefaultGridPoints;
  std::size_t threads = 1;

  void add(CLI::App* app) {
    base.add(app);
    app->add_option("--ref", ref, "Reference state token (default: svs, or ecs for cat comparisons)");
    app->add_option("--param", param, "Swept parameter: r | alpha (default from the reference)");
    app->add_option("--lo", lo, "Lower parameter bound (default 0.3 for r, 1.5 for alpha)");
    app->add_option("--hi", hi, "Upper parameter bound (default 0.8 for r, 2.5 for alpha)");
    app->add_option("--theta", theta, "Quadrature angle (radians or pi/k)");
    app->add_option("--points", points, "Quadrature grid points");
    app->add_option("--threads", threads, "Worker threads");
  }

  /// Fills defaults that depend on the comparison tokens.
  void resolve(const std::vector<Token>& comparisons) {
    if (ref.empty()) ref = default_reference(comparisons);
    if (param.empty()) param = tw::to_string(parameter_for(parse_token(ref)));
    resolve_range(parse_parameter(param), lo, hi);
  }

  void meta(Meta& m) const {
    base.meta(m);
    m.emplace_back("ref", ref);
    m.emplace_back("param", param);
    m.emplace_back("lo", fmt(lo));
    m.emplace_back("hi", fmt(hi));
    m.emplace_back("theta", theta);
    m.emplace_back("points", std::to_string(points));
    m.emplace_back("threads", std::to_string(threads));
  }

  tw::LabeledState reference() const {
    const Token t = parse_token(ref);
    if (t.match_mean) throw tw::Error(tw::ErrorCode::InvalidArgument, "reference cannot use '-eq'");
    return base.labeled(t);
  }
};

struct SweepCmd {
  ScanOpts scan;
  std::string compare = "add1,add2,add3";
  std::size_t steps = 51;
  bool with_nbar = false;
  std::string out = "-";

  void add(CLI::App* app) {
    scan.add(app);
    app->add_option("--compare", compare, "Comma-separated comparison tokens");
    app->add_option("--steps", steps, "Number of parameter values");
    app->add_flag("--with-nbar", with_nbar, "Append mean photon number columns");
    app->add_option("--out", out, "Output CSV; '-' for stdout");
  }
  std::vector<Token> tokens() const {
    std::vector<Token> out_tokens;
    for (const auto& s : split(compare, ',')) out_tokens.push_back(parse_token(s));
    if (out_tokens.empty()) throw tw::Error(tw::ErrorCode::InvalidArgument, "--compare is empty");
    return out_tokens;
  }
  void resolve() { scan.resolve(tokens()); }
  Meta meta() const {
    Meta m = meta_header("sweep");
    scan.meta(m);
    m.emplace_back("compare", compare);
    m.emplace_back("steps", std::to_string(steps));
    m.emplace_back("with-nbar", fmt(with_nbar));
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const auto ref = scan.reference();
    std::vector<tw::LabeledState> cmp;
    for (const auto& t : tokens()) cmp.push_back(scan.base.labeled(t));
    const tw::SweepRange range{parse_parameter(scan.param), scan.lo, scan.hi, steps};
    auto table = tw::sweep_w1(ref, cmp, range, parse_angle(scan.theta), {scan.points, scan.threads});
    if (with_nbar) {
      std::vector<tw::SweepColumn> extra;
      extra.push_back({"nbar:" + ref.label, {}});
      for (const auto& c : cmp) extra.push_back({"nbar:" + c.label, {}});
      for (double p : table.parameter_values) {
        const auto rs = tw::with_parameter(ref.spec, range.parameter, p);
        auto nbar = [](const tw::StateSpec& s) -> std::optional<double> {
          try {
            return tw::mean_photon_number(tw::build_state(s));
          } catch (const tw::Error&) {
            return std::nullopt;
          }
        };
        extra[0].values.push_back(nbar(rs));
        for (std::size_t j = 0; j < cmp.size(); ++j) {
          std::optional<double> v;
          try {
            v = nbar(tw::comparison_at(rs, cmp[j], range.parameter, p));
          } catch (const tw::Error&) {
          }
          extra[j + 1].values.push_back(v);
        }
      }
      for (auto& c : extra) table.columns.push_back(std::move(c));
    }
    emit(out, tw::io::sweep_csv(table), meta());
  }
};

struct CrossoverCmd {
  ScanOpts scan;
  std::string pair = "add1:add2";
  std::size_t scan_points = 64;
  double tol = 1e-4;
  std::string out = "-";

  void add(CLI::App* app) {
    scan.add(app);
    app->add_option("--pair", pair, "Two comparison tokens 'a:b'");
    app->add_option("--scan-points", scan_points, "Bracket scan points");
    app->add_option("--tol", tol, "Parameter tolerance of the bisection");
    app->add_option("--out", out, "Output JSON; '-' for stdout");
  }
  std::pair<Token, Token> tokens() const {
    const auto parts = split(pair, ':');
    if (parts.size() != 2) throw tw::Error(tw::ErrorCode::InvalidArgument, "--pair must be 'a:b'");
    return {parse_token(parts[0]), parse_token(parts[1])};
  }
  void resolve() {
    const auto [a, b] = tokens();
    scan.resolve({a, b});
  }
  void meta_into(Meta& m) const {
    scan.meta(m);
    m.emplace_back("pair", pair);
    m.emplace_back("scan-points", std::to_string(scan_points));
    m.emplace_back("tol", fmt(tol));
  }
  Meta meta() const {
    Meta m = meta_header("crossover");
    meta_into(m);
    m.emplace_back("out", out);
    return m;
  }
  tw::CrossoverOptions options() const {
    tw::CrossoverOptions o;
    o.scan_points = scan_points;
    o.parameter_tol = tol;
    o.threads = scan.threads;
    return o;
  }
  nlohmann::json describe(const tw::CrossoverResult& res) const {
    auto j = tw::io::to_json(res);
    j["pair"] = pair;
    j["ref"] = scan.ref;
    j["parameter"] = scan.param;
    j["theta"] = parse_angle(scan.theta);
    return j;
  }
  void run() const {
    const auto ref = scan.reference();
    const auto [ta, tb] = tokens();
    const auto param = parse_parameter(scan.param);
    const double theta = parse_angle(scan.theta);
    auto curve = [&](const tw::LabeledState& cmp) -> tw::Curve {
      return [ref, cmp, param, theta, points = scan.points](double p) {
        const auto rs = tw::with_parameter(ref.spec, param, p);
        return tw::w1_states(rs, tw::comparison_at(rs, cmp, param, p), theta, points);
      };
    };
    const auto res = tw::find_crossover(curve(scan.base.labeled(ta)), curve(scan.base.labeled(tb)),
                                        scan.lo, scan.hi, options());
    emit(out, describe(res).dump(2) + "\n", meta());
  }
};

struct EmpiricalCmd {
  CrossoverCmd crossover;
  std::size_t shots = 1'000'000;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    crossover.add(app);
    app->add_option("--shots", shots, "Shots per record");
    app->add_option("--seed", seed, "Master seed");
  }
  void resolve() { crossover.resolve(); }
  Meta meta() const {
    Meta m = meta_header("empirical-crossover");
    crossover.meta_into(m);
    m.emplace_back("shots", std::to_string(shots));
    m.emplace_back("seed", std::to_string(seed));
    m.emplace_back("out", crossover.out);
    return m;
  }
  void run() const {
    const auto& scan = crossover.scan;
    const auto [ta, tb] = crossover.tokens();
    if (ta.match_mean || tb.match_mean) {
      throw tw::Error(tw::ErrorCode::InvalidArgument, "'-eq' tokens are not sampled");
    }
    tw::EmpiricalCrossoverOptions o;
    o.shots = shots;
    o.seed = seed;
    o.search = crossover.options();
    const auto res = tw::empirical_crossover(
        scan.reference().spec, scan.base.spec(ta.family, ta.m), scan.base.spec(tb.family, tb.m),
        parse_parameter(scan.param), parse_angle(scan.theta), scan.lo, scan.hi, o);
    auto j = crossover.describe(res);
    j["shots"] = shots;
    j["seed"] = seed;
    j["parameter_tolerance"] = tw::empirical_crossover_tolerance(shots);
    emit(crossover.out, j.dump(2) + "\n", meta());
  }
};

struct ObservablesCmd {
  StateOpts state;
  std::string theta = "0";
  std::string compare;
  double lo = kNaN;
  double hi = kNaN;
  std::size_t steps = 51;
  std::string out = "-";

  void add(CLI::App* app) {
    state.add(app);
    app->add_option("--theta", theta, "Quadrature angle for the variance");
    app->add_option("--compare", compare,
                    "Table mode: comma-separated tokens swept over [lo, hi]");
    app->add_option("--lo", lo, "Table mode: lower bound (default 0.3 for r, 1.5 for alpha)");
    app->add_option("--hi", hi, "Table mode: upper bound (default 0.8 for r, 2.5 for alpha)");
    app->add_option("--steps", steps, "Table mode: number of parameter values");
    app->add_option("--out", out, "Output (JSON, or CSV in table mode); '-' for stdout");
  }
  std::vector<Token> tokens() const {
    std::vector<Token> t;
    for (const auto& s : split(compare, ',')) t.push_back(parse_token(s));
    return t;
  }
  void resolve() {
    const auto t = tokens();
    if (!t.empty()) resolve_range(parameter_for(t.front()), lo, hi);
  }
  Meta meta() const {
    Meta m = meta_header("observables");
    state.meta(m);
    m.emplace_back("theta", theta);
    if (!compare.empty()) {
      m.emplace_back("compare", compare);
      m.emplace_back("lo", fmt(lo));
      m.emplace_back("hi", fmt(hi));
      m.emplace_back("steps", std::to_string(steps));
    }
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const double th = parse_angle(theta);
    if (compare.empty()) {
      const auto v = tw::build_state(state.spec());
      nlohmann::json j;
      j["mean_photon_number"] = tw::mean_photon_number(v);
      j["quadrature_variance"] = tw::quadrature_variance(v, th);
      j["theta"] = th;
      j["norm_squared"] = v.norm_squared();
      j["cutoff"] = v.cutoff;
      j["discarded_mass"] = v.discarded_mass;
      emit(out, j.dump(2) + "\n", meta());
      return;
    }
    const auto toks = tokens();
    const auto param = parameter_for(toks.front());
    tw::SweepTable table;
    table.parameter_name = tw::to_string(param);
    table.parameter_values = tw::SweepRange{param, lo, hi, steps}.values();
    for (const auto& t : toks) table.columns.push_back({"nbar:" + t.text, {}});
    for (const auto& t : toks) table.columns.push_back({"var:" + t.text, {}});
    for (double p : table.parameter_values) {
      for (std::size_t j = 0; j < toks.size(); ++j) {
        std::optional<double> nbar, var;
        try {
          const auto v = tw::build_state(
              tw::with_parameter(state.base.spec(toks[j].family, toks[j].m), param, p));
          nbar = tw::mean_photon_number(v);
          var = tw::quadrature_variance(v, th);
        } catch (const tw::Error&) {
        }
        table.columns[j].values.push_back(nbar);
        table.columns[toks.size() + j].values.push_back(var);
      }
    }
    emit(out, tw::io::sweep_csv(table), meta());
  }
};

struct SampleCmd {
  StateOpts state;
  std::string theta = "0";
  std::size_t shots = 100'000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::string format = "csv";
  std::string out = "-";

  void add(CLI::App* app) {
    state.add(app);
    app->add_option("--theta", theta, "Quadrature angle (radians or pi/k)");
    app->add_option("--shots", shots, "Number of shots");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--stream", stream, "Stream index under the seed");
    app->add_option("--format", format, "csv | bin")->check(CLI::IsMember({"csv", "bin"}));
    app->add_option("--out", out, "Output file; '-' for stdout");
  }
  Meta meta() const {
    Meta m = meta_header("sample");
    state.meta(m);
    m.emplace_back("theta", theta);
    m.emplace_back("shots", std::to_string(shots));
    m.emplace_back("seed", std::to_string(seed));
    m.emplace_back("stream", std::to_string(stream));
    m.emplace_back("format", format);
    m.emplace_back("out", out);
    return m;
  }
  void run() const {
    const auto rec = tw::sample_quadrature(tw::build_state(state.spec()), parse_angle(theta), shots,
                                           seed, stream);
    emit(out, format == "bin" ? tw::io::record_binary(rec) : tw::io::record_csv(rec), meta());
  }
};

struct ReproduceCmd {
  std::string out_dir = "reproduce";
  std::size_t threads = 1;
  std::size_t points = tw::kDefaultGridPoints;
  std::size_t shots = 100'000;

  void add(CLI::App* app) {
    app->add_option("--out-dir", out_dir, "Directory for all figure outputs");
    app->add_option("--threads", threads, "Worker threads");
    app->add_option("--points", points, "Quadrature grid points for W1");
    app->add_option("--shots", shots, "Shots for the sampled-data crossover");
  }
  Meta meta() const {
    Meta m = meta_header("reproduce");
    m.emplace_back("out-dir", out_dir);
    m.emplace_back("threads", std::to_string(threads));
    m.emplace_back("points", std::to_string(points));
    m.emplace_back("shots", std::to_string(shots));
    return m;
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }

  void run() const;
};

StateOpts token_state(const std::string& token, double r = kDefaultR, double alpha = 1.8) {
  const Token t = parse_token(token);
  StateOpts s;
  s.family = tw::to_string(t.family);
  s.m = t.m;
  s.base.r = r;
  s.base.alpha = alpha;
  return s;
}

void ReproduceCmd::run() const {
  std::filesystem::create_directories(out_dir);
  auto log = [](const std::string& what) { std::cerr << "reproduce: " << what << "\n"; };

  // Tomograms of the squeezed family, full and zoomed to [0, pi/16].
  for (const std::string tok : {"svs", "add1", "add2", "add3", "sub2", "sub3"}) {
    TomogramCmd t;
    t.state = token_state(tok);
    t.threads = threads;
    t.format = "pgm";
    t.out = path("fig1_tomogram_" + tok + ".pgm");
    t.run();
    t.format = "csv";
    t.points = 512;
    t.out = path("fig1_tomogram_" + tok + ".csv");
    t.run();
    t.theta_lo = "0";
    t.theta_hi = "pi/16";
    t.theta_count = 33;
    t.out = path("smfig1_tomogram_zoom_" + tok + ".csv");
    t.run();
  }
  log("tomograms");

  // x-quadrature PDFs at r = 0.38 and 0.52, plus |xi,-1> and |xi,-3>.
  for (double r : {0.38, 0.52}) {
    for (const std::string tok : {"svs", "add1", "add2"}) {
      SliceCmd s;
      s.state = token_state(tok, r);
      s.half_width = 8.0;
      s.out = path("fig2_pdf_r" + fmt(r) + "_" + tok + ".csv");
      s.run();
    }
  }
  for (const std::string tok : {"sub1", "sub3"}) {
    SliceCmd s;
    s.state = token_state(tok);
    s.half_width = 8.0;
    s.out = path("smfig_pdf_" + tok + ".csv");
    s.run();
  }
  log("slices");

  // Added-photon sweeps.
  auto sweep = [&](const std::string& name, const std::string& ref, const std::string& compare,
                   const std::string& theta, bool with_nbar = false) {
    SweepCmd s;
    s.scan.ref = ref;
    s.compare = compare;
    s.scan.theta = theta;
    s.scan.points = points;
    s.scan.threads = threads;
    s.with_nbar = with_nbar;
    s.out = path(name);
    s.resolve();
    s.run();
  };
  sweep("fig3_w1_added.csv", "svs", "add1,add2,add3", "0");
  sweep("smfig4_w1_vs_nbar.csv", "svs", "add1,add2,add3", "0", true);
  const std::vector<std::pair<std::string, std::string>> added_angles = {
      {"0", "0"},         {"pi/100", "pi100"}, {"pi/50", "pi50"}, {"pi/35", "pi35"},
      {"pi/20", "pi20"},  {"pi/10", "pi10"},   {"pi/4", "pi4"},   {"pi/2", "pi2"}};
  for (const auto& [theta, tag] : added_angles) {
    sweep("smfig2_w1_added_theta_" + tag + ".csv", "svs", "add1,add2,add3", theta);
  }
  const std::vector<std::pair<std::string, std::string>> sub_angles = {
      {"0", "0"},        {"pi/100", "pi100"}, {"pi/75", "pi75"}, {"pi/50", "pi50"},
      {"pi/35", "pi35"}, {"pi/20", "pi20"},   {"pi/4", "pi4"},   {"pi/2", "pi2"}};
  for (const auto& [theta, tag] : sub_angles) {
    sweep("smfig7_w1_subtracted_theta_" + tag + ".csv", "svs", "sub1,sub2,sub3", theta);
  }
  log("squeezed sweeps");

  // Mean photon number and x-variance against r.
  {
    ObservablesCmd o;
    o.compare = "svs,add1,add2,add3";
    o.out = path("smfig3_5_observables.csv");
    o.resolve();
    o.run();
  }

  // Cat tomograms, full and zoomed to [pi/4, 3pi/4].
  for (const std::string tok : {"ecs", "ecs-add1", "ecs-add2"}) {
    TomogramCmd t;
    t.state = token_state(tok);
    t.threads = threads;
    t.format = "pgm";
    t.out = path("smfig8_tomogram_" + tok + ".pgm");
    t.run();
    t.theta_lo = "pi/4";
    t.theta_hi = "3pi/4";
    t.theta_count = 65;
    t.format = "csv";
    t.points = 512;
    t.out = path("smfig8_tomogram_zoom_" + tok + ".csv");
    t.run();
  }

  // Cat sweeps.
  sweep("smfig9_w1_ecs_added.csv", "ecs", "ecs-add1,ecs-add2", "pi/2");
  sweep("smfig10_w1_svs_ecs_equal_mean.csv", "svs", "ecs-eq", "0", true);
  sweep("smfig11_w1_add1_cats_equal_mean.csv", "add1", "ocs-eq,ecs-add1-eq", "0", true);
  log("cat sweeps");

  // Crossovers.
  auto crossover = [&](const std::string& name, const std::string& pair, const std::string& theta,
                       double lo, double hi) {
    CrossoverCmd c;
    c.pair = pair;
    c.scan.theta = theta;
    c.scan.lo = lo;
    c.scan.hi = hi;
    c.scan.points = points;
    c.scan.threads = threads;
    c.out = path(name);
    c.resolve();
    c.run();
  };
  crossover("crossover_add1_add2_theta_0.json", "add1:add2", "0", 0.30, 0.60);
  crossover("crossover_add1_add3_theta_0.json", "add1:add3", "0", 0.45, 0.75);
  crossover("crossover_sub1_sub2_theta_0.json", "sub1:sub2", "0", 0.30, 0.80);
  crossover("crossover_add1_add2_theta_pi100.json", "add1:add2", "pi/100", 0.30, 0.80);
  crossover("crossover_add1_add2_theta_pi4.json", "add1:add2", "pi/4", 0.30, 0.80);
  crossover("crossover_ecs_add1_add2_theta_pi2.json", "ecs-add1:ecs-add2", "pi/2", 1.5, 2.5);
  {
    EmpiricalCmd e;
    e.crossover.pair = "add1:add2";
    e.crossover.scan.lo = 0.30;
    e.crossover.scan.hi = 0.60;
    e.crossover.out = path("empirical_crossover_add1_add2_theta_0.json");
    e.shots = shots;
    e.resolve();
    e.run();
  }
  log("crossovers");

  std::string block = "# tomowass run metadata\n";
  for (const auto& [k, v] : meta()) block += k + "=" + v + "\n";
  tw::io::write_file_atomic(path("reproduce.meta"), block);
}

// --- config files ----------------------------------------------------------------

/// Reads a flat key=value file; `command` selects the subcommand, `version`
/// is informational, every other key becomes `--key=value`.
std::pair<std::string, std::vector<std::string>> read_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw tw::Error(tw::ErrorCode::InvalidArgument, "cannot read config " + file);
  std::string command;
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw tw::Error(tw::ErrorCode::InvalidArgument, "config line without '=': " + line);
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "version") continue;
    if (key == "command") {
      command = value;
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return {command, args};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tomowass: nonclassical-state tomograms and Wasserstein distances"};
  app.set_version_flag("--version", std::string(tw::kVersion));
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file,
                 "Flat key=value file (e.g. a .meta record); flags given on the command line win");

  StateCmd state_cmd;
  TomogramCmd tomogram_cmd;
  SliceCmd slice_cmd;
  W1Cmd w1_cmd;
  SweepCmd sweep_cmd;
  CrossoverCmd crossover_cmd;
  ObservablesCmd observables_cmd;
  SampleCmd sample_cmd;
  EmpiricalCmd empirical_cmd;
  ReproduceCmd reproduce_cmd;

  auto* state = app.add_subcommand("state", "Fock amplitudes of a state (CSV)");
  state_cmd.add(state);
  auto* tomogram = app.add_subcommand("tomogram", "Optical tomogram (CSV or PGM)");
  tomogram_cmd.add(tomogram);
  auto* slice = app.add_subcommand("slice", "Quadrature PDF and CDF at one angle (CSV)");
  slice_cmd.add(slice);
  auto* w1 = app.add_subcommand("w1", "W1 between two states at one angle (JSON)");
  w1_cmd.add(w1);
  auto* sweep = app.add_subcommand("sweep", "W1 against a reference over a parameter range (CSV)");
  sweep_cmd.add(sweep);
  auto* crossover = app.add_subcommand("crossover", "Crossover of two W1 curves (JSON)");
  crossover_cmd.add(crossover);
  auto* observables =
      app.add_subcommand("observables", "Mean photon number and quadrature variance");
  observables_cmd.add(observables);
  auto* sample = app.add_subcommand("sample", "Synthetic homodyne record (CSV or binary)");
  sample_cmd.add(sample);
  auto* empirical =
      app.add_subcommand("empirical-crossover", "Crossover estimated from sampled records (JSON)");
  empirical_cmd.add(empirical);
  auto* reproduce = app.add_subcommand("reproduce", "Write every figure data set and crossover");
  reproduce_cmd.add(reproduce);

  // The config file is spliced in ahead of the command-line flags; with the
  // take-last policy the command line wins.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string file;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        file = args[i + 1];
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        break;
      }
      if (args[i].starts_with("--config=")) {
        file = args[i].substr(9);
        args.erase(args.begin() + static_cast<long>(i));
        break;
      }
    }
    if (!file.empty()) {
      auto [command, file_args] = read_config(file);
      auto is_sub = [&](const std::string& s) {
        for (const auto* sub : app.get_subcommands({})) {
          if (sub->get_name() == s) return true;
        }
        return false;
      };
      auto pos = std::find_if(args.begin(), args.end(), is_sub);
      if (pos == args.end()) {
        if (command.empty()) {
          throw tw::Error(tw::ErrorCode::InvalidArgument, "no subcommand on the command line or in " + file);
        }
        args.insert(args.begin(), command);
        pos = args.begin();
      } else if (!command.empty() && *pos != command) {
        throw tw::Error(tw::ErrorCode::InvalidArgument,
                        "config is for '" + command + "' but '" + *pos + "' was requested");
      }
      args.insert(pos + 1, file_args.begin(), file_args.end());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << tw::kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (state->parsed()) {
      state_cmd.run();
    } else if (tomogram->parsed()) {
      tomogram_cmd.run();
    } else if (slice->parsed()) {
      slice_cmd.run();
    } else if (w1->parsed()) {
      w1_cmd.run();
    } else if (sweep->parsed()) {
      sweep_cmd.resolve();
      sweep_cmd.run();
    } else if (crossover->parsed()) {
      crossover_cmd.resolve();
      crossover_cmd.run();
    } else if (observables->parsed()) {
      observables_cmd.resolve();
      observables_cmd.run();
    } else if (sample->parsed()) {
      sample_cmd.run();
    } else if (empirical->parsed()) {
      empirical_cmd.resolve();
      empirical_cmd.run();
    } else if (reproduce->parsed()) {
      reproduce_cmd.run();
    }
  } catch (const tw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tw::is_numerical(e.code()) ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
