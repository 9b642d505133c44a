#ifndef RCHAIN_CLI_IO_HPP
#define RCHAIN_CLI_IO_HPP

// Run configuration, JSON (de)serialization and the subcommand driver used
// by the command-line tool. `execute` is pure; `run` writes the files.

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rchain/rchain.hpp"

namespace rchain {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"surface-resonances", "disk-resonances", "length-spectrum",
                                                 "scan-base",          "spectrum",        "trace",
                                                 "chain",              "pressure"};
  return names;
}

/// CSV header per subcommand. Complex values are always split into re_/im_.
inline std::string csv_columns(const std::string& subcommand) {
  static const std::map<std::string, std::string> cols = {
      {"surface-resonances", "re_s,im_s,multiplicity,residual"},
      {"disk-resonances", "re_s,im_s,multiplicity,residual"},
      {"length-spectrum", "length,multiplicity"},
      {"scan-base", "base,score,max_dev,mean_dev,candidate"},
      {"spectrum", "re_z,im_z,abs_z,multiplicity,residual,condition"},
      {"trace", "step,re_s,im_s,re_z,im_z"},
      {"chain", "theta,re_s,im_s"},
      {"pressure", "beta,pressure,residual"},
  };
  auto it = cols.find(subcommand);
  return it == cols.end() ? std::string{} : it->second;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Parses "a+bi", "a-bi", "bi", "a" (spaces ignored).
inline cplx parse_complex(std::string text) {
  std::string t;
  for (char c : text)
    if (c != ' ') t += c;
  auto number = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (...) {
      used = 0;
    }
    if (used != part.size()) fail(ErrorCode::InvalidArgument, "cannot parse complex number '" + text + "'");
    return v;
  };
  if (t.empty()) fail(ErrorCode::InvalidArgument, "empty complex number");
  if (t.back() != 'i' && t.back() != 'j') return {number(t), 0.0};
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(t)};
  return {number(t.substr(0, split)), number(t.substr(split))};
}

inline OrderSpec parse_order(const std::string& text) {
  if (text == "bs" || text == "bowen-series") return OrderSpec::bowen_series();
  auto tail = [&](const std::string& prefix) { return text.substr(prefix.size()); };
  if (text.rfind("funnel:", 0) == 0) {
    std::array<int, 3> n{};
    char c1 = 0, c2 = 0;
    std::istringstream in(tail("funnel:"));
    if (!(in >> n[0] >> c1 >> n[1] >> c2 >> n[2]) || c1 != ',' || c2 != ',' || !in.eof())
      fail(ErrorCode::InvalidArgument, "order must look like funnel:n1,n2,n3");
    return OrderSpec::funnel_winding(n[0], n[1], n[2]);
  }
  if (text.rfind("round:", 0) == 0) {
    std::size_t used = 0;
    double base = 0.0;
    try {
      base = std::stod(tail("round:"), &used);
    } catch (...) {
    }
    if (used == 0) fail(ErrorCode::InvalidArgument, "order must look like round:base");
    return OrderSpec::round_to_base(base);
  }
  fail(ErrorCode::InvalidArgument, "unknown order '" + text + "' (bs, funnel:n1,n2,n3, round:base)");
}

inline Alphabet parse_alphabet(const std::string& text) {
  if (text == "full") return Alphabet::full;
  if (text == "cylinder") return Alphabet::cylinder;
  if (text == "single") return Alphabet::single;
  fail(ErrorCode::InvalidArgument, "unknown alphabet '" + text + "' (full, cylinder, single)");
}

inline DiskWeight parse_disk_weight(const std::string& text) {
  for (DiskWeight w : {DiskWeight::Classical, DiskWeight::QuantumA, DiskWeight::QuantumB, DiskWeight::GV,
                       DiskWeight::Pressure})
    if (to_string(w) == text) return w;
  fail(ErrorCode::InvalidArgument, "unknown disk flavor '" + text + "'");
}

inline PrecisionMode parse_precision(const std::string& text) {
  if (text == "auto") return PrecisionMode::Auto;
  if (text == "standard") return PrecisionMode::Standard;
  if (text == "compensated") return PrecisionMode::Compensated;
  fail(ErrorCode::InvalidArgument, "unknown precision '" + text + "' (auto, standard, compensated)");
}

inline ExpansionMethod parse_method(const std::string& text) {
  if (text == "auto") return ExpansionMethod::Automatic;
  if (text == "product") return ExpansionMethod::Product;
  if (text == "recurrence") return ExpansionMethod::Recurrence;
  fail(ErrorCode::InvalidArgument, "unknown method '" + text + "' (auto, product, recurrence)");
}

struct RunConfig {
  std::string subcommand;
  std::optional<std::array<double, 3>> surface;
  std::optional<std::array<double, 2>> disks;  // R, a
  std::string flavor;                          // empty: schottky or gv by system
  std::string order = "bs";
  std::string alphabet = "full";
  TruncationPlan plan{};
  std::array<double, 4> region{0.0, 0.3, 0.0, 1.0};  // re_lo, re_hi, im_lo, im_hi
  std::array<int, 2> grid{2, 2};
  cplx s{};
  cplx seed{};
  cplx z0{1.0, 0.0};
  std::vector<cplx> path;
  double span = 2.0 * std::numbers::pi;
  bool clockwise = true;
  double trust_radius = 0.0;  // 0: default for the order function
  double beta = 1.0;
  std::array<double, 2> bracket{-3.0, 3.0};
  double cutoff = 40.0;
  bool oriented = true;
  double bin_width = 0.1;
  std::array<double, 2> base_range{0.5, 15.0};
  int steps = 2000;
  std::string output;  // file prefix; empty: the subcommand name
};

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  if (c.surface) j["surface"] = *c.surface;
  if (c.disks) j["disks"] = *c.disks;
  j["flavor"] = c.flavor;
  j["order"] = c.order;
  j["alphabet"] = c.alphabet;
  j["truncation"] = {{"max_length", c.plan.max_length}, {"max_order", c.plan.max_order},
                     {"precision", to_string(c.plan.precision)}, {"method", to_string(c.plan.method)},
                     {"threads", c.plan.threads}, {"chunk", c.plan.chunk}};
  j["region"] = c.region;
  j["grid"] = c.grid;
  j["s"] = complex_json(c.s);
  j["seed"] = complex_json(c.seed);
  j["z0"] = complex_json(c.z0);
  json path = json::array();
  for (cplx p : c.path) path.push_back(complex_json(p));
  j["path"] = path;
  j["span"] = c.span;
  j["clockwise"] = c.clockwise;
  j["trust_radius"] = c.trust_radius;
  j["beta"] = c.beta;
  j["bracket"] = c.bracket;
  j["cutoff"] = c.cutoff;
  j["oriented"] = c.oriented;
  j["bin_width"] = c.bin_width;
  j["base_range"] = c.base_range;
  j["steps"] = c.steps;
  j["output"] = c.output;
  return j;
}

namespace detail {

inline cplx complex_from(const json& v, const char* key) {
  if (v.is_string()) return parse_complex(v.get<std::string>());
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_number()) return {v.get<double>(), 0.0};
  fail(ErrorCode::InvalidArgument, std::string("'") + key + "' must be [re, im] or a string like 0.1+62.8i");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j[key].is_null()) return;
  try {
    out = j[key].get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::InvalidArgument, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Accepts a bare config or a run report (whose "config" member is used).
inline RunConfig config_from_json(const json& input) {
  const json& j = input.contains("config") && input["config"].is_object() ? input["config"] : input;
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "config must be a JSON object");
  static const std::vector<std::string> known = {
      "subcommand", "surface", "disks",   "flavor",   "order",    "alphabet",   "truncation", "region",
      "grid",       "s",       "seed",    "z0",       "path",     "span",       "clockwise",  "trust_radius",
      "beta",       "bracket", "cutoff",  "oriented", "bin_width", "base_range", "steps",      "output"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(ErrorCode::InvalidArgument, "unknown config field '" + key + "'");

  RunConfig c;
  detail::read(j, "subcommand", c.subcommand);
  if (j.contains("surface") && !j["surface"].is_null()) {
    std::array<double, 3> l{};
    detail::read(j, "surface", l);
    c.surface = l;
  }
  if (j.contains("disks") && !j["disks"].is_null()) {
    const json& d = j["disks"];
    if (d.is_number()) {
      c.disks = std::array<double, 2>{d.get<double>(), 1.0};
    } else {
      std::array<double, 2> r{};
      detail::read(j, "disks", r);
      c.disks = r;
    }
  }
  detail::read(j, "flavor", c.flavor);
  detail::read(j, "order", c.order);
  detail::read(j, "alphabet", c.alphabet);
  if (j.contains("truncation")) {
    const json& t = j["truncation"];
    if (!t.is_object()) fail(ErrorCode::InvalidArgument, "'truncation' must be an object");
    detail::read(t, "max_length", c.plan.max_length);
    detail::read(t, "max_order", c.plan.max_order);
    std::string p = "auto", m = "auto";
    detail::read(t, "precision", p);
    detail::read(t, "method", m);
    c.plan.precision = parse_precision(p);
    c.plan.method = parse_method(m);
    detail::read(t, "threads", c.plan.threads);
    detail::read(t, "chunk", c.plan.chunk);
  }
  detail::read(j, "region", c.region);
  detail::read(j, "grid", c.grid);
  if (j.contains("s")) c.s = detail::complex_from(j["s"], "s");
  if (j.contains("seed")) c.seed = detail::complex_from(j["seed"], "seed");
  if (j.contains("z0")) c.z0 = detail::complex_from(j["z0"], "z0");
  if (j.contains("path")) {
    if (!j["path"].is_array()) fail(ErrorCode::InvalidArgument, "'path' must be an array");
    for (const auto& p : j["path"]) c.path.push_back(detail::complex_from(p, "path"));
  }
  detail::read(j, "span", c.span);
  detail::read(j, "clockwise", c.clockwise);
  detail::read(j, "trust_radius", c.trust_radius);
  detail::read(j, "beta", c.beta);
  detail::read(j, "bracket", c.bracket);
  detail::read(j, "cutoff", c.cutoff);
  detail::read(j, "oriented", c.oriented);
  detail::read(j, "bin_width", c.bin_width);
  detail::read(j, "base_range", c.base_range);
  detail::read(j, "steps", c.steps);
  detail::read(j, "output", c.output);
  return c;
}

/// Schema checks that do not need any numerics.
inline void validate(const RunConfig& c) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
    fail(ErrorCode::InvalidArgument, "unknown subcommand '" + c.subcommand + "'");
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (c.surface) {
    const auto& l = *c.surface;
    if (!positive(l[0]) || !positive(l[1]) || !positive(l[2]))
      fail(ErrorCode::InvalidArgument, "surface lengths l1, l2, l3 must be positive and finite");
  }
  if (c.disks) {
    const auto& d = *c.disks;
    if (!positive(d[0]) || !positive(d[1]))
      fail(ErrorCode::InvalidArgument, "disk spacing R and radius a must be positive and finite");
  }
  if (c.surface && c.disks) fail(ErrorCode::InvalidArgument, "give either a surface or a disk system, not both");
  const std::string& sub = c.subcommand;
  const bool needs_surface = sub == "surface-resonances";
  const bool needs_disks = sub == "disk-resonances" || sub == "pressure";
  if (needs_surface && !c.surface) fail(ErrorCode::InvalidArgument, sub + " needs --surface l1,l2,l3");
  if (needs_disks && !c.disks) fail(ErrorCode::InvalidArgument, sub + " needs --disks R[,a]");
  if (!c.surface && !c.disks) fail(ErrorCode::InvalidArgument, sub + " needs --surface or --disks");
  if (c.plan.max_length < 0 || c.plan.max_order < 0 || c.plan.threads < 0)
    fail(ErrorCode::InvalidArgument, "truncation fields must be non-negative");
  if (!(c.region[0] < c.region[1]) || !(c.region[2] < c.region[3]))
    fail(ErrorCode::InvalidArgument, "region must satisfy re_lo < re_hi and im_lo < im_hi");
  if (c.grid[0] < 1 || c.grid[1] < 1) fail(ErrorCode::InvalidArgument, "grid must be at least 1x1");
  if (sub == "trace" && c.path.size() < 2) fail(ErrorCode::InvalidArgument, "trace needs a path of >= 2 points");
  if (sub == "chain" && !positive(c.span)) fail(ErrorCode::InvalidArgument, "span must be positive");
  if (!std::isfinite(c.beta)) fail(ErrorCode::InvalidArgument, "beta must be finite");
  if (!(c.bracket[0] < c.bracket[1])) fail(ErrorCode::InvalidArgument, "bracket must satisfy lo < hi");
  if (!positive(c.cutoff)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  if (!positive(c.bin_width)) fail(ErrorCode::InvalidArgument, "bin_width must be positive");
  if (!positive(c.base_range[0]) || !(c.base_range[1] > c.base_range[0]))
    fail(ErrorCode::InvalidArgument, "base_range must satisfy 0 < lo < hi");
  if (c.steps < 3) fail(ErrorCode::InvalidArgument, "steps must be at least 3");
  if (c.trust_radius < 0.0) fail(ErrorCode::InvalidArgument, "trust_radius must be non-negative");
  parse_order(c.order);
  parse_alphabet(c.alphabet);
  if (!c.flavor.empty() && c.flavor != "schottky") parse_disk_weight(c.flavor);
  if (c.surface && !c.flavor.empty() && c.flavor != "schottky")
    fail(ErrorCode::InvalidArgument, "flavor '" + c.flavor + "' needs a disk system");
  if (c.disks && c.flavor == "schottky") fail(ErrorCode::InvalidArgument, "flavor 'schottky' needs a surface");
}

struct RunOutput {
  int exit_code = kExitOk;
  std::map<std::string, std::string> csv;  // file suffix ("" for the main table) -> contents
  json report;
};

namespace detail {

inline ZetaFlavor flavor_of(const RunConfig& c) {
  if (c.surface) {
    const auto& l = *c.surface;
    return ZetaFlavor::schottky(build_surface(l[0], l[1], l[2]), parse_order(c.order), parse_alphabet(c.alphabet));
  }
  const auto& d = *c.disks;
  const DiskWeight w = c.flavor.empty() ? DiskWeight::GV : parse_disk_weight(c.flavor);
  return ZetaFlavor::disk(make_disk_system(d[0], d[1]), w, c.beta);
}

inline json truncation_json(const CycleExpansion& e) {
  const TruncationPlan& p = e.plan();
  return {{"max_length", p.max_length}, {"max_order", e.max_order()},   {"attainable_order", e.attainable_order()},
          {"orbits", e.orbits().size()}, {"precision", to_string(p.precision)}, {"method", to_string(p.method)},
          {"flavor", e.flavor().describe()}};
}

inline std::string resonance_rows(const std::vector<Resonance>& rs) {
  std::string out;
  for (const auto& r : rs)
    out += fmt(r.s.real()) + "," + fmt(r.s.imag()) + "," + std::to_string(r.multiplicity) + "," + fmt(r.residual) +
           "\n";
  return out;
}

inline LengthSpectrum spectrum_of(const RunConfig& c) {
  if (c.surface) {
    const auto& l = *c.surface;
    const int J = c.plan.max_length > 0 ? c.plan.max_length : kDefaultWordLength;
    return length_spectrum(build_surface(l[0], l[1], l[2]), J, c.cutoff, c.oriented);
  }
  const auto& d = *c.disks;
  const int N = c.plan.max_length > 0 ? c.plan.max_length : kDefaultTopologicalLength;
  return length_spectrum(make_disk_system(d[0], d[1]), N, c.cutoff, c.oriented);
}

inline void execute_body(const RunConfig& c, RunOutput& out) {
  json& rep = out.report;
  json warnings = json::array();
  json results;
  std::string rows;
  const std::string& sub = c.subcommand;

  if (sub == "length-spectrum" || sub == "scan-base") {
    const LengthSpectrum spec = spectrum_of(c);
    for (const auto& w : spec.warnings) warnings.push_back(w);
    results["source"] = spec.source;
    results["entries"] = spec.entries.size();
    results["total_multiplicity"] = spec.total_multiplicity();
    results["shortest_omitted_estimate"] = spec.shortest_omitted;
    if (sub == "length-spectrum") {
      for (const auto& e : spec.entries) rows += fmt(e.length) + "," + std::to_string(e.multiplicity) + "\n";
      std::string hist = "bin_lo,bin_hi,count\n";
      for (const auto& b : length_histogram(spec, c.bin_width))
        hist += fmt(b.lo) + "," + fmt(b.hi) + "," + std::to_string(b.count) + "\n";
      out.csv["_histogram"] = hist;
    } else {
      json cands = json::array();
      for (const auto& r : scan_base_lengths(spec, c.base_range[0], c.base_range[1], c.steps)) {
        rows += fmt(r.base) + "," + fmt(r.score) + "," + fmt(r.max_dev) + "," + fmt(r.mean_dev) + "," +
                (r.candidate ? "1" : "0") + "\n";
        if (r.candidate)
          cands.push_back({{"base", r.base},
                           {"score", r.score},
                           {"max_dev", r.max_dev},
                           {"mean_dev", r.mean_dev},
                           {"predicted_spacing", r.predicted_spacing}});
      }
      results["candidates"] = cands;
    }
  } else if (sub == "pressure") {
    const auto& d = *c.disks;
    const PressureResult p = pressure(make_disk_system(d[0], d[1]), c.beta, {c.bracket[0], c.bracket[1]}, c.plan);
    rows = fmt(c.beta) + "," + fmt(p.value) + "," + fmt(p.residual) + "\n";
    results["value"] = p.value;
    results["residual"] = p.residual;
    rep["tail_estimates"] = {{"at_pressure", p.tail}};
  } else {
    const CycleExpansion e(flavor_of(c), c.plan);
    rep["truncation"] = truncation_json(e);
    const double trust = c.trust_radius > 0.0 ? c.trust_radius : default_trust_radius(e.flavor());
    if (sub == "surface-resonances" || sub == "disk-resonances") {
      ResonanceSearchOptions opt;
      opt.grid_x = c.grid[0];
      opt.grid_y = c.grid[1];
      const Rect rect{{c.region[0], c.region[2]}, {c.region[1], c.region[3]}};
      const ResonanceSearch found = find_resonances(e, rect, opt);
      for (const auto& w : found.warnings) warnings.push_back(w);
      rows = resonance_rows(found.resonances);
      results["count"] = found.resonances.size();
      results["evaluations"] = found.evaluations;
      json tails = json::array();
      for (const auto& r : found.resonances) tails.push_back(e.value(r.s, 1.0).tail);
      rep["tail_estimates"] = {{"at_resonances", tails}};
    } else if (sub == "spectrum") {
      const ZetaSeries series = e.coefficients(c.s);
      const SpectrumSet set = generalized_spectrum(series, trust);
      for (const auto& w : set.warnings) warnings.push_back(w);
      for (const auto& v : set.roots)
        rows += fmt(v.z.real()) + "," + fmt(v.z.imag()) + "," + fmt(std::abs(v.z)) + "," +
                std::to_string(v.multiplicity) + "," + fmt(v.residual) + "," + fmt(v.condition) + "\n";
      results["trust_radius"] = trust;
      results["count"] = set.roots.size();
      results["max_condition"] = set.max_condition;
      rep["tail_estimates"] = {{"at_s", series.tail_estimate}};
    } else if (sub == "trace") {
      const SpectrumTrace tr = trace_spectral_value(e, c.path, c.z0);
      for (std::size_t i = 0; i < tr.path.size(); ++i)
        rows += std::to_string(i) + "," + fmt(tr.path[i].real()) + "," + fmt(tr.path[i].imag()) + "," +
                fmt(tr.values[i].real()) + "," + fmt(tr.values[i].imag()) + "\n";
      results["winding"] = tr.winding;
      results["end_z"] = complex_json(tr.values.back());
      results["end_is_resonance"] = tr.end_resonance.has_value();
    } else if (sub == "chain") {
      ChainOptions opt;
      opt.clockwise = c.clockwise;
      const ChainCurve curve = chain_curves(e, Resonance{c.seed, 0.0, 1, {}}, c.span, opt);
      for (const auto& p : curve.samples) rows += fmt(p.theta) + "," + fmt(p.s.real()) + "," + fmt(p.s.imag()) + "\n";
      results["seed"] = complex_json(curve.seed.s);
      results["end"] = complex_json(curve.end.s);
      results["end_residual"] = curve.end.residual;
      rep["tail_estimates"] = {{"at_seed", e.value(curve.seed.s, 1.0).tail},
                               {"at_end", e.value(curve.end.s, 1.0).tail}};
    }
  }
  out.csv[""] = csv_columns(sub) + "\n" + rows;
  rep["results"] = results;
  rep["warnings"] = warnings;
}

}  // namespace detail

/// Runs one subcommand without touching the file system.
inline RunOutput execute(const RunConfig& config) {
  RunOutput out;
  out.report["config"] = to_json(config);
  out.report["columns"] = csv_columns(config.subcommand);
  try {
    validate(config);
    detail::execute_body(config, out);
    out.report["status"] = "ok";
  } catch (const Error& e) {
    out.exit_code = e.is_validation() ? kExitValidation : kExitNumerical;
    out.report["status"] = "error";
    out.report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    out.csv.clear();
  } catch (const std::exception& e) {
    out.exit_code = kExitNumerical;
    out.report["status"] = "error";
    out.report["error"] = {{"code", "Internal"}, {"message", e.what()}};
    out.csv.clear();
  }
  if (!out.report.contains("warnings")) out.report["warnings"] = json::array();
  out.report["exit_code"] = out.exit_code;
  return out;
}

/// Executes and writes <prefix>.csv (plus extra tables) and <prefix>.json.
inline int run(const RunConfig& config, std::ostream& log = std::cerr) {
  const RunOutput out = execute(config);
  const std::string prefix = config.output.empty() ? config.subcommand : config.output;
  for (const auto& [suffix, body] : out.csv) {
    std::ofstream f(prefix + suffix + ".csv", std::ios::binary);
    if (!f) {
      log << "error: cannot write " << prefix + suffix << ".csv\n";
      return kExitValidation;
    }
    f << body;
  }
  std::ofstream f(prefix + ".json", std::ios::binary);
  if (!f) {
    log << "error: cannot write " << prefix << ".json\n";
    return kExitValidation;
  }
  f << out.report.dump(2) << "\n";
  if (out.exit_code != kExitOk) log << "error: " << out.report["error"]["message"].get<std::string>() << "\n";
  for (const auto& w : out.report["warnings"]) log << "warning: " << w.get<std::string>() << "\n";
  return out.exit_code;
}

}  // namespace rchain

#endif  // RCHAIN_CLI_IO_HPP
