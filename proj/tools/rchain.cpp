// rchain: resonances, generalized spectra and resonance chains of Schottky
// surfaces and the three-disk billiard. Run `rchain <subcommand> --help`.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rchain/cli_io.hpp"

namespace {

using rchain::json;

std::vector<double> split_numbers(const std::string& text, const char* what, std::size_t want_min,
                                  std::size_t want_max) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0) rchain::fail(rchain::ErrorCode::InvalidArgument, std::string("cannot parse ") + what);
    out.push_back(v);
  }
  if (out.size() < want_min || out.size() > want_max)
    rchain::fail(rchain::ErrorCode::InvalidArgument, std::string("wrong number of values for ") + what);
  return out;
}

struct Flags {
  std::string config, surface, disks, flavor, order, alphabet, precision, method, region, grid, s, seed, z0, path,
      bracket, base_range, output;
  int max_length = 0, max_order = 0, threads = 0, steps = 0;
  std::size_t chunk = 0;
  double span = 0, trust = 0, beta = 0, cutoff = 0, bin_width = 0;
  bool counterclockwise = false, unoriented = false;
};

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config or a previous run report; flags override it");
  sub->add_option("--surface", f.surface, "funnel lengths l1,l2,l3");
  sub->add_option("--disks", f.disks, "disk spacing R[,a] (a defaults to 1)");
  sub->add_option("--flavor", f.flavor, "schottky | classical | quantum-a | quantum-b | gv | pressure");
  sub->add_option("--order", f.order, "bs | funnel:n1,n2,n3 | round:base");
  sub->add_option("--alphabet", f.alphabet, "full | cylinder | single");
  sub->add_option("--max-length", f.max_length, "word length J or topological length N (0: default)");
  sub->add_option("--max-order", f.max_order, "expansion order K (0: attainable)");
  sub->add_option("--precision", f.precision, "auto | standard | compensated");
  sub->add_option("--method", f.method, "auto | product | recurrence");
  sub->add_option("--threads", f.threads, "worker threads (0: RC_THREADS or hardware)");
  sub->add_option("--chunk", f.chunk, "orbits per reduction chunk");
  sub->add_option("--rect", f.region, "search region re_lo,re_hi,im_lo,im_hi");
  sub->add_option("--grid", f.grid, "initial subdivision nx,ny");
  sub->add_option("--s", f.s, "spectral parameter, e.g. 0.0997+106.31i");
  sub->add_option("--seed", f.seed, "seed resonance for chain");
  sub->add_option("--z0", f.z0, "starting spectral value for trace");
  sub->add_option("--path", f.path, "trace path s0;s1;... (complex points)");
  sub->add_option("--span", f.span, "chain angle span in radians");
  sub->add_flag("--counterclockwise", f.counterclockwise, "rotate the spectral value counter-clockwise");
  sub->add_option("--trust", f.trust, "trust radius for spectrum (0: default)");
  sub->add_option("--beta", f.beta, "pressure exponent");
  sub->add_option("--bracket", f.bracket, "pressure search interval lo,hi");
  sub->add_option("--cutoff", f.cutoff, "length cutoff");
  sub->add_flag("--unoriented", f.unoriented, "count a geodesic and its reverse once");
  sub->add_option("--bin-width", f.bin_width, "histogram bin width");
  sub->add_option("--base-range", f.base_range, "scanned base lengths lo,hi");
  sub->add_option("--steps", f.steps, "number of scanned base lengths");
  sub->add_option("--out", f.output, "output prefix; writes PREFIX.csv and PREFIX.json");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) rchain::fail(rchain::ErrorCode::InvalidArgument, "cannot read config file " + path);
  try {
    json j = json::parse(in);
    return j.contains("config") ? j["config"] : j;
  } catch (const json::exception& e) {
    rchain::fail(rchain::ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
}

json merge_flags(CLI::App* sub, const Flags& f) {
  json j = f.config.empty() ? json::object() : load_config(f.config);
  j["subcommand"] = sub->get_name();
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  auto complex_pair = [](const std::string& text) { return rchain::complex_json(rchain::parse_complex(text)); };
  if (given("--surface")) {
    j["surface"] = split_numbers(f.surface, "--surface", 3, 3);
    j.erase("disks");
  }
  if (given("--disks")) {
    auto d = split_numbers(f.disks, "--disks", 1, 2);
    if (d.size() == 1) d.push_back(1.0);
    j["disks"] = d;
    j.erase("surface");
  }
  if (given("--flavor")) j["flavor"] = f.flavor;
  if (given("--order")) j["order"] = f.order;
  if (given("--alphabet")) j["alphabet"] = f.alphabet;
  json& t = j["truncation"];
  if (!t.is_object()) t = json::object();
  if (given("--max-length")) t["max_length"] = f.max_length;
  if (given("--max-order")) t["max_order"] = f.max_order;
  if (given("--precision")) t["precision"] = f.precision;
  if (given("--method")) t["method"] = f.method;
  if (given("--threads")) t["threads"] = f.threads;
  if (given("--chunk")) t["chunk"] = f.chunk;
  if (given("--rect")) j["region"] = split_numbers(f.region, "--rect", 4, 4);
  if (given("--grid")) {
    const auto g = split_numbers(f.grid, "--grid", 2, 2);
    j["grid"] = {static_cast<int>(g[0]), static_cast<int>(g[1])};
  }
  if (given("--s")) j["s"] = complex_pair(f.s);
  if (given("--seed")) j["seed"] = complex_pair(f.seed);
  if (given("--z0")) j["z0"] = complex_pair(f.z0);
  if (given("--path")) {
    json p = json::array();
    std::stringstream in(f.path);
    std::string part;
    while (std::getline(in, part, ';')) p.push_back(complex_pair(part));
    j["path"] = p;
  }
  if (given("--span")) j["span"] = f.span;
  if (given("--counterclockwise")) j["clockwise"] = false;
  if (given("--trust")) j["trust_radius"] = f.trust;
  if (given("--beta")) j["beta"] = f.beta;
  if (given("--bracket")) j["bracket"] = split_numbers(f.bracket, "--bracket", 2, 2);
  if (given("--cutoff")) j["cutoff"] = f.cutoff;
  if (given("--unoriented")) j["oriented"] = false;
  if (given("--bin-width")) j["bin_width"] = f.bin_width;
  if (given("--base-range")) j["base_range"] = split_numbers(f.base_range, "--base-range", 2, 2);
  if (given("--steps")) j["steps"] = f.steps;
  if (given("--out")) j["output"] = f.output;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances and resonance chains from generalized cycle expansions"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"surface-resonances", "zeros of the Selberg-type zeta of a three-funnel surface in a rectangle"},
      {"disk-resonances", "zeros of a three-disk zeta (default flavor gv) in a rectangle"},
      {"length-spectrum", "primitive length spectrum and histogram (PREFIX_histogram.csv)"},
      {"scan-base", "clustering score over a range of base lengths"},
      {"spectrum", "generalized spectrum at --s"},
      {"trace", "follow one spectral value along a path in s"},
      {"chain", "continue a resonance chain from --seed over --span radians"},
      {"pressure", "topological pressure P(beta) of the three-disk system"},
  };
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->footer("CSV columns: " + rchain::csv_columns(name));
    add_options(sub, flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rchain::kExitValidation;
  }
  CLI::App* sub = app.get_subcommands().front();
  rchain::RunConfig config;
  try {
    config = rchain::config_from_json(merge_flags(sub, flags));
  } catch (const rchain::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rchain::kExitValidation;
  }
  return rchain::run(config);
}
