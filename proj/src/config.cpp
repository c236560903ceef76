#include "warpdirac/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "warpdirac/errors.hpp"

namespace warpdirac {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

[[noreturn]] void bad(const YAML::Node& node, const std::string& message) {
  fail(ErrorKind::Configuration, message + where(node));
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
  if (!node.IsMap()) bad(node, "'" + section + "' must be a mapping");
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = it->first.as<std::string>();
    if (!allowed.count(key)) bad(it->first, "unknown key '" + key + "' in " + section);
  }
}

double as_double(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) bad(node, "'" + name + "' must be a number");
  const std::string s = node.Scalar();
  if (s == "inf" || s == "infinity" || s == ".inf" || s == ".Inf" || s == ".INF") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) bad(node, "'" + name + "' must be a number, got '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    bad(node, "'" + name + "' must be a number, got '" + s + "'");
  }
}

int as_int(const YAML::Node& node, const std::string& name) {
  const double v = as_double(node, name);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e9) bad(node, "'" + name + "' must be an integer");
  return static_cast<int>(v);
}

std::string as_string(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) bad(node, "'" + name + "' must be a string");
  return node.Scalar();
}

int twice_mu(const YAML::Node& node) {
  const double mu = as_double(node, "mu");
  const double two = 2.0 * mu;
  if (!std::isfinite(mu) || two != std::round(two)) {
    bad(node, "angular eigenvalue " + node.Scalar() + " is not an integer or half-integer");
  }
  return static_cast<int>(std::lround(two));
}

void parse_profile(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "profile", {"family", "epsilon", "alpha", "beta", "degree"});
  if (!node["family"]) bad(node, "profile needs a 'family'");
  MetricProfile p;
  p.family = parse_family(as_string(node["family"], "family"));
  if (node["epsilon"]) p.epsilon = as_double(node["epsilon"], "epsilon");
  if (node["alpha"]) p.alpha = as_int(node["alpha"], "alpha");
  if (node["beta"]) p.beta = as_int(node["beta"], "beta");
  if (node["degree"]) p.degree = as_int(node["degree"], "degree");
  cfg.profile = p;
}

void parse_modes(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "modes", {"mu", "band", "mu_max", "signs"});
  const int given = (node["mu"] ? 1 : 0) + (node["band"] ? 1 : 0) + (node["mu_max"] ? 1 : 0);
  if (given > 1) bad(node, "modes: give exactly one of 'mu', 'band' or 'mu_max'");
  if (node["mu"]) {
    const YAML::Node list = node["mu"];
    cfg.selection = ModeSelection::MuList;
    cfg.two_mu_list.clear();
    if (list.IsScalar()) {
      cfg.two_mu_list.push_back(twice_mu(list));
    } else if (list.IsSequence()) {
      for (const auto& item : list) cfg.two_mu_list.push_back(twice_mu(item));
    } else {
      bad(list, "'mu' must be a number or a list of numbers");
    }
    if (cfg.two_mu_list.empty()) bad(list, "'mu' list is empty");
  }
  if (node["band"]) {
    cfg.selection = ModeSelection::Band;
    cfg.band_j = as_int(node["band"], "band");
    if (cfg.band_j < 0 || cfg.band_j > 20) bad(node["band"], "band index must lie in [0, 20]");
  }
  if (node["mu_max"]) {
    cfg.selection = ModeSelection::MuMax;
    cfg.mu_max = as_double(node["mu_max"], "mu_max");
  }
  if (node["signs"]) {
    const std::string s = as_string(node["signs"], "signs");
    if (s == "both") {
      cfg.both_signs = true;
    } else if (s == "positive") {
      cfg.both_signs = false;
    } else {
      bad(node["signs"], "'signs' must be 'positive' or 'both'");
    }
  }
}

void parse_triples(const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsSequence() || node.size() == 0) bad(node, "'triples' must be a nonempty list");
  cfg.triples.clear();
  for (const auto& item : node) {
    check_keys(item, "triples entry", {"p", "q"});
    if (!item["p"] || !item["q"]) bad(item, "each triple needs 'p' and 'q'");
    ExponentTriple t;
    t.p = as_double(item["p"], "p");
    t.q = as_double(item["q"], "q");
    cfg.triples.push_back(t);
  }
}

void parse_multiplicities(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "multiplicities", {"source", "table"});
  if (!node["source"]) bad(node, "a multiplicity table must document its 'source'");
  MultiplicityTable table;
  table.source = as_string(node["source"], "source");
  const YAML::Node entries = node["table"];
  if (!entries || !entries.IsSequence()) bad(node, "'table' must be a list of {mu, multiplicity} entries");
  for (const auto& e : entries) {
    check_keys(e, "multiplicity entry", {"mu", "multiplicity"});
    if (!e["mu"] || !e["multiplicity"]) bad(e, "each multiplicity entry needs 'mu' and 'multiplicity'");
    const int m = as_int(e["multiplicity"], "multiplicity");
    if (m <= 0) bad(e["multiplicity"], "multiplicity must be positive");
    table.by_two_abs_mu[std::abs(twice_mu(e["mu"]))] = m;
  }
  cfg.multiplicities = table;
}

RunConfig parse_root(const YAML::Node& root) {
  RunConfig cfg;
  if (root.IsNull()) fail(ErrorKind::Configuration, "configuration document is empty");
  check_keys(root, "configuration",
             {"profile", "n", "m", "modes", "grid", "time", "triples", "teo2", "epsilon", "output_dir", "scan",
              "initial_data", "multiplicities", "validation", "seed", "threads"});
  if (root["profile"]) parse_profile(root["profile"], cfg);
  if (root["n"]) cfg.n = as_int(root["n"], "n");
  cfg.profile.n = cfg.n;
  if (root["m"]) cfg.m = as_double(root["m"], "m");
  if (root["modes"]) parse_modes(root["modes"], cfg);
  if (const YAML::Node g = root["grid"]) {
    check_keys(g, "grid", {"r_max", "N"});
    if (g["r_max"]) cfg.grid.r_max = as_double(g["r_max"], "r_max");
    if (g["N"]) cfg.grid.N = as_int(g["N"], "N");
  }
  if (const YAML::Node t = root["time"]) {
    check_keys(t, "time", {"t_end", "samples"});
    if (t["t_end"]) {
      if (t["t_end"].IsScalar() && t["t_end"].Scalar() == "causal") {
        cfg.t_end_causal = true;
      } else {
        cfg.t_end = as_double(t["t_end"], "t_end");
      }
    }
    if (t["samples"]) cfg.time_samples = as_int(t["samples"], "samples");
  }
  if (root["triples"]) parse_triples(root["triples"], cfg);
  for (ExponentTriple& t : cfg.triples) t.m = cfg.m;
  if (const YAML::Node t = root["teo2"]) {
    check_keys(t, "teo2", {"a", "b"});
    if (!t["a"] || !t["b"]) bad(t, "teo2 needs both 'a' and 'b'");
    cfg.teo2_a = as_double(t["a"], "a");
    cfg.teo2_b = as_double(t["b"], "b");
  }
  if (root["epsilon"]) cfg.epsilon = as_double(root["epsilon"], "epsilon");
  if (root["output_dir"]) cfg.output_dir = as_string(root["output_dir"], "output_dir");
  if (const YAML::Node s = root["scan"]) {
    check_keys(s, "scan", {"r_min", "r_max", "points", "refine_iterations"});
    if (s["r_min"]) cfg.scan.r_min = as_double(s["r_min"], "r_min");
    if (s["r_max"]) cfg.scan.r_max = as_double(s["r_max"], "r_max");
    if (s["points"]) cfg.scan.points = as_int(s["points"], "points");
    if (s["refine_iterations"]) cfg.scan.refine_iterations = as_int(s["refine_iterations"], "refine_iterations");
  }
  if (const YAML::Node d = root["initial_data"]) {
    check_keys(d, "initial_data", {"r0", "width", "amplitude", "component"});
    if (d["r0"]) cfg.initial.r0 = as_double(d["r0"], "r0");
    if (d["width"]) cfg.initial.width = as_double(d["width"], "width");
    if (d["amplitude"]) cfg.initial.amplitude = as_double(d["amplitude"], "amplitude");
    if (d["component"]) {
      const std::string c = as_string(d["component"], "component");
      if (c == "plus") {
        cfg.initial.component = SpinorComponent::Plus;
      } else if (c == "minus") {
        cfg.initial.component = SpinorComponent::Minus;
      } else {
        bad(d["component"], "'component' must be 'plus' or 'minus'");
      }
    }
  }
  if (root["multiplicities"]) parse_multiplicities(root["multiplicities"], cfg);
  if (const YAML::Node v = root["validation"]) {
    check_keys(v, "validation", {"sizes", "mu", "masses", "trials", "min_order"});
    if (v["sizes"]) {
      cfg.validation.sizes.clear();
      if (!v["sizes"].IsSequence()) bad(v["sizes"], "'sizes' must be a list");
      for (const auto& x : v["sizes"]) cfg.validation.sizes.push_back(as_int(x, "sizes"));
    }
    if (v["mu"]) {
      cfg.validation.mu.clear();
      if (!v["mu"].IsSequence()) bad(v["mu"], "'mu' must be a list");
      for (const auto& x : v["mu"]) cfg.validation.mu.push_back(twice_mu(x) / 2.0);
    }
    if (v["masses"]) {
      cfg.validation.masses.clear();
      if (!v["masses"].IsSequence()) bad(v["masses"], "'masses' must be a list");
      for (const auto& x : v["masses"]) cfg.validation.masses.push_back(as_double(x, "masses"));
    }
    if (v["trials"]) cfg.validation.trials = as_int(v["trials"], "trials");
    if (v["min_order"]) cfg.validation.min_order = as_double(v["min_order"], "min_order");
  }
  if (root["seed"]) {
    const double s = as_double(root["seed"], "seed");
    if (s < 0 || s != std::floor(s)) bad(root["seed"], "'seed' must be a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root["threads"]) cfg.threads = as_int(root["threads"], "threads");
  return cfg;
}

}  // namespace

void validate_config(const RunConfig& c) {
  std::vector<std::string> problems;
  auto check = [&problems](bool ok, const std::string& rule) {
    if (!ok) problems.push_back(rule);
  };
  check(c.n >= 3, "dimension n must be at least 3");
  try {
    c.profile.validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  check(std::isfinite(c.m) && c.m >= 0.0, "mass m must be finite and nonnegative");
  check(c.grid.N >= 16, "grid N must be at least 16");
  check(c.grid.r_max > 0.0 && std::isfinite(c.grid.r_max), "grid r_max must be positive");
  check(c.time_samples >= 3, "time samples must be at least 3");
  check(c.t_end_causal || (c.t_end > 0.0 && std::isfinite(c.t_end)), "time t_end must be positive");
  check(c.epsilon > 0.0, "epsilon must be positive");
  check(c.scan.r_min > 0.0 && c.scan.r_max > c.scan.r_min && c.scan.points >= 16,
        "scan policy needs 0 < r_min < r_max and at least 16 points");
  check(c.initial.width > 0.0 && c.initial.r0 > 0.0 && c.initial.r0 < c.grid.r_max,
        "initial data needs width > 0 and 0 < r0 < grid r_max");
  check(c.validation.trials >= 1, "validation trials must be at least 1");
  for (int N : c.validation.sizes) check(N >= 16, "validation sizes must be at least 16");
  for (const ExponentTriple& t : c.triples) {
    std::ostringstream rule;
    rule << "exponent triple (p, q, m) = (" << t.p << ", " << t.q << ", " << t.m
         << ") violates the admissible-triple condition: p, q >= 2 and "
         << (t.m == 0.0 ? "2/p + (n-1)/q = (n-1)/2" : "2/p + n/q = n/2");
    check(is_admissible_triple(t, c.n), rule.str());
  }
  auto check_mu = [&](int two_mu) {
    std::ostringstream rule;
    rule << "mu = " << two_mu / 2.0 << " is not an eigenvalue of the sphere Dirac operator for n = " << c.n
         << " (|mu| must lie in (n-1)/2 + N, and |mu| > 1/2 is required)";
    check(std::abs(two_mu) > 1 && in_sphere_spectrum(two_mu, c.n), rule.str());
  };
  if (c.selection == ModeSelection::MuList) {
    for (int tm : c.two_mu_list) check_mu(tm);
  }
  if (c.selection == ModeSelection::MuMax) {
    check(c.mu_max >= 0.5 * (c.n - 1), "mu_max lies below the spectral gap (n-1)/2");
  }
  for (double mu : c.validation.mu) check_mu(static_cast<int>(std::lround(2.0 * mu)));
  if (c.n > 3 && c.multiplicities) check(!c.multiplicities->source.empty(), "multiplicity table needs a source");
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    fail(ErrorKind::Configuration, msg);
  }
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorKind::Configuration, "YAML parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                                       std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  try {
    cfg = parse_root(root);
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::Configuration, "configuration error at line " + std::to_string(e.mark.line + 1) + ", column " +
                                       std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Configuration, "cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<ModeIndex> selected_modes(const RunConfig& c) {
  const MultiplicityTable* table = c.multiplicities ? &*c.multiplicities : nullptr;
  std::vector<ModeIndex> all;
  switch (c.selection) {
    case ModeSelection::MuList:
      for (int tm : c.two_mu_list) all.push_back(make_mode(tm, c.n, table));
      return all;
    case ModeSelection::Band:
      all = modes_in_band(c.n, c.band_j, table);
      break;
    case ModeSelection::MuMax:
      all = sphere_spectrum(c.n, c.mu_max, table);
      break;
  }
  if (!c.both_signs) {
    std::erase_if(all, [](const ModeIndex& m) { return m.two_mu < 0; });
  }
  return all;
}

}  // namespace warpdirac
