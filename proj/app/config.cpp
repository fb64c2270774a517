#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pflow/errors.hpp"

namespace pflow::app {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys()
{
  static const std::map<std::string, std::set<std::string>> keys{
      {"mesh", {"n", "refinements"}},
      {"model", {"p", "delta", "eps", "regularization"}},
      {"lower_order", {"kind", "r", "c"}},
      {"time", {"T", "K"}},
      {"scheme", {"kind", "linear_solver", "cg_tol", "cg_max_iter", "nonlinear", "tol_res", "max_iter"}},
      {"data", {"initial", "source"}},  // plus initial.<param> and source.<param>
      {"output", {"directory", "snapshots"}},
      {"run", {"seed"}},
      {"study", {"levels", "coupling", "negative_control", "alpha"}},
  };
  return keys;
}

// Line numbers of "section.key" entries, for error messages.
std::map<std::string, int> scan_lines(const std::string& text)
{
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line, section;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == ';' || line[first] == '#') continue;
    if (line[first] == '[') {
      section = line.substr(first + 1, line.find(']') - first - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    lines[section + "." + key] = number;
  }
  return lines;
}

class Reader {
public:
  Reader(std::string origin, std::map<std::string, int> lines) : origin_(std::move(origin)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const
  {
    std::ostringstream out;
    out << origin_;
    const auto it = lines_.find(section + "." + key);
    if (it != lines_.end()) out << ':' << it->second;
    out << ": [" << section << "] " << key << ": " << message;
    throw ConfigError(out.str());
  }

  double real(const std::string& section, const std::string& key, const std::string& text) const
  {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) fail(section, key, "expected a number, got '" + text + "'");
    return value;
  }

  long long integer(const std::string& section, const std::string& key, const std::string& text) const
  {
    long long value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) fail(section, key, "expected an integer, got '" + text + "'");
    return value;
  }

  bool boolean(const std::string& section, const std::string& key, const std::string& text) const
  {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(section, key, "expected true or false, got '" + text + "'");
  }

  template <typename Enum>
  Enum choice(const std::string& section, const std::string& key, const std::string& text,
              const std::map<std::string, Enum>& options) const
  {
    const auto it = options.find(text);
    if (it != options.end()) return it->second;
    std::string names;
    for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + name;
    fail(section, key, "expected one of {" + names + "}, got '" + text + "'");
  }

private:
  std::string origin_;
  std::map<std::string, int> lines_;
};

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin)
{
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  pt::ptree tree;
  try {
    std::istringstream stream(text);
    pt::ini_parser::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << origin << ':' << e.line() << ": " << e.message();
    throw ConfigError(msg.str());
  }
  const Reader reader(origin, scan_lines(text));

  RunConfig config;
  SchemeConfig& s = config.scheme;
  double p = 2.0, delta = 0.0;
  std::string lower_kind = "zero";
  double r = 3.0, c = 0.0;
  bool have_r = false;

  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (!body.data().empty()) reader.fail("", section, "key outside of any section");
      throw ConfigError(origin + ": unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      const std::string value = node.data();
      if (section == "data" && (key.rfind("initial.", 0) == 0 || key.rfind("source.", 0) == 0)) {
        const bool initial = key[0] == 'i';
        const std::string param = key.substr(initial ? 8 : 7);
        (initial ? config.initial : config.source).params[param] = reader.real(section, key, value);
        continue;
      }
      if (!known->second.count(key)) reader.fail(section, key, "unknown key");

      if (section == "mesh") {
        const long long v = reader.integer(section, key, value);
        if (key == "n") {
          if (v < 1 || v > 4096) reader.fail(section, key, "must lie in [1, 4096]");
          config.n = int(v);
        } else {
          if (v < 0 || v > 8) reader.fail(section, key, "must lie in [0, 8]");
          config.refinements = int(v);
        }
      } else if (section == "model") {
        if (key == "p") p = reader.real(section, key, value);
        else if (key == "delta") delta = reader.real(section, key, value);
        else if (key == "eps") s.eps = reader.real(section, key, value);
        else
          s.regularization = reader.choice(section, key, value,
                                           std::map<std::string, Regularization>{
                                               {"additive-shift", Regularization::AdditiveShift},
                                               {"quadratic-norm", Regularization::QuadraticNorm}});
      } else if (section == "lower_order") {
        if (key == "kind") lower_kind = value;
        else if (key == "r") {
          r = reader.real(section, key, value);
          have_r = true;
        } else c = reader.real(section, key, value);
      } else if (section == "time") {
        if (key == "T") s.T = reader.real(section, key, value);
        else {
          const long long v = reader.integer(section, key, value);
          if (v < 0 || v > 100000000) reader.fail(section, key, "must lie in [0, 1e8]");
          s.K = int(v);
        }
      } else if (section == "scheme") {
        if (key == "kind")
          s.scheme = reader.choice(section, key, value,
                                   std::map<std::string, SchemeKind>{{"semi-implicit", SchemeKind::SemiImplicit},
                                                                     {"implicit", SchemeKind::Implicit}});
        else if (key == "linear_solver")
          s.linear.kind = reader.choice(section, key, value,
                                        std::map<std::string, LinearSolverSettings::Kind>{
                                            {"cholesky", LinearSolverSettings::Kind::Cholesky},
                                            {"cg", LinearSolverSettings::Kind::CG}});
        else if (key == "cg_tol") s.linear.tol_rel = reader.real(section, key, value);
        else if (key == "cg_max_iter") s.linear.max_iter = int(reader.integer(section, key, value));
        else if (key == "nonlinear")
          s.nonlinear.kind = reader.choice(section, key, value,
                                           std::map<std::string, NonlinearSettings::Kind>{
                                               {"kacanov", NonlinearSettings::Kind::Kacanov},
                                               {"newton", NonlinearSettings::Kind::NewtonDamped}});
        else if (key == "tol_res") s.nonlinear.tol_res = reader.real(section, key, value);
        else s.nonlinear.max_iter = int(reader.integer(section, key, value));
      } else if (section == "data") {
        (key == "initial" ? config.initial : config.source).name = value;
      } else if (section == "output") {
        if (key == "directory") {
          if (value.empty()) reader.fail(section, key, "must not be empty");
          config.output_directory = value;
        } else {
          const long long v = reader.integer(section, key, value);
          if (v < 0) reader.fail(section, key, "must be >= 0");
          config.snapshots = int(v);
        }
      } else if (section == "run") {
        const long long v = reader.integer(section, key, value);
        if (v < 0) reader.fail(section, key, "must be >= 0");
        config.seed = std::uint64_t(v);
      } else if (section == "study") {
        if (key == "levels") {
          const long long v = reader.integer(section, key, value);
          if (v < 1 || v > 8) reader.fail(section, key, "must lie in [1, 8]");
          config.study_levels = int(v);
        } else if (key == "coupling")
          config.coupling = reader.choice(section, key, value,
                                          std::map<std::string, StudyConfig::Coupling>{
                                              {"default", StudyConfig::Coupling::Default},
                                              {"fixed-tau", StudyConfig::Coupling::FixedTau}});
        else if (key == "negative_control") config.negative_control = reader.boolean(section, key, value);
        else {
          config.alpha = reader.real(section, key, value);
          if (!(*config.alpha > 0.0)) reader.fail(section, key, "must be positive");
        }
      }
    }
  }

  try {
    s.nf = NFunctionPD(p, delta);
  } catch (const DomainError& e) {
    reader.fail("model", delta >= 0.0 && std::isfinite(delta) ? "p" : "delta", e.what());
  }
  try {
    if (lower_kind == "zero") s.coeff = LowerOrderCoeff::zero();
    else if (lower_kind == "power") s.coeff = LowerOrderCoeff::power(r);
    else if (lower_kind == "shifted-power") s.coeff = LowerOrderCoeff::shifted_power(r, c);
    else reader.fail("lower_order", "kind", "expected one of {zero, power, shifted-power}, got '" + lower_kind + "'");
  } catch (const DomainError& e) {
    reader.fail("lower_order", have_r ? "r" : "kind", e.what());
  }
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!config.random_initial()) {
    try {
      make_field(config.initial);
    } catch (const DomainError& e) {
      reader.fail("data", "initial", e.what());
    }
  }
  try {
    s.source = make_source(config.source);
  } catch (const DomainError& e) {
    reader.fail("data", "source", e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in, path);
}

MeshPtr build_mesh(const RunConfig& config)
{
  return refine_red(unit_square_mesh(config.n), config.refinements);
}

FemFunction build_initial(const RunConfig& config, const MeshPtr& mesh)
{
  if (config.random_initial()) return random_field(mesh, config.seed, config.initial.param("amplitude", 1.0));
  return interpolate_nodal(make_field(config.initial), mesh);
}

StudyConfig build_study(const RunConfig& config)
{
  if (config.random_initial()) throw ConfigError("study: initial data must be an analytic field, not 'random'");
  StudyConfig study;
  study.levels = config.study_levels;
  study.base_n = config.n;
  study.base = config.scheme;
  study.initial = make_field(config.initial);
  study.coupling = config.coupling;
  study.negative_control = config.negative_control;
  study.discrepancy.alpha = config.alpha;
  if (config.refinements != 0) throw ConfigError("study: [mesh] refinements is not used; set n for level 0");
  try {
    study.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("study: ") + e.what());
  }
  return study;
}

}  // namespace pflow::app
