#include "towlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "towlab/solutions.hpp"

namespace towlab {

const char* selector_name(Selector s) {
  switch (s) {
    case Selector::solve: return "solve";
    case Selector::recover: return "recover";
    case Selector::unique: return "unique";
    case Selector::doubling: return "doubling";
    case Selector::slope: return "slope";
    case Selector::cones: return "cones";
    case Selector::check: return "check";
    case Selector::simulate: return "simulate";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const char* const kSections[] = {"grid", "game", "solver", "operator",
                                 "experiment", "output"};

const std::map<std::string, std::vector<std::string>> kKeys = {
    {"grid", {"lower", "upper", "h"}},
    {"game", {"epsilon", "f", "F", "g"}},
    {"solver", {"tol", "max_iter", "sweep"}},
    {"operator",
     {"theta", "tol", "form", "role", "H", "Hx1", "Hx2", "Hz", "Hp1", "Hp2",
      "b1", "b2", "c", "fd_step"}},
    {"experiment",
     {"selector", "u", "v", "center", "radii", "eps_list", "v_lower", "v_upper",
      "direction", "start", "samples", "step_cap", "seed"}},
    {"output",
     {"dir", "report", "field_csv", "recovered_csv", "slope_csv",
      "doubling_csv"}},
};

struct RawConfig {
  // section.key -> (value, line)
  std::map<std::string, std::pair<std::string, int>> kv;
  std::vector<ExperimentConfig::RawEntry> order;
};

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("", lineno, "line " + std::to_string(lineno) +
                                          ": expected ']' to close the section header");
      section = trim(t.substr(1, t.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), section) ==
          std::end(kSections))
        throw ConfigError("", lineno, "line " + std::to_string(lineno) +
                                          ": unknown section [" + section + "]");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", lineno, "line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("", lineno, "line " + std::to_string(lineno) +
                                        ": key outside any [section]");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    const auto& allowed = kKeys.at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(section + "." + key, lineno,
                        "line " + std::to_string(lineno) + ": unknown key '" +
                            section + "." + key + "'");
    std::string full = section + "." + key;
    if (raw.kv.count(full))
      throw ConfigError(full, lineno, "line " + std::to_string(lineno) +
                                          ": duplicate key '" + full + "'");
    raw.kv[full] = {value, lineno};
    raw.order.push_back({section, key, value});
  }
  return raw;
}

class Validator {
 public:
  explicit Validator(RawConfig raw) : raw_(std::move(raw)) {}

  ExperimentConfig run() {
    ExperimentConfig cfg;
    cfg.raw = raw_.order;

    cfg.lower = need_vector("grid.lower");
    cfg.upper = need_vector("grid.upper");
    cfg.h = need_number("grid.h");

    if (auto v = get("game.epsilon")) cfg.epsilon = number("game.epsilon", *v);
    cfg.f = function("game.f", cfg.f_text);
    cfg.g = function("game.g", cfg.g_text);
    cfg.F = function("game.F", cfg.F_text);

    if (auto v = get("solver.tol")) cfg.tol = number("solver.tol", *v);
    if (auto v = get("solver.max_iter"))
      cfg.max_iter = static_cast<int>(number("solver.max_iter", *v));
    if (auto v = get("solver.sweep")) {
      if (*v == "jacobi") cfg.sweep = Sweep::jacobi;
      else if (*v == "gauss_seidel") cfg.sweep = Sweep::gauss_seidel;
      else fail("solver.sweep", "must be jacobi or gauss_seidel");
    }

    if (auto v = get("operator.theta"); v && *v != "auto")
      cfg.theta = number("operator.theta", *v);
    if (auto v = get("operator.tol"); v && *v != "auto")
      cfg.op_tol = number("operator.tol", *v);
    if (auto v = get("operator.form")) {
      if (*v == "ratio") cfg.form = Form::ratio;
      else if (*v == "product") cfg.form = Form::product;
      else fail("operator.form", "must be ratio or product");
    }
    if (auto v = get("operator.role")) {
      if (*v == "sub") cfg.role = RoleSelect::sub;
      else if (*v == "super") cfg.role = RoleSelect::super;
      else if (*v == "both") cfg.role = RoleSelect::both;
      else fail("operator.role", "must be sub, super or both");
    }
    if (auto v = get("operator.fd_step"))
      cfg.fd_step = number("operator.fd_step", *v);
    if (auto v = get("operator.H")) {
      HamiltonianSpec::Parts parts;
      parts.H = *expression("operator.H", *v);
      parts.Hx1 = opt_expression("operator.Hx1");
      parts.Hx2 = opt_expression("operator.Hx2");
      parts.Hz = opt_expression("operator.Hz");
      parts.Hp1 = opt_expression("operator.Hp1");
      parts.Hp2 = opt_expression("operator.Hp2");
      cfg.hamiltonian = std::move(parts);
    }
    cfg.b1 = opt_expression("operator.b1");
    cfg.b2 = opt_expression("operator.b2");
    cfg.c = opt_expression("operator.c");

    std::string sel = std::string(need("experiment.selector"));
    const std::pair<const char*, Selector> sels[] = {
        {"solve", Selector::solve},       {"recover", Selector::recover},
        {"unique", Selector::unique},     {"doubling", Selector::doubling},
        {"slope", Selector::slope},       {"cones", Selector::cones},
        {"check", Selector::check},       {"simulate", Selector::simulate}};
    bool found = false;
    for (auto [name, s] : sels)
      if (sel == name) { cfg.selector = s; found = true; }
    if (!found)
      fail("experiment.selector",
           "unknown selector '" + sel +
               "'; valid: solve recover unique doubling slope cones check simulate");

    cfg.u = function("experiment.u", cfg.u_text);
    cfg.v = function("experiment.v", cfg.v_text);
    if (auto v = get("experiment.center")) cfg.center = vector("experiment.center", *v);
    if (auto v = get("experiment.radii")) cfg.radii = vector("experiment.radii", *v);
    if (auto v = get("experiment.eps_list"))
      cfg.eps_list = vector("experiment.eps_list", *v);
    if (auto v = get("experiment.v_lower"))
      cfg.v_lower = vector("experiment.v_lower", *v);
    if (auto v = get("experiment.v_upper"))
      cfg.v_upper = vector("experiment.v_upper", *v);
    if (auto v = get("experiment.direction")) {
      if (*v == "above") cfg.direction = SideSelect::above;
      else if (*v == "below") cfg.direction = SideSelect::below;
      else if (*v == "both") cfg.direction = SideSelect::both;
      else fail("experiment.direction", "must be above, below or both");
    }
    if (auto v = get("experiment.start")) cfg.start = vector("experiment.start", *v);
    if (auto v = get("experiment.samples"))
      cfg.samples = static_cast<int>(number("experiment.samples", *v));
    if (auto v = get("experiment.step_cap"))
      cfg.step_cap = static_cast<long>(number("experiment.step_cap", *v));
    if (auto v = get("experiment.seed"))
      cfg.seed = static_cast<std::uint64_t>(number("experiment.seed", *v));

    if (auto v = get("output.dir")) cfg.out_dir = *v;
    if (auto v = get("output.report")) cfg.report_name = *v;
    if (auto v = get("output.field_csv")) cfg.field_csv = *v;
    if (auto v = get("output.recovered_csv")) cfg.recovered_csv = *v;
    if (auto v = get("output.slope_csv")) cfg.slope_csv = *v;
    if (auto v = get("output.doubling_csv")) cfg.doubling_csv = *v;

    structural_checks(cfg);
    return cfg;
  }

 private:
  [[noreturn]] void fail(const std::string& field, const std::string& msg) {
    int line = 0;
    if (auto it = raw_.kv.find(field); it != raw_.kv.end()) line = it->second.second;
    throw ConfigError(field, line, field + ": " + msg);
  }

  std::optional<std::string> get(const std::string& field) {
    auto it = raw_.kv.find(field);
    if (it == raw_.kv.end()) return std::nullopt;
    return it->second.first;
  }

  std::string need(const std::string& field) {
    auto v = get(field);
    if (!v) throw ConfigError(field, 0, field + ": required but missing");
    return *v;
  }

  double number(const std::string& field, const std::string& text) {
    const char* b = text.data();
    const char* e = b + text.size();
    double out = 0;
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(out))
      fail(field, "expected a number, got '" + text + "'");
    return out;
  }

  double need_number(const std::string& field) { return number(field, need(field)); }

  std::vector<double> vector(const std::string& field, const std::string& text) {
    std::vector<double> out;
    std::string norm = text;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::istringstream in(norm);
    std::string item;
    while (in >> item) out.push_back(number(field, item));
    if (out.empty()) fail(field, "expected one or more numbers");
    return out;
  }

  std::vector<double> need_vector(const std::string& field) {
    return vector(field, need(field));
  }

  std::optional<FunctionSpec> expression(const std::string& field,
                                         const std::string& text) {
    try {
      return resolve_function(text);
    } catch (const ParseError& e) {
      fail(field, std::string(e.what()));
    }
  }

  std::optional<FunctionSpec> function(const std::string& field, std::string& text_out) {
    auto v = get(field);
    if (!v) return std::nullopt;
    text_out = *v;
    return expression(field, *v);
  }

  std::optional<FunctionSpec> opt_expression(const std::string& field) {
    auto v = get(field);
    if (!v) return std::nullopt;
    return expression(field, *v);
  }

  void structural_checks(ExperimentConfig& cfg) {
    if (cfg.lower.size() != cfg.upper.size() || cfg.lower.empty() ||
        cfg.lower.size() > 2)
      fail("grid.lower", "grid.lower and grid.upper must both have 1 or 2 entries");

    auto need_game = [&] {
      if (!cfg.epsilon) throw ConfigError("game.epsilon", 0, "game.epsilon: required but missing");
      if (!cfg.f) throw ConfigError("game.f", 0, "game.f: required but missing");
      if (!cfg.F) throw ConfigError("game.F", 0, "game.F: required but missing");
    };
    auto need_field = [&](const char* field, bool ok) {
      if (!ok)
        throw ConfigError(field, 0, std::string(field) + ": required but missing");
    };

    switch (cfg.selector) {
      case Selector::solve: need_game(); break;
      case Selector::simulate:
        need_game();
        need_field("experiment.start", !cfg.start.empty());
        break;
      case Selector::recover:
        if (!cfg.u) need_game();
        break;
      case Selector::unique:
        need_game();
        need_field("game.g", cfg.g.has_value());
        break;
      case Selector::doubling:
        if (!cfg.u) need_game();
        if (cfg.eps_list.empty()) {
          if (!cfg.epsilon)
            throw ConfigError("experiment.eps_list", 0,
                              "experiment.eps_list: required (or set game.epsilon)");
          cfg.eps_list = {*cfg.epsilon};
        }
        break;
      case Selector::slope:
        need_field("experiment.u", cfg.u.has_value());
        need_field("experiment.center", !cfg.center.empty());
        need_field("experiment.radii", !cfg.radii.empty());
        break;
      case Selector::cones:
        need_field("experiment.u", cfg.u.has_value());
        need_field("experiment.v_lower", !cfg.v_lower.empty());
        need_field("experiment.v_upper", !cfg.v_upper.empty());
        break;
      case Selector::check:
        if (!cfg.u) need_game();  // no field given: check the solved value
        need_field("game.f", cfg.f.has_value());
        break;
    }
  }

  RawConfig raw_;
};

}  // namespace

GridPtr ExperimentConfig::make_grid() const {
  return build_grid(std::span<const double>(lower), std::span<const double>(upper), h);
}

double ExperimentConfig::theta_or_default() const {
  return theta ? *theta : std::sqrt(h);
}

double ExperimentConfig::check_tol(bool solver_output) const {
  if (op_tol) return *op_tol;
  return solver_output ? 10.0 * std::sqrt(h) : 10.0 * h * h;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
  RawConfig raw = parse_raw(text);
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("", 0, "override must look like section.key=value: '" + ov + "'");
    std::string field = trim(ov.substr(0, eq));
    std::string value = trim(ov.substr(eq + 1));
    std::string section = field.substr(0, field.find('.'));
    std::string key = field.substr(field.find('.') + 1);
    auto sec = kKeys.find(section);
    if (sec == kKeys.end() ||
        std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end())
      throw ConfigError(field, 0, "unknown key '" + field + "' in override");
    raw.kv[field] = {value, 0};
    bool seen = false;
    for (auto& entry : raw.order)
      if (entry.section == section && entry.key == key) {
        entry.value = value;
        seen = true;
      }
    if (!seen) raw.order.push_back({section, key, value});
  }
  return Validator(std::move(raw)).run();
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

}  // namespace towlab
