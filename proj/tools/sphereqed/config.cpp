#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sqcli {

namespace {

struct KeyInfo {
  const char *key;
  const char *fallback;
};

// Defaults reproduce the R = 2, omega_P = 0.5, gamma = 1e-4 configuration.
constexpr KeyInfo known_keys[] = {
    {"command", ""},
    {"material.model", "dielectric"},
    {"material.omega_p", "0.5"},
    {"material.omega_t", "1"},
    {"material.gamma", "1e-4"},
    {"sphere.radius", "2"},
    {"sweep.omega_min", "0.85"},
    {"sweep.omega_max", "1.12"},
    {"sweep.steps", "271"},
    {"sweep.kind", "wg"},
    {"sweep.pol", "tm"},
    {"sweep.l_min", "10"},
    {"sweep.l_max", "22"},
    {"sweep.radial_order", "1"},
    {"atom.orientation", "radial"},
    {"atom.delta_r", "0.02"},
    {"atom.omega_a", "0.94042"},
    {"atom.a0_over_omega", "1e-7"},
    {"field.r", "20"},
    {"field.theta", "3"},
    {"field.phi", "0"},
    {"field.theta_samples", "721"},
    {"field.pattern_phi", "auto"},
    {"fluct.omega", "0.94042"},
    {"fluct.r_min", "0.01"},
    {"fluct.r_max", "4"},
    {"fluct.steps", "401"},
    {"time.t_max", "1e6"},
    {"time.steps", "201"},
    {"time.delta", "0"},
};

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(trim(item));
  return out;
}

double parse_number(const std::string &key, const std::string &s) {
  double v = 0.0;
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw ConfigError("'" + key + "': '" + s + "' is not a number");
  return v;
}

int parse_integer(const std::string &key, const std::string &s) {
  int v = 0;
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw ConfigError("'" + key + "': '" + s + "' is not an integer");
  return v;
}

std::string json_scalar(const nlohmann::json &v, const std::string &key) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number_integer())
    return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  throw ConfigError("'" + key + "': unsupported JSON value");
}

// Recipes are INI blocks with the fixed parameter sets of the reference plots.
struct Recipe {
  const char *name;
  const char *text;
};

constexpr Recipe recipes[] = {
    {"fig1", R"(command = permittivity
[material]
omega_p = 0.5
gamma = 1e-4
[sweep]
omega_min = 0.8
omega_max = 1.3
steps = 501
)"},
    {"fig2", R"(command = qfactors
[material]
omega_p = 0.5
gamma = 1e-6
[sphere]
radius = 10
[sweep]
kind = wg
pol = tm
l_min = 48
l_max = 78
radial_order = 1
)"},
    {"fig3", R"(command = qfactors
[material]
omega_p = 0.5
gamma = 1e-6
[sphere]
radius = 10
[sweep]
kind = sg
pol = tm
l_min = 70
l_max = 120
)"},
    {"fig5", R"(command = lambshift
[material]
omega_p = 0.5
gamma = 1e-4
[sphere]
radius = 2
[atom]
orientation = radial
delta_r = 0.02, 0.1
[sweep]
omega_min = 0.85
omega_max = 1.12
steps = 2701
)"},
    {"fig6", R"(command = pattern
[material]
omega_p = 0.5
gamma = 1e-4
[sphere]
radius = 2
[atom]
orientation = radial
delta_r = 0.02
omega_a = 0.94042, 0.999, 1.02811, 1.06
[field]
r = 20
theta_samples = 721
)"},
    {"fig7", R"(command = pattern
[material]
omega_p = 0.5
gamma = 1e-4
[sphere]
radius = 2
[atom]
orientation = tangential
delta_r = 0.02
omega_a = 0.94042, 0.999, 1.02811, 1.06
[field]
r = 20
theta_samples = 721
)"},
    {"fig8", R"(command = fraction
[material]
omega_p = 0.5
gamma = 1e-4, 1e-6
[sphere]
radius = 2
[atom]
delta_r = 0.02, 0.1
[sweep]
omega_min = 0.85
omega_max = 1.15
steps = 3001
)"},
    {"fig10", R"(command = timeevolve
[material]
omega_p = 0.5
gamma = 1e-4
[sphere]
radius = 2
[atom]
orientation = radial
delta_r = 0.02
omega_a = 0.91779, 0.94042
a0_over_omega = 1e-7
[field]
r = 20
theta = 3
phi = 0
[time]
t_max = 1e6
steps = 201
)"},
    {"fig14", R"(command = qfactors
[material]
model = metal
gamma = 0.005
[sphere]
radius = 10, 5
[sweep]
kind = sg
pol = tm
l_min = 30, 16
l_max = 60, 60
)"},
    {"fig15", R"(command = decay
[material]
model = metal
gamma = 0.005
[sphere]
radius = 5
[atom]
orientation = radial
delta_r = 0.1
omega_a = 0.5026
[sweep]
omega_min = 0.3
omega_max = 0.75
steps = 901
[field]
r = 50
theta_samples = 721
)"},
};

} // namespace

Config::Config() {
  for (const KeyInfo &k : known_keys)
    values_[k.key] = k.fallback;
}

void Config::set(const std::string &key, const std::string &value) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError("unknown configuration key '" + key + "'");
  it->second = trim(value);
}

const std::string &Config::text(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

double Config::number(const std::string &key) const {
  const auto list = numbers(key);
  if (list.size() != 1)
    throw ConfigError("'" + key + "' takes a single value");
  return list.front();
}

std::vector<double> Config::numbers(const std::string &key) const {
  std::vector<double> out;
  for (const auto &item : split_list(text(key)))
    out.push_back(parse_number(key, item));
  if (out.empty())
    throw ConfigError("'" + key + "' is empty");
  return out;
}

int Config::integer(const std::string &key) const {
  const auto list = integers(key);
  if (list.size() != 1)
    throw ConfigError("'" + key + "' takes a single value");
  return list.front();
}

std::vector<int> Config::integers(const std::string &key) const {
  std::vector<int> out;
  for (const auto &item : split_list(text(key)))
    out.push_back(parse_integer(key, item));
  if (out.empty())
    throw ConfigError("'" + key + "' is empty");
  return out;
}

std::string Config::word(const std::string &key) const {
  const auto list = words(key);
  if (list.size() != 1)
    throw ConfigError("'" + key + "' takes a single value");
  return list.front();
}

std::vector<std::string> Config::words(const std::string &key) const {
  std::vector<std::string> out = split_list(text(key));
  for (auto &w : out) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
    if (w.empty())
      throw ConfigError("'" + key + "' has an empty entry");
  }
  if (out.empty())
    throw ConfigError("'" + key + "' is empty");
  return out;
}

std::string Config::dump() const {
  std::ostringstream os;
  std::string section;
  os << "command = " << values_.at("command") << "\n";
  for (const auto &[key, value] : values_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos)
      continue;
    const std::string s = key.substr(0, dot);
    if (s != section) {
      os << "[" << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << value << "\n";
  }
  return os.str();
}

void load_ini(Config &cfg, const std::string &text, const std::string &source) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      cfg.set(section.empty() ? key : section + "." + key, line.substr(eq + 1));
    } catch (const ConfigError &e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

void load_json(Config &cfg, const std::string &text, const std::string &source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!doc.is_object())
    throw ConfigError(source + ": top level must be an object");
  auto assign = [&](const std::string &key, const nlohmann::json &v) {
    if (v.is_array()) {
      std::string joined;
      for (std::size_t k = 0; k < v.size(); ++k)
        joined += (k ? ", " : "") + json_scalar(v[k], key);
      cfg.set(key, joined);
    } else {
      cfg.set(key, json_scalar(v, key));
    }
  };
  for (const auto &[name, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto &[key, v] : value.items())
        assign(name + "." + key, v);
    } else {
      assign(name, value);
    }
  }
}

void load_file(Config &cfg, const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const bool json = (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) ||
                    trim(text).rfind('{', 0) == 0;
  if (json)
    load_json(cfg, text, path);
  else
    load_ini(cfg, text, path);
}

void apply_assignment(Config &cfg, const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  cfg.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const Recipe &r : recipes)
    out.emplace_back(r.name);
  return out;
}

void apply_recipe(Config &cfg, const std::string &name) {
  for (const Recipe &r : recipes) {
    if (name == r.name) {
      load_ini(cfg, r.text, "recipe " + name);
      return;
    }
  }
  std::string list;
  for (const auto &n : recipe_names())
    list += (list.empty() ? "" : ", ") + n;
  throw ConfigError("unknown recipe '" + name + "'; available: " + list);
}

} // namespace sqcli
