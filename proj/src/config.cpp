#include "fpdwalk/config.hpp"

#include "fpdwalk/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace fpdwalk {

namespace {

struct StudyName {
  Study study;
  std::string_view name;
};

constexpr StudyName kStudyNames[] = {
    {Study::GeneratorConvergence, "generator_convergence"},
    {Study::Stationarity, "stationarity"},
    {Study::SubordinatorLaplace, "subordinator_laplace"},
    {Study::InverseSubordinator, "inverse_subordinator"},
    {Study::CtrwMarginal, "ctrw_marginal"},
    {Study::DensityConsistency, "density_consistency"},
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line << ": " << what;
  throw ConfigError(os.str());
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text[0] == '+')
    ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    return std::nullopt;
  return v;
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      in_string = !in_string;
    else if (line[i] == '#' && !in_string)
      return std::string(line.substr(0, i));
  }
  return std::string(line);
}

struct Scalar {
  bool is_string;
  double number;
  std::string text;
};

Scalar parse_scalar(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty())
    fail_line(line, "empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      fail_line(line, "unterminated string");
    return {true, 0.0, s.substr(1, s.size() - 2)};
  }
  if (auto v = parse_number(s))
    return {false, *v, {}};
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
          c == '/'))
      fail_line(line, "cannot parse value '" + s + "'");
  return {true, 0.0, s};
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      fail_line(line, "arrays must close on the same line");
    const std::string inner = trim(std::string_view(s).substr(1, s.size() - 2));
    std::vector<Scalar> items;
    if (!inner.empty()) {
      std::string item;
      bool in_string = false;
      for (char c : inner) {
        if (c == '"')
          in_string = !in_string;
        if (c == ',' && !in_string) {
          items.push_back(parse_scalar(item, line));
          item.clear();
        } else {
          item += c;
        }
      }
      if (!trim(item).empty())
        items.push_back(parse_scalar(item, line));
    }
    const bool strings = !items.empty() && items.front().is_string;
    for (const auto& it : items)
      if (it.is_string != strings)
        fail_line(line, "arrays must not mix numbers and strings");
    if (strings) {
      std::vector<std::string> out;
      for (auto& it : items)
        out.push_back(it.text);
      return out;
    }
    std::vector<double> out;
    for (auto& it : items)
      out.push_back(it.number);
    return out;
  }
  const Scalar sc = parse_scalar(s, line);
  if (sc.is_string)
    return sc.text;
  return sc.number;
}

// Accessors with type checking against a key name.
double as_number(const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v))
    return *d;
  throw ConfigError("key '" + key + "' must be a number");
}

std::string as_string(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v))
    return *s;
  throw ConfigError("key '" + key + "' must be a string");
}

std::vector<double> as_numbers(const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v))
    return {*d};
  if (const auto* l = std::get_if<std::vector<double>>(&v))
    return *l;
  throw ConfigError("key '" + key + "' must be a number or an array of numbers");
}

std::vector<std::string> as_strings(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v))
    return {*s};
  if (const auto* l = std::get_if<std::vector<std::string>>(&v))
    return *l;
  throw ConfigError("key '" + key + "' must be a string or an array of strings");
}

long long as_integer(const std::string& key, const ConfigValue& v) {
  const double d = as_number(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15)
    throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<long long>(d);
}

std::size_t as_count(const std::string& key, const ConfigValue& v) {
  const long long i = as_integer(key, v);
  if (i < 0)
    throw ConfigError("key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(i);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << '[';
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << (i ? ", " : "") << xs[i];
  os << ']';
  return os.str();
}

} // namespace

std::string_view to_string(Study study) {
  for (const auto& s : kStudyNames)
    if (s.study == study)
      return s.name;
  return "?";
}

Study parse_study(std::string_view text) {
  for (const auto& s : kStudyNames)
    if (s.name == text)
      return s.study;
  throw ConfigError("unknown study '" + std::string(text) + "'");
}

ChainParams default_chain_params(DiffusionKind kind) {
  switch (kind) {
  case DiffusionKind::OU:
    return {2.0, 1.0, 0.0, 0.5};
  case DiffusionKind::Jacobi:
    return {1.0, 1.0, 1.0, 0.5};
  case DiffusionKind::CIR:
    return {1.0, 2.0, 4.0, 0.5};
  }
  return {};
}

std::map<std::string, ConfigValue> parse_key_values(std::string_view text) {
  std::map<std::string, ConfigValue> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(strip_comment(line));
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      fail_line(number, "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty())
      fail_line(number, "missing key");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        fail_line(number, "invalid key '" + key + "'");
    if (out.count(key))
      fail_line(number, "duplicate key '" + key + "'");
    out.emplace(key, parse_value(body.substr(eq + 1), number));
  }
  return out;
}

ChainParams ExperimentConfig::params_for(DiffusionKind kind) const {
  if (cp && kinds.size() == 1 && kinds.front() == kind)
    return *cp;
  return default_chain_params(kind);
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  if (kinds.empty())
    throw ConfigError("no diffusion kind given");
  if (cp && kinds.size() != 1)
    throw ConfigError("theta/a/b/d can only be set for a single kind");
  for (DiffusionKind k : kinds) {
    try {
      fpdwalk::validate(k, params_for(k));
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
  if (n_list.empty())
    throw ConfigError("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1)
      throw ConfigError("n_list entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw ConfigError("n_list must be strictly ascending");
  }
  if (betas.empty())
    throw ConfigError("beta must not be empty");
  for (double b : betas)
    if (!(b > 0.0 && b <= 1.0))
      throw ConfigError("beta values must lie in (0, 1]");
  if (paths < 1)
    throw ConfigError("paths must be >= 1");
  if (times.empty())
    throw ConfigError("times must not be empty");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ConfigError("times must be finite and >= 0");
  if (!(grid_step > 0.0))
    throw ConfigError("grid_step must be positive");
  if (increments < 1)
    throw ConfigError("increments must be >= 1");
  if (lag < 1 || steps < lag)
    throw ConfigError("need 1 <= lag <= steps");
  if (!(ks_gate > 0.0 && ks_gate <= 1.0))
    throw ConfigError("ks_gate must lie in (0, 1]");
  if (!(significance > 0.0 && significance < 1.0))
    throw ConfigError("significance must lie in (0, 1)");
  if (output_dir.empty())
    throw ConfigError("output_dir must not be empty");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "schema_version = " << schema_version << '\n';
  os << "study = \"" << to_string(study) << "\"\n";
  std::vector<std::string> kind_names;
  for (DiffusionKind k : kinds)
    kind_names.emplace_back(to_string(k));
  os << "kind = " << join(kind_names) << '\n';
  if (cp)
    os << "theta = " << cp->theta << "\na = " << cp->a << "\nb = " << cp->b << "\nd = " << cp->d
       << '\n';
  os << "beta = " << join(betas) << '\n';
  os << "n_list = " << join(n_list) << '\n';
  os << "paths = " << paths << '\n';
  os << "times = " << join(times) << '\n';
  os << "seed = " << seed << '\n';
  if (x0)
    os << "x0 = " << *x0 << '\n';
  os << "law = \"" << to_string(law) << "\"\n";
  os << "grid_step = " << grid_step << '\n';
  os << "s_values = " << join(s_values) << '\n';
  os << "increments = " << increments << '\n';
  os << "steps = " << steps << '\n';
  os << "lag = " << lag << '\n';
  os << "ks_gate = " << ks_gate << '\n';
  os << "significance = " << significance << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ExperimentConfig parse_config(std::string_view text) {
  const auto kv = parse_key_values(text);
  ExperimentConfig cfg;
  std::set<std::string> seen;
  auto take = [&](const char* key) -> const ConfigValue* {
    const auto it = kv.find(key);
    if (it == kv.end())
      return nullptr;
    seen.insert(key);
    return &it->second;
  };

  if (const auto* v = take("schema_version"))
    cfg.schema_version = static_cast<int>(as_integer("schema_version", *v));
  const auto* study = take("study");
  if (!study)
    throw ConfigError("missing required key 'study'");
  cfg.study = parse_study(as_string("study", *study));

  if (const auto* v = take("kind")) {
    const auto names = as_strings("kind", *v);
    cfg.kinds.clear();
    for (const auto& name : names) {
      if (name == "all") {
        cfg.kinds = {DiffusionKind::OU, DiffusionKind::Jacobi, DiffusionKind::CIR};
        if (names.size() != 1)
          throw ConfigError("kind = \"all\" cannot be combined with other kinds");
        break;
      }
      try {
        cfg.kinds.push_back(parse_kind(name));
      } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
      }
    }
  }

  const char* param_keys[] = {"theta", "a", "b", "d"};
  bool any_param = false;
  for (const char* k : param_keys)
    any_param = any_param || kv.count(k);
  if (any_param) {
    if (cfg.kinds.size() != 1)
      throw ConfigError("theta/a/b/d can only be set for a single kind");
    ChainParams cp = default_chain_params(cfg.kinds.front());
    if (const auto* v = take("theta"))
      cp.theta = as_number("theta", *v);
    if (const auto* v = take("a"))
      cp.a = as_number("a", *v);
    if (const auto* v = take("b"))
      cp.b = as_number("b", *v);
    if (const auto* v = take("d"))
      cp.d = as_number("d", *v);
    cfg.cp = cp;
  }

  if (const auto* v = take("beta"))
    cfg.betas = as_numbers("beta", *v);
  if (const auto* v = take("n_list")) {
    cfg.n_list.clear();
    for (double x : as_numbers("n_list", *v)) {
      if (x != std::floor(x) || x < 1 || x > std::numeric_limits<int>::max())
        throw ConfigError("n_list entries must be positive integers");
      cfg.n_list.push_back(static_cast<int>(x));
    }
  }
  if (const auto* v = take("paths"))
    cfg.paths = as_count("paths", *v);
  if (const auto* v = take("times"))
    cfg.times = as_numbers("times", *v);
  if (const auto* v = take("seed"))
    cfg.seed = static_cast<std::uint64_t>(as_count("seed", *v));
  if (const auto* v = take("output_dir"))
    cfg.output_dir = as_string("output_dir", *v);
  if (const auto* v = take("x0"))
    cfg.x0 = as_number("x0", *v);
  if (const auto* v = take("law")) {
    try {
      cfg.law = parse_waiting_law(as_string("law", *v));
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
  if (const auto* v = take("workers"))
    cfg.workers = static_cast<unsigned>(as_count("workers", *v));
  if (const auto* v = take("grid_step"))
    cfg.grid_step = as_number("grid_step", *v);
  if (const auto* v = take("s_values"))
    cfg.s_values = as_numbers("s_values", *v);
  if (const auto* v = take("increments"))
    cfg.increments = static_cast<int>(as_integer("increments", *v));
  if (const auto* v = take("steps"))
    cfg.steps = as_count("steps", *v);
  if (const auto* v = take("lag"))
    cfg.lag = as_count("lag", *v);
  if (const auto* v = take("ks_gate"))
    cfg.ks_gate = as_number("ks_gate", *v);
  if (const auto* v = take("significance"))
    cfg.significance = as_number("significance", *v);

  for (const auto& [key, value] : kv)
    if (!seen.count(key))
      throw ConfigError("unknown config key '" + key + "'");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::string* raw_text) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (raw_text)
    *raw_text = buf.str();
  return parse_config(buf.str());
}

} // namespace fpdwalk
