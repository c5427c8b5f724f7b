#include "optstop/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "optstop/error.hpp"
#include "optstop/hash.hpp"

namespace optstop {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
  std::string buf(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ParameterError(fmt::format("expected a number, got '{}'", text));
  }
  if (used != buf.size() || !std::isfinite(v)) {
    throw ParameterError(fmt::format("expected a finite number, got '{}'", text));
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParameterError(fmt::format("expected a non-negative integer, got '{}'", text));
  }
  return v;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ParameterError(fmt::format("expected true or false, got '{}'", text));
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string_view to_string(LsMode m) {
  switch (m) {
    case LsMode::automatic:
      return "auto";
    case LsMode::on:
      return "true";
    case LsMode::off:
      return "false";
  }
  return "?";
}

LsMode parse_ls_mode(std::string_view text) {
  if (text == "auto") return LsMode::automatic;
  return parse_bool(text) ? LsMode::on : LsMode::off;
}

struct Field {
  std::string_view name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

template <typename T>
std::string opt_to_string(const std::optional<T>& v) {
  return v ? fmt_double(*v) : std::string{};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  using V = std::string_view;
  static const std::vector<Field> table = {
      {"model", [](const C& c) { return std::string(to_string(c.model)); },
       [](C& c, V v) { c.model = parse_reward_kind(v); }},
      {"dim", [](const C& c) { return std::to_string(c.dim); },
       [](C& c, V v) { c.dim = parse_uint(v); }},
      {"x0", [](const C& c) { return fmt_double(c.x0); },
       [](C& c, V v) { c.x0 = parse_double(v); }},
      {"drift", [](const C& c) { return fmt_double(c.drift); },
       [](C& c, V v) { c.drift = parse_double(v); }},
      {"maturity", [](const C& c) { return fmt_double(c.maturity); },
       [](C& c, V v) { c.maturity = parse_double(v); }},
      {"steps", [](const C& c) { return std::to_string(c.steps); },
       [](C& c, V v) { c.steps = parse_uint(v); }},
      {"vol_mode", [](const C& c) { return std::string(to_string(c.vol_mode)); },
       [](C& c, V v) { c.vol_mode = parse_vol_mode(v); }},
      {"sigma", [](const C& c) { return fmt_double(c.sigma); },
       [](C& c, V v) { c.sigma = parse_double(v); }},
      {"vols",
       [](const C& c) {
         std::string s;
         for (std::size_t i = 0; i < c.vols.size(); ++i) {
           if (i) s += ',';
           s += fmt_double(c.vols[i]);
         }
         return s;
       },
       [](C& c, V v) {
         c.vols.clear();
         std::string buf(v);
         std::stringstream in(buf);
         std::string item;
         while (std::getline(in, item, ',')) {
           if (!trim(item).empty()) c.vols.push_back(parse_double(trim(item)));
         }
       }},
      {"rate", [](const C& c) { return fmt_double(c.rate); },
       [](C& c, V v) { c.rate = parse_double(v); }},
      {"strike", [](const C& c) { return fmt_double(c.strike); },
       [](C& c, V v) { c.strike = parse_double(v); }},
      {"barrier", [](const C& c) { return fmt_double(c.barrier); },
       [](C& c, V v) { c.barrier = parse_double(v); }},
      {"k_train", [](const C& c) { return std::to_string(c.k_train); },
       [](C& c, V v) { c.k_train = parse_uint(v); }},
      {"k_test", [](const C& c) { return std::to_string(c.k_test); },
       [](C& c, V v) { c.k_test = parse_uint(v); }},
      {"seed_train", [](const C& c) { return std::to_string(c.seed_train); },
       [](C& c, V v) { c.seed_train = parse_uint(v); }},
      {"seed_test", [](const C& c) { return std::to_string(c.seed_test); },
       [](C& c, V v) { c.seed_test = parse_uint(v); }},
      {"seed_bagging", [](const C& c) { return std::to_string(c.seed_bagging); },
       [](C& c, V v) { c.seed_bagging = parse_uint(v); }},
      {"bags", [](const C& c) { return std::to_string(c.bags); },
       [](C& c, V v) { c.bags = parse_uint(v); }},
      {"max_depth", [](const C& c) { return std::to_string(c.max_depth); },
       [](C& c, V v) { c.max_depth = parse_uint(v); }},
      {"min_node_size", [](const C& c) { return std::to_string(c.min_node_size); },
       [](C& c, V v) { c.min_node_size = parse_uint(v); }},
      {"splitter", [](const C& c) { return std::string(to_string(c.splitter)); },
       [](C& c, V v) { c.splitter = parse_splitter(v); }},
      {"feature_mode", [](const C& c) { return std::string(to_string(c.feature_mode)); },
       [](C& c, V v) { c.feature_mode = parse_feature_mode(v); }},
      {"ls", [](const C& c) { return std::string(to_string(c.ls)); },
       [](C& c, V v) { c.ls = parse_ls_mode(v); }},
      {"boundary", [](const C& c) { return std::string(c.boundary ? "true" : "false"); },
       [](C& c, V v) { c.boundary = parse_bool(v); }},
      {"boundary_file", [](const C& c) { return c.boundary_file; },
       [](C& c, V v) { c.boundary_file = std::string(v); }},
      {"reference_v_test", [](const C& c) { return opt_to_string(c.reference_v_test); },
       [](C& c, V v) {
         c.reference_v_test = v.empty() ? std::nullopt : std::optional(parse_double(v));
       }},
      {"reference_ls_test", [](const C& c) { return opt_to_string(c.reference_ls_test); },
       [](C& c, V v) {
         c.reference_ls_test = v.empty() ? std::nullopt : std::optional(parse_double(v));
       }},
      {"out", [](const C& c) { return c.out; },
       [](C& c, V v) { c.out = std::string(v); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.name);
  return keys;
}

void ExperimentConfig::set(std::string_view key, std::string_view value,
                           std::string_view where) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Field& f) { return f.name == key; });
  const std::string prefix = where.empty() ? std::string{} : fmt::format("{}: ", where);
  if (it == table.end()) {
    throw ConfigError(fmt::format("{}unknown field '{}'", prefix, key));
  }
  try {
    it->set(*this, trim(value));
  } catch (const ParameterError& e) {
    throw ConfigError(fmt::format("{}field '{}': {}", prefix, key, e.what()));
  }
}

bool ExperimentConfig::run_ls() const {
  switch (ls) {
    case LsMode::on:
      return true;
    case LsMode::off:
      return false;
    case LsMode::automatic:
      return model == RewardKind::put && dim == 1;
  }
  return false;
}

GbmSpec ExperimentConfig::gbm_spec() const {
  GbmSpec g;
  g.dim = dim;
  g.x0 = x0;
  g.drift = drift;
  g.maturity = maturity;
  g.steps = steps;
  g.vol_mode = vol_mode;
  g.sigma_scalar = sigma;
  g.vols = vols;
  return g;
}

RewardSpec ExperimentConfig::reward_spec() const {
  RewardSpec r;
  r.kind = model;
  r.rate = rate;
  r.strike = strike;
  r.maturity = maturity;
  r.steps = steps;
  r.barrier = model == RewardKind::max_call_barrier ? barrier : 0.0;
  return r;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.bags = bags;
  t.grow.max_depth = max_depth;
  t.grow.min_node_size = min_node_size;
  t.grow.splitter = splitter;
  t.feature_mode = feature_mode;
  t.seed_bagging = seed_bagging;
  return t;
}

void ExperimentConfig::validate() const {
  auto fail = [](std::string_view field, const std::string& msg) {
    throw ConfigError(fmt::format("field '{}': {}", field, msg));
  };
  try {
    gbm_spec().validate();
    reward_spec().validate();
    train_config().validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (model == RewardKind::put && dim != 1) fail("dim", "the put model is one-dimensional");
  if (k_train < bags) fail("k_train", fmt::format("must be at least bags = {}", bags));
  if (k_test == 0) fail("k_test", "must be positive");
  const std::size_t state_dim = model == RewardKind::max_call_barrier ? dim + 1 : dim;
  try {
    (void)feature_dim(feature_mode, reward_spec(), state_dim);
  } catch (const Error& e) {
    fail("feature_mode", e.what());
  }
  if (ls == LsMode::on && !(model == RewardKind::put && dim == 1)) {
    throw UnsupportedError(
        "field 'ls': the Longstaff-Schwartz baseline supports the 1-D put only");
  }
  if (boundary && dim != 1) fail("boundary", "boundary extraction needs dim = 1");
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& f : fields()) out += fmt::format("{} = {}\n", f.name, f.get(*this));
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  ExperimentConfig copy = *this;
  copy.out.clear();
  return fnv1a64(copy.serialize());
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
             fmt::format("line {}", line_no));
    if (end == text.size()) break;
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("--set '{}': expected key=value", item));
    }
    config.set(trim(std::string_view(item).substr(0, eq)),
               std::string_view(item).substr(eq + 1), fmt::format("--set {}", item));
  }
}

}  // namespace optstop
