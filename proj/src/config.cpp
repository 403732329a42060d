#include "uavsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& raw, const std::string& key) {
  const std::string value = trim(raw);
  const auto slash = value.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(value.substr(0, slash));
      const double den = std::stod(value.substr(slash + 1));
      if (den == 0.0) throw std::runtime_error("zero denominator");
      return num / den;
    }
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::runtime_error("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': cannot parse number '" +
                             value + "'");
  }
}

long long parse_int(const std::string& raw, const std::string& key) {
  const double v = parse_number(raw, key);
  const long long i = static_cast<long long>(v);
  if (static_cast<double>(i) != v) {
    throw std::runtime_error("config key '" + key + "': expected an integer, got '" +
                             trim(raw) + "'");
  }
  return i;
}

// "lo-hi:ratio[,lo-hi:ratio...]"
std::vector<TadRule::Range> parse_tad_rules(const std::string& raw,
                                            const std::string& key) {
  std::vector<TadRule::Range> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const auto dash = item.find('-');
    if (colon == std::string::npos || dash == std::string::npos ||
        dash > colon) {
      throw std::runtime_error("config key '" + key +
                               "': expected lo-hi:ratio, got '" + item + "'");
    }
    TadRule::Range r;
    r.lo = static_cast<ContentId>(parse_int(item.substr(0, dash), key));
    r.hi = static_cast<ContentId>(
        parse_int(item.substr(dash + 1, colon - dash - 1), key));
    r.ratio = parse_number(item.substr(colon + 1), key);
    out.push_back(r);
  }
  return out;
}

using Setter = std::function<void(SimConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"catalog_size",
       [](SimConfig& c, const std::string& v) {
         c.catalog_size = static_cast<int>(parse_int(v, "catalog_size"));
       }},
      {"zipf_alpha",
       [](SimConfig& c, const std::string& v) {
         c.zipf_alpha = parse_number(v, "zipf_alpha");
       }},
      {"n_anchor",
       [](SimConfig& c, const std::string& v) {
         c.n_anchor = static_cast<int>(parse_int(v, "n_anchor"));
       }},
      {"n_ferry",
       [](SimConfig& c, const std::string& v) {
         c.n_ferry = static_cast<int>(parse_int(v, "n_ferry"));
       }},
      {"ferry_group_size",
       [](SimConfig& c, const std::string& v) {
         c.ferry_group_size =
             static_cast<int>(parse_int(v, "ferry_group_size"));
       }},
      {"anchor_capacity",
       [](SimConfig& c, const std::string& v) {
         c.anchor_capacity = static_cast<int>(parse_int(v, "anchor_capacity"));
       }},
      {"ferry_capacity",
       [](SimConfig& c, const std::string& v) {
         c.ferry_capacity = static_cast<int>(parse_int(v, "ferry_capacity"));
       }},
      {"request_rate",
       [](SimConfig& c, const std::string& v) {
         c.request_rate = parse_number(v, "request_rate");
       }},
      {"hover_ratio",
       [](SimConfig& c, const std::string& v) {
         c.hover_ratio = parse_number(v, "hover_ratio");
       }},
      {"transit_ratio",
       [](SimConfig& c, const std::string& v) {
         c.transit_ratio = parse_number(v, "transit_ratio");
       }},
      {"trajectory_period",
       [](SimConfig& c, const std::string& v) {
         c.trajectory_period = parse_number(v, "trajectory_period");
       }},
      {"policy",
       [](SimConfig& c, const std::string& v) { c.policy = parse_policy(trim(v)); }},
      {"lambda",
       [](SimConfig& c, const std::string& v) {
         c.lambda = parse_number(v, "lambda");
       }},
      {"kappa",
       [](SimConfig& c, const std::string& v) {
         c.kappa = parse_number(v, "kappa");
       }},
      {"learn_rate",
       [](SimConfig& c, const std::string& v) {
         c.learn_rate = parse_number(v, "learn_rate");
       }},
      {"zeta_ucb",
       [](SimConfig& c, const std::string& v) {
         c.zeta_ucb = parse_number(v, "zeta_ucb");
       }},
      {"epsilon0",
       [](SimConfig& c, const std::string& v) {
         c.epsilon0 = parse_number(v, "epsilon0");
       }},
      {"epsilon_decay",
       [](SimConfig& c, const std::string& v) {
         c.epsilon_decay = parse_number(v, "epsilon_decay");
       }},
      {"epsilon_floor",
       [](SimConfig& c, const std::string& v) {
         c.epsilon_floor = parse_number(v, "epsilon_floor");
       }},
      {"beta_decay",
       [](SimConfig& c, const std::string& v) {
         c.federation.beta_decay = parse_number(v, "beta_decay");
       }},
      {"beta_scale",
       [](SimConfig& c, const std::string& v) {
         c.federation.beta_scale = parse_number(v, "beta_scale");
       }},
      {"latency_threshold",
       [](SimConfig& c, const std::string& v) {
         c.federation.latency_threshold =
             static_cast<int>(parse_int(v, "latency_threshold"));
       }},
      {"omega1_mode",
       [](SimConfig& c, const std::string& v) {
         const std::string mode = trim(v);
         if (mode == "fixed") {
           c.federation.omega1_mode = Omega1Mode::fixed;
         } else if (mode == "adaptive") {
           c.federation.omega1_mode = Omega1Mode::adaptive;
         } else {
           throw std::runtime_error(
               "config key 'omega1_mode': expected fixed or adaptive, got '" +
               mode + "'");
         }
       }},
      {"omega1_fixed",
       [](SimConfig& c, const std::string& v) {
         c.federation.omega1_fixed = parse_number(v, "omega1_fixed");
       }},
      {"swap_probability",
       [](SimConfig& c, const std::string& v) {
         c.swap_probability = parse_number(v, "swap_probability");
       }},
      {"sw_min_distance",
       [](SimConfig& c, const std::string& v) {
         c.sw_min_distance = parse_number(v, "sw_min_distance");
       }},
      {"tad_default_ratio",
       [](SimConfig& c, const std::string& v) {
         c.tad_rule.default_ratio = parse_number(v, "tad_default_ratio");
       }},
      {"tad_rules",
       [](SimConfig& c, const std::string& v) {
         c.tad_rule.overrides = parse_tad_rules(v, "tad_rules");
       }},
      {"shift_time",
       [](SimConfig& c, const std::string& v) {
         c.shift_time = parse_number(v, "shift_time");
       }},
      {"shift_swap_probability",
       [](SimConfig& c, const std::string& v) {
         c.shift_swap_probability = parse_number(v, "shift_swap_probability");
       }},
      {"shift_zipf_alpha",
       [](SimConfig& c, const std::string& v) {
         c.shift_zipf_alpha = parse_number(v, "shift_zipf_alpha");
       }},
      {"comm_overlap",
       [](SimConfig& c, const std::string& v) {
         c.comm_overlap = parse_number(v, "comm_overlap");
       }},
      {"duration",
       [](SimConfig& c, const std::string& v) {
         c.duration = parse_number(v, "duration");
       }},
      {"max_epochs",
       [](SimConfig& c, const std::string& v) {
         c.max_epochs = parse_int(v, "max_epochs");
       }},
      {"seed",
       [](SimConfig& c, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(parse_int(v, "seed"));
       }},
  };
  return table;
}

void set_key(SimConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
  it->second(cfg, value);
}

} // namespace

SimConfig default_config() { return SimConfig{}; }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::runtime_error("override '" + assignment +
                             "' is not of the form key=value");
  }
  set_key(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides) {
  SimConfig cfg = default_config();
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config parse error at line " +
                               std::to_string(line_no) +
                               ": expected key = value");
    }
    try {
      set_key(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::exception& e) {
      throw std::runtime_error("config parse error at line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(cfg, o);
  return cfg;
}

SimConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), overrides);
}

void apply_preset(SimConfig& cfg, const std::string& name) {
  if (name == "desk") {
    cfg.catalog_size = 500;
    cfg.anchor_capacity = 50;
    cfg.ferry_capacity = 10;
    cfg.duration = 25000.0;
    return;
  }
  throw std::runtime_error("unknown preset '" + name + "'");
}

} // namespace uavsim
