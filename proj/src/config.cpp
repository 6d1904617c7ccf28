#include "bee/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "bee/errors.hpp"

namespace bee {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_value(const std::string& key, const std::string& v);

template <>
std::string parse_value<std::string>(const std::string&, const std::string& v) {
  return v;
}

template <>
int parse_value<int>(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

template <>
uint64_t parse_value<uint64_t>(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
  }
}

template <>
double parse_value<double>(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': expected number, got '" + v + "'");
  }
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const std::unordered_map<std::string, Field>& fields() {
  static const std::unordered_map<std::string, Field> table = [] {
    std::unordered_map<std::string, Field> t;
    auto str = [&](const std::string& key, std::string RunConfig::*member) {
      t[key] = {[key, member](RunConfig& c, const std::string& v) {
                  c.*member = parse_value<std::string>(key, v);
                },
                [member](const RunConfig& c) { return c.*member; }};
    };
    auto num = [&](const std::string& key, int RunConfig::*member) {
      t[key] = {[key, member](RunConfig& c, const std::string& v) {
                  c.*member = parse_value<int>(key, v);
                },
                [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    auto dbl = [&](const std::string& key, double RunConfig::*member) {
      t[key] = {[key, member](RunConfig& c, const std::string& v) {
                  c.*member = parse_value<double>(key, v);
                },
                [member](const RunConfig& c) { return format_double(c.*member); }};
    };

    str("data.train", &RunConfig::train_path);
    str("data.dev", &RunConfig::dev_path);
    str("data.test", &RunConfig::test_path);
    str("data.train_parses", &RunConfig::train_parses);
    str("data.dev_parses", &RunConfig::dev_parses);
    str("data.test_parses", &RunConfig::test_parses);
    str("encoder.kind", &RunConfig::encoder_kind);
    str("encoder.model_name", &RunConfig::encoder_model_name);
    str("encoder.train_scope", &RunConfig::train_scope);
    num("encoder.max_len", &RunConfig::encoder_max_len);
    num("encoder.dim", &RunConfig::encoder_dim);
    num("encoder.n_heads", &RunConfig::encoder_n_heads);
    num("encoder.n_layers", &RunConfig::encoder_n_layers);
    num("encoder.ff_dim", &RunConfig::encoder_ff_dim);
    t["gnn.enabled"] = {[](RunConfig& c, const std::string& v) {
                          c.gnn_enabled = parse_value<bool>("gnn.enabled", v);
                        },
                        [](const RunConfig& c) { return c.gnn_enabled ? "true" : "false"; }};
    num("gnn.hidden_dim", &RunConfig::gnn_hidden_dim);
    num("mlp.hidden_dim", &RunConfig::mlp_hidden_dim);
    num("mlp.out_dim", &RunConfig::mlp_out_dim);
    str("head.mode", &RunConfig::head_mode);
    dbl("train.lr", &RunConfig::lr);
    dbl("train.encoder_lr", &RunConfig::encoder_lr);
    num("train.epochs", &RunConfig::epochs);
    num("train.batch_size", &RunConfig::batch_size);
    dbl("train.lambda", &RunConfig::lambda);
    t["seed"] = {[](RunConfig& c, const std::string& v) {
                   c.seed = parse_value<uint64_t>("seed", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    str("output_dir", &RunConfig::output_dir);
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end())
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second.set(cfg, value);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> config_to_map(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
  return out;
}

RunConfig config_from_map(const std::map<std::string, std::string>& entries) {
  RunConfig cfg;
  for (const auto& [key, value] : entries) {
    auto it = fields().find(key);
    if (it == fields().end()) throw ParseError("unknown config key '" + key + "'");
    it->second.set(cfg, value);
  }
  return cfg;
}

}  // namespace bee
