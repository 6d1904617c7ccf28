#include "bee/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "bee/transformer.hpp"

namespace bee {

using nlohmann::json;

namespace {

json sub_to_json(const SubMetrics& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

SubMetrics sub_from_json(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

json report_to_json(const MetricsReport& r) {
  return json{{"TI", sub_to_json(r.ti)},
              {"TC", sub_to_json(r.tc)},
              {"AI", sub_to_json(r.ai)},
              {"AC", sub_to_json(r.ac)},
              {"total", r.total}};
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  r.ti = sub_from_json(j.at("TI"));
  r.tc = sub_from_json(j.at("TC"));
  r.ai = sub_from_json(j.at("AI"));
  r.ac = sub_from_json(j.at("AC"));
  r.total = j.at("total").get<double>();
  return r;
}

json epoch_to_json(const EpochMetrics& e) {
  return json{{"epoch", e.epoch},
              {"tag_loss", e.tag_loss},
              {"pair_loss", e.pair_loss},
              {"loss", e.loss},
              {"dev", report_to_json(e.dev)}};
}

EpochMetrics epoch_from_json(const json& j) {
  EpochMetrics e;
  e.epoch = j.at("epoch").get<int>();
  e.tag_loss = j.at("tag_loss").get<double>();
  e.pair_loss = j.at("pair_loss").get<double>();
  e.loss = j.at("loss").get<double>();
  e.dev = report_from_json(j.at("dev"));
  return e;
}

json strings_to_byte_arrays(const std::vector<std::string>& v) {
  json out = json::array();
  for (const std::string& s : v) {
    json arr = json::array();
    for (unsigned char c : s) arr.push_back(static_cast<int>(c));
    out.push_back(std::move(arr));
  }
  return out;
}

std::vector<std::string> byte_arrays_to_strings(const json& j) {
  std::vector<std::string> out;
  for (const json& arr : j) {
    std::string s;
    for (const json& c : arr) s.push_back(static_cast<char>(c.get<int>()));
    out.push_back(std::move(s));
  }
  return out;
}

constexpr char kMagic[8] = {'B', 'E', 'E', 'C', 'K', 'P', 'T', '1'};

}  // namespace

std::string metrics_history_to_json(const std::vector<EpochMetrics>& history) {
  json arr = json::array();
  for (const EpochMetrics& e : history) arr.push_back(epoch_to_json(e));
  return arr.dump(2) + "\n";
}

Checkpoint make_checkpoint(Model& m, const RunConfig& cfg, int epoch,
                           const std::vector<EpochMetrics>& history) {
  Checkpoint c;
  c.config = config_to_map(cfg);
  c.inventory = m.inventory;
  c.tag_vocab = m.tag_vocab;
  c.role_vocab = m.role_vocab;
  if (auto* tf = dynamic_cast<const TransformerEncoder*>(m.encoder.get()))
    c.encoder_vocab = tf->vocab();
  c.epoch = epoch;
  c.history = history;
  for (Param* p : m.all_params()) c.tensors.emplace_back(p->name, p->value);
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open checkpoint file for writing: " + path);

  json header;
  header["config"] = c.config;
  header["inventory"] = {{"entity_types", c.inventory.entity_types},
                         {"trigger_types", c.inventory.trigger_types},
                         {"roles", c.inventory.roles}};
  header["tag_vocab"] = c.tag_vocab;
  header["role_vocab"] = c.role_vocab;
  if (!c.encoder_vocab.empty())
    header["encoder_vocab_bytes"] = strings_to_byte_arrays(c.encoder_vocab);
  header["epoch"] = c.epoch;
  json hist = json::array();
  for (const EpochMetrics& e : c.history) hist.push_back(epoch_to_json(e));
  header["history"] = std::move(hist);
  json index = json::array();
  for (const auto& [name, m] : c.tensors)
    index.push_back({{"name", name}, {"rows", m.rows}, {"cols", m.cols}});
  header["tensors"] = std::move(index);

  const std::string hs = header.dump();
  out.write(kMagic, 8);
  const uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, m] : c.tensors)
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!out) throw ParseError("short write to checkpoint file " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint file " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("bad checkpoint magic in " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ParseError("checkpoint header truncated in " + path);
  json header = json::parse(hs);

  Checkpoint c;
  c.config = header.at("config").get<std::map<std::string, std::string>>();
  const json& inv = header.at("inventory");
  c.inventory.entity_types = inv.at("entity_types").get<std::vector<std::string>>();
  c.inventory.trigger_types = inv.at("trigger_types").get<std::vector<std::string>>();
  c.inventory.roles = inv.at("roles").get<std::vector<std::string>>();
  c.tag_vocab = header.at("tag_vocab").get<std::vector<std::string>>();
  c.role_vocab = header.at("role_vocab").get<std::vector<std::string>>();
  if (header.contains("encoder_vocab_bytes"))
    c.encoder_vocab = byte_arrays_to_strings(header.at("encoder_vocab_bytes"));
  c.epoch = header.at("epoch").get<int>();
  for (const json& e : header.at("history")) c.history.push_back(epoch_from_json(e));

  for (const json& t : header.at("tensors")) {
    Matrix m(t.at("rows").get<int>(), t.at("cols").get<int>());
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    c.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
  }
  if (!in) throw ParseError("checkpoint tensor data truncated in " + path);
  return c;
}

Model model_from_checkpoint(const Checkpoint& c) {
  RunConfig cfg = config_from_map(c.config);
  // Tensors carry the full state; never re-read the original weights file.
  cfg.encoder_model_name.clear();
  Model m = build_model(cfg, c.inventory, c.encoder_vocab.empty() ? nullptr : &c.encoder_vocab);
  if (m.tag_vocab != c.tag_vocab || m.role_vocab != c.role_vocab)
    throw IncompatibilityError("checkpoint vocabularies do not match the stored inventory");

  std::map<std::string, const Matrix*> by_name;
  for (const auto& [name, mat] : c.tensors) by_name[name] = &mat;
  std::string missing;
  for (Param* p : m.all_params()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      missing += missing.empty() ? p->name : ", " + p->name;
      continue;
    }
    if (!p->value.same_shape(*it->second))
      throw IncompatibilityError("checkpoint tensor '" + p->name + "' has shape " +
                                 std::to_string(it->second->rows) + "x" +
                                 std::to_string(it->second->cols) + ", model expects " +
                                 std::to_string(p->value.rows) + "x" +
                                 std::to_string(p->value.cols));
    p->value = *it->second;
  }
  if (!missing.empty())
    throw IncompatibilityError("checkpoint is missing tensors: " + missing);
  return m;
}

}  // namespace bee
