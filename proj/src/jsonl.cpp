#include "bee/jsonl.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace bee {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open corpus file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& require(const json& obj, const char* key, int lineno) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError("jsonl line " + std::to_string(lineno) + ": missing field '" + key + "'");
  return *it;
}

std::vector<Mention> parse_mentions(const json& arr, MentionKind kind, int lineno, int n_tokens) {
  std::vector<Mention> out;
  for (const auto& jm : arr) {
    Mention m;
    m.kind = kind;
    m.id = require(jm, "id", lineno).get<std::string>();
    m.label = require(jm, "label", lineno).get<std::string>();
    m.token_start = require(jm, "start", lineno).get<int>();
    m.token_end = require(jm, "end", lineno).get<int>();
    if (m.token_start < 0 || m.token_end < m.token_start || m.token_end >= n_tokens)
      throw SchemaError("jsonl line " + std::to_string(lineno) + ": mention " + m.id +
                        " span out of range");
    out.push_back(std::move(m));
  }
  return out;
}

Sentence parse_record(const json& rec, int lineno) {
  Sentence s;
  s.doc_id = require(rec, "doc_id", lineno).get<std::string>();
  const auto& jtokens = require(rec, "tokens", lineno);
  const auto& jspans = require(rec, "char_spans", lineno);
  if (jtokens.size() != jspans.size())
    throw SchemaError("jsonl line " + std::to_string(lineno) + ": tokens/char_spans length mismatch");
  for (size_t i = 0; i < jtokens.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i);
    t.text = jtokens[i].get<std::string>();
    t.char_start = jspans[i][0].get<int>();
    t.char_end = jspans[i][1].get<int>();
    s.tokens.push_back(std::move(t));
  }

  auto ents = parse_mentions(require(rec, "entities", lineno), MentionKind::entity, lineno, s.size());
  auto trigs = parse_mentions(require(rec, "triggers", lineno), MentionKind::trigger, lineno, s.size());
  s.mentions = std::move(ents);
  s.mentions.insert(s.mentions.end(), trigs.begin(), trigs.end());

  std::unordered_set<std::string> ids;
  for (const auto& m : s.mentions)
    if (!ids.insert(m.id).second)
      throw SchemaError("jsonl line " + std::to_string(lineno) + ": duplicate mention id " + m.id);

  for (const auto& jev : require(rec, "events", lineno)) {
    EventStructure ev;
    ev.trigger_id = require(jev, "trigger_id", lineno).get<std::string>();
    if (!ids.count(ev.trigger_id))
      throw ReferenceError("jsonl line " + std::to_string(lineno) + ": event trigger " +
                           ev.trigger_id + " not among mentions");
    for (const auto& ja : require(jev, "args", lineno)) {
      EventArg a;
      a.role = ja[0].get<std::string>();
      a.arg_id = ja[1].get<std::string>();
      if (!ids.count(a.arg_id))
        throw ReferenceError("jsonl line " + std::to_string(lineno) + ": event argument " +
                             a.arg_id + " not among mentions");
      ev.args.push_back(std::move(a));
    }
    s.events.push_back(std::move(ev));
  }
  return s;
}

}  // namespace

std::vector<Sentence> parse_json_corpus(const std::string& text) {
  std::vector<Sentence> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(parse_record(rec, lineno));
  }
  return out;
}

std::vector<Sentence> load_json_corpus(const std::string& path) {
  return parse_json_corpus(read_file(path));
}

std::vector<std::optional<std::vector<DepEdge>>> parse_json_dep_edges(const std::string& text) {
  std::vector<std::optional<std::vector<DepEdge>>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
    auto it = rec.find("dep_edges");
    if (it == rec.end()) {
      out.emplace_back(std::nullopt);
      continue;
    }
    std::vector<DepEdge> edges;
    for (const auto& je : *it)
      edges.push_back(DepEdge{je[0].get<int>(), je[1].get<int>(), je[2].get<std::string>()});
    out.emplace_back(std::move(edges));
  }
  return out;
}

std::vector<std::optional<std::vector<DepEdge>>> load_json_dep_edges(const std::string& path) {
  return parse_json_dep_edges(read_file(path));
}

std::string sentence_to_json(const Sentence& s, const std::vector<DepEdge>* dep_edges) {
  json rec;
  rec["doc_id"] = s.doc_id;
  rec["tokens"] = json::array();
  rec["char_spans"] = json::array();
  for (const auto& t : s.tokens) {
    rec["tokens"].push_back(t.text);
    rec["char_spans"].push_back({t.char_start, t.char_end});
  }
  rec["entities"] = json::array();
  rec["triggers"] = json::array();
  for (const auto& m : s.mentions) {
    json jm{{"id", m.id}, {"label", m.label}, {"start", m.token_start}, {"end", m.token_end}};
    rec[m.kind == MentionKind::entity ? "entities" : "triggers"].push_back(std::move(jm));
  }
  rec["events"] = json::array();
  for (const auto& ev : s.events) {
    json jev{{"trigger_id", ev.trigger_id}, {"args", json::array()}};
    for (const auto& a : ev.args) jev["args"].push_back({a.role, a.arg_id});
    rec["events"].push_back(std::move(jev));
  }
  if (dep_edges) {
    rec["dep_edges"] = json::array();
    for (const auto& e : *dep_edges) rec["dep_edges"].push_back({e.head, e.dependent, e.relation});
  }
  return rec.dump();
}

std::string serialize_json_corpus(const std::vector<Sentence>& corpus) {
  std::string out;
  for (const auto& s : corpus) {
    out += sentence_to_json(s);
    out += '\n';
  }
  return out;
}

void save_json_corpus(const std::vector<Sentence>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open output file " + path);
  out << serialize_json_corpus(corpus);
}

}  // namespace bee
