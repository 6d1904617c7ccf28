#include "bee/standoff.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace bee {

namespace {

struct RawSpan {
  std::string id;
  std::string type;
  int start = 0;
  int end = 0;
};

struct RawEvent {
  std::string id;
  std::string type;
  std::string trigger;               // T-id
  std::vector<std::pair<std::string, std::string>> args;  // (role, T/E-id)
};

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// T-line: `Tn<TAB>Type start end<TAB>text`. Falls back to whitespace fields
// when the line carries no tab.
RawSpan parse_t_line(const std::string& line, const char* file, int lineno) {
  auto err = [&](const std::string& why) {
    return ParseError(std::string(file) + " line " + std::to_string(lineno) + ": " + why);
  };
  std::string id, mid;
  auto tab1 = line.find('\t');
  if (tab1 != std::string::npos) {
    id = line.substr(0, tab1);
    auto tab2 = line.find('\t', tab1 + 1);
    mid = tab2 == std::string::npos ? line.substr(tab1 + 1) : line.substr(tab1 + 1, tab2 - tab1 - 1);
  } else {
    auto fields = split_ws(line);
    if (fields.size() < 4) throw err("T-line needs id, type, start, end");
    id = fields[0];
    mid = fields[1] + " " + fields[2] + " " + fields[3];
  }
  auto parts = split_ws(mid);
  if (parts.size() != 3) throw err("expected 'Type start end', got '" + mid + "'");
  RawSpan s;
  s.id = id;
  s.type = parts[0];
  try {
    size_t p1 = 0, p2 = 0;
    s.start = std::stoi(parts[1], &p1);
    s.end = std::stoi(parts[2], &p2);
    if (p1 != parts[1].size() || p2 != parts[2].size()) throw std::invalid_argument("");
  } catch (...) {
    throw err("non-integer offsets '" + parts[1] + " " + parts[2] + "'");
  }
  if (s.start >= s.end) throw err("empty or inverted span");
  return s;
}

RawEvent parse_e_line(const std::string& line, int lineno) {
  auto err = [&](const std::string& why) {
    return ParseError("a2 line " + std::to_string(lineno) + ": " + why);
  };
  auto tab = line.find('\t');
  std::string id = tab == std::string::npos ? split_ws(line)[0] : line.substr(0, tab);
  std::string rest = tab == std::string::npos
                         ? line.substr(line.find_first_of(" \t") + 1)
                         : line.substr(tab + 1);
  auto fields = split_ws(rest);
  if (fields.empty()) throw err("E-line without trigger");
  RawEvent ev;
  ev.id = id;
  for (size_t i = 0; i < fields.size(); ++i) {
    auto colon = fields[i].find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == fields[i].size())
      throw err("malformed Role:Ref pair '" + fields[i] + "'");
    std::string role = fields[i].substr(0, colon);
    std::string ref = fields[i].substr(colon + 1);
    if (i == 0) {
      ev.type = role;
      ev.trigger = ref;
    } else {
      ev.args.emplace_back(role, ref);
    }
  }
  return ev;
}

}  // namespace

std::vector<Sentence> load_standoff(const std::string& txt, const std::string& a1,
                                    const std::string& a2, const std::string& doc_id,
                                    const std::vector<std::pair<int, int>>& boundaries,
                                    StandoffStats* stats) {
  // Sentence ranges.
  std::vector<std::pair<int, int>> ranges = boundaries;
  if (ranges.empty()) {
    int start = 0;
    for (int i = 0; i <= static_cast<int>(txt.size()); ++i) {
      if (i == static_cast<int>(txt.size()) || txt[i] == '\n') {
        if (i > start) ranges.emplace_back(start, i);
        start = i + 1;
      }
    }
  }

  // Whitespace tokenization inside each range, keeping document offsets.
  std::vector<Sentence> sentences;
  for (const auto& [rs, re] : ranges) {
    Sentence s;
    s.doc_id = doc_id;
    int i = rs;
    while (i < re) {
      while (i < re && std::isspace(static_cast<unsigned char>(txt[i]))) ++i;
      if (i >= re) break;
      int j = i;
      while (j < re && !std::isspace(static_cast<unsigned char>(txt[j]))) ++j;
      Token t;
      t.index = static_cast<int>(s.tokens.size());
      t.text = txt.substr(i, j - i);
      t.char_start = i;
      t.char_end = j;
      s.tokens.push_back(std::move(t));
      i = j;
    }
    if (!s.tokens.empty()) sentences.push_back(std::move(s));
  }

  // Parse annotation files.
  std::vector<RawSpan> entity_spans, trigger_spans;
  std::vector<RawEvent> raw_events;
  auto parse_file = [&](const std::string& content, const char* name, bool is_a2) {
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      switch (line[0]) {
        case 'T':
          (is_a2 ? trigger_spans : entity_spans).push_back(parse_t_line(line, name, lineno));
          break;
        case 'E':
          if (!is_a2) throw ParseError(std::string(name) + " line " + std::to_string(lineno) +
                                       ": E-line outside a2");
          raw_events.push_back(parse_e_line(line, lineno));
          break;
        case 'M':
        case 'A':
        case 'N':
        case '*':
          break;  // modifications / attributes / normalizations: not modeled
        default:
          throw ParseError(std::string(name) + " line " + std::to_string(lineno) +
                           ": unknown line type '" + line.substr(0, 1) + "'");
      }
    }
  };
  parse_file(a1, "a1", false);
  parse_file(a2, "a2", true);

  // Align spans to tokens; remember which sentence holds each mention.
  std::unordered_map<std::string, int> mention_sentence;
  auto align = [&](const RawSpan& sp, MentionKind kind) {
    for (size_t si = 0; si < sentences.size(); ++si) {
      auto& s = sentences[si];
      int tok_start = -1, tok_end = -1;
      for (const auto& t : s.tokens) {
        if (t.char_start == sp.start) tok_start = t.index;
        if (t.char_end == sp.end) tok_end = t.index;
      }
      if (tok_start >= 0 && tok_end >= 0) {
        if (tok_end < tok_start)
          throw AlignmentError("span " + sp.id + " [" + std::to_string(sp.start) + ", " +
                               std::to_string(sp.end) + ") inverted at token level");
        Mention m;
        m.id = sp.id;
        m.kind = kind;
        m.label = sp.type;
        m.token_start = tok_start;
        m.token_end = tok_end;
        s.mentions.push_back(std::move(m));
        mention_sentence[sp.id] = static_cast<int>(si);
        return;
      }
      // Span starts in this sentence but does not line up with token edges.
      if (sp.start >= s.tokens.front().char_start && sp.start < s.tokens.back().char_end)
        throw AlignmentError("span " + sp.id + " [" + std::to_string(sp.start) + ", " +
                             std::to_string(sp.end) + ") does not align to token boundaries");
    }
    throw AlignmentError("span " + sp.id + " [" + std::to_string(sp.start) + ", " +
                         std::to_string(sp.end) + ") outside every sentence");
  };
  for (const auto& sp : entity_spans) align(sp, MentionKind::entity);
  for (const auto& sp : trigger_spans) align(sp, MentionKind::trigger);

  // E-references resolve to the referenced event's trigger mention.
  std::unordered_map<std::string, std::string> event_trigger;
  for (const auto& ev : raw_events) event_trigger[ev.id] = ev.trigger;
  auto resolve = [&](const std::string& ref) -> std::string {
    if (!ref.empty() && ref[0] == 'E') {
      auto it = event_trigger.find(ref);
      if (it == event_trigger.end()) throw ReferenceError("dangling event reference " + ref);
      return it->second;
    }
    return ref;
  };

  int dropped = 0;
  for (const auto& ev : raw_events) {
    auto tsit = mention_sentence.find(ev.trigger);
    if (tsit == mention_sentence.end()) throw ReferenceError("event " + ev.id + " trigger " + ev.trigger + " unknown");
    EventStructure es;
    es.trigger_id = ev.trigger;
    bool cross = false;
    for (const auto& [role, ref] : ev.args) {
      std::string arg_id = resolve(ref);
      auto asit = mention_sentence.find(arg_id);
      if (asit == mention_sentence.end()) throw ReferenceError("event " + ev.id + " argument " + ref + " unknown");
      if (asit->second != tsit->second) {
        cross = true;
        break;
      }
      es.args.push_back(EventArg{role, arg_id});
    }
    if (cross) {
      ++dropped;
      continue;
    }
    sentences[tsit->second].events.push_back(std::move(es));
  }
  if (stats) stats->dropped_cross_sentence_events = dropped;

  return sentences;
}

namespace {

std::string mention_text(const Sentence& s, const Mention& m) {
  std::string out;
  for (int i = m.token_start; i <= m.token_end; ++i) {
    if (i > m.token_start) out += " ";
    out += s.tokens[i].text;
  }
  return out;
}

std::string t_line(const std::string& id, const Sentence& s, const Mention& m) {
  std::ostringstream os;
  os << id << '\t' << m.label << ' ' << s.tokens[m.token_start].char_start << ' '
     << s.tokens[m.token_end].char_end << '\t' << mention_text(s, m) << '\n';
  return os.str();
}

}  // namespace

std::string write_a1(const std::vector<Sentence>& doc_sentences) {
  std::ostringstream os;
  int next = 1;
  for (const auto& s : doc_sentences)
    for (const auto& m : s.mentions)
      if (m.kind == MentionKind::entity) os << t_line("T" + std::to_string(next++), s, m);
  return os.str();
}

std::string write_a2(const std::vector<Sentence>& doc_sentences) {
  // Renumber triggers after the last entity id so T ids stay unique per doc.
  int next_t = 1;
  std::map<std::pair<int, std::string>, std::string> trigger_ids;  // (sentence, old id) -> new
  for (const auto& s : doc_sentences)
    for (const auto& m : s.mentions)
      if (m.kind == MentionKind::entity) ++next_t;

  std::ostringstream os;
  for (size_t si = 0; si < doc_sentences.size(); ++si)
    for (const auto& m : doc_sentences[si].mentions)
      if (m.kind == MentionKind::trigger) {
        std::string id = "T" + std::to_string(next_t++);
        trigger_ids[{static_cast<int>(si), m.id}] = id;
        os << t_line(id, doc_sentences[si], m);
      }

  // First event per trigger, for E-references to nested arguments.
  std::map<std::pair<int, std::string>, std::string> event_ids;
  int next_e = 1;
  for (size_t si = 0; si < doc_sentences.size(); ++si)
    for (const auto& ev : doc_sentences[si].events) {
      auto key = std::make_pair(static_cast<int>(si), ev.trigger_id);
      if (!event_ids.count(key)) event_ids[key] = "E" + std::to_string(next_e);
      ++next_e;
    }

  next_e = 1;
  for (size_t si = 0; si < doc_sentences.size(); ++si) {
    const auto& s = doc_sentences[si];
    for (const auto& ev : s.events) {
      const Mention* trig = s.find_mention(ev.trigger_id);
      if (!trig || trig->kind != MentionKind::trigger)
        throw ContractViolation("event trigger " + ev.trigger_id + " is not a trigger mention");
      os << "E" << next_e++ << '\t' << trig->label << ':'
         << trigger_ids.at({static_cast<int>(si), ev.trigger_id});
      for (const auto& a : ev.args) {
        auto evit = event_ids.find({static_cast<int>(si), a.arg_id});
        std::string ref;
        if (evit != event_ids.end()) {
          ref = evit->second;  // argument is itself a trigger of an event
        } else {
          const Mention* am = s.find_mention(a.arg_id);
          if (!am) throw ReferenceError("event argument " + a.arg_id + " unknown at write time");
          if (am->kind == MentionKind::trigger)
            ref = trigger_ids.at({static_cast<int>(si), a.arg_id});
          else {
            // Entity ids are renumbered by write_a1 in the same order.
            int id = 1;
            bool found = false;
            for (const auto& ds : doc_sentences) {
              for (const auto& m : ds.mentions) {
                if (m.kind != MentionKind::entity) continue;
                if (&ds == &s && m.id == a.arg_id) {
                  found = true;
                  break;
                }
                ++id;
              }
              if (found) break;
            }
            ref = "T" + std::to_string(id);
          }
        }
        os << ' ' << a.role << ':' << ref;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace bee
