#include "bee/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace bee {

const Mention* Sentence::find_mention(const std::string& id) const {
  for (const auto& m : mentions)
    if (m.id == id) return &m;
  return nullptr;
}

std::vector<Mention> Sentence::entities() const {
  std::vector<Mention> out;
  for (const auto& m : mentions)
    if (m.kind == MentionKind::entity) out.push_back(m);
  return out;
}

std::vector<Mention> Sentence::triggers() const {
  std::vector<Mention> out;
  for (const auto& m : mentions)
    if (m.kind == MentionKind::trigger) out.push_back(m);
  return out;
}

namespace {

bool spans_overlap(const Mention& a, const Mention& b) {
  return a.token_start <= b.token_end && b.token_start <= a.token_end;
}

// Overlap priority: longer span first, then entity over trigger, then span
// order, then id. Greedy keeping in this order realizes the tie-break rule.
bool overlap_priority(const Mention& a, const Mention& b) {
  if (a.length() != b.length()) return a.length() > b.length();
  if (a.kind != b.kind) return a.kind == MentionKind::entity;
  if (a.token_start != b.token_start) return a.token_start < b.token_start;
  return a.id < b.id;
}

}  // namespace

TagSequence encode_tags(const Sentence& s) {
  TagSequence out;
  out.tags.assign(s.tokens.size(), "O");

  std::vector<const Mention*> order;
  for (const auto& m : s.mentions) order.push_back(&m);
  std::stable_sort(order.begin(), order.end(),
                   [](const Mention* a, const Mention* b) { return overlap_priority(*a, *b); });

  std::vector<const Mention*> kept;
  for (const Mention* m : order) {
    bool clash = std::any_of(kept.begin(), kept.end(),
                             [&](const Mention* k) { return spans_overlap(*m, *k); });
    if (clash)
      ++out.dropped_mentions;
    else
      kept.push_back(m);
  }

  for (const Mention* m : kept) {
    out.tags[m->token_start] = "B-" + m->label;
    for (int i = m->token_start + 1; i <= m->token_end; ++i) out.tags[i] = "I-" + m->label;
  }
  return out;
}

std::vector<CandidatePair> generate_candidate_pairs(const Sentence& s,
                                                    const std::vector<Mention>& triggers,
                                                    const std::vector<Mention>& mentions) {
  // gold (trigger id, arg id) -> role
  std::unordered_map<std::string, std::string> gold;
  for (const auto& ev : s.events)
    for (const auto& arg : ev.args) gold[ev.trigger_id + "\t" + arg.arg_id] = arg.role;

  auto span_less = [](const Mention& a, const Mention& b) {
    if (a.token_start != b.token_start) return a.token_start < b.token_start;
    if (a.token_end != b.token_end) return a.token_end < b.token_end;
    return a.id < b.id;
  };
  std::vector<Mention> heads = triggers;
  std::vector<Mention> deps = mentions;
  std::sort(heads.begin(), heads.end(), span_less);
  std::sort(deps.begin(), deps.end(), span_less);

  std::vector<CandidatePair> out;
  for (const auto& h : heads) {
    for (const auto& d : deps) {
      if (d.id == h.id) continue;
      CandidatePair p;
      p.head_mention = h.id;
      p.dep_mention = d.id;
      auto it = gold.find(h.id + "\t" + d.id);
      p.gold_role = it == gold.end() ? NONE_ROLE : it->second;
      out.push_back(std::move(p));
    }
  }
  return out;
}

bool TypeInventory::is_entity_type(const std::string& t) const {
  return std::find(entity_types.begin(), entity_types.end(), t) != entity_types.end();
}

bool TypeInventory::is_trigger_type(const std::string& t) const {
  return std::find(trigger_types.begin(), trigger_types.end(), t) != trigger_types.end();
}

TypeInventory collect_inventory(const std::vector<Sentence>& corpus) {
  std::set<std::string> ents, trigs, roles;
  for (const auto& s : corpus) {
    for (const auto& m : s.mentions)
      (m.kind == MentionKind::entity ? ents : trigs).insert(m.label);
    for (const auto& ev : s.events)
      for (const auto& a : ev.args) roles.insert(a.role);
  }
  TypeInventory inv;
  inv.entity_types.assign(ents.begin(), ents.end());
  inv.trigger_types.assign(trigs.begin(), trigs.end());
  inv.roles.assign(roles.begin(), roles.end());
  return inv;
}

std::vector<std::string> build_tag_vocabulary(const TypeInventory& inv) {
  std::vector<std::string> vocab{"O"};
  for (const auto& t : inv.entity_types) {
    vocab.push_back("B-" + t);
    vocab.push_back("I-" + t);
  }
  for (const auto& t : inv.trigger_types) {
    vocab.push_back("B-" + t);
    vocab.push_back("I-" + t);
  }
  return vocab;
}

std::vector<std::string> build_role_vocabulary(const TypeInventory& inv) {
  std::vector<std::string> vocab{NONE_ROLE};
  for (const auto& r : inv.roles) vocab.push_back(r);
  return vocab;
}

}  // namespace bee
