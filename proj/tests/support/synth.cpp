#include "synth.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "bee/jsonl.hpp"

namespace bee::synth {

std::vector<Token> make_tokens(const std::vector<std::string>& words) {
  std::vector<Token> out;
  int offset = 0;
  for (int i = 0; i < static_cast<int>(words.size()); ++i) {
    Token t;
    t.index = i;
    t.text = words[i];
    t.char_start = offset;
    t.char_end = offset + static_cast<int>(words[i].size());
    offset = t.char_end + 1;
    out.push_back(t);
  }
  return out;
}

namespace {

const std::vector<std::string> kOvfEntityTypes = {"Protein", "Gene", "Chemical", "Cell"};
const std::vector<std::string> kOvfEntityWords = {"p53", "brca1", "atp", "hela"};
const std::vector<std::string> kOvfTriggerTypes = {"Phosphorylation", "Binding", "Regulation"};
const std::vector<std::string> kOvfTriggerWords = {"phosphorylation", "binding", "regulation"};
const std::vector<std::string> kOvfRoles = {"Theme", "Cause", "Site", "Theme"};  // by entity type
const std::vector<std::string> kOvfFillers = {"the", "of", "by", "in"};

}  // namespace

SynthCorpus overfit_corpus(int n_sentences) {
  SynthCorpus out;
  for (int i = 0; i < n_sentences; ++i) {
    int ti = i % 3;
    int ei = i % 4;
    Sentence s;
    s.doc_id = "ovf" + std::to_string(i);
    s.tokens = make_tokens(
        {kOvfFillers[i % 4], kOvfTriggerWords[ti], kOvfFillers[(i + 1) % 4], kOvfEntityWords[ei]});
    s.mentions.push_back({"e0", MentionKind::entity, kOvfEntityTypes[ei], 3, 3});
    s.mentions.push_back({"t0", MentionKind::trigger, kOvfTriggerTypes[ti], 1, 1});
    s.events.push_back({"t0", {{kOvfRoles[ei], "e0"}}});
    out.sentences.push_back(s);
    out.edges.push_back({{1, 0, "dep"}, {1, 2, "dep"}, {1, 3, "dep"}});
  }
  return out;
}

namespace {

const std::vector<std::string> kAblTriggerTypes = {"Regulation", "Binding"};
const std::vector<std::vector<std::string>> kAblTriggerWords = {
    {"regulates", "controls", "modulates", "suppresses"},
    {"binds", "associates", "ligates", "docks"},
};
const std::vector<std::string> kAblEntityWords = {"traf2", "cbl",  "stat5", "jak1",
                                                  "ikba",  "cd28", "tcf1",  "gata3"};
const std::vector<std::string> kAblFillers = {"the", "with", "via", "upon", "during", "while"};

}  // namespace

SynthCorpus ablation_corpus(int n_sentences, uint64_t seed) {
  SynthCorpus out;
  Rng rng(seed);
  const int n_entities = 3;
  for (int i = 0; i < n_sentences; ++i) {
    Rng sr = rng.fork(static_cast<uint64_t>(i));
    int trig_type = sr.uniform_int(0, 1);
    std::string trig_word =
        kAblTriggerWords[trig_type][sr.uniform_int(0, static_cast<int>(kAblTriggerWords[trig_type].size()) - 1)];
    std::vector<std::string> ent_words(n_entities);
    for (auto& w : ent_words)
      w = kAblEntityWords[sr.uniform_int(0, static_cast<int>(kAblEntityWords.size()) - 1)];
    int attached = sr.uniform_int(0, n_entities - 1);

    // Units: one for the trigger, one per entity (entity + two fillers).
    // Shuffled independently of the attachment choice.
    std::vector<std::vector<std::string>> units;
    units.push_back({trig_word});
    for (int e = 0; e < n_entities; ++e)
      units.push_back({ent_words[e],
                       kAblFillers[sr.uniform_int(0, static_cast<int>(kAblFillers.size()) - 1)],
                       kAblFillers[sr.uniform_int(0, static_cast<int>(kAblFillers.size()) - 1)]});
    std::vector<int> order(units.size());
    std::iota(order.begin(), order.end(), 0);
    for (int k = static_cast<int>(order.size()) - 1; k > 0; --k)
      std::swap(order[k], order[sr.uniform_int(0, k)]);

    std::vector<std::string> words;
    int trig_tok = -1;
    std::vector<int> ent_tok(n_entities, -1), fill1(n_entities, -1), fill2(n_entities, -1);
    for (int u : order) {
      int base = static_cast<int>(words.size());
      for (const auto& w : units[u]) words.push_back(w);
      if (u == 0) {
        trig_tok = base;
      } else {
        ent_tok[u - 1] = base;
        fill1[u - 1] = base + 1;
        fill2[u - 1] = base + 2;
      }
    }

    Sentence s;
    s.doc_id = "abl" + std::to_string(i);
    s.tokens = make_tokens(words);
    for (int e = 0; e < n_entities; ++e)
      s.mentions.push_back(
          {"e" + std::to_string(e), MentionKind::entity, "Protein", ent_tok[e], ent_tok[e]});
    s.mentions.push_back({"t0", MentionKind::trigger, kAblTriggerTypes[trig_type], trig_tok, trig_tok});
    s.events.push_back({"t0", {{"Theme", "e" + std::to_string(attached)}}});

    std::vector<DepEdge> edges;
    for (int e = 0; e < n_entities; ++e) {
      if (e == attached) {
        edges.push_back({trig_tok, ent_tok[e], "dep"});
        edges.push_back({ent_tok[e], fill1[e], "dep"});
        edges.push_back({fill1[e], fill2[e], "dep"});
      } else {
        edges.push_back({ent_tok[e], fill1[e], "dep"});
        edges.push_back({fill1[e], fill2[e], "dep"});
        edges.push_back({fill2[e], trig_tok, "dep"});
      }
    }
    out.sentences.push_back(s);
    out.edges.push_back(edges);
  }
  return out;
}

void write_jsonl(const SynthCorpus& c, const std::string& path) {
  std::ofstream f(path);
  for (size_t i = 0; i < c.sentences.size(); ++i)
    f << sentence_to_json(c.sentences[i], &c.edges[i]) << "\n";
}

namespace {

const std::vector<std::string> kScEntityLabels = {"Protein", "Gene"};
const std::vector<std::string> kScTriggerLabels = {"Regulation", "Binding"};
const std::vector<std::string> kScRoles = {"Theme", "Cause"};

Sentence random_sentence(Rng& rng, const std::string& doc_id, const std::vector<Token>& tokens) {
  Sentence s;
  s.doc_id = doc_id;
  s.tokens = tokens;
  int n_mentions = rng.uniform_int(1, 5);
  for (int m = 0; m < n_mentions; ++m) {
    Mention mn;
    mn.id = "m" + std::to_string(m);
    bool trig = rng.uniform() < 0.45;
    mn.kind = trig ? MentionKind::trigger : MentionKind::entity;
    mn.label = trig ? kScTriggerLabels[rng.uniform_int(0, 1)] : kScEntityLabels[rng.uniform_int(0, 1)];
    mn.token_start = rng.uniform_int(0, static_cast<int>(tokens.size()) - 1);
    mn.token_end = std::min(mn.token_start + rng.uniform_int(0, 1),
                            static_cast<int>(tokens.size()) - 1);
    s.mentions.push_back(mn);
  }
  auto trigs = s.triggers();
  if (!trigs.empty()) {
    int n_events = rng.uniform_int(0, 3);
    for (int e = 0; e < n_events; ++e) {
      EventStructure ev;
      ev.trigger_id = trigs[rng.uniform_int(0, static_cast<int>(trigs.size()) - 1)].id;
      int n_args = rng.uniform_int(0, 2);
      for (int a = 0; a < n_args; ++a)
        ev.args.push_back({kScRoles[rng.uniform_int(0, 1)],
                           s.mentions[rng.uniform_int(0, static_cast<int>(s.mentions.size()) - 1)].id});
      s.events.push_back(ev);
    }
  }
  return s;
}

}  // namespace

ScorerInstance random_scorer_instance(Rng& rng) {
  std::vector<std::string> words;
  for (int i = 0; i < 8; ++i) words.push_back("w" + std::to_string(i));
  auto tokens = make_tokens(words);
  ScorerInstance inst;
  inst.gold = random_sentence(rng, "doc", tokens);

  if (rng.uniform() < 0.25) {
    inst.pred = random_sentence(rng, "doc", tokens);
    return inst;
  }

  // Perturb gold: move/retype/drop mentions, then keep events whose references
  // survive, with occasional role changes and one optional spurious event.
  Sentence p;
  p.doc_id = inst.gold.doc_id;
  p.tokens = tokens;
  std::vector<std::string> kept_of(inst.gold.mentions.size());
  for (size_t m = 0; m < inst.gold.mentions.size(); ++m) {
    if (rng.uniform() < 0.12) continue;  // dropped
    Mention mn = inst.gold.mentions[m];
    mn.id = "p" + std::to_string(m);
    if (rng.uniform() < 0.2) {
      mn.token_start = std::max(0, std::min(mn.token_start + rng.uniform_int(-1, 1), 7));
      mn.token_end = std::max(mn.token_start, std::min(mn.token_end, 7));
    }
    if (rng.uniform() < 0.15)
      mn.label = mn.kind == MentionKind::trigger ? kScTriggerLabels[rng.uniform_int(0, 1)]
                                                 : kScEntityLabels[rng.uniform_int(0, 1)];
    kept_of[m] = mn.id;
    p.mentions.push_back(mn);
  }
  auto renamed = [&](const std::string& old_id) -> std::string {
    for (size_t m = 0; m < inst.gold.mentions.size(); ++m)
      if (inst.gold.mentions[m].id == old_id) return kept_of[m];
    return "";
  };
  for (const auto& ev : inst.gold.events) {
    std::string trig = renamed(ev.trigger_id);
    if (trig.empty() || rng.uniform() < 0.1) continue;
    EventStructure pe;
    pe.trigger_id = trig;
    for (const auto& arg : ev.args) {
      std::string tgt = renamed(arg.arg_id);
      if (tgt.empty() || rng.uniform() < 0.1) continue;
      std::string role = rng.uniform() < 0.15 ? kScRoles[rng.uniform_int(0, 1)] : arg.role;
      pe.args.push_back({role, tgt});
    }
    p.events.push_back(pe);
  }
  auto ptrigs = p.triggers();
  if (!ptrigs.empty() && !p.mentions.empty() && rng.uniform() < 0.3) {
    EventStructure extra;
    extra.trigger_id = ptrigs[rng.uniform_int(0, static_cast<int>(ptrigs.size()) - 1)].id;
    extra.args.push_back({kScRoles[rng.uniform_int(0, 1)],
                          p.mentions[rng.uniform_int(0, static_cast<int>(p.mentions.size()) - 1)].id});
    p.events.push_back(extra);
  }
  inst.pred = p;
  return inst;
}

}  // namespace bee::synth
