#include "bee/scorer.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include <json.hpp>

namespace bee {

Prf prf(long long tp, long long fp, long long fn) {
  Prf out;
  out.p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  out.r = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  out.f1 = out.p + out.r > 0 ? 2.0 * out.p * out.r / (out.p + out.r) : 0.0;
  return out;
}

namespace {

struct TriggerItem {
  int start, end;
  std::string type;
};

struct ArgItem {
  std::string event_type;
  int start, end;
  std::string role;
};

std::vector<TriggerItem> trigger_items(const Sentence& s) {
  std::vector<TriggerItem> out;
  for (const Mention& m : s.mentions)
    if (m.kind == MentionKind::trigger) out.push_back({m.token_start, m.token_end, m.label});
  return out;
}

std::vector<ArgItem> arg_items(const Sentence& s) {
  std::vector<ArgItem> out;
  for (const EventStructure& ev : s.events) {
    const Mention* trig = s.find_mention(ev.trigger_id);
    if (!trig) throw ReferenceError("event trigger '" + ev.trigger_id + "' not found");
    for (const EventArg& a : ev.args) {
      const Mention* arg = s.find_mention(a.arg_id);
      if (!arg) throw ReferenceError("event argument '" + a.arg_id + "' not found");
      out.push_back({trig->label, arg->token_start, arg->token_end, a.role});
    }
  }
  return out;
}

// Greedy one-to-one: preds in order take the first unmatched gold they match.
template <typename P, typename G, typename Match>
PrfCounts greedy_counts(const std::vector<P>& preds, const std::vector<G>& golds, Match match) {
  std::vector<bool> taken(golds.size(), false);
  long long tp = 0;
  for (const P& p : preds) {
    for (size_t i = 0; i < golds.size(); ++i) {
      if (taken[i] || !match(p, golds[i])) continue;
      taken[i] = true;
      ++tp;
      break;
    }
  }
  PrfCounts c;
  c.tp = tp;
  c.fp = static_cast<long long>(preds.size()) - tp;
  c.fn = static_cast<long long>(golds.size()) - tp;
  return c;
}

}  // namespace

SubtaskCounts count_sentence(const Sentence& gold, const Sentence& pred) {
  SubtaskCounts out;
  const auto gt = trigger_items(gold);
  const auto pt = trigger_items(pred);
  out.ti = greedy_counts(pt, gt, [](const TriggerItem& p, const TriggerItem& g) {
    return p.start == g.start && p.end == g.end;
  });
  out.tc = greedy_counts(pt, gt, [](const TriggerItem& p, const TriggerItem& g) {
    return p.start == g.start && p.end == g.end && p.type == g.type;
  });

  const auto ga = arg_items(gold);
  const auto pa = arg_items(pred);
  out.ai = greedy_counts(pa, ga, [](const ArgItem& p, const ArgItem& g) {
    return p.event_type == g.event_type && p.start == g.start && p.end == g.end;
  });
  // Role may match ANY gold role recorded for the same (event type, span).
  std::set<std::tuple<std::string, int, int, std::string>> gold_roles;
  for (const ArgItem& g : ga) gold_roles.insert({g.event_type, g.start, g.end, g.role});
  out.ac = greedy_counts(pa, ga, [&](const ArgItem& p, const ArgItem& g) {
    return p.event_type == g.event_type && p.start == g.start && p.end == g.end &&
           gold_roles.count({p.event_type, p.start, p.end, p.role}) > 0;
  });
  return out;
}

namespace {
double round2(double x) { return std::round(x * 100.0) / 100.0; }

SubMetrics to_percent(const PrfCounts& c) {
  const Prf raw = prf(c.tp, c.fp, c.fn);
  return {round2(raw.p * 100.0), round2(raw.r * 100.0), round2(raw.f1 * 100.0)};
}
}  // namespace

double total_of(double f1_ti, double f1_tc, double f1_ai, double f1_ac) {
  return round2((f1_ti + f1_tc + f1_ai + f1_ac) / 4.0);
}

MetricsReport report_from_counts(const SubtaskCounts& c) {
  MetricsReport r;
  r.ti = to_percent(c.ti);
  r.tc = to_percent(c.tc);
  r.ai = to_percent(c.ai);
  r.ac = to_percent(c.ac);
  r.total = total_of(r.ti.f1, r.tc.f1, r.ai.f1, r.ac.f1);
  return r;
}

MetricsReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred) {
  if (gold.size() != pred.size())
    throw AlignmentError("gold has " + std::to_string(gold.size()) + " sentences, pred has " +
                         std::to_string(pred.size()));
  SubtaskCounts totals;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].doc_id != pred[i].doc_id)
      throw AlignmentError("sentence " + std::to_string(i) + ": doc_id '" + gold[i].doc_id +
                           "' vs '" + pred[i].doc_id + "'");
    if (gold[i].size() != pred[i].size())
      throw AlignmentError("sentence " + std::to_string(i) + " of " + gold[i].doc_id +
                           ": token counts differ");
    totals += count_sentence(gold[i], pred[i]);
  }
  return report_from_counts(totals);
}

namespace {
std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace

std::string to_markdown(const MetricsReport& r) {
  std::string s;
  s += "|    | TI | TC | AI | AC | total |\n";
  s += "|----|----|----|----|----|-------|\n";
  s += "| P  | " + fmt2(r.ti.precision) + " | " + fmt2(r.tc.precision) + " | " +
       fmt2(r.ai.precision) + " | " + fmt2(r.ac.precision) + " |       |\n";
  s += "| R  | " + fmt2(r.ti.recall) + " | " + fmt2(r.tc.recall) + " | " + fmt2(r.ai.recall) +
       " | " + fmt2(r.ac.recall) + " |       |\n";
  s += "| F1 | " + fmt2(r.ti.f1) + " | " + fmt2(r.tc.f1) + " | " + fmt2(r.ai.f1) + " | " +
       fmt2(r.ac.f1) + " | " + fmt2(r.total) + " |\n";
  return s;
}

std::string to_json_string(const MetricsReport& r) {
  nlohmann::json j;
  auto sub = [](const SubMetrics& m) {
    return nlohmann::json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  j["TI"] = sub(r.ti);
  j["TC"] = sub(r.tc);
  j["AI"] = sub(r.ai);
  j["AC"] = sub(r.ac);
  j["total"] = r.total;
  return j.dump(2);
}

}  // namespace bee
