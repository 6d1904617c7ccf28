#pragma once

#include <string>
#include <vector>

#include "bee/corpus.hpp"

namespace bee {

struct Prf {
  double p = 0.0, r = 0.0, f1 = 0.0;  // fractions in [0,1]
};

// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); 0 on zero denominators.
Prf prf(long long tp, long long fp, long long fn);

struct PrfCounts {
  long long tp = 0, fp = 0, fn = 0;
  void operator+=(const PrfCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
  }
};

// Micro counts for the four subtasks.
struct SubtaskCounts {
  PrfCounts ti, tc, ai, ac;
  void operator+=(const SubtaskCounts& o) {
    ti += o.ti;
    tc += o.tc;
    ai += o.ai;
    ac += o.ac;
  }
};

// Per-sentence greedy one-to-one matching in document order:
//   TI: predicted trigger span == a gold trigger span
//   TC: TI and type equal
//   AI: (event type, argument span) == a gold event's (type, argument span)
//   AC: AI and the predicted role is among the gold roles of that
//       (event type, argument span)
SubtaskCounts count_sentence(const Sentence& gold, const Sentence& pred);

struct SubMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // percents, 2 decimals
};

struct MetricsReport {
  SubMetrics ti, tc, ai, ac;
  double total = 0.0;  // mean of the four F1 percents, 2 decimals
};

// Mean of four 2-decimal F1 percents, rounded to 2 decimals.
double total_of(double f1_ti, double f1_tc, double f1_ai, double f1_ac);

// Corpora must pair up by position with equal doc_id and token count,
// otherwise AlignmentError.
MetricsReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred);

MetricsReport report_from_counts(const SubtaskCounts& c);

std::string to_markdown(const MetricsReport& r);
std::string to_json_string(const MetricsReport& r);

}  // namespace bee
