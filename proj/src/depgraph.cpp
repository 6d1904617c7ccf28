#include "bee/depgraph.hpp"

#include <cmath>
#include <sstream>

namespace bee {

DepGraph DepGraph::build(int n, std::vector<DepEdge> edges) {
  DepGraph g;
  g.n = n;
  g.a_norm = normalize_adjacency(build_adjacency(n, edges));
  g.edges = std::move(edges);
  return g;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  size_t pos = 0;
  try {
    out = std::stoi(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

ConlluSentence parse_conllu_sentence(const std::vector<std::string>& lines) {
  struct Row {
    int id;
    int head;
    std::string deprel;
  };
  std::vector<Row> rows;
  int lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() < 8)
      throw ParseError("conllu line " + std::to_string(lineno) + ": expected >= 8 tab fields, got " +
                       std::to_string(fields.size()));
    // Skip multiword tokens (1-2) and empty nodes (1.1).
    if (fields[0].find('-') != std::string::npos || fields[0].find('.') != std::string::npos) continue;
    Row r;
    if (!parse_int(fields[0], r.id))
      throw ParseError("conllu line " + std::to_string(lineno) + ": non-integer ID '" + fields[0] + "'");
    if (!parse_int(fields[6], r.head))
      throw ParseError("conllu line " + std::to_string(lineno) + ": non-integer HEAD '" + fields[6] + "'");
    r.deprel = fields[7];
    rows.push_back(std::move(r));
  }

  ConlluSentence out;
  out.n = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    if (r.head < 0 || r.head > out.n)
      throw ParseError("conllu: HEAD " + std::to_string(r.head) + " out of range [0, " +
                       std::to_string(out.n) + "]");
    if (r.head == 0) continue;  // root
    if (r.head == r.id)
      throw ParseError("conllu: token " + std::to_string(r.id) + " headed by itself");
    out.edges.push_back(DepEdge{r.head - 1, r.id - 1, r.deprel});
  }
  return out;
}

std::vector<ConlluSentence> parse_conllu(const std::string& text) {
  std::vector<ConlluSentence> out;
  std::vector<std::string> block;
  std::istringstream in(text);
  std::string line;
  auto flush = [&] {
    bool has_rows = false;
    for (const auto& l : block)
      if (!l.empty() && l[0] != '#') has_rows = true;
    if (has_rows) out.push_back(parse_conllu_sentence(block));
    block.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty())
      flush();
    else
      block.push_back(line);
  }
  flush();
  return out;
}

Matrix build_adjacency(int n, const std::vector<DepEdge>& edges) {
  Matrix a(n, n);
  for (const auto& e : edges) {
    if (e.head < 0 || e.head >= n || e.dependent < 0 || e.dependent >= n)
      throw ParseError("dep edge (" + std::to_string(e.head) + ", " + std::to_string(e.dependent) +
                       ") out of range for n=" + std::to_string(n));
    if (e.head == e.dependent)
      throw ParseError("dep edge with head == dependent == " + std::to_string(e.head));
    a(e.head, e.dependent) = 1.0;
    a(e.dependent, e.head) = 1.0;
  }
  return a;
}

Matrix normalize_adjacency(const Matrix& a) {
  const int n = a.rows;
  if (a.cols != n) throw ShapeError("adjacency must be square");
  Matrix a_tilde = a;
  for (int i = 0; i < n; ++i) a_tilde(i, i) += 1.0;

  std::vector<double> dinv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a_tilde(i, j);
    dinv_sqrt[i] = 1.0 / std::sqrt(deg);  // deg >= 1 from the self-loop
  }

  // Mirror the upper triangle so Â[i][j] == Â[j][i] bit-exactly.
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = dinv_sqrt[i] * a_tilde(i, i) * dinv_sqrt[i];
    for (int j = i + 1; j < n; ++j) {
      const double v = dinv_sqrt[i] * a_tilde(i, j) * dinv_sqrt[j];
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace bee
