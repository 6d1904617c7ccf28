#pragma once

#include <string>
#include <vector>

#include "bee/errors.hpp"
#include "bee/matrix.hpp"

namespace bee {

struct DepEdge {
  int head = 0;       // token index
  int dependent = 0;  // token index, != head
  std::string relation;
  bool operator==(const DepEdge& o) const = default;
};

// Per-sentence dependency graph with the normalized adjacency consumed by the
// GCN. Edges are undirected in the matrix; relation labels are not features.
struct DepGraph {
  int n = 0;
  std::vector<DepEdge> edges;
  Matrix a_norm;  // n x n, symmetric, self-loops

  static DepGraph build(int n, std::vector<DepEdge> edges);
};

struct ConlluSentence {
  int n = 0;
  std::vector<DepEdge> edges;
};

// One CoNLL-U sentence block (no blank lines). HEAD is 1-based, 0 = root;
// root rows produce no edge. Comment and multiword/empty-node rows are skipped.
ConlluSentence parse_conllu_sentence(const std::vector<std::string>& lines);

// Whole file: sentence blocks separated by blank lines, in corpus order.
std::vector<ConlluSentence> parse_conllu(const std::string& text);

// A[i][j] = A[j][i] = 1 iff an edge connects i and j; zero diagonal.
Matrix build_adjacency(int n, const std::vector<DepEdge>& edges);

// Kipf-style symmetric normalization with self-loops:
// A_hat = D~^(-1/2) (A + I) D~^(-1/2), D~ = degree matrix of A + I.
Matrix normalize_adjacency(const Matrix& a);

}  // namespace bee
