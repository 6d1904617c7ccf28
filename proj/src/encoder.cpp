#include "bee/encoder.hpp"

#include <cmath>

#include "bee/rng.hpp"

namespace bee {

TrainScope train_scope_from_string(const std::string& s) {
  if (s == "heads_only") return TrainScope::heads_only;
  if (s == "last_encoder_layer_plus_heads") return TrainScope::last_encoder_layer_plus_heads;
  if (s == "all") return TrainScope::all;
  throw ParseError("unknown train scope '" + s + "'");
}

std::string to_string(TrainScope scope) {
  switch (scope) {
    case TrainScope::heads_only: return "heads_only";
    case TrainScope::last_encoder_layer_plus_heads: return "last_encoder_layer_plus_heads";
    case TrainScope::all: return "all";
  }
  return "?";
}

EncoderOutput pool_subwords(const Matrix& piece_vectors, const SubwordAlignment& alignment) {
  EncoderOutput out;
  out.vectors = Matrix(static_cast<int>(alignment.pieces_per_token.size()), piece_vectors.cols);
  for (size_t i = 0; i < alignment.pieces_per_token.size(); ++i) {
    const auto& pieces = alignment.pieces_per_token[i];
    if (pieces.empty())
      throw AlignmentError("token " + std::to_string(i) + " has no subword pieces");
    int first = pieces.front();
    if (first < 0 || first >= piece_vectors.rows)
      throw AlignmentError("piece index " + std::to_string(first) + " out of range");
    for (int j = 0; j < piece_vectors.cols; ++j)
      out.vectors(static_cast<int>(i), j) = piece_vectors(first, j);
  }
  return out;
}

void check_sequence_length(int n, int max_len, const std::string& sentence_id) {
  if (n > max_len)
    throw TruncationError("sentence " + (sentence_id.empty() ? "<unnamed>" : sentence_id) +
                          " has " + std::to_string(n) + " tokens, encoder max_len is " +
                          std::to_string(max_len));
}

ToyEncoder::ToyEncoder(int dim, int max_len, uint64_t seed)
    : dim_(dim), max_len_(max_len), seed_(seed) {}

EncoderOutput ToyEncoder::encode(const std::vector<std::string>& tokens,
                                 const std::string& sentence_id) const {
  if (tokens.empty()) throw ShapeError("encode called on empty token list");
  check_sequence_length(static_cast<int>(tokens.size()), max_len_, sentence_id);

  EncoderOutput out;
  out.vectors = Matrix(static_cast<int>(tokens.size()), dim_);
  for (size_t i = 0; i < tokens.size(); ++i) {
    uint64_t state = seed_ ^ fnv1a64(tokens[i]);
    for (int j = 0; j < dim_; ++j) {
      const double base = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
      // Sinusoidal position code, added onto the identity embedding.
      const double rate = std::pow(10000.0, -2.0 * (j / 2) / dim_);
      const double pos = static_cast<double>(i) * rate;
      const double pe = (j % 2 == 0) ? std::sin(pos) : std::cos(pos);
      out.vectors(static_cast<int>(i), j) = base + pe;
    }
  }
  return out;
}

}  // namespace bee
