#pragma once

#include <stdexcept>
#include <string>

namespace bee {

// Malformed input line or field (standoff, CoNLL-U, config).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Character spans or token counts that do not line up.
struct AlignmentError : std::runtime_error {
  explicit AlignmentError(const std::string& what) : std::runtime_error(what) {}
};

// Missing or ill-typed field in a JSON record.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Dangling id (event argument pointing nowhere).
struct ReferenceError : std::runtime_error {
  explicit ReferenceError(const std::string& what) : std::runtime_error(what) {}
};

// Tensor dimension mismatch.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Sentence longer than the encoder accepts; never truncated silently.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint/model parameter groups that do not fit together.
struct IncompatibilityError : std::runtime_error {
  explicit IncompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

// BIO tag outside the known vocabulary.
struct DecodeError : std::runtime_error {
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Broken invariant at a module boundary (e.g. edge head that is no trigger).
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bee
