#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy shared across the library. Everything derives from
// std::invalid_argument or std::runtime_error so callers can be coarse
// or precise as they like.
namespace cocyc {

// Construction-time rejection of malformed inputs (bad adjacency,
// inadmissible words, non-total tables, unreadable scenarios).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// bracket(x, z) requires x_0 == z_0.
struct BracketUndefined : InvalidInput {
  using InvalidInput::InvalidInput;
};

// close_segment wrap transition is forbidden by the adjacency matrix.
struct ClosingInadmissible : InvalidInput {
  using InvalidInput::InvalidInput;
};

// Operator algebra on mismatched dimensions.
struct DimensionMismatch : InvalidInput {
  using InvalidInput::InvalidInput;
};

// Matrix with no reliable inverse (singular or condition number too large).
struct SingularOperator : InvalidInput {
  using InvalidInput::InvalidInput;
};

// Holonomy requested for points not on a common stable (resp. unstable) leaf.
struct NotOnStableLeaf : InvalidInput {
  using InvalidInput::InvalidInput;
};

// Periodic data at some orbit admits no invertible intertwiner.
struct NotConjugate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stable and unstable synthesised values disagree beyond tolerance.
struct DefectExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation that needs a fiber bunching certificate was run without one.
struct NoCertificate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// evaluate_extended could not realize an admissible splice for the request.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cocyc
