#pragma once

#include <stdexcept>
#include <string>

namespace polytoep {

// Malformed or inadmissible polydomain data (bad JSON, negative coefficients, ...).
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes that should agree do not (alphabet sizes, factor counts, matrix sizes).
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotComparable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A word or multidegree exceeds the truncation of the Fock space.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An eigenvalue sits too close to the rank threshold to decide the rank.
struct NumericalRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix that must be positive semidefinite has an eigenvalue below -tol.
struct NotPositiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable matrix/symbol/manifest files.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polytoep
