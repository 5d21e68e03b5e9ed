// Error taxonomy shared by all symham modules. Every failure carries a
// machine-readable kind so the CLI can map it to an exit code and a JSON
// error object.
#pragma once

#include <stdexcept>
#include <string>

namespace symham {

enum class errc {
  not_hermitian,
  not_unitary,
  not_isometry,
  not_positive,
  not_primitive,
  singular_matrix,
  convergence_failure,
  not_a_group,
  not_a_cocycle,
  not_normalized,
  cocycle_mismatch,
  group_mismatch,
  dimension_mismatch,
  shape_mismatch,
  split_failure,
  intertwiner_violation,
  not_equivalent_representations,
  structure_mismatch,
  block_leakage,
  contour_not_found,
  path_validation_failure,
  budget_exceeded,
  parse_error,
  unknown_demo,
  unsupported,
};

inline const char* errc_name(errc k) {
  switch (k) {
    case errc::not_hermitian: return "NotHermitian";
    case errc::not_unitary: return "NotUnitary";
    case errc::not_isometry: return "NotIsometry";
    case errc::not_positive: return "NotPositive";
    case errc::not_primitive: return "NotPrimitive";
    case errc::singular_matrix: return "Singular";
    case errc::convergence_failure: return "ConvergenceFailure";
    case errc::not_a_group: return "NotAGroup";
    case errc::not_a_cocycle: return "NotACocycle";
    case errc::not_normalized: return "NotNormalized";
    case errc::cocycle_mismatch: return "CocycleMismatch";
    case errc::group_mismatch: return "GroupMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::split_failure: return "SplitFailure";
    case errc::intertwiner_violation: return "IntertwinerViolation";
    case errc::not_equivalent_representations: return "NotEquivalentRepresentations";
    case errc::structure_mismatch: return "StructureMismatch";
    case errc::block_leakage: return "BlockLeakage";
    case errc::contour_not_found: return "ContourNotFound";
    case errc::path_validation_failure: return "PathValidationFailure";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::parse_error: return "ParseError";
    case errc::unknown_demo: return "UnknownDemo";
    case errc::unsupported: return "Unsupported";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind) {}
  errc kind() const { return kind_; }

 private:
  errc kind_;
};

}  // namespace symham
