#include "eqv/error.hpp"

namespace eqv {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_permutation: return "InvalidPermutation";
    case Errc::degree_mismatch: return "DegreeMismatch";
    case Errc::order_cap_exceeded: return "OrderCapExceeded";
    case Errc::point_out_of_range: return "PointOutOfRange";
    case Errc::not_a_subgroup: return "NotASubgroup";
    case Errc::group_mismatch: return "GroupMismatch";
    case Errc::lattice_cap_exceeded: return "LatticeCapExceeded";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_integral_decomposition: return "NonIntegralDecomposition";
    case Errc::negative_multiplicity: return "NegativeMultiplicity";
    case Errc::unfaithful_action: return "UnfaithfulAction";
    case Errc::size_cap_exceeded: return "SizeCapExceeded";
    case Errc::stabilizer_not_in_lattice: return "StabilizerNotInLattice";
    case Errc::range_error: return "RangeError";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::not_transitive: return "NotTransitive";
    case Errc::not_a_homomorphism: return "NotAHomomorphism";
    case Errc::target_not_equivariant: return "TargetNotEquivariant";
    case Errc::arithmetic_overflow: return "ArithmeticOverflow";
    case Errc::malformed_input: return "MalformedInput";
    case Errc::internal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace eqv
