#ifndef EQV_ERROR_HPP
#define EQV_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqv {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class Errc {
  invalid_permutation,
  degree_mismatch,
  order_cap_exceeded,
  point_out_of_range,
  not_a_subgroup,
  group_mismatch,
  lattice_cap_exceeded,
  dimension_mismatch,
  non_integral_decomposition,
  negative_multiplicity,
  unfaithful_action,
  size_cap_exceeded,
  stabilizer_not_in_lattice,
  range_error,
  length_mismatch,
  shape_mismatch,
  not_transitive,
  not_a_homomorphism,
  target_not_equivariant,
  arithmetic_overflow,
  malformed_input,
  internal,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace eqv

#endif  // EQV_ERROR_HPP
