#ifndef EQV_BUILTIN_HPP
#define EQV_BUILTIN_HPP

#include <string_view>

#include "eqv/group.hpp"

namespace eqv::builtin {

GroupPtr cyclic(std::size_t n);
/// Symmetries of the n-gon, order 2n, acting on its vertices.
GroupPtr dihedral(std::size_t n);
GroupPtr symmetric(std::size_t n);
GroupPtr alternating(std::size_t n);
GroupPtr trivial(std::size_t degree);

/// Parses "cyclic:n", "dihedral:n", "symmetric:n" or "alternating:n".
GroupPtr from_name(std::string_view spec, std::size_t order_cap = kDefaultOrderCap);

}  // namespace eqv::builtin

#endif  // EQV_BUILTIN_HPP
