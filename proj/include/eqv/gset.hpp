#ifndef EQV_GSET_HPP
#define EQV_GSET_HPP

#include <cstdint>
#include <vector>

#include "eqv/burnside.hpp"
#include "eqv/group.hpp"

namespace eqv {

inline constexpr std::size_t kDefaultPowerCap = 10'000'000;

/// An explicitly materialized product G-set. Point k encodes a tuple in mixed
/// radix with the first component most significant, so lexicographic tuple
/// order equals index order.
struct ExplicitGSet {
  GroupAction action;
  std::vector<std::size_t> radices;

  std::vector<Point> tuple(Point index) const;
  Point encode(const std::vector<Point> &tuple) const;
};

/// Blockwise action on a.points followed by b.points.
GroupAction disjoint_union(const GroupAction &a, const GroupAction &b);

/// g.(x, y) = (g.x, g.y). Throws Errc::size_cap_exceeded past `cap` points.
ExplicitGSet cartesian_product(const GroupAction &a, const GroupAction &b,
                               std::size_t cap = kDefaultPowerCap);
ExplicitGSet diagonal_power(const GroupAction &a, std::size_t d,
                            std::size_t cap = kDefaultPowerCap);

/// Multiplicity of each subgroup class among orbit stabilizers.
GSetExpr orbit_decompose(const GroupAction &action, const SubgroupLattice &lattice);

/// Marks counted directly as fixed points of each class representative.
MarkVector fixed_point_marks(const GroupAction &action, const SubgroupLattice &lattice);

/// Valid for 0 <= d <= D <= 20; throws Errc::range_error otherwise.
std::uint64_t stirling2(std::size_t big_d, std::size_t d);
std::uint64_t bell(std::size_t big_d);

}  // namespace eqv

#endif  // EQV_GSET_HPP
