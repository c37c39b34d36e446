#ifndef EQV_BURNSIDE_HPP
#define EQV_BURNSIDE_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "eqv/lattice.hpp"
#include "eqv/rational.hpp"

namespace eqv {

/// Number of fixed points of each subgroup class on a G-set, in lattice order.
struct MarkVector {
  std::vector<std::int64_t> entries;
  bool operator==(const MarkVector &) const = default;
};

/// A G-set up to isomorphism: multiplicity of each coset space [G_i\G].
struct GSetExpr {
  std::vector<std::int64_t> multiplicities;

  std::int64_t orbit_count() const;
  bool operator==(const GSetExpr &) const = default;
};

using LatticePtr = std::shared_ptr<const SubgroupLattice>;

/// Rows are coset spaces [G_i\G], columns are subgroup classes G_j.
class TableOfMarks {
 public:
  TableOfMarks(LatticePtr lattice, std::vector<std::int64_t> matrix);

  const SubgroupLattice &lattice() const noexcept { return *lattice_; }
  const LatticePtr &lattice_ptr() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return lattice_->size(); }
  std::int64_t operator()(std::size_t row, std::size_t col) const {
    return matrix_[row * size() + col];
  }
  MarkVector row(std::size_t i) const;

  bool is_lower_triangular() const;
  /// Product of the diagonal; nonzero for every valid table.
  std::int64_t determinant() const;
  /// Exact inverse, row-major.
  std::vector<Rational> inverse() const;

 private:
  LatticePtr lattice_;
  std::vector<std::int64_t> matrix_;
};

/// Number of cosets in sub_i\G fixed by every element of sub_j.
std::int64_t mark(const FiniteGroup &group, const Subgroup &sub_i, const Subgroup &sub_j);

TableOfMarks table_of_marks(LatticePtr lattice);

GSetExpr indicator(const TableOfMarks &table, std::size_t cls);
MarkVector mark_vector(const TableOfMarks &table, const GSetExpr &expr);
/// Exact back substitution; throws Errc::non_integral_decomposition or
/// Errc::negative_multiplicity when `v` is not the mark vector of a G-set.
GSetExpr decompose(const TableOfMarks &table, const MarkVector &v);

GSetExpr disjoint_union(const GSetExpr &a, const GSetExpr &b);
/// Cartesian product with the diagonal action.
GSetExpr product(const TableOfMarks &table, const GSetExpr &a, const GSetExpr &b);
/// D-fold self product of `expr`; power(expr, 1) == expr.
GSetExpr power(const TableOfMarks &table, const GSetExpr &expr, std::size_t d);

/// Multiplicities of [G_l\G] in [G_i\G] x [G_j\G], from the inverse of the table.
std::vector<std::int64_t> structure_coefficients(const TableOfMarks &table, std::size_t i,
                                                 std::size_t j);

struct RegularOrbitReport {
  std::size_t minimal_d = 0;
  std::size_t log_bound = 0;
  std::size_t stirling_bound = 0;
};

/// ceil(log2 |H|), or 1 when |H| = 1.
std::size_t log2_order_bound(std::size_t sub_order);
/// ceil((N - 1/2) log2(N - 1) - (N - 2) log2(e)), clamped to 1 for N <= 2.
std::size_t stirling_order_bound(std::size_t n);

/// Smallest power of [H\G] that contains a regular orbit, alongside the two
/// a-priori bounds. Throws Errc::unfaithful_action if Core(H) is nontrivial.
RegularOrbitReport regular_orbit_order(const TableOfMarks &table, std::size_t h_class);

}  // namespace eqv

#endif  // EQV_BURNSIDE_HPP
