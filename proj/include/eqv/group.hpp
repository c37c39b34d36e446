#ifndef EQV_GROUP_HPP
#define EQV_GROUP_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eqv/permutation.hpp"

namespace eqv {

using ElemIndex = std::uint32_t;

inline constexpr std::size_t kDefaultOrderCap = 10080;
/// Groups up to this order carry a full multiplication table.
inline constexpr std::size_t kMultTableCap = 2000;

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// A finite permutation group, enumerated from its generators.
///
/// Elements are listed breadth-first from the identity (element 0); each BFS
/// layer is sorted lexicographically by images, so element indices depend only
/// on the degree and the generator list.
class FiniteGroup {
 public:
  /// Enumerates <generators>. Throws Errc::order_cap_exceeded when the
  /// closure grows past `order_cap`.
  static GroupPtr closure(std::size_t degree, std::vector<Permutation> generators,
                          std::string name = {}, std::size_t order_cap = kDefaultOrderCap);

  std::size_t degree() const noexcept { return degree_; }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::string &name() const noexcept { return name_; }

  const Permutation &element(ElemIndex i) const { return elements_[i]; }
  const std::vector<Permutation> &elements() const noexcept { return elements_; }
  const std::vector<Permutation> &generators() const noexcept { return generators_; }
  /// Element index of each generator, in generator order.
  const std::vector<ElemIndex> &generator_indices() const noexcept { return generator_indices_; }

  std::optional<ElemIndex> find(const Permutation &p) const;
  ElemIndex index_of(const Permutation &p) const;

  /// Index of compose(element(a), element(b)).
  ElemIndex multiply(ElemIndex a, ElemIndex b) const;
  ElemIndex inverse(ElemIndex a) const { return inverses_[a]; }
  bool has_mult_table() const noexcept { return !mult_.empty(); }

  /// BFS discovery tree: element(i) = compose(generators()[parent_generator(i)],
  /// element(parent(i))) for every i > 0.
  ElemIndex parent(ElemIndex i) const { return parent_[i]; }
  std::size_t parent_generator(ElemIndex i) const { return parent_gen_[i]; }

  bool is_abelian() const;

 private:
  FiniteGroup() = default;

  std::size_t degree_ = 0;
  std::string name_;
  std::vector<Permutation> generators_;
  std::vector<ElemIndex> generator_indices_;
  std::vector<Permutation> elements_;
  std::unordered_map<Permutation, ElemIndex, PermutationHash> index_;
  std::vector<ElemIndex> inverses_;
  std::vector<ElemIndex> mult_;
  std::vector<ElemIndex> parent_;
  std::vector<std::size_t> parent_gen_;
};

/// A subgroup of a FiniteGroup, stored as sorted element indices.
class Subgroup {
 public:
  Subgroup() = default;

  /// Throws Errc::not_a_subgroup if the members are not closed or miss the identity.
  static Subgroup from_members(GroupPtr parent, std::vector<ElemIndex> members);
  /// Members must already form a subgroup; only sorting is applied.
  static Subgroup trusted(GroupPtr parent, std::vector<ElemIndex> members);
  static Subgroup generated(GroupPtr parent, std::span<const ElemIndex> generators);
  static Subgroup trivial(GroupPtr parent);
  static Subgroup whole(GroupPtr parent);

  const GroupPtr &parent() const noexcept { return parent_; }
  std::size_t order() const noexcept { return members_.size(); }
  const std::vector<ElemIndex> &members() const noexcept { return members_; }
  bool contains(ElemIndex g) const { return mask_[g]; }
  bool is_trivial() const noexcept { return members_.size() == 1; }

  bool is_subgroup_of(const Subgroup &other) const;
  /// g^-1 H g.
  Subgroup conjugate(ElemIndex g) const;

  bool operator==(const Subgroup &other) const { return members_ == other.members_; }

 private:
  Subgroup(GroupPtr parent, std::vector<ElemIndex> members);

  GroupPtr parent_;
  std::vector<ElemIndex> members_;
  std::vector<bool> mask_;
};

/// A left action of a group on {0, ..., point_count-1}: act(g, i) = image(g)[i].
class GroupAction {
 public:
  GroupAction() = default;

  /// The defining action on {0, ..., degree-1}.
  static GroupAction natural(GroupPtr group);
  static GroupAction trivial(GroupPtr group, std::size_t point_count);
  /// Flat per-element images, row g = image of element g. Verified to be a
  /// homomorphism; throws Errc::not_a_homomorphism otherwise.
  static GroupAction from_images(GroupPtr group, std::size_t point_count,
                                 std::vector<Point> images);
  /// Extends images of the group's generators to every element.
  static GroupAction from_generator_images(GroupPtr group,
                                           const std::vector<Permutation> &generator_images);

  const GroupPtr &group() const noexcept { return group_; }
  std::size_t point_count() const noexcept { return point_count_; }
  Point act(ElemIndex g, Point i) const { return images_[g * point_count_ + i]; }
  std::span<const Point> image(ElemIndex g) const {
    return {images_.data() + g * point_count_, point_count_};
  }

  /// Exhaustive check image(g h) = image(g) o image(h).
  bool is_homomorphism_exhaustive() const;

 private:
  GroupAction(GroupPtr group, std::size_t point_count, std::vector<Point> images);
  void verify_homomorphism() const;

  GroupPtr group_;
  std::size_t point_count_ = 0;
  std::vector<Point> images_;
};

struct ActionProperties {
  bool transitive = false;
  bool regular = false;
  bool faithful = false;
};

std::vector<Point> orbit(const GroupAction &action, Point point);
/// All orbits, each sorted, ordered by their smallest point.
std::vector<std::vector<Point>> orbits(const GroupAction &action);
Subgroup stabilizer(const GroupAction &action, Point point);
Subgroup kernel(const GroupAction &action);
/// Intersection of all conjugates of `sub`.
Subgroup core(const FiniteGroup &group, const Subgroup &sub);
Subgroup normalizer(const FiniteGroup &group, const Subgroup &sub);
bool is_normal(const Subgroup &sub);

/// Right cosets Hg, labelled in order of their smallest element index, acted
/// on by Hg -> H g x^-1. The coset H itself is point 0 and its stabilizer is H.
GroupAction coset_space(const FiniteGroup &group, const Subgroup &sub);
/// Smallest element index of each coset, in point order.
std::vector<ElemIndex> coset_representatives(const FiniteGroup &group, const Subgroup &sub);

ActionProperties action_properties(const GroupAction &action);

}  // namespace eqv

#endif  // EQV_GROUP_HPP
