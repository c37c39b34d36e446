#ifndef EQV_LATTICE_HPP
#define EQV_LATTICE_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "eqv/group.hpp"

namespace eqv {

inline constexpr std::size_t kDefaultLatticeCap = 2000;

struct ConjugacyClass {
  /// The conjugate with the lexicographically smallest member list.
  Subgroup representative;
  /// All conjugates, sorted lexicographically by member list.
  std::vector<Subgroup> members;
  std::size_t sub_order = 0;
};

struct VectorHash {
  std::size_t operator()(const std::vector<ElemIndex> &v) const noexcept;
};

/// Conjugacy classes of subgroups, ordered by subgroup order and then by
/// canonical member list. Class 0 is {e}; the last class is G.
class SubgroupLattice {
 public:
  SubgroupLattice(GroupPtr group, std::vector<ConjugacyClass> classes);

  const GroupPtr &group() const noexcept { return group_; }
  const std::vector<ConjugacyClass> &classes() const noexcept { return classes_; }
  const ConjugacyClass &operator[](std::size_t i) const { return classes_[i]; }
  std::size_t size() const noexcept { return classes_.size(); }
  std::size_t subgroup_count() const noexcept { return class_of_.size(); }

  /// True iff some conjugate of class i lies inside the representative of class j.
  bool leq(std::size_t i, std::size_t j) const { return leq_[i * classes_.size() + j]; }

  /// Class index of an arbitrary subgroup; throws Errc::stabilizer_not_in_lattice
  /// when the subgroup is unknown.
  std::size_t class_of(const Subgroup &sub) const;
  std::size_t class_of(const std::vector<ElemIndex> &sorted_members) const;

  /// Short structural name ("e", "C3", "K4", "S3", "D10", "A4", ...), unique
  /// within the lattice.
  const std::string &label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string> &labels() const noexcept { return labels_; }
  std::size_t index_of_label(const std::string &label) const;

 private:
  GroupPtr group_;
  std::vector<ConjugacyClass> classes_;
  std::vector<bool> leq_;
  std::unordered_map<std::vector<ElemIndex>, std::size_t, VectorHash> class_of_;
  std::vector<std::string> labels_;
};

/// Every subgroup of `group`, found by closing cyclic subgroups under joins
/// with further cyclic subgroups until nothing new appears.
/// Throws Errc::lattice_cap_exceeded when |G| > lattice_cap.
std::vector<Subgroup> all_subgroups(const GroupPtr &group,
                                    std::size_t lattice_cap = kDefaultLatticeCap);

SubgroupLattice conjugacy_classes(const GroupPtr &group, const std::vector<Subgroup> &subs);

/// all_subgroups followed by conjugacy_classes.
SubgroupLattice build_lattice(const GroupPtr &group,
                              std::size_t lattice_cap = kDefaultLatticeCap);

inline bool class_leq(const SubgroupLattice &lattice, std::size_t i, std::size_t j) {
  return lattice.leq(i, j);
}

}  // namespace eqv

#endif  // EQV_LATTICE_HPP
