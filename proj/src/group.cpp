#include "eqv/group.hpp"

#include <algorithm>
#include <numeric>

#include "eqv/error.hpp"

namespace eqv {

// ---------------------------------------------------------------------------
// FiniteGroup

GroupPtr FiniteGroup::closure(std::size_t degree, std::vector<Permutation> generators,
                              std::string name, std::size_t order_cap) {
  if (degree == 0)
    throw Error(Errc::invalid_permutation, "group of degree 0");
  for (const auto &g : generators)
    if (g.degree() != degree)
      throw Error(Errc::degree_mismatch, "generator " + g.to_string() + " has degree " +
                                             std::to_string(g.degree()) + ", expected " +
                                             std::to_string(degree));

  std::shared_ptr<FiniteGroup> grp(new FiniteGroup());
  grp->degree_ = degree;
  grp->name_ = std::move(name);
  grp->generators_ = std::move(generators);

  grp->elements_.push_back(Permutation::identity(degree));
  grp->index_.emplace(grp->elements_.back(), 0);
  grp->parent_.push_back(0);
  grp->parent_gen_.push_back(0);

  struct Found {
    Permutation perm;
    ElemIndex parent;
    std::size_t gen;
  };

  std::vector<ElemIndex> frontier{0};
  while (!frontier.empty()) {
    std::vector<Found> fresh;
    std::unordered_map<Permutation, std::size_t, PermutationHash> fresh_index;
    for (ElemIndex f : frontier) {
      for (std::size_t k = 0; k < grp->generators_.size(); ++k) {
        Permutation p = compose(grp->generators_[k], grp->elements_[f]);
        if (grp->index_.count(p) || fresh_index.count(p))
          continue;
        fresh_index.emplace(p, fresh.size());
        fresh.push_back({std::move(p), f, k});
      }
    }
    if (grp->elements_.size() + fresh.size() > order_cap)
      throw Error(Errc::order_cap_exceeded,
                  "group order exceeds cap " + std::to_string(order_cap));
    std::sort(fresh.begin(), fresh.end(),
              [](const Found &a, const Found &b) { return a.perm < b.perm; });
    frontier.clear();
    for (auto &f : fresh) {
      auto idx = static_cast<ElemIndex>(grp->elements_.size());
      grp->index_.emplace(f.perm, idx);
      grp->elements_.push_back(std::move(f.perm));
      grp->parent_.push_back(f.parent);
      grp->parent_gen_.push_back(f.gen);
      frontier.push_back(idx);
    }
  }

  const std::size_t n = grp->elements_.size();
  for (const auto &g : grp->generators_)
    grp->generator_indices_.push_back(grp->index_.at(g));

  grp->inverses_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    grp->inverses_[i] = grp->index_.at(eqv::inverse(grp->elements_[i]));

  if (n <= kMultTableCap) {
    grp->mult_.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      ElemIndex *row = &grp->mult_[a * n];
      row[0] = static_cast<ElemIndex>(a);
      for (std::size_t b = 1; b < n; ++b)
        row[b] = grp->index_.at(compose(grp->elements_[a], grp->elements_[b]));
    }
  }
  return grp;
}

std::optional<ElemIndex> FiniteGroup::find(const Permutation &p) const {
  auto it = index_.find(p);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

ElemIndex FiniteGroup::index_of(const Permutation &p) const {
  auto idx = find(p);
  if (!idx)
    throw Error(Errc::not_a_subgroup, "permutation " + p.to_string() + " is not in the group");
  return *idx;
}

ElemIndex FiniteGroup::multiply(ElemIndex a, ElemIndex b) const {
  if (!mult_.empty())
    return mult_[static_cast<std::size_t>(a) * elements_.size() + b];
  return index_.at(compose(elements_[a], elements_[b]));
}

bool FiniteGroup::is_abelian() const {
  for (ElemIndex a : generator_indices_)
    for (ElemIndex b : generator_indices_)
      if (multiply(a, b) != multiply(b, a))
        return false;
  return true;
}

// ---------------------------------------------------------------------------
// Subgroup

Subgroup::Subgroup(GroupPtr parent, std::vector<ElemIndex> members)
    : parent_(std::move(parent)), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  mask_.assign(parent_->order(), false);
  for (ElemIndex m : members_)
    mask_[m] = true;
}

Subgroup Subgroup::trusted(GroupPtr parent, std::vector<ElemIndex> members) {
  return Subgroup(std::move(parent), std::move(members));
}

Subgroup Subgroup::from_members(GroupPtr parent, std::vector<ElemIndex> members) {
  for (ElemIndex m : members)
    if (m >= parent->order())
      throw Error(Errc::not_a_subgroup, "element index out of range");
  Subgroup s(std::move(parent), std::move(members));
  if (s.members_.empty() || s.members_.front() != 0)
    throw Error(Errc::not_a_subgroup, "subset does not contain the identity");
  if (s.parent_->order() % s.order() != 0)
    throw Error(Errc::not_a_subgroup, "subset order does not divide the group order");
  for (ElemIndex a : s.members_) {
    if (!s.mask_[s.parent_->inverse(a)])
      throw Error(Errc::not_a_subgroup, "subset is not closed under inverses");
    for (ElemIndex b : s.members_)
      if (!s.mask_[s.parent_->multiply(a, b)])
        throw Error(Errc::not_a_subgroup, "subset is not closed under composition");
  }
  return s;
}

Subgroup Subgroup::generated(GroupPtr parent, std::span<const ElemIndex> generators) {
  std::vector<bool> seen(parent->order(), false);
  std::vector<ElemIndex> members{0};
  seen[0] = true;
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (ElemIndex g : generators) {
      ElemIndex x = parent->multiply(members[head], g);
      if (!seen[x]) {
        seen[x] = true;
        members.push_back(x);
      }
    }
  }
  return Subgroup(std::move(parent), std::move(members));
}

Subgroup Subgroup::trivial(GroupPtr parent) { return Subgroup(std::move(parent), {0}); }

Subgroup Subgroup::whole(GroupPtr parent) {
  std::vector<ElemIndex> all(parent->order());
  std::iota(all.begin(), all.end(), ElemIndex{0});
  return Subgroup(std::move(parent), std::move(all));
}

bool Subgroup::is_subgroup_of(const Subgroup &other) const {
  if (order() > other.order() || other.order() % order() != 0)
    return false;
  return std::all_of(members_.begin(), members_.end(),
                     [&](ElemIndex m) { return other.contains(m); });
}

Subgroup Subgroup::conjugate(ElemIndex g) const {
  const ElemIndex gi = parent_->inverse(g);
  std::vector<ElemIndex> out;
  out.reserve(members_.size());
  for (ElemIndex h : members_)
    out.push_back(parent_->multiply(parent_->multiply(gi, h), g));
  return Subgroup(parent_, std::move(out));
}

// ---------------------------------------------------------------------------
// GroupAction

GroupAction::GroupAction(GroupPtr group, std::size_t point_count, std::vector<Point> images)
    : group_(std::move(group)), point_count_(point_count), images_(std::move(images)) {}

GroupAction GroupAction::natural(GroupPtr group) {
  const std::size_t n = group->degree();
  std::vector<Point> images;
  images.reserve(group->order() * n);
  for (const auto &e : group->elements())
    images.insert(images.end(), e.images().begin(), e.images().end());
  return GroupAction(std::move(group), n, std::move(images));
}

GroupAction GroupAction::trivial(GroupPtr group, std::size_t point_count) {
  std::vector<Point> images(group->order() * point_count);
  for (std::size_t g = 0; g < group->order(); ++g)
    for (std::size_t i = 0; i < point_count; ++i)
      images[g * point_count + i] = static_cast<Point>(i);
  return GroupAction(std::move(group), point_count, std::move(images));
}

GroupAction GroupAction::from_images(GroupPtr group, std::size_t point_count,
                                     std::vector<Point> images) {
  if (images.size() != group->order() * point_count)
    throw Error(Errc::shape_mismatch, "action image table has wrong size");
  for (std::size_t g = 0; g < group->order(); ++g) {
    std::vector<bool> seen(point_count, false);
    for (std::size_t i = 0; i < point_count; ++i) {
      Point p = images[g * point_count + i];
      if (p >= point_count || seen[p])
        throw Error(Errc::invalid_permutation, "action image is not a permutation");
      seen[p] = true;
    }
  }
  GroupAction a(std::move(group), point_count, std::move(images));
  a.verify_homomorphism();
  return a;
}

GroupAction GroupAction::from_generator_images(GroupPtr group,
                                               const std::vector<Permutation> &generator_images) {
  if (generator_images.size() != group->generators().size())
    throw Error(Errc::length_mismatch, "expected " + std::to_string(group->generators().size()) +
                                           " generator images, got " +
                                           std::to_string(generator_images.size()));
  const std::size_t m = generator_images.empty() ? 0 : generator_images.front().degree();
  for (const auto &p : generator_images)
    if (p.degree() != m)
      throw Error(Errc::degree_mismatch, "generator images have differing degrees");
  if (m == 0)
    throw Error(Errc::invalid_permutation,
                "cannot infer the point count of an action without generators");
  std::vector<Point> images(group->order() * m);
  for (std::size_t i = 0; i < m; ++i)
    images[i] = static_cast<Point>(i);
  for (ElemIndex e = 1; e < group->order(); ++e) {
    const Permutation &s = generator_images[group->parent_generator(e)];
    const Point *par = &images[group->parent(e) * m];
    Point *row = &images[e * m];
    for (std::size_t i = 0; i < m; ++i)
      row[i] = s[par[i]];
  }
  GroupAction a(std::move(group), m, std::move(images));
  a.verify_homomorphism();
  return a;
}

// Left multiplication by generators reaches every product, so checking
// image(s g) = image(s) o image(g) for all generators s and elements g
// establishes the homomorphism property by induction on word length.
void GroupAction::verify_homomorphism() const {
  const auto &grp = *group_;
  const auto &gens = grp.generator_indices();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    for (ElemIndex g = 0; g < grp.order(); ++g) {
      ElemIndex sg = grp.multiply(gens[k], g);
      for (std::size_t i = 0; i < point_count_; ++i)
        if (act(sg, static_cast<Point>(i)) != act(gens[k], act(g, static_cast<Point>(i))))
          throw Error(Errc::not_a_homomorphism,
                      "generator images do not define a group action");
    }
  }
  for (std::size_t i = 0; i < point_count_; ++i)
    if (act(0, static_cast<Point>(i)) != i)
      throw Error(Errc::not_a_homomorphism, "identity does not act trivially");
}

bool GroupAction::is_homomorphism_exhaustive() const {
  const auto &grp = *group_;
  for (ElemIndex g = 0; g < grp.order(); ++g)
    for (ElemIndex h = 0; h < grp.order(); ++h) {
      ElemIndex gh = grp.multiply(g, h);
      for (std::size_t i = 0; i < point_count_; ++i)
        if (act(gh, static_cast<Point>(i)) != act(g, act(h, static_cast<Point>(i))))
          return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Orbits and subgroups attached to actions

namespace {

void check_point(const GroupAction &action, Point point) {
  if (point >= action.point_count())
    throw Error(Errc::point_out_of_range, "point " + std::to_string(point) +
                                              " out of range for action on " +
                                              std::to_string(action.point_count()) + " points");
}

void check_parent(const FiniteGroup &group, const Subgroup &sub) {
  if (!sub.parent() || sub.parent().get() != &group)
    throw Error(Errc::not_a_subgroup, "subgroup belongs to a different group");
}

}  // namespace

std::vector<Point> orbit(const GroupAction &action, Point point) {
  check_point(action, point);
  const auto &gens = action.group()->generator_indices();
  std::vector<bool> seen(action.point_count(), false);
  std::vector<Point> out{point};
  seen[point] = true;
  for (std::size_t head = 0; head < out.size(); ++head)
    for (ElemIndex g : gens) {
      Point q = action.act(g, out[head]);
      if (!seen[q]) {
        seen[q] = true;
        out.push_back(q);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<Point>> orbits(const GroupAction &action) {
  std::vector<bool> seen(action.point_count(), false);
  std::vector<std::vector<Point>> out;
  for (Point p = 0; p < action.point_count(); ++p) {
    if (seen[p])
      continue;
    auto orb = orbit(action, p);
    for (Point q : orb)
      seen[q] = true;
    out.push_back(std::move(orb));
  }
  return out;
}

Subgroup stabilizer(const GroupAction &action, Point point) {
  check_point(action, point);
  std::vector<ElemIndex> members;
  for (ElemIndex g = 0; g < action.group()->order(); ++g)
    if (action.act(g, point) == point)
      members.push_back(g);
  return Subgroup::trusted(action.group(), std::move(members));
}

Subgroup kernel(const GroupAction &action) {
  std::vector<ElemIndex> members;
  for (ElemIndex g = 0; g < action.group()->order(); ++g) {
    auto img = action.image(g);
    bool fixes_all = true;
    for (std::size_t i = 0; i < img.size() && fixes_all; ++i)
      fixes_all = img[i] == i;
    if (fixes_all)
      members.push_back(g);
  }
  return Subgroup::trusted(action.group(), std::move(members));
}

Subgroup core(const FiniteGroup &group, const Subgroup &sub) {
  check_parent(group, sub);
  std::vector<bool> keep(group.order(), false);
  for (ElemIndex h : sub.members())
    keep[h] = true;
  for (ElemIndex g = 0; g < group.order(); ++g) {
    const ElemIndex gi = group.inverse(g);
    // h survives iff g h g^-1 lies in H, i.e. h lies in g^-1 H g.
    for (ElemIndex h : sub.members())
      if (keep[h] && !sub.contains(group.multiply(group.multiply(g, h), gi)))
        keep[h] = false;
  }
  std::vector<ElemIndex> members;
  for (ElemIndex h : sub.members())
    if (keep[h])
      members.push_back(h);
  return Subgroup::trusted(sub.parent(), std::move(members));
}

Subgroup normalizer(const FiniteGroup &group, const Subgroup &sub) {
  check_parent(group, sub);
  std::vector<ElemIndex> members;
  for (ElemIndex g = 0; g < group.order(); ++g) {
    const ElemIndex gi = group.inverse(g);
    bool normalizes = true;
    for (ElemIndex h : sub.members())
      if (!sub.contains(group.multiply(group.multiply(g, h), gi))) {
        normalizes = false;
        break;
      }
    if (normalizes)
      members.push_back(g);
  }
  return Subgroup::trusted(sub.parent(), std::move(members));
}

bool is_normal(const Subgroup &sub) {
  return normalizer(*sub.parent(), sub).order() == sub.parent()->order();
}

namespace {

std::vector<std::uint32_t> coset_labels(const FiniteGroup &group, const Subgroup &sub,
                                        std::vector<ElemIndex> *reps) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> label(group.order(), unset);
  std::uint32_t next = 0;
  for (ElemIndex g = 0; g < group.order(); ++g) {
    if (label[g] != unset)
      continue;
    for (ElemIndex h : sub.members())
      label[group.multiply(h, g)] = next;
    if (reps)
      reps->push_back(g);
    ++next;
  }
  return label;
}

}  // namespace

std::vector<ElemIndex> coset_representatives(const FiniteGroup &group, const Subgroup &sub) {
  check_parent(group, sub);
  std::vector<ElemIndex> reps;
  coset_labels(group, sub, &reps);
  return reps;
}

GroupAction coset_space(const FiniteGroup &group, const Subgroup &sub) {
  check_parent(group, sub);
  std::vector<ElemIndex> reps;
  auto label = coset_labels(group, sub, &reps);
  const std::size_t m = reps.size();
  std::vector<Point> images(group.order() * m);
  for (ElemIndex x = 0; x < group.order(); ++x) {
    const ElemIndex xi = group.inverse(x);
    for (std::size_t c = 0; c < m; ++c)
      images[x * m + c] = label[group.multiply(reps[c], xi)];
  }
  return GroupAction::from_images(sub.parent(), m, std::move(images));
}

ActionProperties action_properties(const GroupAction &action) {
  ActionProperties props;
  props.faithful = kernel(action).is_trivial();
  props.transitive = action.point_count() > 0 && orbit(action, 0).size() == action.point_count();
  props.regular =
      props.transitive && props.faithful && action.group()->order() == action.point_count();
  return props;
}

}  // namespace eqv
