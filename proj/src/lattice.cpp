#include "eqv/lattice.hpp"

#include <algorithm>
#include <map>

#include "eqv/error.hpp"

namespace eqv {

std::size_t VectorHash::operator()(const std::vector<ElemIndex> &v) const noexcept {
  std::size_t h = 1469598103934665603ull ^ v.size();
  for (ElemIndex x : v) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::size_t element_order(const FiniteGroup &g, ElemIndex x) {
  std::size_t k = 1;
  for (ElemIndex y = x; y != 0; y = g.multiply(y, x))
    ++k;
  return k;
}

std::string structural_name(const FiniteGroup &g, const Subgroup &h) {
  const std::size_t n = h.order();
  if (n == 1)
    return "e";
  std::map<std::size_t, std::size_t> by_order;
  ElemIndex max_elem = 0;
  std::size_t max_order = 1;
  for (ElemIndex x : h.members()) {
    std::size_t o = element_order(g, x);
    ++by_order[o];
    if (o > max_order) {
      max_order = o;
      max_elem = x;
    }
  }
  const std::string num = std::to_string(n);
  if (max_order == n)
    return "C" + num;

  bool abelian = true;
  for (ElemIndex a : h.members())
    for (ElemIndex b : h.members())
      if (g.multiply(a, b) != g.multiply(b, a)) {
        abelian = false;
        break;
      }
  if (abelian)
    return n == 4 ? "K4" : "Ab" + num;

  auto count = [&](std::size_t o) { return by_order.count(o) ? by_order.at(o) : 0; };

  // Dihedral: a cyclic subgroup of index 2 whose complement is all involutions.
  if (max_order * 2 == n) {
    std::vector<bool> in_cyclic(g.order(), false);
    for (ElemIndex y = max_elem;; y = g.multiply(y, max_elem)) {
      in_cyclic[y] = true;
      if (y == 0)
        break;
    }
    bool dihedral = true;
    for (ElemIndex x : h.members())
      if (!in_cyclic[x] && g.multiply(x, x) != 0)
        dihedral = false;
    if (dihedral)
      return n == 6 ? "S3" : "D" + num;
  }
  if (n == 8 && count(2) == 1 && count(4) == 6)
    return "Q8";
  if (n == 12 && count(2) == 3 && count(3) == 8)
    return "A4";
  if (n == 24 && count(2) == 9 && count(3) == 8 && count(4) == 6)
    return "S4";
  if (n == 60 && count(2) == 15 && count(3) == 20 && count(5) == 24)
    return "A5";
  if (n == 120 && count(2) == 25 && count(3) == 20 && count(4) == 30 && count(5) == 24 &&
      count(6) == 20)
    return "S5";
  return "H" + num;
}

// <H, x>: H is already closed, so only new products need exploring.
std::vector<ElemIndex> join(const FiniteGroup &g, const std::vector<ElemIndex> &members,
                            const std::vector<ElemIndex> &gens, std::vector<char> &mark) {
  std::vector<ElemIndex> out(members);
  for (ElemIndex m : out)
    mark[m] = 1;
  for (std::size_t head = 0; head < out.size(); ++head)
    for (ElemIndex s : gens) {
      ElemIndex y = g.multiply(out[head], s);
      if (!mark[y]) {
        mark[y] = 1;
        out.push_back(y);
      }
    }
  for (ElemIndex m : out)
    mark[m] = 0;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SubgroupLattice::SubgroupLattice(GroupPtr group, std::vector<ConjugacyClass> classes)
    : group_(std::move(group)), classes_(std::move(classes)) {
  const std::size_t k = classes_.size();
  for (std::size_t c = 0; c < k; ++c)
    for (const auto &m : classes_[c].members)
      class_of_.emplace(m.members(), c);

  leq_.assign(k * k, false);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (classes_[j].sub_order % classes_[i].sub_order != 0)
        continue;
      const auto &rep = classes_[j].representative;
      leq_[i * k + j] = std::any_of(classes_[i].members.begin(), classes_[i].members.end(),
                                    [&](const Subgroup &m) { return m.is_subgroup_of(rep); });
    }

  labels_.reserve(k);
  std::map<std::string, std::size_t> seen;
  for (const auto &c : classes_) {
    labels_.push_back(structural_name(*group_, c.representative));
    ++seen[labels_.back()];
  }
  std::map<std::string, std::size_t> used;
  for (auto &l : labels_)
    if (seen[l] > 1) {
      std::size_t idx = used[l]++;
      l += static_cast<char>('a' + idx % 26);
      if (idx >= 26)
        l += std::to_string(idx / 26);
    }
}

std::size_t SubgroupLattice::class_of(const std::vector<ElemIndex> &sorted_members) const {
  auto it = class_of_.find(sorted_members);
  if (it == class_of_.end())
    throw Error(Errc::stabilizer_not_in_lattice, "subgroup of order " +
                                                     std::to_string(sorted_members.size()) +
                                                     " is not in the lattice");
  return it->second;
}

std::size_t SubgroupLattice::class_of(const Subgroup &sub) const {
  return class_of(sub.members());
}

std::size_t SubgroupLattice::index_of_label(const std::string &label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw Error(Errc::range_error, "no subgroup class labelled '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<Subgroup> all_subgroups(const GroupPtr &group, std::size_t lattice_cap) {
  const FiniteGroup &g = *group;
  if (g.order() > lattice_cap)
    throw Error(Errc::lattice_cap_exceeded, "group order " + std::to_string(g.order()) +
                                                " exceeds lattice cap " +
                                                std::to_string(lattice_cap));

  struct Entry {
    std::vector<ElemIndex> members;
    std::vector<ElemIndex> gens;
  };
  std::vector<Entry> found;
  std::unordered_map<std::vector<ElemIndex>, std::size_t, VectorHash> index;
  std::vector<char> mark(g.order(), 0);

  auto add = [&](std::vector<ElemIndex> members, std::vector<ElemIndex> gens) {
    if (index.count(members))
      return;
    index.emplace(members, found.size());
    found.push_back({std::move(members), std::move(gens)});
  };

  add({0}, {});
  // Cyclic subgroups, remembered by one generator each.
  std::vector<std::size_t> cyclic;
  for (ElemIndex x = 1; x < g.order(); ++x) {
    auto members = join(g, {0}, {x}, mark);
    if (!index.count(members)) {
      cyclic.push_back(found.size());
      add(std::move(members), {x});
    }
  }

  for (std::size_t head = 0; head < found.size(); ++head) {
    for (std::size_t c : cyclic) {
      const ElemIndex x = found[c].gens.front();
      if (std::binary_search(found[head].members.begin(), found[head].members.end(), x))
        continue;
      auto gens = found[head].gens;
      gens.push_back(x);
      auto members = join(g, found[head].members, gens, mark);
      add(std::move(members), std::move(gens));
    }
  }

  std::vector<Subgroup> out;
  out.reserve(found.size());
  for (auto &e : found)
    out.push_back(Subgroup::trusted(group, std::move(e.members)));
  return out;
}

SubgroupLattice conjugacy_classes(const GroupPtr &group, const std::vector<Subgroup> &subs) {
  const FiniteGroup &g = *group;
  std::unordered_map<std::vector<ElemIndex>, std::size_t, VectorHash> index;
  for (std::size_t i = 0; i < subs.size(); ++i)
    index.emplace(subs[i].members(), i);

  std::vector<bool> assigned(subs.size(), false);
  std::vector<ConjugacyClass> classes;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (assigned[i])
      continue;
    std::vector<std::size_t> conj;
    for (ElemIndex x = 0; x < g.order(); ++x) {
      Subgroup c = subs[i].conjugate(x);
      auto it = index.find(c.members());
      if (it == index.end())
        throw Error(Errc::internal, "subgroup list is not closed under conjugation");
      if (!assigned[it->second]) {
        assigned[it->second] = true;
        conj.push_back(it->second);
      }
    }
    std::sort(conj.begin(), conj.end(), [&](std::size_t a, std::size_t b) {
      return subs[a].members() < subs[b].members();
    });
    ConjugacyClass cls;
    for (std::size_t c : conj)
      cls.members.push_back(subs[c]);
    cls.representative = cls.members.front();
    cls.sub_order = cls.representative.order();
    classes.push_back(std::move(cls));
  }

  std::sort(classes.begin(), classes.end(), [](const ConjugacyClass &a, const ConjugacyClass &b) {
    if (a.sub_order != b.sub_order)
      return a.sub_order < b.sub_order;
    return a.representative.members() < b.representative.members();
  });
  return SubgroupLattice(group, std::move(classes));
}

SubgroupLattice build_lattice(const GroupPtr &group, std::size_t lattice_cap) {
  return conjugacy_classes(group, all_subgroups(group, lattice_cap));
}

}  // namespace eqv
