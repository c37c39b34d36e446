#include "eqv/gset.hpp"

#include "eqv/error.hpp"

namespace eqv {

namespace {

// Upper bound on stored action entries (|G| x points).
constexpr std::size_t kImageEntryCap = 125'000'000;

void check_size(std::size_t points, std::size_t order, std::size_t cap) {
  if (points > cap)
    throw Error(Errc::size_cap_exceeded,
                "explicit G-set exceeds the cap of " + std::to_string(cap) + " points");
  if (points * order > kImageEntryCap)
    throw Error(Errc::size_cap_exceeded, "explicit G-set action table too large (" +
                                             std::to_string(points) + " points x " +
                                             std::to_string(order) + " elements)");
}

std::size_t checked_size_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (a != 0 && b > cap / a)
    return cap + 1;
  return a * b;
}

}  // namespace

std::vector<Point> ExplicitGSet::tuple(Point index) const {
  std::vector<Point> t(radices.size());
  for (std::size_t k = radices.size(); k-- > 0;) {
    t[k] = static_cast<Point>(index % radices[k]);
    index = static_cast<Point>(index / radices[k]);
  }
  return t;
}

Point ExplicitGSet::encode(const std::vector<Point> &t) const {
  if (t.size() != radices.size())
    throw Error(Errc::length_mismatch, "tuple length does not match product arity");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= radices[k])
      throw Error(Errc::point_out_of_range, "tuple component out of range");
    idx = idx * radices[k] + t[k];
  }
  return static_cast<Point>(idx);
}

GroupAction disjoint_union(const GroupAction &a, const GroupAction &b) {
  if (a.group() != b.group())
    throw Error(Errc::group_mismatch, "disjoint union of actions of different groups");
  const std::size_t na = a.point_count(), nb = b.point_count(), n = na + nb;
  const std::size_t order = a.group()->order();
  std::vector<Point> images(order * n);
  for (ElemIndex g = 0; g < order; ++g) {
    for (std::size_t i = 0; i < na; ++i)
      images[g * n + i] = a.act(g, static_cast<Point>(i));
    for (std::size_t i = 0; i < nb; ++i)
      images[g * n + na + i] = static_cast<Point>(na + b.act(g, static_cast<Point>(i)));
  }
  return GroupAction::from_images(a.group(), n, std::move(images));
}

ExplicitGSet cartesian_product(const GroupAction &a, const GroupAction &b, std::size_t cap) {
  if (a.group() != b.group())
    throw Error(Errc::group_mismatch, "product of actions of different groups");
  const std::size_t na = a.point_count(), nb = b.point_count();
  const std::size_t n = checked_size_mul(na, nb, cap);
  const std::size_t order = a.group()->order();
  check_size(n, order, cap);
  std::vector<Point> images(order * n);
  for (ElemIndex g = 0; g < order; ++g)
    for (std::size_t x = 0; x < na; ++x) {
      const std::size_t gx = a.act(g, static_cast<Point>(x));
      for (std::size_t y = 0; y < nb; ++y)
        images[g * n + x * nb + y] = static_cast<Point>(gx * nb + b.act(g, static_cast<Point>(y)));
    }
  return {GroupAction::from_images(a.group(), n, std::move(images)), {na, nb}};
}

ExplicitGSet diagonal_power(const GroupAction &a, std::size_t d, std::size_t cap) {
  if (d == 0)
    throw Error(Errc::range_error, "diagonal power needs D >= 1");
  const std::size_t m = a.point_count();
  std::size_t n = 1;
  for (std::size_t k = 0; k < d; ++k)
    n = checked_size_mul(n, m, cap);
  const std::size_t order = a.group()->order();
  check_size(n, order, cap);

  std::vector<Point> images(order * n);
  std::vector<Point> digits(d);
  for (ElemIndex g = 0; g < order; ++g) {
    Point *row = &images[g * n];
    std::fill(digits.begin(), digits.end(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::size_t img = 0;
      for (std::size_t k = 0; k < d; ++k)
        img = img * m + a.act(g, digits[k]);
      row[idx] = static_cast<Point>(img);
      for (std::size_t k = d; k-- > 0;) {
        if (++digits[k] < m)
          break;
        digits[k] = 0;
      }
    }
  }
  return {GroupAction::from_images(a.group(), n, std::move(images)),
          std::vector<std::size_t>(d, m)};
}

GSetExpr orbit_decompose(const GroupAction &action, const SubgroupLattice &lattice) {
  if (action.group() != lattice.group())
    throw Error(Errc::group_mismatch, "lattice belongs to a different group");
  GSetExpr expr{std::vector<std::int64_t>(lattice.size(), 0)};
  for (const auto &orb : orbits(action)) {
    // Orbits come sorted, so front() is the minimal encoding.
    const Subgroup stab = stabilizer(action, orb.front());
    expr.multiplicities[lattice.class_of(stab)] += 1;
  }
  return expr;
}

MarkVector fixed_point_marks(const GroupAction &action, const SubgroupLattice &lattice) {
  if (action.group() != lattice.group())
    throw Error(Errc::group_mismatch, "lattice belongs to a different group");
  MarkVector v{std::vector<std::int64_t>(lattice.size(), 0)};
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    const auto &members = lattice[j].representative.members();
    for (Point p = 0; p < action.point_count(); ++p) {
      bool fixed = true;
      for (ElemIndex h : members)
        if (action.act(h, p) != p) {
          fixed = false;
          break;
        }
      v.entries[j] += fixed ? 1 : 0;
    }
  }
  return v;
}

std::uint64_t stirling2(std::size_t big_d, std::size_t d) {
  if (big_d > 20 || d > big_d)
    throw Error(Errc::range_error, "stirling2 needs 0 <= d <= D <= 20");
  // S(n, k) = k S(n-1, k) + S(n-1, k-1).
  std::vector<std::uint64_t> row(big_d + 1, 0);
  row[0] = 1;
  for (std::size_t n = 1; n <= big_d; ++n)
    for (std::size_t k = n; k-- > 0;) {
      row[k + 1] = (k + 1) * row[k + 1] + row[k];
      if (k == 0)
        row[0] = 0;
    }
  return row[d];
}

std::uint64_t bell(std::size_t big_d) {
  std::uint64_t total = 0;
  for (std::size_t d = 0; d <= big_d; ++d)
    total += stirling2(big_d, d);
  return total;
}

}  // namespace eqv
