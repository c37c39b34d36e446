#include "eqv/burnside.hpp"

#include <cmath>
#include <numbers>

#include "eqv/error.hpp"

namespace eqv {

std::int64_t GSetExpr::orbit_count() const {
  std::int64_t total = 0;
  for (auto p : multiplicities)
    total = checked::add(total, p);
  return total;
}

TableOfMarks::TableOfMarks(LatticePtr lattice, std::vector<std::int64_t> matrix)
    : lattice_(std::move(lattice)), matrix_(std::move(matrix)) {
  if (matrix_.size() != lattice_->size() * lattice_->size())
    throw Error(Errc::dimension_mismatch, "table of marks has wrong size");
}

MarkVector TableOfMarks::row(std::size_t i) const {
  const std::size_t k = size();
  return {std::vector<std::int64_t>(matrix_.begin() + static_cast<std::ptrdiff_t>(i * k),
                                    matrix_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k))};
}

bool TableOfMarks::is_lower_triangular() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*this)(i, i) <= 0)
      return false;
    for (std::size_t j = i + 1; j < size(); ++j)
      if ((*this)(i, j) != 0)
        return false;
  }
  return true;
}

std::int64_t TableOfMarks::determinant() const {
  std::int64_t det = 1;
  for (std::size_t i = 0; i < size(); ++i)
    det = checked::mul(det, (*this)(i, i));
  return det;
}

std::vector<Rational> TableOfMarks::inverse() const {
  if (!is_lower_triangular())
    throw Error(Errc::internal, "table of marks is not lower triangular");
  const std::size_t k = size();
  std::vector<Rational> inv(k * k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = c; r < k; ++r) {
      Rational acc = r == c ? Rational(1) : Rational(0);
      for (std::size_t s = c; s < r; ++s)
        if ((*this)(r, s) != 0)
          acc = acc - Rational((*this)(r, s)) * inv[s * k + c];
      inv[r * k + c] = acc / Rational((*this)(r, r));
    }
  return inv;
}

std::int64_t mark(const FiniteGroup &group, const Subgroup &sub_i, const Subgroup &sub_j) {
  if (sub_i.parent().get() != &group || sub_j.parent().get() != &group)
    throw Error(Errc::not_a_subgroup, "mark: subgroups belong to a different group");
  const GroupAction cosets = coset_space(group, sub_i);
  std::int64_t fixed = 0;
  for (Point p = 0; p < cosets.point_count(); ++p) {
    bool all = true;
    for (ElemIndex h : sub_j.members())
      if (cosets.act(h, p) != p) {
        all = false;
        break;
      }
    fixed += all ? 1 : 0;
  }
  return fixed;
}

TableOfMarks table_of_marks(LatticePtr lattice) {
  const FiniteGroup &g = *lattice->group();
  const std::size_t k = lattice->size();
  std::vector<std::int64_t> matrix(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const GroupAction cosets = coset_space(g, (*lattice)[i].representative);
    for (std::size_t j = 0; j < k; ++j) {
      const auto &hj = (*lattice)[j].representative;
      // Only classes that can sit inside G_i fix anything.
      if ((*lattice)[i].sub_order % hj.order() != 0)
        continue;
      std::int64_t fixed = 0;
      for (Point p = 0; p < cosets.point_count(); ++p) {
        bool all = true;
        for (ElemIndex h : hj.members())
          if (cosets.act(h, p) != p) {
            all = false;
            break;
          }
        fixed += all ? 1 : 0;
      }
      matrix[i * k + j] = fixed;
    }
  }
  return TableOfMarks(std::move(lattice), std::move(matrix));
}

GSetExpr indicator(const TableOfMarks &table, std::size_t cls) {
  if (cls >= table.size())
    throw Error(Errc::dimension_mismatch, "class index out of range");
  GSetExpr e{std::vector<std::int64_t>(table.size(), 0)};
  e.multiplicities[cls] = 1;
  return e;
}

MarkVector mark_vector(const TableOfMarks &table, const GSetExpr &expr) {
  const std::size_t k = table.size();
  if (expr.multiplicities.size() != k)
    throw Error(Errc::dimension_mismatch, "expression has " +
                                              std::to_string(expr.multiplicities.size()) +
                                              " entries, table has " + std::to_string(k));
  MarkVector v{std::vector<std::int64_t>(k, 0)};
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t p = expr.multiplicities[i];
    if (p == 0)
      continue;
    for (std::size_t j = 0; j <= i; ++j)
      v.entries[j] = checked::add(v.entries[j], checked::mul(p, table(i, j)));
  }
  return v;
}

GSetExpr decompose(const TableOfMarks &table, const MarkVector &v) {
  const std::size_t k = table.size();
  if (v.entries.size() != k)
    throw Error(Errc::dimension_mismatch, "mark vector has " + std::to_string(v.entries.size()) +
                                              " entries, table has " + std::to_string(k));
  GSetExpr p{std::vector<std::int64_t>(k, 0)};
  // v_j = sum_{i >= j} p_i M(i, j); solve from the last class down.
  for (std::size_t jj = k; jj-- > 0;) {
    std::int64_t rest = v.entries[jj];
    for (std::size_t i = jj + 1; i < k; ++i)
      if (p.multiplicities[i] != 0)
        rest = checked::sub(rest, checked::mul(p.multiplicities[i], table(i, jj)));
    const std::int64_t diag = table(jj, jj);
    if (rest % diag != 0)
      throw Error(Errc::non_integral_decomposition,
                  "mark vector is not an integral combination at class " +
                      table.lattice().label(jj));
    p.multiplicities[jj] = rest / diag;
    if (p.multiplicities[jj] < 0)
      throw Error(Errc::negative_multiplicity,
                  "negative multiplicity at class " + table.lattice().label(jj));
  }
  return p;
}

GSetExpr disjoint_union(const GSetExpr &a, const GSetExpr &b) {
  if (a.multiplicities.size() != b.multiplicities.size())
    throw Error(Errc::dimension_mismatch, "disjoint union of expressions of different length");
  GSetExpr out = a;
  for (std::size_t i = 0; i < out.multiplicities.size(); ++i)
    out.multiplicities[i] = checked::add(out.multiplicities[i], b.multiplicities[i]);
  return out;
}

namespace {

MarkVector hadamard(const MarkVector &a, const MarkVector &b) {
  MarkVector out{std::vector<std::int64_t>(a.entries.size())};
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    out.entries[i] = checked::mul(a.entries[i], b.entries[i]);
  return out;
}

GSetExpr decompose_or_internal(const TableOfMarks &table, const MarkVector &v) {
  try {
    return decompose(table, v);
  } catch (const Error &e) {
    if (e.code() == Errc::non_integral_decomposition || e.code() == Errc::negative_multiplicity)
      throw Error(Errc::internal, std::string("product of G-sets failed to decompose: ") +
                                      e.what());
    throw;
  }
}

}  // namespace

GSetExpr product(const TableOfMarks &table, const GSetExpr &a, const GSetExpr &b) {
  return decompose_or_internal(table, hadamard(mark_vector(table, a), mark_vector(table, b)));
}

GSetExpr power(const TableOfMarks &table, const GSetExpr &expr, std::size_t d) {
  if (d == 0)
    return indicator(table, table.size() - 1);
  const MarkVector base = mark_vector(table, expr);
  MarkVector acc = base;
  for (std::size_t k = 1; k < d; ++k)
    acc = hadamard(acc, base);
  return decompose_or_internal(table, acc);
}

std::vector<std::int64_t> structure_coefficients(const TableOfMarks &table, std::size_t i,
                                                 std::size_t j) {
  const std::size_t k = table.size();
  if (i >= k || j >= k)
    throw Error(Errc::dimension_mismatch, "class index out of range");
  const auto inv = table.inverse();
  std::vector<std::int64_t> delta(k, 0);
  for (std::size_t target = 0; target < k; ++target) {
    Rational acc(0);
    for (std::size_t l = 0; l < k; ++l) {
      const std::int64_t m = checked::mul(table(i, l), table(j, l));
      if (m != 0)
        acc = acc + Rational(m) * inv[l * k + target];
    }
    if (!acc.is_integer() || acc.num() < 0)
      throw Error(Errc::internal, "structure coefficient " + acc.to_string() +
                                      " is not a non-negative integer");
    delta[target] = acc.num();
  }
  return delta;
}

std::size_t log2_order_bound(std::size_t sub_order) {
  std::size_t bound = 0;
  while ((std::size_t{1} << bound) < sub_order)
    ++bound;
  return bound == 0 ? 1 : bound;
}

std::size_t stirling_order_bound(std::size_t n) {
  if (n <= 2)
    return 1;
  const double nn = static_cast<double>(n);
  const double value = (nn - 0.5) * std::log2(nn - 1.0) - (nn - 2.0) * std::numbers::log2e;
  const double c = std::ceil(value);
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

RegularOrbitReport regular_orbit_order(const TableOfMarks &table, std::size_t h_class) {
  const auto &lattice = table.lattice();
  if (h_class >= lattice.size())
    throw Error(Errc::dimension_mismatch, "class index out of range");
  const auto &rep = lattice[h_class].representative;
  if (!core(*lattice.group(), rep).is_trivial())
    throw Error(Errc::unfaithful_action,
                "coset action of class " + lattice.label(h_class) + " is not faithful");

  RegularOrbitReport report;
  report.log_bound = log2_order_bound(rep.order());
  report.stirling_bound = stirling_order_bound(lattice.group()->order() / rep.order());

  const MarkVector base = table.row(h_class);
  MarkVector acc = base;
  for (std::size_t d = 1;; ++d) {
    if (decompose_or_internal(table, acc).multiplicities[0] > 0) {
      report.minimal_d = d;
      break;
    }
    if (d > report.log_bound)
      throw Error(Errc::internal, "no regular orbit within the log2 bound");
    acc = hadamard(acc, base);
  }
  return report;
}

}  // namespace eqv
