// Test-only reference computations. Nothing here calls the code paths it is
// used to check.
#ifndef EQV_TESTS_ORACLES_HPP
#define EQV_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "eqv/builtin.hpp"
#include "eqv/group.hpp"
#include "eqv/mlp.hpp"

namespace oracle {

using eqv::ElemIndex;
using eqv::GroupPtr;
using Members = std::vector<ElemIndex>;

struct Named {
  const char *name;
  GroupPtr group;
};

/// C6, S3, D4, S4, A5 plus a few small extras.
inline std::vector<Named> test_groups() {
  using namespace eqv::builtin;
  return {{"C6", cyclic(6)},    {"S3", symmetric(3)},   {"D4", dihedral(4)},
          {"S4", symmetric(4)}, {"A5", alternating(5)}, {"C4", cyclic(4)},
          {"trivial", trivial(3)}};
}

inline bool closed(const eqv::FiniteGroup &g, const Members &m) {
  std::vector<bool> in(g.order(), false);
  for (auto x : m)
    in[x] = true;
  for (auto a : m)
    for (auto b : m)
      if (!in[g.multiply(a, b)])
        return false;
  return true;
}

/// <gens> by repeated multiplication of permutations (not element indices).
inline Members generate(const eqv::FiniteGroup &g, const Members &gens) {
  std::set<eqv::Permutation> seen{eqv::Permutation::identity(g.degree())};
  std::vector<eqv::Permutation> todo(seen.begin(), seen.end());
  while (!todo.empty()) {
    auto p = todo.back();
    todo.pop_back();
    for (auto s : gens) {
      auto q = eqv::compose(p, g.element(s));
      if (seen.insert(q).second)
        todo.push_back(q);
    }
  }
  Members out;
  for (const auto &p : seen)
    out.push_back(*g.find(p));
  std::sort(out.begin(), out.end());
  return out;
}

/// Every closed subset containing the identity, by exhaustive search over
/// subsets whose size divides |G|. Only practical for |G| <= 12.
inline std::set<Members> subgroups_by_subsets(const eqv::FiniteGroup &g) {
  const std::size_t n = g.order();
  std::set<Members> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    Members m{0};
    for (std::size_t b = 0; b + 1 < n; ++b)
      if (mask >> b & 1)
        m.push_back(static_cast<ElemIndex>(b + 1));
    if (n % m.size() == 0 && closed(g, m))
      out.insert(m);
  }
  return out;
}

/// Subgroups generated by at most two elements, then closed under pairwise
/// joins until nothing new appears.
inline std::set<Members> subgroups_by_joins(const eqv::FiniteGroup &g) {
  std::set<Members> found;
  for (ElemIndex a = 0; a < g.order(); ++a)
    for (ElemIndex b = a; b < g.order(); ++b)
      found.insert(generate(g, {a, b}));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Members> list(found.begin(), found.end());
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        Members gens = list[i];
        gens.insert(gens.end(), list[j].begin(), list[j].end());
        if (found.insert(generate(g, gens)).second)
          grew = true;
      }
  }
  return found;
}

/// Orbit of a point by applying every group element.
inline std::vector<eqv::Point> orbit_all_elements(const eqv::GroupAction &a, eqv::Point p) {
  std::set<eqv::Point> s;
  for (ElemIndex g = 0; g < a.group()->order(); ++g)
    s.insert(a.act(g, p));
  return {s.begin(), s.end()};
}

/// Direct group average (1/|G|) sum_g B_{g^-1} f(A_g x).
inline Eigen::VectorXd reynolds(const eqv::PlainMLP &f, const eqv::GroupAction &in,
                                const eqv::GroupAction &out, const Eigen::VectorXd &x) {
  const auto &g = *in.group();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.point_count()));
  for (ElemIndex e = 0; e < g.order(); ++e) {
    Eigen::VectorXd gx(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      gx(in.act(e, static_cast<eqv::Point>(i))) = x(i);
    const Eigen::VectorXd y = f(gx);
    // B_{e^-1} y: (B_h v)(h.o) = v(o), so entry o of B_{e^-1} y is y(e.o).
    for (Eigen::Index o = 0; o < acc.size(); ++o)
      acc(o) += y(out.act(e, static_cast<eqv::Point>(o)));
  }
  return acc / static_cast<double>(g.order());
}

/// Central differences of a scalar function of the flat parameter vector.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double> &)> &f,
                                             std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + h;
    const double up = f(x);
    x[k] = keep - h;
    const double down = f(x);
    x[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

}  // namespace oracle

#endif  // EQV_TESTS_ORACLES_HPP
