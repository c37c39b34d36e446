#include "eqv/builtin.hpp"

#include <charconv>
#include <string>

#include "eqv/error.hpp"

namespace eqv::builtin {

namespace {

Permutation shift_cycle(std::size_t degree, std::size_t first) {
  std::vector<Point> images(degree);
  for (std::size_t i = 0; i < degree; ++i)
    images[i] = static_cast<Point>(i);
  for (std::size_t i = first; i < degree; ++i)
    images[i] = static_cast<Point>(i + 1 < degree ? i + 1 : first);
  return Permutation(std::move(images));
}

void require_positive(std::size_t n) {
  if (n == 0)
    throw Error(Errc::range_error, "builtin group needs n >= 1");
}

GroupPtr make(std::size_t degree, std::vector<Permutation> gens, std::string name,
              std::size_t cap) {
  return FiniteGroup::closure(degree, std::move(gens), std::move(name), cap);
}

GroupPtr cyclic_capped(std::size_t n, std::size_t cap) {
  require_positive(n);
  std::vector<Permutation> gens;
  if (n > 1)
    gens.push_back(shift_cycle(n, 0));
  return make(n, std::move(gens), "C" + std::to_string(n), cap);
}

GroupPtr dihedral_capped(std::size_t n, std::size_t cap) {
  require_positive(n);
  std::vector<Permutation> gens;
  if (n > 1)
    gens.push_back(shift_cycle(n, 0));
  if (n > 2) {
    std::vector<Point> refl(n);
    for (std::size_t i = 0; i < n; ++i)
      refl[i] = static_cast<Point>((n - i) % n);
    gens.emplace_back(std::move(refl));
  }
  return make(n, std::move(gens), "D" + std::to_string(n), cap);
}

GroupPtr symmetric_capped(std::size_t n, std::size_t cap) {
  require_positive(n);
  std::vector<Permutation> gens;
  if (n > 1)
    gens.push_back(Permutation::from_cycles(n, {{0, 1}}));
  if (n > 2)
    gens.push_back(shift_cycle(n, 0));
  return make(n, std::move(gens), "S" + std::to_string(n), cap);
}

GroupPtr alternating_capped(std::size_t n, std::size_t cap) {
  require_positive(n);
  std::vector<Permutation> gens;
  if (n > 2)
    gens.push_back(Permutation::from_cycles(n, {{0, 1, 2}}));
  // (0 1 ... n-1) is even for odd n; for even n use (1 2 ... n-1).
  if (n > 3)
    gens.push_back(shift_cycle(n, n % 2 == 1 ? 0 : 1));
  return make(n, std::move(gens), "A" + std::to_string(n), cap);
}

}  // namespace

GroupPtr cyclic(std::size_t n) { return cyclic_capped(n, kDefaultOrderCap); }
GroupPtr dihedral(std::size_t n) { return dihedral_capped(n, kDefaultOrderCap); }
GroupPtr symmetric(std::size_t n) { return symmetric_capped(n, kDefaultOrderCap); }
GroupPtr alternating(std::size_t n) { return alternating_capped(n, kDefaultOrderCap); }

GroupPtr trivial(std::size_t degree) { return make(degree, {}, "1", kDefaultOrderCap); }

GroupPtr from_name(std::string_view spec, std::size_t order_cap) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw Error(Errc::range_error, "builtin group must look like kind:n, got '" +
                                       std::string(spec) + "'");
  const auto kind = spec.substr(0, colon);
  const auto num = spec.substr(colon + 1);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
  if (ec != std::errc() || ptr != num.data() + num.size())
    throw Error(Errc::range_error, "bad size in builtin group '" + std::string(spec) + "'");
  if (kind == "cyclic")
    return cyclic_capped(n, order_cap);
  if (kind == "dihedral")
    return dihedral_capped(n, order_cap);
  if (kind == "symmetric")
    return symmetric_capped(n, order_cap);
  if (kind == "alternating")
    return alternating_capped(n, order_cap);
  throw Error(Errc::range_error, "unknown builtin group kind '" + std::string(kind) + "'");
}

}  // namespace eqv::builtin
