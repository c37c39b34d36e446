#ifndef EQV_PERMUTATION_HPP
#define EQV_PERMUTATION_HPP

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace eqv {

using Point = std::uint32_t;

/// A bijection on {0, ..., n-1}; images()[i] is where point i is sent.
class Permutation {
 public:
  Permutation() = default;

  /// Throws Errc::invalid_permutation unless `images` is a bijection of
  /// positive length.
  explicit Permutation(std::vector<Point> images);

  static Permutation identity(std::size_t degree);

  /// Builds a permutation from disjoint cycles, e.g. {{0, 1, 2}, {3, 4}}.
  static Permutation from_cycles(std::size_t degree,
                                 std::initializer_list<std::initializer_list<Point>> cycles);

  std::size_t degree() const noexcept { return images_.size(); }
  Point operator[](Point i) const { return images_[i]; }
  std::span<const Point> images() const noexcept { return images_; }
  bool is_identity() const noexcept;

  std::string to_string() const;

  auto operator<=>(const Permutation &) const = default;

 private:
  std::vector<Point> images_;
};

/// compose(p, q)[i] = p[q[i]], i.e. q is applied first.
Permutation compose(const Permutation &p, const Permutation &q);
Permutation inverse(const Permutation &p);

struct PermutationHash {
  std::size_t operator()(const Permutation &p) const noexcept;
};

}  // namespace eqv

#endif  // EQV_PERMUTATION_HPP
