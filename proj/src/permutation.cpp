#include "eqv/permutation.hpp"

#include <sstream>

#include "eqv/error.hpp"

namespace eqv {

Permutation::Permutation(std::vector<Point> images) : images_(std::move(images)) {
  if (images_.empty())
    throw Error(Errc::invalid_permutation, "permutation of degree 0");
  std::vector<bool> seen(images_.size(), false);
  for (Point p : images_) {
    if (p >= images_.size() || seen[p])
      throw Error(Errc::invalid_permutation,
                  "images are not a bijection on 0.." + std::to_string(images_.size() - 1));
    seen[p] = true;
  }
}

Permutation Permutation::identity(std::size_t degree) {
  std::vector<Point> images(degree);
  for (std::size_t i = 0; i < degree; ++i)
    images[i] = static_cast<Point>(i);
  return Permutation(std::move(images));
}

Permutation Permutation::from_cycles(
    std::size_t degree, std::initializer_list<std::initializer_list<Point>> cycles) {
  std::vector<Point> images(degree);
  for (std::size_t i = 0; i < degree; ++i)
    images[i] = static_cast<Point>(i);
  for (const auto &c : cycles) {
    std::vector<Point> cyc(c);
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      if (cyc[k] >= degree)
        throw Error(Errc::invalid_permutation, "cycle point out of range");
      images[cyc[k]] = cyc[(k + 1) % cyc.size()];
    }
  }
  return Permutation(std::move(images));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i)
      return false;
  return true;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < images_.size(); ++i)
    os << (i ? "," : "") << images_[i];
  os << ']';
  return os.str();
}

Permutation compose(const Permutation &p, const Permutation &q) {
  if (p.degree() != q.degree())
    throw Error(Errc::degree_mismatch, "compose: degrees " + std::to_string(p.degree()) +
                                           " and " + std::to_string(q.degree()));
  std::vector<Point> out(p.degree());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = p[q[static_cast<Point>(i)]];
  return Permutation(std::move(out));
}

Permutation inverse(const Permutation &p) {
  std::vector<Point> out(p.degree());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[p[static_cast<Point>(i)]] = static_cast<Point>(i);
  return Permutation(std::move(out));
}

std::size_t PermutationHash::operator()(const Permutation &p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Point x : p.images()) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace eqv
