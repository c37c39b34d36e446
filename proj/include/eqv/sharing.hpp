#ifndef EQV_SHARING_HPP
#define EQV_SHARING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eqv/group.hpp"

namespace eqv {

/// Weight tying for an equivariant linear map R^N -> R^O: cell (o, i) holds
/// the id of its orbit under g.(o, i) = (g.o, g.i). Ids are numbered in order
/// of each orbit's smallest row-major cell.
struct SharingPattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> orbit_of;
  std::size_t num_orbits = 0;
  std::vector<std::uint32_t> bias_orbit_of;
  std::size_t num_bias_orbits = 0;
  /// Diagnostics such as an unfaithful input action. Not part of equality.
  std::vector<std::string> warnings;

  std::uint32_t orbit(std::size_t o, std::size_t i) const { return orbit_of[o * cols + i]; }
  /// Row-major cell indices of every orbit.
  std::vector<std::vector<std::uint32_t>> orbit_cells() const;

  bool operator==(const SharingPattern &other) const {
    return rows == other.rows && cols == other.cols && orbit_of == other.orbit_of &&
           bias_orbit_of == other.bias_orbit_of;
  }
};

SharingPattern make_pattern(const GroupAction &out_action, const GroupAction &in_action);

struct DenseMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd bias;
};

DenseMap instantiate(const SharingPattern &pattern, std::span<const double> weights,
                     std::span<const double> biases);

struct EquivarianceReport {
  bool ok = true;
  /// Position in the generator list of the worst violation.
  std::size_t worst_generator = 0;
  double max_deviation = 0.0;
};

/// Checks B_g M A_g^T = M and B_g b = b for every generator. `bias` may be
/// empty.
EquivarianceReport check_equivariance(const Eigen::MatrixXd &matrix, const Eigen::VectorXd &bias,
                                      const GroupAction &out_action,
                                      const GroupAction &in_action, double tol);

/// An equivariant map between transitive G-sets written as a cross-correlation:
/// y(o) = sum_i phi(g_o^-1 . i) x(i), with g_o . o_0 = o.
struct KernelForm {
  /// Smallest element moving point 0 to each input / output point.
  std::vector<ElemIndex> input_cosets;
  std::vector<ElemIndex> output_cosets;
  /// Free-parameter id of phi(i), i.e. the orbit of cell (0, i).
  std::vector<std::uint32_t> kernel_orbit;
  std::size_t num_params = 0;
  std::size_t double_coset_count = 0;
  /// pull[o * |N| + i] = g_o^-1 . i
  std::vector<Point> pull;

  std::vector<double> kernel(std::span<const double> weights) const;
  Eigen::VectorXd apply(std::span<const double> weights, const Eigen::VectorXd &x) const;
};

/// Throws Errc::not_transitive unless both actions are transitive.
KernelForm kernel_form(const SharingPattern &pattern, const GroupAction &out_action,
                       const GroupAction &in_action);

/// Number of double cosets H g K.
std::size_t double_coset_count(const Subgroup &h, const Subgroup &k);

}  // namespace eqv

#endif  // EQV_SHARING_HPP
