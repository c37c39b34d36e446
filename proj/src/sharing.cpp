#include "eqv/sharing.hpp"

#include <cmath>

#include "eqv/error.hpp"

namespace eqv {

namespace {

constexpr auto kUnset = static_cast<std::uint32_t>(-1);

std::vector<std::uint32_t> label_orbits(std::size_t n, const std::vector<ElemIndex> &gens,
                                        const auto &act, std::size_t &count) {
  std::vector<std::uint32_t> label(n, kUnset);
  std::vector<std::size_t> queue;
  count = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (label[start] != kUnset)
      continue;
    const auto id = static_cast<std::uint32_t>(count++);
    label[start] = id;
    queue.assign(1, start);
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (ElemIndex g : gens) {
        std::size_t next = act(g, queue[head]);
        if (label[next] == kUnset) {
          label[next] = id;
          queue.push_back(next);
        }
      }
  }
  return label;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> SharingPattern::orbit_cells() const {
  std::vector<std::vector<std::uint32_t>> cells(num_orbits);
  for (std::size_t c = 0; c < orbit_of.size(); ++c)
    cells[orbit_of[c]].push_back(static_cast<std::uint32_t>(c));
  return cells;
}

SharingPattern make_pattern(const GroupAction &out_action, const GroupAction &in_action) {
  if (out_action.group() != in_action.group())
    throw Error(Errc::group_mismatch, "input and output actions belong to different groups");
  const auto &gens = out_action.group()->generator_indices();
  const std::size_t rows = out_action.point_count(), cols = in_action.point_count();

  SharingPattern p;
  p.rows = rows;
  p.cols = cols;
  p.orbit_of = label_orbits(
      rows * cols, gens,
      [&](ElemIndex g, std::size_t cell) {
        return out_action.act(g, static_cast<Point>(cell / cols)) * cols +
               in_action.act(g, static_cast<Point>(cell % cols));
      },
      p.num_orbits);
  p.bias_orbit_of = label_orbits(
      rows, gens,
      [&](ElemIndex g, std::size_t o) { return out_action.act(g, static_cast<Point>(o)); },
      p.num_bias_orbits);
  if (!action_properties(in_action).faithful)
    p.warnings.push_back("input action is not faithful; the map is invariant to its kernel");
  return p;
}

DenseMap instantiate(const SharingPattern &pattern, std::span<const double> weights,
                     std::span<const double> biases) {
  if (weights.size() != pattern.num_orbits)
    throw Error(Errc::length_mismatch, "expected " + std::to_string(pattern.num_orbits) +
                                           " weights, got " + std::to_string(weights.size()));
  if (biases.size() != pattern.num_bias_orbits)
    throw Error(Errc::length_mismatch, "expected " + std::to_string(pattern.num_bias_orbits) +
                                           " biases, got " + std::to_string(biases.size()));
  DenseMap out{Eigen::MatrixXd(pattern.rows, pattern.cols), Eigen::VectorXd(pattern.rows)};
  for (std::size_t o = 0; o < pattern.rows; ++o) {
    for (std::size_t i = 0; i < pattern.cols; ++i)
      out.matrix(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) =
          weights[pattern.orbit(o, i)];
    out.bias(static_cast<Eigen::Index>(o)) = biases[pattern.bias_orbit_of[o]];
  }
  return out;
}

EquivarianceReport check_equivariance(const Eigen::MatrixXd &matrix, const Eigen::VectorXd &bias,
                                      const GroupAction &out_action,
                                      const GroupAction &in_action, double tol) {
  if (out_action.group() != in_action.group())
    throw Error(Errc::group_mismatch, "input and output actions belong to different groups");
  const auto rows = static_cast<Eigen::Index>(out_action.point_count());
  const auto cols = static_cast<Eigen::Index>(in_action.point_count());
  if (matrix.rows() != rows || matrix.cols() != cols)
    throw Error(Errc::shape_mismatch,
                "matrix is " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                    ", actions need " + std::to_string(rows) + "x" + std::to_string(cols));
  if (bias.size() != 0 && bias.size() != rows)
    throw Error(Errc::shape_mismatch, "bias length does not match the output action");

  EquivarianceReport report;
  const auto &gens = out_action.group()->generator_indices();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const ElemIndex g = gens[k];
    double dev = 0.0;
    for (Eigen::Index o = 0; o < rows; ++o) {
      const auto go = static_cast<Eigen::Index>(out_action.act(g, static_cast<Point>(o)));
      for (Eigen::Index i = 0; i < cols; ++i) {
        const auto gi = static_cast<Eigen::Index>(in_action.act(g, static_cast<Point>(i)));
        dev = std::max(dev, std::abs(matrix(go, gi) - matrix(o, i)));
      }
      if (bias.size() != 0)
        dev = std::max(dev, std::abs(bias(go) - bias(o)));
    }
    if (std::isnan(dev))
      dev = INFINITY;
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_generator = k;
    }
  }
  report.ok = report.max_deviation <= tol;
  return report;
}

std::size_t double_coset_count(const Subgroup &h, const Subgroup &k) {
  const FiniteGroup &g = *h.parent();
  std::vector<bool> seen(g.order(), false);
  std::size_t count = 0;
  for (ElemIndex x = 0; x < g.order(); ++x) {
    if (seen[x])
      continue;
    ++count;
    for (ElemIndex a : h.members()) {
      const ElemIndex ax = g.multiply(a, x);
      for (ElemIndex b : k.members())
        seen[g.multiply(ax, b)] = true;
    }
  }
  return count;
}

std::vector<double> KernelForm::kernel(std::span<const double> weights) const {
  if (weights.size() != num_params)
    throw Error(Errc::length_mismatch, "kernel expects " + std::to_string(num_params) +
                                           " weights, got " + std::to_string(weights.size()));
  std::vector<double> phi(kernel_orbit.size());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = weights[kernel_orbit[i]];
  return phi;
}

Eigen::VectorXd KernelForm::apply(std::span<const double> weights,
                                  const Eigen::VectorXd &x) const {
  const std::size_t n = input_cosets.size();
  if (static_cast<std::size_t>(x.size()) != n)
    throw Error(Errc::shape_mismatch, "input length does not match the kernel");
  const auto phi = kernel(weights);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_cosets.size()));
  for (std::size_t o = 0; o < output_cosets.size(); ++o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += phi[pull[o * n + i]] * x(static_cast<Eigen::Index>(i));
    y(static_cast<Eigen::Index>(o)) = acc;
  }
  return y;
}

namespace {

std::vector<ElemIndex> transversal(const GroupAction &action) {
  constexpr auto unset = static_cast<ElemIndex>(-1);
  std::vector<ElemIndex> rep(action.point_count(), unset);
  for (ElemIndex g = 0; g < action.group()->order(); ++g) {
    Point p = action.act(g, 0);
    if (rep[p] == unset)
      rep[p] = g;
  }
  return rep;
}

}  // namespace

KernelForm kernel_form(const SharingPattern &pattern, const GroupAction &out_action,
                       const GroupAction &in_action) {
  if (out_action.group() != in_action.group())
    throw Error(Errc::group_mismatch, "input and output actions belong to different groups");
  if (pattern.rows != out_action.point_count() || pattern.cols != in_action.point_count())
    throw Error(Errc::shape_mismatch, "pattern shape does not match the actions");
  if (!action_properties(in_action).transitive || !action_properties(out_action).transitive)
    throw Error(Errc::not_transitive, "kernel form needs transitive input and output actions");

  const FiniteGroup &g = *out_action.group();
  KernelForm kf;
  kf.input_cosets = transversal(in_action);
  kf.output_cosets = transversal(out_action);
  const std::size_t n = in_action.point_count();
  kf.kernel_orbit.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    kf.kernel_orbit[i] = pattern.orbit(0, i);
  kf.num_params = pattern.num_orbits;
  kf.pull.resize(out_action.point_count() * n);
  for (std::size_t o = 0; o < out_action.point_count(); ++o) {
    const ElemIndex inv = g.inverse(kf.output_cosets[o]);
    for (std::size_t i = 0; i < n; ++i)
      kf.pull[o * n + i] = in_action.act(inv, static_cast<Point>(i));
  }

  kf.double_coset_count =
      double_coset_count(stabilizer(out_action, 0), stabilizer(in_action, 0));
  if (kf.double_coset_count != pattern.num_orbits)
    throw Error(Errc::internal, "diagonal orbit count " + std::to_string(pattern.num_orbits) +
                                    " differs from double coset count " +
                                    std::to_string(kf.double_coset_count));
  return kf;
}

}  // namespace eqv
