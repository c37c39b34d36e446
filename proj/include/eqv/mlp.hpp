#ifndef EQV_MLP_HPP
#define EQV_MLP_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eqv/group.hpp"
#include "eqv/sharing.hpp"

namespace eqv {

enum class Nonlinearity { identity, relu, tanh, sigmoid };

std::string_view to_string(Nonlinearity f);
Nonlinearity nonlinearity_from_string(std::string_view name);

/// One index set of the network. The nonlinearity is applied after this
/// layer's affine map; it is ignored for the input layer and the final layer.
struct LayerSpec {
  GroupAction action;
  std::size_t channels = 1;
  Nonlinearity nonlinearity = Nonlinearity::tanh;
};

/// Free parameters of one affine map, laid out [c_out][c_in][orbit] and
/// [c_out][bias orbit].
struct LayerParams {
  std::vector<double> weights;
  std::vector<double> biases;
};

/// A stack of tied-weight equivariant affine maps.
///
/// Tensors are channels x points matrices; batches are stored one sample per
/// column in channel-major order (entry c * points + i).
class EquivariantMLP {
 public:
  explicit EquivariantMLP(std::vector<LayerSpec> layers);

  std::size_t depth() const noexcept { return patterns_.size(); }
  const std::vector<LayerSpec> &layers() const noexcept { return layers_; }
  const SharingPattern &pattern(std::size_t map) const { return patterns_[map]; }
  const std::vector<LayerParams> &params() const noexcept { return params_; }
  LayerParams &params(std::size_t map) { return params_[map]; }

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t param_count() const;
  std::vector<double> flat_params() const;
  void set_flat_params(std::span<const double> flat);

  /// Uniform on +-1/sqrt(dense fan-in) for weights and biases.
  void init_uniform(std::uint64_t seed);

  /// Block matrix (C_out |O|) x (C_in |N|) and bias of affine map `map`.
  DenseMap dense(std::size_t map) const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd &x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd &batch) const;

 private:
  friend std::vector<LayerParams> gradients(const EquivariantMLP &, const Eigen::MatrixXd &,
                                            const Eigen::MatrixXd &, double *);

  std::vector<LayerSpec> layers_;
  std::vector<SharingPattern> patterns_;
  std::vector<std::vector<std::vector<std::uint32_t>>> cells_;
  std::vector<LayerParams> params_;
};

/// Mean squared error over every output entry of the batch.
double mse(const EquivariantMLP &net, const Eigen::MatrixXd &batch,
           const Eigen::MatrixXd &targets);

/// Reverse-mode gradient of the batch MSE with respect to the free
/// parameters; each tied weight receives the sum over its orbit's cells.
/// Optionally reports the loss.
std::vector<LayerParams> gradients(const EquivariantMLP &net, const Eigen::MatrixXd &batch,
                                   const Eigen::MatrixXd &targets, double *loss = nullptr);

/// Permutes a channels x points tensor: (g.x)[c][g.i] = x[c][i].
Eigen::MatrixXd act_on_tensor(const GroupAction &action, ElemIndex g, const Eigen::MatrixXd &x);
Eigen::VectorXd flatten(const Eigen::MatrixXd &x);
Eigen::MatrixXd unflatten(const Eigen::VectorXd &v, std::size_t channels, std::size_t points);

/// Largest |net(g.x) - g.net(x)| over the group generators and given inputs.
double equivariance_defect(const EquivariantMLP &net, const std::vector<Eigen::MatrixXd> &inputs);

/// Two-layer net whose hidden index set is the regular action of the group.
/// Throws Errc::unfaithful_action when the input action is not faithful.
EquivariantMLP build_regular_net(const GroupAction &in_action, const GroupAction &out_action,
                                 std::size_t channels,
                                 Nonlinearity nonlinearity = Nonlinearity::tanh);

/// An unconstrained one-hidden-layer MLP x -> sum_c w_out[c] f(w_in[c] . x + b[c]).
struct PlainMLP {
  std::vector<Eigen::VectorXd> w_in;
  std::vector<Eigen::VectorXd> w_out;
  std::vector<double> b;
  Nonlinearity nonlinearity = Nonlinearity::tanh;

  Eigen::VectorXd operator()(const Eigen::VectorXd &x) const;
};

/// The group average of `mlp` written as a regular-hidden-layer equivariant
/// net: hidden unit (c, g) computes f(w_c . (g.x) + b_c), and the output
/// weights carry g^-1 . w_out[c] / |G|.
EquivariantMLP symmetrize(const PlainMLP &mlp, const GroupAction &in_action,
                          const GroupAction &out_action);

struct TrainConfig {
  std::uint64_t seed = 7;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t epochs = 500;
  std::size_t batch_size = 32;
  std::size_t train_samples = 1024;
  std::size_t test_samples = 1024;
  double box_lo = -1.0;
  double box_hi = 1.0;
  /// Record the training loss every this many epochs (and at the end).
  std::size_t log_every = 10;
};

struct CurvePoint {
  std::size_t epoch = 0;
  double train_mse = 0.0;
};

struct TrainResult {
  double final_mse = 0.0;
  double heldout_mse = 0.0;
  std::vector<CurvePoint> loss_curve;
};

/// A target function on channels x points tensors.
struct Target {
  std::string name;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd &)> fn;
};

/// Builtin targets:
///   "square_plus_next"  psi(x)_i = x_i^2 + x_{i+1 mod n}, single channel, in = out points
///   "sum_squares"       psi(x) = sum_i x_i^2, single channel, one output point
///   "frozen"            a randomly initialised copy of `net`, seeded with `seed`
Target make_target(std::string_view name, const EquivariantMLP &net, std::uint64_t seed);

/// Throws Errc::target_not_equivariant when the target fails the commutation
/// check at tolerance 1e-8.
void check_target(const EquivariantMLP &net, const Target &target, std::uint64_t seed);

/// Samples uniformly from the box, one column per sample.
Eigen::MatrixXd sample_box(std::size_t features, std::size_t count, double lo, double hi,
                           std::uint64_t seed);

/// Deterministic minibatch SGD with momentum on the MSE loss.
TrainResult train(EquivariantMLP &net, const Target &target, const TrainConfig &cfg);

}  // namespace eqv

#endif  // EQV_MLP_HPP
