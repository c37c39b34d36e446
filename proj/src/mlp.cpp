#include "eqv/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eqv/error.hpp"

namespace eqv {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Nonlinearity f) {
  switch (f) {
    case Nonlinearity::identity: return "identity";
    case Nonlinearity::relu: return "relu";
    case Nonlinearity::tanh: return "tanh";
    case Nonlinearity::sigmoid: return "sigmoid";
  }
  return "identity";
}

Nonlinearity nonlinearity_from_string(std::string_view name) {
  if (name == "identity") return Nonlinearity::identity;
  if (name == "relu") return Nonlinearity::relu;
  if (name == "tanh") return Nonlinearity::tanh;
  if (name == "sigmoid") return Nonlinearity::sigmoid;
  throw Error(Errc::range_error, "unknown nonlinearity '" + std::string(name) + "'");
}

namespace {

double apply(Nonlinearity f, double z) {
  switch (f) {
    case Nonlinearity::identity: return z;
    case Nonlinearity::relu: return z > 0.0 ? z : 0.0;
    case Nonlinearity::tanh: return std::tanh(z);
    case Nonlinearity::sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative expressed through the activation value a = f(z) where possible.
double derivative(Nonlinearity f, double z, double a) {
  switch (f) {
    case Nonlinearity::identity: return 1.0;
    case Nonlinearity::relu: return z > 0.0 ? 1.0 : 0.0;
    case Nonlinearity::tanh: return 1.0 - a * a;
    case Nonlinearity::sigmoid: return a * (1.0 - a);
  }
  return 1.0;
}

MatrixXd activate(Nonlinearity f, const MatrixXd &z) {
  return z.unaryExpr([f](double v) { return apply(f, v); });
}

}  // namespace

// ---------------------------------------------------------------------------
// EquivariantMLP

EquivariantMLP::EquivariantMLP(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2)
    throw Error(Errc::shape_mismatch, "a network needs an input and an output layer");
  for (const auto &l : layers_) {
    if (l.action.group() != layers_.front().action.group())
      throw Error(Errc::group_mismatch, "all layers must be acted on by the same group");
    if (l.channels == 0)
      throw Error(Errc::shape_mismatch, "layer with zero channels");
  }
  for (std::size_t m = 1; m < layers_.size(); ++m) {
    patterns_.push_back(make_pattern(layers_[m].action, layers_[m - 1].action));
    cells_.push_back(patterns_.back().orbit_cells());
    const auto &p = patterns_.back();
    LayerParams lp;
    lp.weights.assign(layers_[m].channels * layers_[m - 1].channels * p.num_orbits, 0.0);
    lp.biases.assign(layers_[m].channels * p.num_bias_orbits, 0.0);
    params_.push_back(std::move(lp));
  }
}

std::size_t EquivariantMLP::input_size() const {
  return layers_.front().channels * layers_.front().action.point_count();
}

std::size_t EquivariantMLP::output_size() const {
  return layers_.back().channels * layers_.back().action.point_count();
}

std::size_t EquivariantMLP::param_count() const {
  std::size_t n = 0;
  for (const auto &p : params_)
    n += p.weights.size() + p.biases.size();
  return n;
}

std::vector<double> EquivariantMLP::flat_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto &p : params_) {
    flat.insert(flat.end(), p.weights.begin(), p.weights.end());
    flat.insert(flat.end(), p.biases.begin(), p.biases.end());
  }
  return flat;
}

void EquivariantMLP::set_flat_params(std::span<const double> flat) {
  if (flat.size() != param_count())
    throw Error(Errc::length_mismatch, "expected " + std::to_string(param_count()) +
                                           " parameters, got " + std::to_string(flat.size()));
  std::size_t pos = 0;
  for (auto &p : params_) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), p.weights.size(),
                p.weights.begin());
    pos += p.weights.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), p.biases.size(),
                p.biases.begin());
    pos += p.biases.size();
  }
}

void EquivariantMLP::init_uniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t m = 0; m < params_.size(); ++m) {
    const double fan_in =
        static_cast<double>(layers_[m].channels * layers_[m].action.point_count());
    std::uniform_real_distribution<double> dist(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (auto &w : params_[m].weights)
      w = dist(rng);
    for (auto &b : params_[m].biases)
      b = dist(rng);
  }
}

DenseMap EquivariantMLP::dense(std::size_t map) const {
  const auto &p = patterns_[map];
  const auto &lp = params_[map];
  const std::size_t cin = layers_[map].channels, cout = layers_[map + 1].channels;
  DenseMap d{MatrixXd(static_cast<Index>(cout * p.rows), static_cast<Index>(cin * p.cols)),
             VectorXd(static_cast<Index>(cout * p.rows))};
  for (std::size_t co = 0; co < cout; ++co) {
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double *w = &lp.weights[(co * cin + ci) * p.num_orbits];
      for (std::size_t o = 0; o < p.rows; ++o)
        for (std::size_t i = 0; i < p.cols; ++i)
          d.matrix(static_cast<Index>(co * p.rows + o), static_cast<Index>(ci * p.cols + i)) =
              w[p.orbit(o, i)];
    }
    const double *b = &lp.biases[co * p.num_bias_orbits];
    for (std::size_t o = 0; o < p.rows; ++o)
      d.bias(static_cast<Index>(co * p.rows + o)) = b[p.bias_orbit_of[o]];
  }
  return d;
}

MatrixXd EquivariantMLP::forward_batch(const MatrixXd &batch) const {
  if (static_cast<std::size_t>(batch.rows()) != input_size())
    throw Error(Errc::shape_mismatch, "batch has " + std::to_string(batch.rows()) +
                                          " features, network expects " +
                                          std::to_string(input_size()));
  MatrixXd x = batch;
  for (std::size_t m = 0; m < depth(); ++m) {
    const DenseMap d = dense(m);
    MatrixXd z = d.matrix * x;
    z.colwise() += d.bias;
    x = m + 1 < depth() ? activate(layers_[m + 1].nonlinearity, z) : std::move(z);
  }
  return x;
}

MatrixXd EquivariantMLP::forward(const MatrixXd &x) const {
  const auto &in = layers_.front();
  if (static_cast<std::size_t>(x.rows()) != in.channels ||
      static_cast<std::size_t>(x.cols()) != in.action.point_count())
    throw Error(Errc::shape_mismatch, "input tensor is " + std::to_string(x.rows()) + "x" +
                                          std::to_string(x.cols()) + ", expected " +
                                          std::to_string(in.channels) + "x" +
                                          std::to_string(in.action.point_count()));
  MatrixXd y = forward_batch(flatten(x));
  const auto &out = layers_.back();
  return unflatten(y.col(0), out.channels, out.action.point_count());
}

// ---------------------------------------------------------------------------
// Loss and gradients

double mse(const EquivariantMLP &net, const MatrixXd &batch, const MatrixXd &targets) {
  const MatrixXd y = net.forward_batch(batch);
  if (y.rows() != targets.rows() || y.cols() != targets.cols())
    throw Error(Errc::shape_mismatch, "targets do not match network output");
  return (y - targets).squaredNorm() / static_cast<double>(y.size());
}

std::vector<LayerParams> gradients(const EquivariantMLP &net, const MatrixXd &batch,
                                   const MatrixXd &targets, double *loss) {
  if (static_cast<std::size_t>(batch.rows()) != net.input_size())
    throw Error(Errc::shape_mismatch, "batch does not match network input");
  if (static_cast<std::size_t>(targets.rows()) != net.output_size() ||
      targets.cols() != batch.cols())
    throw Error(Errc::shape_mismatch, "targets do not match network output");

  const std::size_t depth = net.depth();
  std::vector<DenseMap> dense;
  std::vector<MatrixXd> acts{batch};  // acts[m] feeds map m
  std::vector<MatrixXd> pre;
  for (std::size_t m = 0; m < depth; ++m) {
    dense.push_back(net.dense(m));
    MatrixXd z = dense[m].matrix * acts[m];
    z.colwise() += dense[m].bias;
    pre.push_back(z);
    acts.push_back(m + 1 < depth ? activate(net.layers_[m + 1].nonlinearity, z) : z);
  }

  const MatrixXd diff = acts.back() - targets;
  const double scale = 1.0 / static_cast<double>(diff.size());
  if (loss)
    *loss = diff.squaredNorm() * scale;

  std::vector<LayerParams> grads(depth);
  MatrixXd delta = 2.0 * scale * diff;
  for (std::size_t m = depth; m-- > 0;) {
    if (m + 1 < depth) {
      const Nonlinearity f = net.layers_[m + 1].nonlinearity;
      const MatrixXd &z = pre[m];
      const MatrixXd &a = acts[m + 1];
      for (Index c = 0; c < delta.cols(); ++c)
        for (Index r = 0; r < delta.rows(); ++r)
          delta(r, c) *= derivative(f, z(r, c), a(r, c));
    }
    const MatrixXd dw = delta * acts[m].transpose();
    const VectorXd db = delta.rowwise().sum();

    const auto &p = net.patterns_[m];
    const auto &cells = net.cells_[m];
    const std::size_t cin = net.layers_[m].channels, cout = net.layers_[m + 1].channels;
    auto &g = grads[m];
    g.weights.assign(cout * cin * p.num_orbits, 0.0);
    g.biases.assign(cout * p.num_bias_orbits, 0.0);
    for (std::size_t co = 0; co < cout; ++co) {
      for (std::size_t ci = 0; ci < cin; ++ci)
        for (std::size_t k = 0; k < p.num_orbits; ++k) {
          double acc = 0.0;
          for (std::uint32_t cell : cells[k])
            acc += dw(static_cast<Index>(co * p.rows + cell / p.cols),
                      static_cast<Index>(ci * p.cols + cell % p.cols));
          g.weights[(co * cin + ci) * p.num_orbits + k] = acc;
        }
      for (std::size_t o = 0; o < p.rows; ++o)
        g.biases[co * p.num_bias_orbits + p.bias_orbit_of[o]] +=
            db(static_cast<Index>(co * p.rows + o));
    }
    if (m > 0)
      delta = dense[m].matrix.transpose() * delta;
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Tensors and equivariance

MatrixXd act_on_tensor(const GroupAction &action, ElemIndex g, const MatrixXd &x) {
  if (static_cast<std::size_t>(x.cols()) != action.point_count())
    throw Error(Errc::shape_mismatch, "tensor width does not match the action");
  MatrixXd out(x.rows(), x.cols());
  for (Index i = 0; i < x.cols(); ++i)
    out.col(static_cast<Index>(action.act(g, static_cast<Point>(i)))) = x.col(i);
  return out;
}

VectorXd flatten(const MatrixXd &x) {
  VectorXd v(x.size());
  for (Index c = 0; c < x.rows(); ++c)
    v.segment(c * x.cols(), x.cols()) = x.row(c).transpose();
  return v;
}

MatrixXd unflatten(const VectorXd &v, std::size_t channels, std::size_t points) {
  if (static_cast<std::size_t>(v.size()) != channels * points)
    throw Error(Errc::shape_mismatch, "flat tensor has the wrong length");
  MatrixXd x(static_cast<Index>(channels), static_cast<Index>(points));
  for (Index c = 0; c < x.rows(); ++c)
    x.row(c) = v.segment(c * x.cols(), x.cols()).transpose();
  return x;
}

double equivariance_defect(const EquivariantMLP &net, const std::vector<MatrixXd> &inputs) {
  const auto &in = net.layers().front().action;
  const auto &out = net.layers().back().action;
  double worst = 0.0;
  for (const auto &x : inputs) {
    const MatrixXd y = net.forward(x);
    for (ElemIndex g : in.group()->generator_indices()) {
      const MatrixXd lhs = net.forward(act_on_tensor(in, g, x));
      const MatrixXd rhs = act_on_tensor(out, g, y);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Constructions

EquivariantMLP build_regular_net(const GroupAction &in_action, const GroupAction &out_action,
                                 std::size_t channels, Nonlinearity nonlinearity) {
  if (!action_properties(in_action).faithful)
    throw Error(Errc::unfaithful_action, "input action is not faithful");
  const auto &group = in_action.group();
  GroupAction regular = coset_space(*group, Subgroup::trivial(group));
  return EquivariantMLP({{in_action, 1, Nonlinearity::identity},
                         {std::move(regular), channels, nonlinearity},
                         {out_action, 1, Nonlinearity::identity}});
}

VectorXd PlainMLP::operator()(const VectorXd &x) const {
  VectorXd y = VectorXd::Zero(w_out.empty() ? 0 : w_out.front().size());
  for (std::size_t c = 0; c < w_in.size(); ++c)
    y += w_out[c] * apply(nonlinearity, w_in[c].dot(x) + b[c]);
  return y;
}

namespace {

// Reads one value per orbit out of a dense equivariant block, insisting that
// the block really is constant on every orbit.
void extract_tied(const SharingPattern &p, const MatrixXd &block, double *out) {
  std::vector<bool> set(p.num_orbits, false);
  for (std::size_t o = 0; o < p.rows; ++o)
    for (std::size_t i = 0; i < p.cols; ++i) {
      const auto k = p.orbit(o, i);
      const double v = block(static_cast<Index>(o), static_cast<Index>(i));
      if (!set[k]) {
        out[k] = v;
        set[k] = true;
      } else if (out[k] != v) {
        throw Error(Errc::internal, "symmetrized weights are not constant on an orbit");
      }
    }
}

}  // namespace

EquivariantMLP symmetrize(const PlainMLP &mlp, const GroupAction &in_action,
                          const GroupAction &out_action) {
  const std::size_t channels = mlp.w_in.size();
  if (channels == 0 || mlp.w_out.size() != channels || mlp.b.size() != channels)
    throw Error(Errc::length_mismatch, "plain MLP channel lists disagree");
  for (std::size_t c = 0; c < channels; ++c)
    if (static_cast<std::size_t>(mlp.w_in[c].size()) != in_action.point_count() ||
        static_cast<std::size_t>(mlp.w_out[c].size()) != out_action.point_count())
      throw Error(Errc::shape_mismatch, "plain MLP weights do not match the actions");

  EquivariantMLP net = build_regular_net(in_action, out_action, channels, mlp.nonlinearity);
  const FiniteGroup &g = *in_action.group();
  const std::size_t order = g.order();
  const std::size_t n = in_action.point_count(), o_count = out_action.point_count();
  const double inv_order = 1.0 / static_cast<double>(order);

  // Hidden point r is the coset {g_r}; the regular action moves it to g_r x^-1.
  const auto &p1 = net.pattern(0);
  const auto &p2 = net.pattern(1);
  auto &first = net.params(0);
  auto &second = net.params(1);
  for (std::size_t c = 0; c < channels; ++c) {
    // Row r of the first layer is w_c^T A_{g_r}: entry j is w_c[g_r . j].
    MatrixXd phi(static_cast<Index>(order), static_cast<Index>(n));
    for (ElemIndex r = 0; r < order; ++r)
      for (std::size_t j = 0; j < n; ++j)
        phi(r, static_cast<Index>(j)) = mlp.w_in[c](in_action.act(r, static_cast<Point>(j)));
    extract_tied(p1, phi, &first.weights[c * p1.num_orbits]);
    first.biases[c * p1.num_bias_orbits] = mlp.b[c];

    // Column r of the second layer is B_{g_r^-1} w'_c / |G|: entry o is w'_c[g_r . o] / |G|.
    MatrixXd psi(static_cast<Index>(o_count), static_cast<Index>(order));
    for (std::size_t o = 0; o < o_count; ++o)
      for (ElemIndex r = 0; r < order; ++r)
        psi(static_cast<Index>(o), r) =
            mlp.w_out[c](out_action.act(r, static_cast<Point>(o))) * inv_order;
    extract_tied(p2, psi, &second.weights[c * p2.num_orbits]);
  }
  std::fill(second.biases.begin(), second.biases.end(), 0.0);
  return net;
}

// ---------------------------------------------------------------------------
// Targets and training

Target make_target(std::string_view name, const EquivariantMLP &net, std::uint64_t seed) {
  const auto &in = net.layers().front();
  const auto &out = net.layers().back();
  if (name == "square_plus_next") {
    if (in.channels != 1 || out.channels != 1 ||
        in.action.point_count() != out.action.point_count())
      throw Error(Errc::shape_mismatch,
                  "square_plus_next needs one channel and equal input/output sizes");
    return {"square_plus_next", [](const MatrixXd &x) {
              const Index n = x.cols();
              MatrixXd y(1, n);
              for (Index i = 0; i < n; ++i)
                y(0, i) = x(0, i) * x(0, i) + x(0, (i + 1) % n);
              return y;
            }};
  }
  if (name == "sum_squares") {
    if (in.channels != 1 || out.channels != 1 || out.action.point_count() != 1)
      throw Error(Errc::shape_mismatch, "sum_squares needs one channel and a single output");
    return {"sum_squares", [](const MatrixXd &x) {
              MatrixXd y(1, 1);
              y(0, 0) = x.squaredNorm();
              return y;
            }};
  }
  if (name == "frozen") {
    EquivariantMLP frozen = net;
    frozen.init_uniform(seed);
    return {"frozen", [frozen](const MatrixXd &x) { return frozen.forward(x); }};
  }
  throw Error(Errc::range_error, "unknown target '" + std::string(name) + "'");
}

MatrixXd sample_box(std::size_t features, std::size_t count, double lo, double hi,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  MatrixXd x(static_cast<Index>(features), static_cast<Index>(count));
  for (Index c = 0; c < x.cols(); ++c)
    for (Index r = 0; r < x.rows(); ++r)
      x(r, c) = dist(rng);
  return x;
}

void check_target(const EquivariantMLP &net, const Target &target, std::uint64_t seed) {
  const auto &in = net.layers().front();
  const auto &out = net.layers().back();
  const MatrixXd probes = sample_box(net.input_size(), 8, -1.0, 1.0, seed ^ 0x5eedULL);
  for (Index s = 0; s < probes.cols(); ++s) {
    const MatrixXd x = unflatten(probes.col(s), in.channels, in.action.point_count());
    const MatrixXd y = target.fn(x);
    if (static_cast<std::size_t>(y.rows()) != out.channels ||
        static_cast<std::size_t>(y.cols()) != out.action.point_count())
      throw Error(Errc::shape_mismatch, "target output does not match the network output");
    for (ElemIndex g : in.action.group()->generator_indices()) {
      const MatrixXd lhs = target.fn(act_on_tensor(in.action, g, x));
      const MatrixXd rhs = act_on_tensor(out.action, g, y);
      const double dev = (lhs - rhs).cwiseAbs().maxCoeff();
      if (!(dev <= 1e-8))
        throw Error(Errc::target_not_equivariant,
                    "target '" + target.name + "' is not equivariant (deviation " +
                        std::to_string(dev) + ")");
    }
  }
}

namespace {

MatrixXd evaluate_target(const EquivariantMLP &net, const Target &target, const MatrixXd &xs) {
  const auto &in = net.layers().front();
  MatrixXd ys(static_cast<Index>(net.output_size()), xs.cols());
  for (Index s = 0; s < xs.cols(); ++s)
    ys.col(s) = flatten(target.fn(unflatten(xs.col(s), in.channels, in.action.point_count())));
  return ys;
}

}  // namespace

TrainResult train(EquivariantMLP &net, const Target &target, const TrainConfig &cfg) {
  if (cfg.batch_size == 0 || cfg.train_samples == 0)
    throw Error(Errc::range_error, "batch size and sample count must be positive");
  check_target(net, target, cfg.seed);

  const MatrixXd xs = sample_box(net.input_size(), cfg.train_samples, cfg.box_lo, cfg.box_hi,
                                 cfg.seed);
  const MatrixXd ys = evaluate_target(net, target, xs);
  const MatrixXd xt = sample_box(net.input_size(), cfg.test_samples, cfg.box_lo, cfg.box_hi,
                                 cfg.seed + 1);
  const MatrixXd yt = evaluate_target(net, target, xt);

  std::mt19937_64 rng(cfg.seed * 2654435761ULL + 17);
  std::vector<Index> order(cfg.train_samples);
  std::iota(order.begin(), order.end(), Index{0});

  std::vector<double> velocity(net.param_count(), 0.0);
  TrainResult result;
  const auto record = [&](std::size_t epoch) {
    result.loss_curve.push_back({epoch, mse(net, xs, ys)});
  };
  record(0);

  MatrixXd bx(xs.rows(), static_cast<Index>(cfg.batch_size));
  MatrixXd by(ys.rows(), static_cast<Index>(cfg.batch_size));
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      bx.resize(xs.rows(), static_cast<Index>(len));
      by.resize(ys.rows(), static_cast<Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        bx.col(static_cast<Index>(k)) = xs.col(order[start + k]);
        by.col(static_cast<Index>(k)) = ys.col(order[start + k]);
      }
      const auto grads = gradients(net, bx, by);
      std::vector<double> params = net.flat_params();
      std::size_t pos = 0;
      for (const auto &g : grads) {
        for (double d : g.weights) {
          velocity[pos] = cfg.momentum * velocity[pos] - cfg.learning_rate * d;
          params[pos] += velocity[pos];
          ++pos;
        }
        for (double d : g.biases) {
          velocity[pos] = cfg.momentum * velocity[pos] - cfg.learning_rate * d;
          params[pos] += velocity[pos];
          ++pos;
        }
      }
      net.set_flat_params(params);
    }
    if (epoch % std::max<std::size_t>(cfg.log_every, 1) == 0 || epoch == cfg.epochs)
      record(epoch);
  }
  result.final_mse = result.loss_curve.back().train_mse;
  result.heldout_mse = mse(net, xt, yt);
  return result;
}

}  // namespace eqv
