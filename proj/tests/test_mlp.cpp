#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "eqv/builtin.hpp"
#include "eqv/error.hpp"
#include "eqv/gset.hpp"
#include "eqv/lattice.hpp"
#include "eqv/mlp.hpp"
#include "oracles.hpp"

using namespace eqv;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Errc code_of(const auto &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an eqv::Error");
  return Errc::internal;
}

struct Arch {
  std::string name;
  EquivariantMLP net;
};

// Architectures covering regular, natural, pooled and multi-channel layers.
std::vector<Arch> architectures() {
  using builtin::alternating, builtin::cyclic, builtin::symmetric, builtin::dihedral;
  auto c4 = cyclic(4), s3 = symmetric(3), s4 = symmetric(4), d4 = dihedral(4), a5 = alternating(5);
  auto regular = [](const GroupPtr &g) { return coset_space(*g, Subgroup::trivial(g)); };
  std::vector<Arch> out;
  out.push_back({"C4 regular", build_regular_net(GroupAction::natural(c4),
                                                 GroupAction::natural(c4), 3)});
  out.push_back({"S3 pooled", EquivariantMLP({{GroupAction::natural(s3), 2},
                                              {regular(s3), 2, Nonlinearity::sigmoid},
                                              {GroupAction::trivial(s3, 1), 1}})});
  out.push_back({"S4 natural", EquivariantMLP({{GroupAction::natural(s4), 1},
                                               {GroupAction::natural(s4), 3},
                                               {GroupAction::natural(s4), 2},
                                               {GroupAction::natural(s4), 1}})});
  out.push_back({"D4 pairs", EquivariantMLP({{GroupAction::natural(d4), 1},
                                             {diagonal_power(GroupAction::natural(d4), 2).action,
                                              2},
                                             {GroupAction::natural(d4), 1}})});
  out.push_back({"A5 regular", build_regular_net(GroupAction::natural(a5),
                                                 GroupAction::natural(a5), 2)});
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k].net.init_uniform(100 + k);
  return out;
}

MatrixXd random_tensor(std::size_t c, std::size_t n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  MatrixXd x(c, n);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x.data()[i] = u(rng);
  return x;
}

PlainMLP random_plain(std::size_t channels, std::size_t n, std::size_t o, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  PlainMLP m;
  for (std::size_t c = 0; c < channels; ++c) {
    VectorXd wi(n), wo(o);
    for (auto &x : wi)
      x = u(rng);
    for (auto &x : wo)
      x = u(rng);
    m.w_in.push_back(wi);
    m.w_out.push_back(wo);
    m.b.push_back(u(rng));
  }
  return m;
}

// Same shapes with every cell free: its dense gradient is the per-cell oracle.
EquivariantMLP untied_twin(const EquivariantMLP &net) {
  auto e = builtin::trivial(1);
  std::vector<LayerSpec> specs;
  for (const auto &l : net.layers())
    specs.push_back({GroupAction::trivial(e, l.action.point_count()), l.channels, l.nonlinearity});
  EquivariantMLP twin(std::move(specs));
  for (std::size_t m = 0; m < net.depth(); ++m) {
    const auto d = net.dense(m);
    auto &p = twin.params(m);
    const auto &pat = twin.pattern(m);
    const std::size_t ci = net.layers()[m].channels, co = net.layers()[m + 1].channels;
    const std::size_t rows = pat.rows, cols = pat.cols;
    for (std::size_t a = 0; a < co; ++a) {
      for (std::size_t b = 0; b < ci; ++b)
        for (std::size_t o = 0; o < rows; ++o)
          for (std::size_t i = 0; i < cols; ++i)
            p.weights[(a * ci + b) * pat.num_orbits + pat.orbit(o, i)] =
                d.matrix(static_cast<Eigen::Index>(a * rows + o),
                         static_cast<Eigen::Index>(b * cols + i));
      for (std::size_t o = 0; o < rows; ++o)
        p.biases[a * pat.num_bias_orbits + pat.bias_orbit_of[o]] =
            d.bias(static_cast<Eigen::Index>(a * rows + o));
    }
  }
  return twin;
}

}  // namespace

TEST_CASE("zero parameters give zero output") {
  auto c4 = builtin::cyclic(4);
  auto net = build_regular_net(GroupAction::natural(c4), GroupAction::natural(c4), 2);
  std::mt19937_64 rng(1);
  CHECK(net.forward(random_tensor(1, 4, rng)).isZero(0.0));
}

TEST_CASE("single free layer can be the identity") {
  auto e = builtin::trivial(3);
  EquivariantMLP net({{GroupAction::natural(e), 1}, {GroupAction::natural(e), 1}});
  REQUIRE(net.pattern(0).num_orbits == 9);
  auto &p = net.params(0);
  for (std::size_t i = 0; i < 3; ++i)
    p.weights[net.pattern(0).orbit(i, i)] = 1.0;
  std::mt19937_64 rng(2);
  auto x = random_tensor(1, 3, rng);
  CHECK(net.forward(x) == x);
}

TEST_CASE("forward checks shapes") {
  auto c4 = builtin::cyclic(4);
  auto net = build_regular_net(GroupAction::natural(c4), GroupAction::natural(c4), 2);
  CHECK(code_of([&] { net.forward(MatrixXd::Zero(1, 3)); }) == Errc::shape_mismatch);
  CHECK(code_of([&] { net.forward_batch(MatrixXd::Zero(5, 2)); }) == Errc::shape_mismatch);
  CHECK(code_of([&] { mse(net, MatrixXd::Zero(4, 2), MatrixXd::Zero(4, 3)); }) ==
        Errc::shape_mismatch);
  CHECK(code_of([&] { EquivariantMLP({{GroupAction::natural(c4), 1}}); }) ==
        Errc::shape_mismatch);
  auto s3 = builtin::symmetric(3);
  CHECK(code_of([&] {
          EquivariantMLP({{GroupAction::natural(c4), 1}, {GroupAction::natural(s3), 1}});
        }) == Errc::group_mismatch);
}

TEST_CASE("C4 net commutes with the shift") {
  auto c4 = builtin::cyclic(4);
  auto nat = GroupAction::natural(c4);
  auto net = build_regular_net(nat, nat, 4);
  net.init_uniform(7);
  std::mt19937_64 rng(3);
  const ElemIndex shift = c4->generator_indices()[0];
  for (int k = 0; k < 100; ++k) {
    auto x = random_tensor(1, 4, rng);
    auto lhs = net.forward(act_on_tensor(nat, shift, x));
    auto rhs = act_on_tensor(nat, shift, net.forward(x));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    // The shift moves entry i to i + 1.
    CHECK(act_on_tensor(nat, shift, x)(0, 1) == x(0, 0));
  }
}

TEST_CASE("every architecture is equivariant") {
  std::mt19937_64 rng(4);
  for (auto &[name, net] : architectures()) {
    CAPTURE(name);
    std::vector<MatrixXd> xs;
    for (int k = 0; k < 10; ++k)
      xs.push_back(random_tensor(net.layers().front().channels,
                                 net.layers().front().action.point_count(), rng));
    CHECK(equivariance_defect(net, xs) <= 1e-10);
    const auto &in = net.layers().front().action;
    const auto &out = net.layers().back().action;
    for (ElemIndex g = 0; g < in.group()->order(); g += 7)
      CHECK((net.forward(act_on_tensor(in, g, xs[0])) - act_on_tensor(out, g, net.forward(xs[0])))
                .cwiseAbs()
                .maxCoeff() <= 1e-10);
    for (std::size_t m = 0; m < net.depth(); ++m) {
      auto d = net.dense(m);
      const auto &a = net.layers()[m].action;
      const auto &b = net.layers()[m + 1].action;
      const std::size_t ci = net.layers()[m].channels, co = net.layers()[m + 1].channels;
      for (std::size_t p = 0; p < co; ++p)
        for (std::size_t q = 0; q < ci; ++q) {
          MatrixXd block = d.matrix.block(static_cast<Eigen::Index>(p * b.point_count()),
                                          static_cast<Eigen::Index>(q * a.point_count()),
                                          static_cast<Eigen::Index>(b.point_count()),
                                          static_cast<Eigen::Index>(a.point_count()));
          CHECK(check_equivariance(block, VectorXd(), b, a, 0.0).ok);
        }
    }
  }
}

TEST_CASE("flatten round trip") {
  std::mt19937_64 rng(5);
  auto x = random_tensor(3, 4, rng);
  auto v = flatten(x);
  CHECK(v(4) == x(1, 0));
  CHECK(unflatten(v, 3, 4) == x);
  CHECK(code_of([&] { unflatten(v, 2, 4); }) == Errc::shape_mismatch);
}

TEST_CASE("zero net with zero target has zero gradient") {
  auto s3 = builtin::symmetric(3);
  auto net = build_regular_net(GroupAction::natural(s3), GroupAction::natural(s3), 2);
  std::mt19937_64 rng(6);
  double loss = -1;
  auto g = gradients(net, random_tensor(3, 5, rng), MatrixXd::Zero(3, 5), &loss);
  CHECK(loss == 0.0);
  for (const auto &p : g) {
    for (double w : p.weights)
      CHECK(w == 0.0);
    for (double b : p.biases)
      CHECK(b == 0.0);
  }
}

TEST_CASE("gradients match finite differences") {
  std::mt19937_64 rng(8);
  for (auto &[name, net] : architectures()) {
    CAPTURE(name);
    const auto batch = random_tensor(net.input_size(), 6, rng);
    const auto targets = random_tensor(net.output_size(), 6, rng);
    double loss = 0;
    auto grads = gradients(net, batch, targets, &loss);
    CHECK(std::abs(loss - mse(net, batch, targets)) < 1e-12);
    std::vector<double> analytic;
    for (const auto &p : grads) {
      analytic.insert(analytic.end(), p.weights.begin(), p.weights.end());
      analytic.insert(analytic.end(), p.biases.begin(), p.biases.end());
    }
    REQUIRE(analytic.size() == net.param_count());
    EquivariantMLP probe = net;
    auto numeric = oracle::finite_difference(
        [&](const std::vector<double> &theta) {
          probe.set_flat_params(theta);
          return mse(probe, batch, targets);
        },
        net.flat_params(), 1e-5);
    double worst = 0;
    for (std::size_t k = 0; k < analytic.size(); ++k)
      worst = std::max(worst, oracle::relative_error(analytic[k], numeric[k]));
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("tied gradient is the sum over the orbit") {
  std::mt19937_64 rng(10);
  for (auto &[name, net] : architectures()) {
    CAPTURE(name);
    auto twin = untied_twin(net);
    const auto batch = random_tensor(net.input_size(), 4, rng);
    const auto targets = random_tensor(net.output_size(), 4, rng);
    CHECK((twin.forward_batch(batch) - net.forward_batch(batch)).cwiseAbs().maxCoeff() < 1e-12);
    auto tied = gradients(net, batch, targets);
    auto free = gradients(twin, batch, targets);
    for (std::size_t m = 0; m < net.depth(); ++m) {
      const auto &pat = net.pattern(m);
      const auto &tp = twin.pattern(m);
      const std::size_t ci = net.layers()[m].channels, co = net.layers()[m + 1].channels;
      for (std::size_t a = 0; a < co; ++a) {
        for (std::size_t b = 0; b < ci; ++b) {
          std::vector<double> sum(pat.num_orbits, 0.0);
          for (std::size_t o = 0; o < pat.rows; ++o)
            for (std::size_t i = 0; i < pat.cols; ++i)
              sum[pat.orbit(o, i)] += free[m].weights[(a * ci + b) * tp.num_orbits + tp.orbit(o, i)];
          for (std::size_t k = 0; k < pat.num_orbits; ++k)
            CHECK(tied[m].weights[(a * ci + b) * pat.num_orbits + k] ==
                  doctest::Approx(sum[k]).epsilon(1e-9));
        }
        std::vector<double> bsum(pat.num_bias_orbits, 0.0);
        for (std::size_t o = 0; o < pat.rows; ++o)
          bsum[pat.bias_orbit_of[o]] += free[m].biases[a * tp.num_bias_orbits + tp.bias_orbit_of[o]];
        for (std::size_t k = 0; k < pat.num_bias_orbits; ++k)
          CHECK(tied[m].biases[a * pat.num_bias_orbits + k] ==
                doctest::Approx(bsum[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("symmetric input gives k times the single-cell gradient") {
  // With all-ones input and a constant target every cell of an orbit sees the
  // same dense gradient.
  auto s4 = builtin::symmetric(4);
  auto nat = GroupAction::natural(s4);
  EquivariantMLP net({{nat, 1}, {nat, 1}});
  net.init_uniform(12);
  auto twin = untied_twin(net);
  const MatrixXd x = MatrixXd::Ones(4, 1);
  const MatrixXd y = MatrixXd::Constant(4, 1, 0.3);
  auto tied = gradients(net, x, y);
  auto free = gradients(twin, x, y);
  const auto &pat = net.pattern(0);
  const auto cells = pat.orbit_cells();
  for (std::size_t k = 0; k < pat.num_orbits; ++k) {
    const double single = free[0].weights[twin.pattern(0).orbit_of[cells[k][0]]];
    CHECK(tied[0].weights[k] == doctest::Approx(cells[k].size() * single).epsilon(1e-12));
  }
}

TEST_CASE("regular nets") {
  for (std::size_t n : {3, 4, 6}) {
    auto cn = builtin::cyclic(n);
    auto nat = GroupAction::natural(cn);
    auto net = build_regular_net(nat, nat, 2);
    CHECK(net.layers()[1].action.point_count() == n);
    CHECK(action_properties(net.layers()[1].action).regular);
    // Full circulant kernels: one free weight per offset.
    CHECK(net.pattern(0).num_orbits == n);
    CHECK(net.pattern(1).num_orbits == n);
  }
  auto a5 = builtin::alternating(5);
  auto net = build_regular_net(GroupAction::natural(a5), GroupAction::natural(a5), 3);
  CHECK(net.layers()[1].action.point_count() == 60);
  CHECK(net.layers()[1].channels == 3);

  auto e = builtin::trivial(4);
  auto plain = build_regular_net(GroupAction::natural(e), GroupAction::trivial(e, 2), 5);
  CHECK(plain.layers()[1].action.point_count() == 1);
  CHECK(plain.pattern(0).num_orbits == 4);
  CHECK(plain.pattern(1).num_orbits == 2);

  auto s3 = builtin::symmetric(3);
  CHECK(code_of([&] {
          build_regular_net(GroupAction::trivial(s3, 3), GroupAction::natural(s3), 2);
        }) == Errc::unfaithful_action);
}

TEST_CASE("faithful transitive layers of cyclic groups are regular") {
  for (std::size_t n : {4, 6}) {
    auto cn = builtin::cyclic(n);
    for (const auto &h : all_subgroups(cn)) {
      auto cs = coset_space(*cn, h);
      auto p = action_properties(cs);
      if (p.faithful && p.transitive)
        CHECK(p.regular);
    }
  }
}

TEST_CASE("cubed natural A5 action contains the regular orbit") {
  auto a5 = builtin::alternating(5);
  auto l = build_lattice(a5);
  auto cube = orbit_decompose(diagonal_power(GroupAction::natural(a5), 3).action, l);
  CHECK(cube.multiplicities[0] >= 1);
  auto net = build_regular_net(GroupAction::natural(a5), GroupAction::natural(a5), 1);
  auto hidden = orbit_decompose(net.layers()[1].action, l);
  CHECK(hidden.multiplicities[0] == 1);
  CHECK(hidden.orbit_count() == 1);
}

TEST_CASE("symmetrize equals the Reynolds average") {
  std::mt19937_64 rng(13);
  std::vector<GroupPtr> groups{builtin::cyclic(4), builtin::symmetric(3), builtin::symmetric(4),
                               builtin::alternating(5)};
  for (const auto &g : groups) {
    auto nat = GroupAction::natural(g);
    for (auto out : {nat, GroupAction::trivial(g, 1)}) {
      auto mlp = random_plain(3, nat.point_count(), out.point_count(), rng);
      auto net = symmetrize(mlp, nat, out);
      double worst = 0;
      for (int k = 0; k < 50; ++k) {
        VectorXd x = random_tensor(nat.point_count(), 1, rng).col(0);
        VectorXd y = flatten(net.forward(x.transpose()));
        worst = std::max(worst, (y - oracle::reynolds(mlp, nat, out, x)).cwiseAbs().maxCoeff());
      }
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("symmetrized invariant net has the pooled form") {
  std::mt19937_64 rng(14);
  auto s4 = builtin::symmetric(4);
  auto nat = GroupAction::natural(s4);
  auto pool = GroupAction::trivial(s4, 1);
  auto mlp = random_plain(3, 4, 1, rng);
  auto net = symmetrize(mlp, nat, pool);
  for (int k = 0; k < 20; ++k) {
    VectorXd x = random_tensor(4, 1, rng).col(0);
    // (1/|G|) sum_c w'_c sum_r tanh(sum_j w_c[g_r j] x_j + b_c)
    double want = 0;
    for (std::size_t c = 0; c < 3; ++c)
      for (ElemIndex r = 0; r < s4->order(); ++r) {
        double z = mlp.b[c];
        for (Point j = 0; j < 4; ++j)
          z += mlp.w_in[c](s4->element(r)[j]) * x(j);
        want += mlp.w_out[c](0) * std::tanh(z);
      }
    want /= static_cast<double>(s4->order());
    CHECK(net.forward(x.transpose())(0, 0) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("symmetrize over the trivial group is the plain MLP") {
  std::mt19937_64 rng(15);
  auto e = builtin::trivial(3);
  auto nat = GroupAction::natural(e);
  auto mlp = random_plain(1, 3, 3, rng);
  auto net = symmetrize(mlp, nat, nat);
  for (int k = 0; k < 10; ++k) {
    VectorXd x = random_tensor(3, 1, rng).col(0);
    CHECK((flatten(net.forward(x.transpose())) - mlp(x)).cwiseAbs().maxCoeff() < 1e-14);
  }
  auto s3 = builtin::symmetric(3);
  CHECK(code_of([&] {
          symmetrize(mlp, GroupAction::trivial(s3, 3), GroupAction::natural(s3));
        }) == Errc::unfaithful_action);
}

TEST_CASE("training is deterministic and fits a frozen net") {
  auto c4 = builtin::cyclic(4);
  auto nat = GroupAction::natural(c4);
  auto base = build_regular_net(nat, nat, 4);
  auto target = make_target("frozen", base, 99);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.train_samples = 256;
  cfg.test_samples = 256;
  auto a = base, b = base;
  a.init_uniform(1);
  b.init_uniform(1);
  auto ra = train(a, target, cfg);
  auto rb = train(b, target, cfg);
  CHECK(ra.final_mse == rb.final_mse);
  CHECK(a.flat_params() == b.flat_params());
  CHECK(ra.loss_curve.front().epoch == 0);
  CHECK(ra.loss_curve.back().epoch == cfg.epochs);
  CHECK(ra.final_mse < 1e-3);
  CHECK(ra.final_mse < 0.01 * ra.loss_curve.front().train_mse);
  CHECK(ra.heldout_mse < 1e-3);
}

TEST_CASE("S4 sum of squares through a pooled natural layer") {
  auto s4 = builtin::symmetric(4);
  auto nat = GroupAction::natural(s4);
  EquivariantMLP net({{nat, 1}, {nat, 8}, {GroupAction::trivial(s4, 1), 1}});
  net.init_uniform(7);
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.learning_rate = 0.01;
  auto r = train(net, make_target("sum_squares", net, 0), cfg);
  MESSAGE("held-out mse " << r.heldout_mse);
  CHECK(r.heldout_mse < 1e-2);
}

TEST_CASE("targets must be equivariant") {
  auto d6 = builtin::dihedral(6);
  auto nat = GroupAction::natural(d6);
  auto net = build_regular_net(nat, nat, 2);
  auto t = make_target("square_plus_next", net, 0);
  CHECK(code_of([&] { check_target(net, t, 7); }) == Errc::target_not_equivariant);
  CHECK(code_of([&] { train(net, t, TrainConfig{}); }) == Errc::target_not_equivariant);
  auto c6 = builtin::cyclic(6);
  auto cnet = build_regular_net(GroupAction::natural(c6), GroupAction::natural(c6), 2);
  check_target(cnet, make_target("square_plus_next", cnet, 0), 7);
  CHECK(code_of([&] { make_target("sum_squares", cnet, 0); }) == Errc::shape_mismatch);
  CHECK(code_of([&] { make_target("nope", cnet, 0); }) == Errc::range_error);
}

TEST_CASE("nonlinearity names") {
  for (auto f : {Nonlinearity::identity, Nonlinearity::relu, Nonlinearity::tanh,
                 Nonlinearity::sigmoid})
    CHECK(nonlinearity_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(nonlinearity_from_string("gelu"), Error);
}
