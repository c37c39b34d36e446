// eqv: command-line front end for the group, Burnside and equivariant-net
// library. Data goes to stdout, diagnostics to stderr.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eqv/builtin.hpp"
#include "eqv/burnside.hpp"
#include "eqv/error.hpp"
#include "eqv/gset.hpp"
#include "eqv/io.hpp"
#include "eqv/lattice.hpp"
#include "eqv/mlp.hpp"
#include "eqv/sharing.hpp"

using namespace eqv;
using eqv::io::json;

namespace {

constexpr const char *kFooter = R"(Environment:
  EQV_ORDER_CAP    largest group order to enumerate (default 10080)
  EQV_LATTICE_CAP  largest group order for subgroup lattices (default 2000)
  EQV_POWER_CAP    largest explicit product G-set, in points (default 10000000)

Actions (--in, --out-action):
  natural | regular | trivial | trivial:K | power:D | coset:LABEL | <descriptor.json>

Exit codes:
  0 ok, 1 verification failed, 2 malformed input or usage,
  3 order or lattice cap exceeded, 4 explicit size cap exceeded,
  5 unfaithful action where a faithful one is required)";

std::size_t env_cap(const char *name, std::size_t fallback) {
  const char *v = std::getenv(name);
  if (!v || !*v)
    return fallback;
  char *end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || n == 0)
    throw Error(Errc::malformed_input, std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(n);
}

struct Caps {
  std::size_t order = kDefaultOrderCap;
  std::size_t lattice = kDefaultLatticeCap;
  std::size_t power = kDefaultPowerCap;
};

Caps read_caps() {
  return {env_cap("EQV_ORDER_CAP", kDefaultOrderCap),
          env_cap("EQV_LATTICE_CAP", kDefaultLatticeCap),
          env_cap("EQV_POWER_CAP", kDefaultPowerCap)};
}

int exit_code(Errc c) {
  switch (c) {
    case Errc::order_cap_exceeded:
    case Errc::lattice_cap_exceeded:
      return 3;
    case Errc::size_cap_exceeded:
      return 4;
    case Errc::unfaithful_action:
      return 5;
    case Errc::internal:
    case Errc::arithmetic_overflow:
      return 1;
    default:
      return 2;
  }
}

struct GroupSource {
  std::string file;
  std::string builtin;
};

void add_group_options(CLI::App *cmd, GroupSource &src) {
  auto *f = cmd->add_option("--group", src.file, "group spec JSON file")->check(CLI::ExistingFile);
  auto *b = cmd->add_option("--builtin", src.builtin,
                            "cyclic:n | dihedral:n | symmetric:n | alternating:n");
  f->excludes(b);
  b->excludes(f);
}

struct LoadedGroup {
  GroupPtr group;
  json spec;
};

LoadedGroup load_group(const GroupSource &src, const Caps &caps) {
  if (src.file.empty() == src.builtin.empty())
    throw Error(Errc::malformed_input, "exactly one of --group or --builtin is required");
  if (!src.file.empty()) {
    json spec = io::read_json(src.file);
    auto g = io::group_from_json(spec, caps.order);
    return {g, spec};
  }
  auto g = builtin::from_name(src.builtin, caps.order);
  json spec = io::group_to_json(*g);
  spec["name"] = src.builtin;
  return {g, spec};
}

std::shared_ptr<SubgroupLattice> lattice_for(const GroupPtr &g, const Caps &caps) {
  return std::make_shared<SubgroupLattice>(build_lattice(g, caps.lattice));
}

std::size_t parse_count(const std::string &s, const std::string &what) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(s, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw Error(Errc::malformed_input, what + " must be a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(n);
}

std::size_t class_index(const SubgroupLattice &lat, const std::string &key) {
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
    const auto i = parse_count(key, "class index");
    if (i >= lat.size())
      throw Error(Errc::range_error, "class index " + key + " out of range");
    return i;
  }
  return lat.index_of_label(key);
}

// Turns a command-line action spec into a descriptor understood by
// io::action_from_descriptor, so checkpoints can record it.
json action_descriptor(const std::string &spec, const GroupPtr &g, const Caps &caps) {
  if (spec == "natural" || spec == "regular" || spec == "trivial")
    return spec;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (colon != std::string::npos && head == "trivial")
    return {{"kind", "trivial"}, {"points", parse_count(arg, "trivial:K")}};
  if (colon != std::string::npos && head == "power")
    return {{"kind", "power"}, {"base", "natural"}, {"D", parse_count(arg, "power:D")}};
  if (colon != std::string::npos && head == "coset") {
    auto lat = lattice_for(g, caps);
    return {{"kind", "coset"},
            {"subgroup", (*lat)[class_index(*lat, arg)].representative.members()}};
  }
  return io::read_json(spec);
}

GroupAction make_action(const json &descriptor, const GroupPtr &g, const Caps &caps) {
  // Explicit powers honour the power cap.
  if (descriptor.is_object() && descriptor.value("kind", "") == "power") {
    auto base = make_action(descriptor.at("base"), g, caps);
    const auto d = descriptor.at("D").get<std::size_t>();
    return diagonal_power(base, d, caps.power).action;
  }
  return io::action_from_descriptor(g, descriptor);
}

void print_json(const json &j, const std::string &path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw Error(Errc::malformed_input, "cannot write " + path);
  out << text;
}

std::string join_points(const std::vector<Point> &pts) {
  std::string s = "{";
  for (std::size_t k = 0; k < pts.size(); ++k)
    s += (k ? "," : "") + std::to_string(pts[k]);
  return s + "}";
}

// --- group -----------------------------------------------------------------

int cmd_group(const GroupSource &src, const Caps &caps) {
  const auto [g, spec] = load_group(src, caps);
  const auto nat = GroupAction::natural(g);
  const auto props = action_properties(nat);
  const auto orbs = orbits(nat);
  std::cout << "name " << (g->name().empty() ? "-" : g->name()) << "\n"
            << "degree " << g->degree() << "\n"
            << "order " << g->order() << "\n"
            << "generators " << g->generators().size() << "\n"
            << "abelian " << (g->is_abelian() ? "yes" : "no") << "\n"
            << "orbits " << orbs.size() << "\n";
  for (const auto &o : orbs)
    std::cout << "  " << join_points(o) << "\n";
  std::cout << (props.transitive ? "transitive" : "not transitive") << ", "
            << (props.faithful ? "faithful" : "not faithful") << ", "
            << (props.regular ? "regular" : "not regular") << "\n";
  return 0;
}

// --- lattice / marks -------------------------------------------------------

int cmd_lattice(const GroupSource &src, const Caps &caps, const std::string &out) {
  const auto [g, spec] = load_group(src, caps);
  print_json(io::lattice_to_json(*lattice_for(g, caps)), out);
  return 0;
}

void print_marks_table(const TableOfMarks &t, std::ostream &os) {
  const auto &lat = t.lattice();
  std::size_t label_w = 0, cell_w = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    label_w = std::max(label_w, lat.label(i).size() + 2);
    cell_w = std::max(cell_w, lat.label(i).size());
    for (std::size_t j = 0; j < t.size(); ++j)
      cell_w = std::max(cell_w, std::to_string(t(i, j)).size());
  }
  const auto emit = [&os](std::ostringstream &line) {
    std::string s = line.str();
    s.erase(s.find_last_not_of(' ') + 1);
    os << s << "\n";
  };
  std::ostringstream head;
  head << std::setw(static_cast<int>(label_w)) << "";
  for (std::size_t j = 0; j < t.size(); ++j)
    head << " " << std::setw(static_cast<int>(cell_w)) << lat.label(j);
  emit(head);
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::ostringstream line;
    line << std::setw(static_cast<int>(label_w)) << std::left << (lat.label(i) + "\\G")
         << std::right;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const auto v = t(i, j);
      line << " " << std::setw(static_cast<int>(cell_w)) << (v ? std::to_string(v) : "");
    }
    emit(line);
  }
}

int cmd_marks(const GroupSource &src, const Caps &caps, const std::string &out, bool pretty) {
  const auto [g, spec] = load_group(src, caps);
  const auto t = table_of_marks(lattice_for(g, caps));
  const bool fits = t.size() <= 12;
  if (!out.empty())
    print_json(io::marks_to_json(t), out);
  if (pretty && !fits)
    std::cerr << "eqv: " << t.size() << " classes; pretty tables stop at 12, printing JSON\n";
  if (pretty && fits)
    print_marks_table(t, std::cout);
  else if (out.empty() || pretty)
    print_json(io::marks_to_json(t), "");
  return 0;
}

// --- decompose -------------------------------------------------------------

struct DecomposeArgs {
  std::string subgroup_class = "e";
  std::size_t power = 1;
  bool explicit_oracle = false;
  bool regular_order = false;
  std::string out;
};

int cmd_decompose(const GroupSource &src, const Caps &caps, const DecomposeArgs &a) {
  const auto [g, spec] = load_group(src, caps);
  if (a.power == 0)
    throw Error(Errc::range_error, "--power must be at least 1");
  const auto lat = lattice_for(g, caps);
  const auto h = class_index(*lat, a.subgroup_class);
  const auto t = table_of_marks(lat);
  std::optional<RegularOrbitReport> report;
  if (a.regular_order)
    report = regular_orbit_order(t, h);

  const GSetExpr marks_result = power(t, indicator(t, h), a.power);
  GSetExpr result = marks_result;
  if (a.explicit_oracle) {
    const auto cs = coset_space(*g, (*lat)[h].representative);
    const auto p = diagonal_power(cs, a.power, caps.power);
    result = orbit_decompose(p.action, *lat);
    if (!(result == marks_result)) {
      std::cerr << "eqv: explicit orbit decomposition disagrees with the marks computation\n";
      print_json(io::decomposition_to_json(*lat, marks_result), "");
      print_json(io::decomposition_to_json(*lat, result), "");
      return 1;
    }
  }
  json j = io::decomposition_to_json(*lat, result);
  j["class"] = lat->label(h);
  j["power"] = a.power;
  j["orbits"] = result.orbit_count();
  j["method"] = a.explicit_oracle ? "explicit" : "marks";
  if (report)
    j["regular_orbit_order"] = {{"minimal_D", report->minimal_d},
                                {"log_bound", report->log_bound},
                                {"stirling_bound", report->stirling_bound}};
  print_json(j, a.out);
  return 0;
}

// --- pattern / instantiate / verify ---------------------------------------

struct ActionArgs {
  std::string in = "natural";
  std::string out = "natural";
};

void add_action_options(CLI::App *cmd, ActionArgs &a) {
  cmd->add_option("--in", a.in, "input action")->capture_default_str();
  cmd->add_option("--out-action", a.out, "output action")->capture_default_str();
}

int cmd_pattern(const GroupSource &src, const Caps &caps, const ActionArgs &acts,
                const std::string &out) {
  const auto [g, spec] = load_group(src, caps);
  const auto in = make_action(action_descriptor(acts.in, g, caps), g, caps);
  const auto outa = make_action(action_descriptor(acts.out, g, caps), g, caps);
  const auto p = make_pattern(outa, in);
  for (const auto &w : p.warnings)
    std::cerr << "eqv: warning: " << w << "\n";
  print_json(io::pattern_to_json(p), out);
  return 0;
}

int cmd_instantiate(const std::string &pattern_path, std::uint64_t seed, const std::string &out) {
  const auto p = io::pattern_from_json(io::read_json(pattern_path));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(p.num_orbits), b(p.num_bias_orbits);
  for (auto &x : w)
    x = u(rng);
  for (auto &x : b)
    x = u(rng);
  const auto d = instantiate(p, w, b);
  json rows = json::array();
  for (Eigen::Index r = 0; r < d.matrix.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(d.matrix.cols()));
    for (Eigen::Index c = 0; c < d.matrix.cols(); ++c)
      row[static_cast<std::size_t>(c)] = d.matrix(r, c);
    rows.push_back(row);
  }
  std::vector<double> bias(d.bias.data(), d.bias.data() + d.bias.size());
  print_json({{"matrix", rows}, {"bias", bias}}, out);
  return 0;
}

int cmd_verify(const GroupSource &src, const Caps &caps, const ActionArgs &acts,
               const std::string &matrix_path, double tol) {
  const auto [g, spec] = load_group(src, caps);
  const auto in = make_action(action_descriptor(acts.in, g, caps), g, caps);
  const auto outa = make_action(action_descriptor(acts.out, g, caps), g, caps);
  const json m = io::read_json(matrix_path);
  const json &rows = m.is_object() ? m.at("matrix") : m;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw Error(Errc::malformed_input, "\"matrix\" must be a non-empty array of rows");
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != rows[0].size())
      throw Error(Errc::malformed_input, "\"matrix\" rows must have equal length");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (!rows[r][c].is_number())
        throw Error(Errc::malformed_input, "\"matrix\" entries must be numbers");
      mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  Eigen::VectorXd bias;
  if (m.is_object() && m.contains("bias")) {
    const auto b = m.at("bias").get<std::vector<double>>();
    bias = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  }
  const auto rep = check_equivariance(mat, bias, outa, in, tol);
  json j = {{"ok", rep.ok}, {"max_deviation", rep.max_deviation}};
  if (!rep.ok) {
    j["worst_generator"] = rep.worst_generator;
    j["worst_generator_images"] = g->generators()[rep.worst_generator].images();
  }
  print_json(j, "");
  if (!rep.ok)
    std::cerr << "eqv: not equivariant; generator " << rep.worst_generator << " "
              << g->generators()[rep.worst_generator].to_string() << " deviates by "
              << rep.max_deviation << "\n";
  return rep.ok ? 0 : 1;
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  std::string target = "square_plus_next";
  std::size_t channels = 16;
  std::string nonlinearity = "tanh";
  std::string report;
  std::string checkpoint;
  double box = 1.0;
  ActionArgs actions;
  TrainConfig cfg;
};

int cmd_fit(const GroupSource &src, const Caps &caps, FitArgs a) {
  const auto [g, spec] = load_group(src, caps);
  if (a.target == "sum_squares" && a.actions.out == "natural")
    a.actions.out = "trivial";
  const json in_desc = action_descriptor(a.actions.in, g, caps);
  const json out_desc = action_descriptor(a.actions.out, g, caps);
  const auto in = make_action(in_desc, g, caps);
  const auto out = make_action(out_desc, g, caps);
  auto net = build_regular_net(in, out, a.channels, nonlinearity_from_string(a.nonlinearity));
  net.init_uniform(a.cfg.seed);
  a.cfg.box_lo = -a.box;
  a.cfg.box_hi = a.box;
  const auto target = make_target(a.target, net, a.cfg.seed + 1000);
  const auto result = train(net, target, a.cfg);

  std::cout << "epoch  train_mse\n";
  for (const auto &p : result.loss_curve) {
    char line[64];
    std::snprintf(line, sizeof line, "%5zu  %.6e\n", p.epoch, p.train_mse);
    std::cout << line;
  }
  char tail[96];
  std::snprintf(tail, sizeof tail, "final_mse %.6e\nheldout_mse %.6e\n", result.final_mse,
                result.heldout_mse);
  std::cout << tail;

  if (!a.report.empty()) {
    json curve = json::array();
    for (const auto &p : result.loss_curve)
      curve.push_back({{"epoch", p.epoch}, {"train_mse", p.train_mse}});
    json config = {{"group", spec},
                   {"in", in_desc},
                   {"out", out_desc},
                   {"target", a.target},
                   {"channels", a.channels},
                   {"nonlinearity", a.nonlinearity},
                   {"seed", a.cfg.seed},
                   {"epochs", a.cfg.epochs},
                   {"learning_rate", a.cfg.learning_rate},
                   {"momentum", a.cfg.momentum},
                   {"batch_size", a.cfg.batch_size},
                   {"train_samples", a.cfg.train_samples},
                   {"test_samples", a.cfg.test_samples},
                   {"box", {a.cfg.box_lo, a.cfg.box_hi}}};
    print_json({{"config", config},
                {"final_mse", result.final_mse},
                {"heldout_mse", result.heldout_mse},
                {"curve", curve}},
               a.report);
  }
  if (!a.checkpoint.empty())
    print_json(io::checkpoint_to_json(net, spec, {in_desc, "regular", out_desc}), a.checkpoint);
  if (!std::isfinite(result.final_mse)) {
    std::cerr << "eqv: training diverged; try a smaller --lr\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Finite permutation groups, tables of marks and equivariant networks", "eqv"};
  app.footer(kFooter);
  app.require_subcommand(1);

  GroupSource src;
  std::string out;
  bool pretty = false;
  DecomposeArgs dec;
  ActionArgs acts;
  std::string pattern_path, matrix_path;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  FitArgs fit;

  auto *group = app.add_subcommand("group", "order, orbits and action flags of a group");
  add_group_options(group, src);

  auto *lattice = app.add_subcommand("lattice", "conjugacy classes of subgroups as JSON");
  add_group_options(lattice, src);
  lattice->add_option("-o,--out", out, "write JSON here instead of stdout");

  auto *marks = app.add_subcommand("marks", "table of marks");
  add_group_options(marks, src);
  marks->add_option("-o,--out", out, "write JSON here; stdout then shows the pretty table");
  marks->add_flag("--pretty", pretty, "print a lower-triangular table (at most 12 classes)");

  auto *decompose = app.add_subcommand("decompose", "orbits of a power of a coset space");
  add_group_options(decompose, src);
  decompose->add_option("--subgroup-class", dec.subgroup_class, "class label or index")
      ->capture_default_str();
  decompose->add_option("--power", dec.power, "number of factors D")->capture_default_str();
  decompose->add_flag("--explicit", dec.explicit_oracle,
                      "enumerate the product explicitly and check against the marks");
  decompose->add_flag("--regular-order", dec.regular_order,
                      "report the smallest power with a regular orbit and the bounds");
  decompose->add_option("-o,--out", dec.out, "write JSON here instead of stdout");

  auto *pattern = app.add_subcommand("pattern", "weight-sharing pattern between two actions");
  add_group_options(pattern, src);
  add_action_options(pattern, acts);
  pattern->add_option("-o,--out", out, "write JSON here instead of stdout");

  auto *inst = app.add_subcommand("instantiate", "random dense matrix from a pattern");
  inst->add_option("--pattern", pattern_path, "pattern JSON")->required()->check(CLI::ExistingFile);
  inst->add_option("--seed", seed, "weight seed")->capture_default_str();
  inst->add_option("-o,--out", out, "write JSON here instead of stdout");

  auto *verify = app.add_subcommand("verify", "check that a matrix is equivariant");
  add_group_options(verify, src);
  add_action_options(verify, acts);
  verify->add_option("--matrix", matrix_path, "JSON {\"matrix\": [[...]], \"bias\": [...]}")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--tol", tol, "entrywise tolerance")->capture_default_str();

  auto *fitcmd = app.add_subcommand("fit", "train a regular-hidden-layer net on a target");
  add_group_options(fitcmd, src);
  add_action_options(fitcmd, fit.actions);
  fitcmd->add_option("--target", fit.target, "square_plus_next | sum_squares | frozen")
      ->capture_default_str();
  fitcmd->add_option("--channels", fit.channels, "hidden channels")->capture_default_str();
  fitcmd->add_option("--nonlinearity", fit.nonlinearity, "identity | relu | tanh | sigmoid")
      ->capture_default_str();
  fitcmd->add_option("--epochs", fit.cfg.epochs)->capture_default_str();
  fitcmd->add_option("--seed", fit.cfg.seed)->capture_default_str();
  fitcmd->add_option("--lr", fit.cfg.learning_rate)->capture_default_str();
  fitcmd->add_option("--momentum", fit.cfg.momentum)->capture_default_str();
  fitcmd->add_option("--batch", fit.cfg.batch_size)->capture_default_str();
  fitcmd->add_option("--samples", fit.cfg.train_samples, "training samples")->capture_default_str();
  fitcmd->add_option("--test-samples", fit.cfg.test_samples)->capture_default_str();
  fitcmd->add_option("--box", fit.box, "inputs are drawn from [-box, box]")->capture_default_str();
  fitcmd->add_option("--log-every", fit.cfg.log_every)->capture_default_str();
  fitcmd->add_option("--report", fit.report, "write the JSON report here");
  fitcmd->add_option("--checkpoint", fit.checkpoint, "write the trained net here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Caps caps = read_caps();
    if (*group)
      return cmd_group(src, caps);
    if (*lattice)
      return cmd_lattice(src, caps, out);
    if (*marks)
      return cmd_marks(src, caps, out, pretty || !out.empty());
    if (*decompose)
      return cmd_decompose(src, caps, dec);
    if (*pattern)
      return cmd_pattern(src, caps, acts, out);
    if (*inst)
      return cmd_instantiate(pattern_path, seed, out);
    if (*verify)
      return cmd_verify(src, caps, acts, matrix_path, tol);
    if (*fitcmd)
      return cmd_fit(src, caps, fit);
  } catch (const Error &e) {
    std::cerr << "eqv: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const io::json::exception &e) {
    std::cerr << "eqv: MalformedInput: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
