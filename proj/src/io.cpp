#include "eqv/io.hpp"

#include <fstream>

#include "eqv/error.hpp"
#include "eqv/gset.hpp"

namespace eqv::io {

namespace {

[[noreturn]] void malformed(const std::string &what) { throw Error(Errc::malformed_input, what); }

const json &field(const json &j, const char *name, const std::string &where) {
  if (!j.is_object())
    malformed(where + ": expected a JSON object");
  auto it = j.find(name);
  if (it == j.end())
    malformed(where + ": missing field \"" + name + "\"");
  return *it;
}

std::size_t as_count(const json &j, const std::string &what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    malformed(what + " must be a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<Point> as_points(const json &j, const std::string &what) {
  if (!j.is_array())
    malformed(what + " must be an array of point indices");
  std::vector<Point> out;
  out.reserve(j.size());
  for (const auto &x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 0)
      malformed(what + " must contain non-negative integers");
    out.push_back(x.get<Point>());
  }
  return out;
}

Permutation as_permutation(const json &j, const std::string &what) {
  try {
    return Permutation(as_points(j, what));
  } catch (const Error &e) {
    if (e.code() == Errc::invalid_permutation)
      malformed(what + ": " + e.what());
    throw;
  }
}

}  // namespace

json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    malformed("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    malformed(path.string() + ": " + e.what());
  }
}

GroupPtr group_from_json(const json &spec, std::size_t order_cap) {
  const std::size_t degree = as_count(field(spec, "degree", "group spec"), "\"degree\"");
  if (degree == 0)
    malformed("\"degree\" must be positive");
  const json &gens = field(spec, "generators", "group spec");
  if (!gens.is_array())
    malformed("\"generators\" must be an array");
  std::vector<Permutation> perms;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const std::string what = "\"generators\"[" + std::to_string(k) + "]";
    Permutation p = as_permutation(gens[k], what);
    if (p.degree() != degree)
      malformed(what + " has length " + std::to_string(p.degree()) + ", expected " +
                std::to_string(degree));
    perms.push_back(std::move(p));
  }
  std::string name;
  if (auto it = spec.find("name"); it != spec.end() && !it->is_null()) {
    if (!it->is_string())
      malformed("\"name\" must be a string");
    name = it->get<std::string>();
  }
  return FiniteGroup::closure(degree, std::move(perms), std::move(name), order_cap);
}

json group_to_json(const FiniteGroup &group) {
  json j;
  if (!group.name().empty())
    j["name"] = group.name();
  j["degree"] = group.degree();
  j["generators"] = json::array();
  for (const auto &g : group.generators())
    j["generators"].push_back(std::vector<Point>(g.images().begin(), g.images().end()));
  return j;
}

json lattice_to_json(const SubgroupLattice &lattice) {
  json classes = json::array();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto &c = lattice[i];
    classes.push_back({{"label", lattice.label(i)},
                       {"order", c.sub_order},
                       {"size", c.members.size()},
                       {"representative", c.representative.members()}});
  }
  return {{"classes", classes}};
}

json marks_to_json(const TableOfMarks &table) {
  json matrix = json::array();
  for (std::size_t i = 0; i < table.size(); ++i)
    matrix.push_back(table.row(i).entries);
  return {{"classes", table.lattice().labels()}, {"matrix", matrix}};
}

json pattern_to_json(const SharingPattern &p) {
  json rows = json::array();
  for (std::size_t o = 0; o < p.rows; ++o)
    rows.push_back(std::vector<std::uint32_t>(p.orbit_of.begin() + static_cast<long>(o * p.cols),
                                              p.orbit_of.begin() +
                                                  static_cast<long>((o + 1) * p.cols)));
  json j;
  j["rows"] = p.rows;
  j["cols"] = p.cols;
  j["num_orbits"] = p.num_orbits;
  j["orbit_of"] = rows;
  j["bias_orbit_of"] = p.bias_orbit_of;
  j["num_bias_orbits"] = p.num_bias_orbits;
  return j;
}

SharingPattern pattern_from_json(const json &j) {
  SharingPattern p;
  p.rows = as_count(field(j, "rows", "pattern"), "\"rows\"");
  p.cols = as_count(field(j, "cols", "pattern"), "\"cols\"");
  p.num_orbits = as_count(field(j, "num_orbits", "pattern"), "\"num_orbits\"");
  p.num_bias_orbits = as_count(field(j, "num_bias_orbits", "pattern"), "\"num_bias_orbits\"");
  const json &rows = field(j, "orbit_of", "pattern");
  if (!rows.is_array() || rows.size() != p.rows)
    malformed("\"orbit_of\" must have one row per output point");
  for (const auto &r : rows) {
    auto ids = as_points(r, "\"orbit_of\" row");
    if (ids.size() != p.cols)
      malformed("\"orbit_of\" row has the wrong length");
    for (auto id : ids)
      if (id >= p.num_orbits)
        malformed("\"orbit_of\" entry out of range");
    p.orbit_of.insert(p.orbit_of.end(), ids.begin(), ids.end());
  }
  auto bias = as_points(field(j, "bias_orbit_of", "pattern"), "\"bias_orbit_of\"");
  if (bias.size() != p.rows)
    malformed("\"bias_orbit_of\" must have one entry per output point");
  for (auto id : bias)
    if (id >= p.num_bias_orbits)
      malformed("\"bias_orbit_of\" entry out of range");
  p.bias_orbit_of.assign(bias.begin(), bias.end());
  return p;
}

json decomposition_to_json(const SubgroupLattice &lattice, const GSetExpr &expr) {
  json mult = json::object();
  for (std::size_t i = 0; i < expr.multiplicities.size(); ++i)
    if (expr.multiplicities[i] != 0)
      mult[lattice.label(i)] = expr.multiplicities[i];
  return {{"multiplicities", mult}, {"regular_orbit", expr.multiplicities.at(0) > 0}};
}

GroupAction action_from_descriptor(const GroupPtr &group, const json &d) {
  if (d.is_string()) {
    const auto s = d.get<std::string>();
    if (s == "natural")
      return GroupAction::natural(group);
    if (s == "regular")
      return coset_space(*group, Subgroup::trivial(group));
    if (s == "trivial")
      return GroupAction::trivial(group, 1);
    malformed("unknown action descriptor \"" + s + "\"");
  }
  const auto kind = field(d, "kind", "action descriptor");
  if (!kind.is_string())
    malformed("action descriptor \"kind\" must be a string");
  const auto k = kind.get<std::string>();
  if (k == "natural" || k == "regular")
    return action_from_descriptor(group, json(k));
  if (k == "trivial")
    return GroupAction::trivial(group, d.contains("points") ? as_count(d["points"], "\"points\"")
                                                            : 1);
  if (k == "coset") {
    auto members = as_points(field(d, "subgroup", "coset descriptor"), "\"subgroup\"");
    return coset_space(*group,
                       Subgroup::from_members(group, {members.begin(), members.end()}));
  }
  if (k == "power") {
    const auto base = action_from_descriptor(group, field(d, "base", "power descriptor"));
    return diagonal_power(base, as_count(field(d, "D", "power descriptor"), "\"D\"")).action;
  }
  if (k == "generators") {
    const json &gens = field(d, "generators", "generators descriptor");
    if (!gens.is_array())
      malformed("\"generators\" must be an array");
    std::vector<Permutation> images;
    for (std::size_t i = 0; i < gens.size(); ++i)
      images.push_back(as_permutation(gens[i], "\"generators\"[" + std::to_string(i) + "]"));
    return GroupAction::from_generator_images(group, images);
  }
  malformed("unknown action kind \"" + k + "\"");
}

json checkpoint_to_json(const EquivariantMLP &net, const json &group_spec,
                        const std::vector<json> &action_descriptors) {
  if (action_descriptors.size() != net.layers().size())
    throw Error(Errc::length_mismatch, "one action descriptor per layer is required");
  json layers = json::array();
  for (std::size_t l = 0; l < net.layers().size(); ++l)
    layers.push_back({{"action", action_descriptors[l]},
                      {"channels", net.layers()[l].channels},
                      {"nonlinearity", to_string(net.layers()[l].nonlinearity)}});
  json params = json::array();
  for (const auto &p : net.params())
    params.push_back({{"weights", p.weights}, {"biases", p.biases}});
  return {{"group", group_spec}, {"layers", layers}, {"params", params}};
}

EquivariantMLP checkpoint_from_json(const json &j) {
  const GroupPtr group = group_from_json(field(j, "group", "checkpoint"));
  const json &layers = field(j, "layers", "checkpoint");
  if (!layers.is_array())
    malformed("\"layers\" must be an array");
  std::vector<LayerSpec> specs;
  for (const auto &l : layers) {
    LayerSpec s;
    s.action = action_from_descriptor(group, field(l, "action", "layer"));
    s.channels = as_count(field(l, "channels", "layer"), "\"channels\"");
    s.nonlinearity = nonlinearity_from_string(field(l, "nonlinearity", "layer").get<std::string>());
    specs.push_back(std::move(s));
  }
  EquivariantMLP net(std::move(specs));
  const json &params = field(j, "params", "checkpoint");
  if (!params.is_array() || params.size() != net.depth())
    malformed("\"params\" must have one entry per affine map");
  for (std::size_t m = 0; m < net.depth(); ++m) {
    auto w = field(params[m], "weights", "params").get<std::vector<double>>();
    auto b = field(params[m], "biases", "params").get<std::vector<double>>();
    auto &dst = net.params(m);
    if (w.size() != dst.weights.size() || b.size() != dst.biases.size())
      malformed("parameter vector length mismatch in map " + std::to_string(m));
    dst.weights = std::move(w);
    dst.biases = std::move(b);
  }
  return net;
}

}  // namespace eqv::io
