#ifndef EQV_IO_HPP
#define EQV_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqv/burnside.hpp"
#include "eqv/group.hpp"
#include "eqv/lattice.hpp"
#include "eqv/mlp.hpp"
#include "eqv/sharing.hpp"

namespace eqv::io {

using nlohmann::json;

/// Reads a whole file as JSON; throws Errc::malformed_input on failure.
json read_json(const std::filesystem::path &path);

/// {"name": optional string, "degree": n, "generators": [[images...], ...]}
GroupPtr group_from_json(const json &spec, std::size_t order_cap = kDefaultOrderCap);
json group_to_json(const FiniteGroup &group);

/// {"classes": [{"order": k, "size": m, "representative": [...]}, ...]}
json lattice_to_json(const SubgroupLattice &lattice);

/// {"classes": [labels], "matrix": [[...]]}
json marks_to_json(const TableOfMarks &table);

/// {"rows", "cols", "num_orbits", "orbit_of", "bias_orbit_of", "num_bias_orbits"}
json pattern_to_json(const SharingPattern &pattern);
SharingPattern pattern_from_json(const json &j);

/// {"multiplicities": {"<label>": k, ...}, "regular_orbit": bool}; zero
/// multiplicities are omitted.
json decomposition_to_json(const SubgroupLattice &lattice, const GSetExpr &expr);

/// Action descriptors:
///   "natural" | "regular" | "trivial"
///   {"kind": "trivial", "points": n}
///   {"kind": "coset", "subgroup": [element indices]}
///   {"kind": "power", "base": <descriptor>, "D": d}
///   {"kind": "generators", "generators": [[images...], ...]}  (one per group generator)
GroupAction action_from_descriptor(const GroupPtr &group, const json &descriptor);

/// {"group": <group spec>, "layers": [{"action", "channels", "nonlinearity"}],
///  "params": [{"weights": [...], "biases": [...]}]}
json checkpoint_to_json(const EquivariantMLP &net, const json &group_spec,
                        const std::vector<json> &action_descriptors);
EquivariantMLP checkpoint_from_json(const json &j);

}  // namespace eqv::io

#endif  // EQV_IO_HPP
