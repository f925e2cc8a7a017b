#include "editcraft/constraints.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <json.hpp>

#include "editcraft/ioutil.hpp"

namespace editcraft {

using nlohmann::json;

std::string_view interaction_kind_name(InteractionKind k) {
  switch (k) {
    case InteractionKind::HydrogenBond: return "HydrogenBond";
    case InteractionKind::Hydrophobic: return "Hydrophobic";
    case InteractionKind::SaltBridge: return "SaltBridge";
    case InteractionKind::PiStacking: return "PiStacking";
    case InteractionKind::PiCation: return "PiCation";
    case InteractionKind::HalogenBond: return "HalogenBond";
    case InteractionKind::MetalComplex: return "MetalComplex";
  }
  return "?";
}

std::optional<InteractionKind> interaction_kind_from_name(
    std::string_view name) {
  for (int i = 0; i <= static_cast<int>(InteractionKind::MetalComplex); ++i) {
    auto k = static_cast<InteractionKind>(i);
    if (interaction_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

InteractionProfile parse_interaction_profile(const std::string& content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), 0, "");
  }
  if (!doc.is_object() || !doc.contains("atoms") || !doc.contains("bonds") ||
      !doc.contains("interactions")) {
    throw SchemaError("profile needs atoms, bonds and interactions", 0, "");
  }

  InteractionProfile profile;
  std::set<int> serials;
  for (const auto& item : doc["atoms"]) {
    if (!item.is_object() || !item.contains("serial") ||
        !item.contains("element")) {
      throw SchemaError("atom needs serial and element", 0, "atoms");
    }
    PoseAtom atom;
    atom.serial = item["serial"].get<int>();
    if (atom.serial < 1) {
      throw SchemaError("pose serials start at 1", 0, "atoms");
    }
    std::string sym = item["element"].get<std::string>();
    auto e = element_from_symbol(sym);
    if (!e) {
      throw SchemaError("unsupported element '" + sym + "'", 0, "atoms");
    }
    atom.element = *e;
    if (!serials.insert(atom.serial).second) {
      throw SchemaError("duplicate pose serial " +
                            std::to_string(atom.serial),
                        0, "atoms");
    }
    profile.pose.atoms.push_back(atom);
  }
  for (const auto& item : doc["bonds"]) {
    if (!item.is_array() || item.size() != 2) {
      throw SchemaError("bond must be a [serial, serial] pair", 0, "bonds");
    }
    int s1 = item[0].get<int>();
    int s2 = item[1].get<int>();
    if (!serials.count(s1) || !serials.count(s2)) {
      throw SchemaError("bond references unknown serial", 0, "bonds");
    }
    profile.pose.bonds.push_back({s1, s2});
  }
  for (const auto& item : doc["interactions"]) {
    if (!item.is_object() || !item.contains("serial") ||
        !item.contains("kind") || !item.contains("residue")) {
      throw SchemaError("interaction needs serial, kind and residue", 0,
                        "interactions");
    }
    PoseInteraction pi;
    pi.pose_atom_index = item["serial"].get<int>();
    std::string kind = item["kind"].get<std::string>();
    auto k = interaction_kind_from_name(kind);
    if (!k) throw UnknownInteractionKind(kind);
    pi.kind = *k;
    pi.residue = item["residue"].get<std::string>();
    profile.interactions.push_back(std::move(pi));
  }
  return profile;
}

InteractionProfile load_interaction_profile(const std::string& path) {
  return parse_interaction_profile(read_file(path));
}

std::unordered_map<int, int> align_pose_to_graph(const PoseGraph& pose,
                                                 const Molecule& canon) {
  // Heavy atoms only, ascending serial.
  std::vector<PoseAtom> heavy;
  for (const PoseAtom& a : pose.atoms) {
    if (a.element != Element::H) heavy.push_back(a);
  }
  std::sort(heavy.begin(), heavy.end(),
            [](const PoseAtom& x, const PoseAtom& y) {
              return x.serial < y.serial;
            });
  std::set<int> heavy_serials;
  for (const PoseAtom& a : heavy) heavy_serials.insert(a.serial);

  std::vector<std::set<int>> pose_adj(heavy.size());
  std::unordered_map<int, int> serial_idx;
  for (std::size_t i = 0; i < heavy.size(); ++i) {
    serial_idx[heavy[i].serial] = static_cast<int>(i);
  }
  for (auto [s1, s2] : pose.bonds) {
    if (!heavy_serials.count(s1) || !heavy_serials.count(s2)) continue;
    pose_adj[serial_idx[s1]].insert(serial_idx[s2]);
    pose_adj[serial_idx[s2]].insert(serial_idx[s1]);
  }

  std::vector<int> canon_heavy;  // map numbers, ascending
  for (const Atom& a : canon.atoms()) {
    if (a.element != Element::H) canon_heavy.push_back(a.map_num);
  }
  std::sort(canon_heavy.begin(), canon_heavy.end());

  if (heavy.size() != canon_heavy.size()) {
    throw AlignmentFailure(
        "pose has " + std::to_string(heavy.size()) +
        " heavy atoms, molecule has " + std::to_string(canon_heavy.size()));
  }

  std::unordered_map<int, std::set<int>> canon_adj;  // heavy-only
  for (int m : canon_heavy) canon_adj[m] = {};
  for (const Bond& b : canon.bonds()) {
    if (!canon_adj.count(b.a) || !canon_adj.count(b.b)) continue;
    canon_adj[b.a].insert(b.b);
    canon_adj[b.b].insert(b.a);
  }

  // Assign serials in ascending order, trying candidate map numbers
  // ascending: the first complete assignment is the lexicographic minimum.
  std::size_t n = heavy.size();
  std::vector<int> assign(n, -1);
  std::vector<bool> used(canon_heavy.size(), false);

  std::function<bool(std::size_t)> solve = [&](std::size_t k) -> bool {
    if (k == n) return true;
    for (std::size_t c = 0; c < canon_heavy.size(); ++c) {
      if (used[c]) continue;
      int map = canon_heavy[c];
      if (canon.atom(map).element != heavy[k].element) continue;
      if (canon_adj[map].size() != pose_adj[k].size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        bool pose_bonded = pose_adj[k].count(static_cast<int>(j)) > 0;
        bool canon_bonded = canon_adj[map].count(assign[j]) > 0;
        if (pose_bonded != canon_bonded) ok = false;
      }
      if (!ok) continue;
      assign[k] = map;
      used[c] = true;
      if (solve(k + 1)) return true;
      assign[k] = -1;
      used[c] = false;
    }
    return false;
  };

  if (!solve(0)) {
    throw AlignmentFailure("pose graph is not isomorphic to the molecule");
  }
  std::unordered_map<int, int> out;
  for (std::size_t i = 0; i < n; ++i) out[heavy[i].serial] = assign[i];
  return out;
}

std::vector<InteractionConstraint> bind_constraints(
    const InteractionProfile& profile,
    const std::unordered_map<int, int>& alignment, const Molecule& canon) {
  std::vector<InteractionConstraint> out;
  for (const PoseInteraction& pi : profile.interactions) {
    auto it = alignment.find(pi.pose_atom_index);
    if (it == alignment.end()) throw UnmappedSerial(pi.pose_atom_index);
    InteractionConstraint c;
    c.map_num = it->second;
    c.element = canon.atom(c.map_num).element;
    for (int n : canon.neighbors(c.map_num)) {
      c.neighbors.push_back({canon.atom(n).element, n});
    }
    std::sort(c.neighbors.begin(), c.neighbors.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    c.kind = pi.kind;
    c.residue = pi.residue;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const InteractionConstraint& x, const InteractionConstraint& y) {
              if (x.map_num != y.map_num) return x.map_num < y.map_num;
              if (x.kind != y.kind) {
                return static_cast<int>(x.kind) < static_cast<int>(y.kind);
              }
              return x.residue < y.residue;
            });
  return out;
}

}  // namespace editcraft
