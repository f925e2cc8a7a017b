#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "editcraft/molecule.hpp"

namespace editcraft {

// Non-covalent interaction categories accepted from interaction profiles.
enum class InteractionKind {
  HydrogenBond,
  Hydrophobic,
  SaltBridge,
  PiStacking,
  PiCation,
  HalogenBond,
  MetalComplex,
};

std::string_view interaction_kind_name(InteractionKind k);
std::optional<InteractionKind> interaction_kind_from_name(
    std::string_view name);

class UnknownInteractionKind : public Error {
 public:
  explicit UnknownInteractionKind(const std::string& name)
      : Error("unknown interaction kind '" + name + "'") {}
};

class AlignmentFailure : public Error {
 public:
  using Error::Error;
};

class UnmappedSerial : public Error {
 public:
  explicit UnmappedSerial(int serial)
      : Error("pose serial " + std::to_string(serial) +
              " is not covered by the alignment") {}
};

// One atom of the docked pose (1-based serial, element symbol).
struct PoseAtom {
  int serial = 0;
  Element element = Element::C;
};

struct PoseGraph {
  std::vector<PoseAtom> atoms;
  std::vector<std::pair<int, int>> bonds;  // serial pairs
};

struct PoseInteraction {
  int pose_atom_index = 0;  // serial in the docked pose
  InteractionKind kind = InteractionKind::HydrogenBond;
  std::string residue;
};

struct InteractionProfile {
  PoseGraph pose;
  std::vector<PoseInteraction> interactions;
};

// Per-atom constraint bound to the canonical 2D graph.
struct InteractionConstraint {
  int map_num = 0;
  Element element = Element::C;
  std::vector<std::pair<Element, int>> neighbors;  // ascending map order
  InteractionKind kind = InteractionKind::HydrogenBond;
  std::string residue;
};

// Parse the documented profile JSON: {"atoms":[{"serial","element"}],
// "bonds":[[s1,s2]], "interactions":[{"serial","kind","residue"}]}.
InteractionProfile load_interaction_profile(const std::string& path);
InteractionProfile parse_interaction_profile(const std::string& content);

// Full element- and connectivity-preserving bijection from pose serials to
// canonical map numbers; pose hydrogens are dropped before matching. Among
// automorphism-equivalent bijections, the one minimizing the map-number
// sequence over ascending serials is chosen.
std::unordered_map<int, int> align_pose_to_graph(const PoseGraph& pose,
                                                 const Molecule& canon);

// Fill constraints (element, sorted neighbor list) from the canonical
// molecule; output sorted by map number, then kind, then residue.
std::vector<InteractionConstraint> bind_constraints(
    const InteractionProfile& profile,
    const std::unordered_map<int, int>& alignment, const Molecule& canon);

}  // namespace editcraft
