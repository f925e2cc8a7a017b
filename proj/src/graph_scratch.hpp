#pragma once

// Index-based scratch structures shared by the graph algorithms. Not part
// of the public API.

#include <vector>

#include "editcraft/molecule.hpp"

namespace editcraft::internal {

struct AdjEntry {
  int nbr;   // atom index
  int bond;  // bond index
};

struct GraphView {
  const Molecule* mol = nullptr;
  std::vector<std::vector<AdjEntry>> adj;  // per atom index

  explicit GraphView(const Molecule& m);

  int atom_index(int map_num) const;
  int n() const { return static_cast<int>(adj.size()); }

 private:
  std::unordered_map<int, int> index_;
};

// bond_in_ring[i] is true iff bond i is not a bridge.
std::vector<bool> ring_bonds(const GraphView& g);
std::vector<bool> ring_atoms(const GraphView& g,
                             const std::vector<bool>& bond_ring);

// Pi-system role of an atom during kekulization.
enum class PiRole {
  None,       // not part of any aromatic bond
  Required,   // must receive exactly one double bond
  Optional,   // may receive zero or one
  Forbidden,  // must receive none
  Infeasible  // no valence state fits either way
};

// Classify every atom against the aromatic bonds it touches.
std::vector<PiRole> classify_pi_roles(const GraphView& g);

// Assign each aromatic bond SINGLE or DOUBLE so that pi roles are honored.
// Returns per-bond "promoted to double" flags, or empty on failure, in
// which case failed_atoms receives the unsatisfiable pi system.
bool solve_kekule(const GraphView& g, const std::vector<PiRole>& roles,
                  std::vector<bool>& double_out,
                  std::vector<int>& failed_atoms);

// Whether the atom carries at least one hydrogen for the purpose of the
// chirality phantom-neighbor slot. All stereo bookkeeping (parser, writer,
// renumbering, isomorphism) must agree on this rule.
bool stereo_phantom_h(const Molecule& mol, const Atom& a);

}  // namespace editcraft::internal
