#pragma once

#include <string>
#include <vector>

#include "editcraft/molecule.hpp"

namespace editcraft {

struct SmilesOptions {
  bool include_atom_maps = false;
  bool kekulized_output = false;
  bool canonical = true;
};

// Atoms parsed without an explicit map annotation receive provisional ids
// at this base; assign_map_numbers replaces them with canonical 1..n ids.
inline constexpr int kProvisionalMapBase = 1'000'000;

// Parse one SMILES string (organic subset + brackets, ring closures,
// branches, -/=/#/: bonds, @/@@ chirality, E/Z slashes, atom maps).
// The result is sanitized under `policy` or a SanitizeError is thrown.
Molecule parse_smiles(const std::string& text,
                      const SanitizePolicy& policy = {});

std::string write_smiles(const Molecule& mol, const SmilesOptions& opts = {});

// Map numbers in canonical order: iterative neighborhood refinement over
// (element, charge, degree, H count, ring flag) with deterministic
// individualization tie-breaking. Invariant under input atom permutation.
std::vector<int> canonical_rank(const Molecule& mol);

// Give every provisionally-numbered atom the smallest unused map number,
// walking atoms in canonical order; explicit maps are preserved.
Molecule assign_map_numbers(const Molecule& mol);

namespace internal {
// Canonical position of every atom (indexed like mol.atoms()); the atom at
// canonical position 0 has order value 0. Does not require the sanitized
// flag, only a kekulizable graph.
std::vector<int> canonical_positions(const Molecule& mol);
}  // namespace internal

}  // namespace editcraft
