#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "editcraft/element.hpp"
#include "editcraft/errors.hpp"

namespace editcraft {

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };
enum class BondStereo : std::uint8_t { None, E, Z };
enum class Chirality : std::uint8_t { None, CW, CCW };

std::string_view bond_order_name(BondOrder o);
std::optional<BondOrder> bond_order_from_name(std::string_view name);

// Sigma-framework contribution of a bond (aromatic counts as 1; the pi
// electron is handled by kekulization).
int order_value(BondOrder o);

struct Atom {
  int map_num = 0;  // >= 1; ids introduced by edits start at 500
  Element element = Element::C;
  int formal_charge = 0;
  // Set only for bracket atoms; unset means hydrogens are implied by valence.
  std::optional<int> explicit_h;
  bool aromatic = false;
  // Stored relative to the neighbor sequence sorted by ascending map number,
  // with a single phantom slot for implicit hydrogens placed first.
  Chirality chirality = Chirality::None;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  // Only meaningful on double bonds. Z means the reference substituents
  // (lowest-map heavy neighbor on each end) are cis.
  BondStereo stereo = BondStereo::None;
};

enum class ViolationKind {
  Valence,
  Kekulization,
  Aromaticity,
  Fragmentation,
  Chirality,
  BondStereo,
};

std::string_view violation_kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::vector<int> atoms;  // map numbers involved
  std::string message;
};

struct SanitizeReport {
  bool ok = true;
  std::vector<Violation> violations;

  std::string summary() const;
};

struct SanitizePolicy {
  bool require_connected = true;
};

class SanitizeError : public Error {
 public:
  explicit SanitizeError(SanitizeReport report)
      : Error("sanitize failed: " + report.summary()),
        report_(std::move(report)) {}

  const SanitizeReport& report() const { return report_; }

 private:
  SanitizeReport report_;
};

class KekulizationFailure : public Error {
 public:
  KekulizationFailure(std::string message, std::vector<int> ring_atoms)
      : Error(std::move(message)), ring_atoms_(std::move(ring_atoms)) {}

  // Map numbers of the offending pi system (or atom).
  const std::vector<int>& ring_atoms() const { return ring_atoms_; }

 private:
  std::vector<int> ring_atoms_;
};

// Chemical graph addressed by atom map numbers. Value type: copy freely,
// mutate privately. Any structural mutation clears the sanitized flag.
class Molecule {
 public:
  Molecule() = default;

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  bool has_atom(int map_num) const;
  // Throw UnknownAtomError when the map number is absent.
  const Atom& atom(int map_num) const;
  Atom& atom(int map_num);

  bool has_bond(int a, int b) const;
  const Bond& bond(int a, int b) const;
  Bond& bond(int a, int b);

  // Neighbor map numbers, ascending.
  std::vector<int> neighbors(int map_num) const;
  int degree(int map_num) const;

  void add_atom(const Atom& atom);          // DuplicateMapNumber on collision
  void remove_atom(int map_num);           // also removes incident bonds
  void add_bond(const Bond& bond);         // endpoints must exist
  void remove_bond(int a, int b);

  bool sanitized() const { return sanitized_; }
  void invalidate() { sanitized_ = false; }

  bool has_any_stereo() const;

  // Remap atom ids via old->new map numbers (must be a complete injective
  // relabeling). Chirality and double-bond stereo tags are re-normalized so
  // the described geometry is preserved under the new numbering.
  Molecule renumbered(const std::unordered_map<int, int>& old_to_new) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::unordered_map<int, int> atom_index_;
  std::unordered_map<std::int64_t, int> bond_index_;
  bool sanitized_ = false;

  static std::int64_t bond_key(int a, int b);

  friend SanitizeReport sanitize(Molecule& mol, const SanitizePolicy& policy);
};

// Validates valences, aromatic systems, stereo invariants and (per policy)
// connectivity. Never mutates the graph; only flips the sanitized flag.
SanitizeReport sanitize(Molecule& mol, const SanitizePolicy& policy = {});

// Report for a molecule the caller cannot or does not want to flag.
SanitizeReport sanitize_report(const Molecule& mol,
                               const SanitizePolicy& policy = {});

// Total hydrogen count of one atom (explicit bracket count, or the
// valence-table fill computed on the kekulized graph).
int implicit_h_count(const Molecule& mol, int map_num);

// Hydrogen counts for all atoms, indexed like mol.atoms().
std::vector<int> total_h_counts(const Molecule& mol);

// Copy with every aromatic bond reassigned SINGLE/DOUBLE by a backtracking
// matching over the pi system; aromatic atom flags are cleared alongside.
// Idempotent on non-aromatic input. Throws KekulizationFailure.
Molecule kekulize(const Molecule& mol);

// Labeled-graph isomorphism on sanitized molecules: element, charge,
// hydrogen-adjusted degree and kekule-normalized bond orders must match;
// map numbers are ignored. Chirality / bond stereo are compared only when
// both molecules carry at least one stereo annotation.
bool is_isomorphic(const Molecule& a, const Molecule& b);

// Bond-connectivity partition; each component sorted ascending, components
// ordered by their smallest member.
std::vector<std::vector<int>> connected_components(const Molecule& mol);

}  // namespace editcraft
