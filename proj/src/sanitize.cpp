#include <algorithm>
#include <sstream>

#include "editcraft/molecule.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

using internal::GraphView;
using internal::PiRole;

// Hydrogen counts given a solved kekule assignment (per-bond double flags;
// empty when the molecule has no aromatic bonds). Atoms whose valence
// cannot be closed get h = 0 and an entry in `bad`.
std::vector<int> h_counts_with_assignment(const GraphView& g,
                                          const std::vector<bool>& dbl,
                                          std::vector<int>* bad) {
  const Molecule& m = *g.mol;
  std::vector<int> h(g.n(), 0);
  for (int i = 0; i < g.n(); ++i) {
    const Atom& a = m.atoms()[i];
    int sum = 0;
    for (const auto& e : g.adj[i]) {
      const Bond& b = m.bonds()[e.bond];
      if (b.order == BondOrder::Aromatic) {
        sum += (!dbl.empty() && dbl[e.bond]) ? 2 : 1;
      } else {
        sum += order_value(b.order);
      }
    }
    if (a.explicit_h.has_value()) {
      h[i] = *a.explicit_h;
      bool fits = false;
      for (int v : allowed_valences(a.element, a.formal_charge)) {
        if (v == sum + h[i]) fits = true;
      }
      if (!fits && bad) bad->push_back(a.map_num);
    } else {
      auto v = smallest_valence_at_least(a.element, a.formal_charge, sum);
      if (!v.has_value()) {
        if (bad) bad->push_back(a.map_num);
      } else {
        h[i] = *v - sum;
      }
    }
  }
  return h;
}

bool has_aromatic_bonds(const Molecule& m) {
  for (const Bond& b : m.bonds()) {
    if (b.order == BondOrder::Aromatic) return true;
  }
  return false;
}

}  // namespace

SanitizeReport sanitize_report(const Molecule& mol,
                               const SanitizePolicy& policy) {
  SanitizeReport report;
  auto add = [&](ViolationKind kind, std::vector<int> atoms,
                 std::string message) {
    report.violations.push_back({kind, std::move(atoms), std::move(message)});
  };

  GraphView g(mol);
  auto bond_ring = internal::ring_bonds(g);

  // Aromatic notation consistency.
  std::vector<bool> touches_aromatic(g.n(), false);
  for (int bi = 0; bi < mol.bond_count(); ++bi) {
    const Bond& b = mol.bonds()[bi];
    if (b.order != BondOrder::Aromatic) continue;
    touches_aromatic[g.atom_index(b.a)] = true;
    touches_aromatic[g.atom_index(b.b)] = true;
    if (!bond_ring[bi]) {
      add(ViolationKind::Aromaticity, {b.a, b.b},
          "aromatic bond " + std::to_string(b.a) + "-" + std::to_string(b.b) +
              " is not in a ring");
    }
    if (!mol.atom(b.a).aromatic || !mol.atom(b.b).aromatic) {
      add(ViolationKind::Aromaticity, {b.a, b.b},
          "aromatic bond " + std::to_string(b.a) + "-" + std::to_string(b.b) +
              " has a non-aromatic endpoint");
    }
  }
  for (int i = 0; i < g.n(); ++i) {
    const Atom& a = mol.atoms()[i];
    if (a.aromatic && !aromatic_capable(a.element)) {
      add(ViolationKind::Aromaticity, {a.map_num},
          std::string("element ") + std::string(symbol_of(a.element)) +
              " cannot be aromatic (atom " + std::to_string(a.map_num) + ")");
    }
    if (a.aromatic && !touches_aromatic[i]) {
      add(ViolationKind::Aromaticity, {a.map_num},
          "aromatic atom " + std::to_string(a.map_num) +
              " has no aromatic bond");
    }
  }

  // Kekulization + valence.
  std::vector<bool> dbl;
  bool kekule_ok = true;
  if (has_aromatic_bonds(mol)) {
    auto roles = internal::classify_pi_roles(g);
    std::vector<int> failed;
    if (!internal::solve_kekule(g, roles, dbl, failed)) {
      kekule_ok = false;
      std::ostringstream os;
      os << "no kekule assignment for pi system {";
      for (std::size_t i = 0; i < failed.size(); ++i) {
        os << (i ? "," : "") << failed[i];
      }
      os << "}";
      add(ViolationKind::Kekulization, failed, os.str());
    }
  }
  if (kekule_ok) {
    std::vector<int> bad;
    h_counts_with_assignment(g, dbl, &bad);
    for (int map : bad) {
      const Atom& a = mol.atom(map);
      std::ostringstream os;
      os << "atom " << map << " (" << symbol_of(a.element);
      if (a.formal_charge) {
        os << (a.formal_charge > 0 ? "+" : "") << a.formal_charge;
      }
      os << ") has no allowed valence state";
      add(ViolationKind::Valence, {map}, os.str());
    }
  }

  // Stereo invariants.
  for (const Atom& a : mol.atoms()) {
    if (a.chirality == Chirality::None) continue;
    int nbrs = mol.degree(a.map_num) +
               (internal::stereo_phantom_h(mol, a) ? 1 : 0);
    if (nbrs < 3) {
      add(ViolationKind::Chirality, {a.map_num},
          "chiral tag on atom " + std::to_string(a.map_num) +
              " with fewer than 3 neighbors");
    }
  }
  for (const Bond& b : mol.bonds()) {
    if (b.stereo == BondStereo::None) continue;
    if (b.order != BondOrder::Double) {
      add(ViolationKind::BondStereo, {b.a, b.b},
          "stereo tag on non-double bond " + std::to_string(b.a) + "-" +
              std::to_string(b.b));
      continue;
    }
    for (int end : {b.a, b.b}) {
      int other = end == b.a ? b.b : b.a;
      if (mol.degree(end) < 2) {
        add(ViolationKind::BondStereo, {b.a, b.b},
            "stereo bond " + std::to_string(b.a) + "-" + std::to_string(b.b) +
                " lacks a reference substituent on atom " +
                std::to_string(end));
      }
      (void)other;
    }
  }

  // Connectivity.
  if (policy.require_connected && mol.atom_count() > 0) {
    auto comps = connected_components(mol);
    if (comps.size() > 1) {
      std::vector<int> firsts;
      for (const auto& c : comps) firsts.push_back(c.front());
      add(ViolationKind::Fragmentation, firsts,
          "molecule has " + std::to_string(comps.size()) + " fragments");
    }
  }

  report.ok = report.violations.empty();
  return report;
}

SanitizeReport sanitize(Molecule& mol, const SanitizePolicy& policy) {
  SanitizeReport report = sanitize_report(mol, policy);
  mol.sanitized_ = report.ok;
  return report;
}

std::vector<int> total_h_counts(const Molecule& mol) {
  GraphView g(mol);
  std::vector<bool> dbl;
  if (has_aromatic_bonds(mol)) {
    auto roles = internal::classify_pi_roles(g);
    std::vector<int> failed;
    if (!internal::solve_kekule(g, roles, dbl, failed)) {
      throw KekulizationFailure("cannot kekulize molecule", failed);
    }
  }
  return h_counts_with_assignment(g, dbl, nullptr);
}

int implicit_h_count(const Molecule& mol, int map_num) {
  if (!mol.has_atom(map_num)) throw UnknownAtomError(map_num);
  GraphView g(mol);
  auto counts = total_h_counts(mol);
  return counts[g.atom_index(map_num)];
}

Molecule kekulize(const Molecule& mol) {
  if (!has_aromatic_bonds(mol)) {
    Molecule out = mol;
    // Stray aromatic flags without aromatic bonds would fail sanitize
    // anyway; clear them so kekulize output is always self-consistent.
    for (const Atom& a : mol.atoms()) {
      if (a.aromatic) out.atom(a.map_num).aromatic = false;
    }
    if (mol.sanitized()) {
      SanitizePolicy relaxed{.require_connected = false};
      sanitize(out, relaxed);
    }
    return out;
  }

  GraphView g(mol);
  auto roles = internal::classify_pi_roles(g);
  std::vector<bool> dbl;
  std::vector<int> failed;
  if (!internal::solve_kekule(g, roles, dbl, failed)) {
    throw KekulizationFailure("cannot kekulize molecule", failed);
  }

  Molecule out = mol;
  for (int bi = 0; bi < mol.bond_count(); ++bi) {
    const Bond& b = mol.bonds()[bi];
    if (b.order != BondOrder::Aromatic) continue;
    out.bond(b.a, b.b).order = dbl[bi] ? BondOrder::Double : BondOrder::Single;
  }
  for (const Atom& a : mol.atoms()) {
    if (a.aromatic) out.atom(a.map_num).aromatic = false;
  }
  if (mol.sanitized()) {
    SanitizePolicy relaxed{.require_connected = false};
    sanitize(out, relaxed);
  }
  return out;
}

}  // namespace editcraft
