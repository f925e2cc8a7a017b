#include "editcraft/molecule.hpp"

#include <algorithm>
#include <sstream>

#include "graph_scratch.hpp"

namespace editcraft {

std::string_view bond_order_name(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return "SINGLE";
    case BondOrder::Double: return "DOUBLE";
    case BondOrder::Triple: return "TRIPLE";
    case BondOrder::Aromatic: return "AROMATIC";
  }
  return "?";
}

std::optional<BondOrder> bond_order_from_name(std::string_view name) {
  if (name == "SINGLE") return BondOrder::Single;
  if (name == "DOUBLE") return BondOrder::Double;
  if (name == "TRIPLE") return BondOrder::Triple;
  if (name == "AROMATIC") return BondOrder::Aromatic;
  return std::nullopt;
}

int order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 1;
  }
  return 1;
}

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Valence: return "valence";
    case ViolationKind::Kekulization: return "kekulization";
    case ViolationKind::Aromaticity: return "aromaticity";
    case ViolationKind::Fragmentation: return "fragmentation";
    case ViolationKind::Chirality: return "chirality";
    case ViolationKind::BondStereo: return "bond-stereo";
  }
  return "?";
}

std::string SanitizeReport::summary() const {
  if (ok) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violation_kind_name(violations[i].kind) << ": "
       << violations[i].message;
  }
  return os.str();
}

std::int64_t Molecule::bond_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

bool Molecule::has_atom(int map_num) const {
  return atom_index_.count(map_num) > 0;
}

const Atom& Molecule::atom(int map_num) const {
  auto it = atom_index_.find(map_num);
  if (it == atom_index_.end()) throw UnknownAtomError(map_num);
  return atoms_[it->second];
}

Atom& Molecule::atom(int map_num) {
  auto it = atom_index_.find(map_num);
  if (it == atom_index_.end()) throw UnknownAtomError(map_num);
  sanitized_ = false;
  return atoms_[it->second];
}

bool Molecule::has_bond(int a, int b) const {
  return bond_index_.count(bond_key(a, b)) > 0;
}

const Bond& Molecule::bond(int a, int b) const {
  auto it = bond_index_.find(bond_key(a, b));
  if (it == bond_index_.end()) {
    throw Error("no bond between atoms " + std::to_string(a) + " and " +
                std::to_string(b));
  }
  return bonds_[it->second];
}

Bond& Molecule::bond(int a, int b) {
  auto it = bond_index_.find(bond_key(a, b));
  if (it == bond_index_.end()) {
    throw Error("no bond between atoms " + std::to_string(a) + " and " +
                std::to_string(b));
  }
  sanitized_ = false;
  return bonds_[it->second];
}

std::vector<int> Molecule::neighbors(int map_num) const {
  if (!has_atom(map_num)) throw UnknownAtomError(map_num);
  std::vector<int> out;
  for (const Bond& b : bonds_) {
    if (b.a == map_num) out.push_back(b.b);
    if (b.b == map_num) out.push_back(b.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Molecule::degree(int map_num) const {
  if (!has_atom(map_num)) throw UnknownAtomError(map_num);
  int d = 0;
  for (const Bond& b : bonds_) {
    if (b.a == map_num || b.b == map_num) ++d;
  }
  return d;
}

void Molecule::add_atom(const Atom& atom) {
  if (atom.map_num < 1) {
    throw Error("atom map number must be >= 1, got " +
                std::to_string(atom.map_num));
  }
  if (atom_index_.count(atom.map_num)) throw DuplicateMapNumber(atom.map_num);
  if (atom.formal_charge < -4 || atom.formal_charge > 4) {
    throw Error("formal charge out of range [-4,4] on atom " +
                std::to_string(atom.map_num));
  }
  if (atom.explicit_h && *atom.explicit_h < 0) {
    throw Error("negative explicit hydrogen count on atom " +
                std::to_string(atom.map_num));
  }
  atom_index_[atom.map_num] = static_cast<int>(atoms_.size());
  atoms_.push_back(atom);
  sanitized_ = false;
}

void Molecule::remove_atom(int map_num) {
  auto it = atom_index_.find(map_num);
  if (it == atom_index_.end()) throw UnknownAtomError(map_num);
  int idx = it->second;

  // Drop incident bonds first (stable order).
  std::vector<std::pair<int, int>> doomed;
  for (const Bond& b : bonds_) {
    if (b.a == map_num || b.b == map_num) doomed.emplace_back(b.a, b.b);
  }
  for (auto [a, b] : doomed) remove_bond(a, b);

  atoms_.erase(atoms_.begin() + idx);
  atom_index_.erase(it);
  for (auto& [map, i] : atom_index_) {
    if (i > idx) --i;
  }
  sanitized_ = false;
}

void Molecule::add_bond(const Bond& bond) {
  if (bond.a == bond.b) {
    throw Error("self bond on atom " + std::to_string(bond.a));
  }
  if (!has_atom(bond.a)) throw UnknownAtomError(bond.a);
  if (!has_atom(bond.b)) throw UnknownAtomError(bond.b);
  auto key = bond_key(bond.a, bond.b);
  if (bond_index_.count(key)) {
    throw Error("bond between " + std::to_string(bond.a) + " and " +
                std::to_string(bond.b) + " already exists");
  }
  bond_index_[key] = static_cast<int>(bonds_.size());
  bonds_.push_back(bond);
  sanitized_ = false;
}

void Molecule::remove_bond(int a, int b) {
  auto it = bond_index_.find(bond_key(a, b));
  if (it == bond_index_.end()) {
    throw Error("no bond between atoms " + std::to_string(a) + " and " +
                std::to_string(b));
  }
  int idx = it->second;
  bonds_.erase(bonds_.begin() + idx);
  bond_index_.erase(it);
  for (auto& [key, i] : bond_index_) {
    if (i > idx) --i;
  }
  sanitized_ = false;
}

bool Molecule::has_any_stereo() const {
  for (const Atom& a : atoms_) {
    if (a.chirality != Chirality::None) return true;
  }
  for (const Bond& b : bonds_) {
    if (b.stereo != BondStereo::None) return true;
  }
  return false;
}

namespace {

// Parity of the permutation taking `from` to `to` (equal element sets).
bool odd_permutation(const std::vector<int>& from, const std::vector<int>& to) {
  std::vector<int> perm(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    perm[i] = static_cast<int>(
        std::find(to.begin(), to.end(), from[i]) - to.begin());
  }
  int swaps = 0;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    swaps += len - 1;
  }
  return swaps % 2 == 1;
}

}  // namespace

Molecule Molecule::renumbered(
    const std::unordered_map<int, int>& old_to_new) const {
  Molecule out;
  for (const Atom& a : atoms_) {
    auto it = old_to_new.find(a.map_num);
    if (it == old_to_new.end()) {
      throw Error("renumbering does not cover atom " +
                  std::to_string(a.map_num));
    }
    Atom na = a;
    na.map_num = it->second;
    out.add_atom(na);
  }
  for (const Bond& b : bonds_) {
    Bond nb = b;
    nb.a = old_to_new.at(b.a);
    nb.b = old_to_new.at(b.b);
    out.add_bond(nb);
  }

  // Chirality parity: the stored tag is relative to ascending-map neighbor
  // order (phantom H first). Renumbering can permute that order.
  for (const Atom& a : atoms_) {
    if (a.chirality == Chirality::None) continue;
    std::vector<int> old_seq = neighbors(a.map_num);
    if (internal::stereo_phantom_h(*this, a)) {
      old_seq.insert(old_seq.begin(), 0);  // phantom slot
    }
    std::vector<int> new_seq;
    for (int m : old_seq) {
      new_seq.push_back(m == 0 ? 0 : old_to_new.at(m));
    }
    std::vector<int> sorted_new = new_seq;
    std::sort(sorted_new.begin(), sorted_new.end());
    if (odd_permutation(new_seq, sorted_new)) {
      Atom& na = out.atom(old_to_new.at(a.map_num));
      na.chirality =
          na.chirality == Chirality::CW ? Chirality::CCW : Chirality::CW;
    }
  }

  // Bond stereo reference: lowest-map heavy neighbor on each end. If the
  // reference atom changes under the new numbering, the tag flips.
  for (const Bond& b : bonds_) {
    if (b.stereo == BondStereo::None) continue;
    int flips = 0;
    for (int end : {b.a, b.b}) {
      int other = end == b.a ? b.b : b.a;
      std::vector<int> subs;
      for (int n : neighbors(end)) {
        if (n != other) subs.push_back(n);
      }
      if (subs.empty()) continue;
      int old_ref = *std::min_element(subs.begin(), subs.end());
      int new_ref_old_label = subs[0];
      int best = old_to_new.at(subs[0]);
      for (int s : subs) {
        if (old_to_new.at(s) < best) {
          best = old_to_new.at(s);
          new_ref_old_label = s;
        }
      }
      if (new_ref_old_label != old_ref) ++flips;
    }
    if (flips % 2 == 1) {
      Bond& nb = out.bond(old_to_new.at(b.a), old_to_new.at(b.b));
      nb.stereo = nb.stereo == BondStereo::E ? BondStereo::Z : BondStereo::E;
    }
  }

  out.sanitized_ = sanitized_;
  return out;
}

std::vector<std::vector<int>> connected_components(const Molecule& mol) {
  internal::GraphView g(mol);
  std::vector<int> comp(g.n(), -1);
  int ncomp = 0;
  for (int i = 0; i < g.n(); ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack = {i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& e : g.adj[v]) {
        if (comp[e.nbr] < 0) {
          comp[e.nbr] = ncomp;
          stack.push_back(e.nbr);
        }
      }
    }
    ++ncomp;
  }
  std::vector<std::vector<int>> out(ncomp);
  for (int i = 0; i < g.n(); ++i) {
    out[comp[i]].push_back(mol.atoms()[i].map_num);
  }
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

}  // namespace editcraft
