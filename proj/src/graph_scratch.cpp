#include "graph_scratch.hpp"

#include <algorithm>
#include <functional>

namespace editcraft::internal {

GraphView::GraphView(const Molecule& m) : mol(&m) {
  adj.resize(m.atoms().size());
  for (int i = 0; i < static_cast<int>(m.atoms().size()); ++i) {
    index_[m.atoms()[i].map_num] = i;
  }
  for (int bi = 0; bi < m.bond_count(); ++bi) {
    const Bond& b = m.bonds()[bi];
    int ia = atom_index(b.a);
    int ib = atom_index(b.b);
    adj[ia].push_back({ib, bi});
    adj[ib].push_back({ia, bi});
  }
}

int GraphView::atom_index(int map_num) const {
  auto it = index_.find(map_num);
  if (it == index_.end()) throw UnknownAtomError(map_num);
  return it->second;
}

std::vector<bool> ring_bonds(const GraphView& g) {
  int n = g.n();
  std::vector<bool> in_ring(g.mol->bond_count(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  // Iterative bridge detection (Tarjan).
  struct Frame {
    int v;
    int parent_bond;
    std::size_t next_edge;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack;
    stack.push_back({root, -1, 0});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next_edge < g.adj[f.v].size()) {
        const AdjEntry& e = g.adj[f.v][f.next_edge++];
        if (e.bond == f.parent_bond) continue;
        if (disc[e.nbr] < 0) {
          disc[e.nbr] = low[e.nbr] = timer++;
          stack.push_back({e.nbr, e.bond, 0});
        } else {
          low[f.v] = std::min(low[f.v], disc[e.nbr]);
        }
      } else {
        int v = f.v;
        int pb = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          int u = stack.back().v;
          low[u] = std::min(low[u], low[v]);
          if (low[v] > disc[u]) in_ring[pb] = false;  // bridge
        }
      }
    }
  }
  return in_ring;
}

std::vector<bool> ring_atoms(const GraphView& g,
                             const std::vector<bool>& bond_ring) {
  std::vector<bool> out(g.n(), false);
  for (int bi = 0; bi < g.mol->bond_count(); ++bi) {
    if (!bond_ring[bi]) continue;
    const Bond& b = g.mol->bonds()[bi];
    out[g.atom_index(b.a)] = true;
    out[g.atom_index(b.b)] = true;
  }
  return out;
}

namespace {

// Can the atom's valence close with `extra` pi bonds on top of its sigma
// framework and hydrogen count?
bool valence_fits(const Atom& a, int sigma_sum, int h, int extra) {
  for (int v : allowed_valences(a.element, a.formal_charge)) {
    if (v == sigma_sum + h + extra) return true;
  }
  return false;
}

}  // namespace

std::vector<PiRole> classify_pi_roles(const GraphView& g) {
  const Molecule& m = *g.mol;
  int n = g.n();
  std::vector<PiRole> roles(n, PiRole::None);

  for (int i = 0; i < n; ++i) {
    const Atom& a = m.atoms()[i];
    int aromatic_bonds = 0;
    int sigma_sum = 0;        // aromatic bonds count 1 here
    bool exocyclic_multi = false;
    for (const auto& e : g.adj[i]) {
      const Bond& b = m.bonds()[e.bond];
      if (b.order == BondOrder::Aromatic) {
        ++aromatic_bonds;
        sigma_sum += 1;
      } else {
        sigma_sum += order_value(b.order);
        if (b.order != BondOrder::Single) exocyclic_multi = true;
      }
    }
    if (aromatic_bonds == 0) continue;

    if (a.explicit_h.has_value()) {
      int h = *a.explicit_h;
      bool can_plain = valence_fits(a, sigma_sum, h, 0);
      bool can_double = !exocyclic_multi && valence_fits(a, sigma_sum, h, 1);
      roles[i] = can_plain && can_double ? PiRole::Optional
                 : can_double            ? PiRole::Required
                 : can_plain             ? PiRole::Forbidden
                                         : PiRole::Infeasible;
      continue;
    }

    // Implicit-hydrogen atoms follow per-element aromatic conventions:
    // carbon (and boron) may take aromatic hydrogens, the heteroatoms
    // N/O/P/S never do (pyrrole-type nitrogen must be written [nH]).
    switch (a.element) {
      case Element::C: {
        if (exocyclic_multi) {
          roles[i] = valence_fits(a, sigma_sum, 0, 0) ? PiRole::Forbidden
                                                      : PiRole::Infeasible;
        } else if (sigma_sum <= 3) {
          roles[i] = PiRole::Required;  // h = 3 - sigma_sum
        } else if (sigma_sum == 4) {
          roles[i] = PiRole::Forbidden;
        } else {
          roles[i] = PiRole::Infeasible;
        }
        break;
      }
      case Element::B: {
        bool can_plain = sigma_sum <= 3;
        bool can_double = !exocyclic_multi && sigma_sum + 1 <= 3;
        roles[i] = can_plain && can_double ? PiRole::Optional
                   : can_double            ? PiRole::Required
                   : can_plain             ? PiRole::Forbidden
                                           : PiRole::Infeasible;
        break;
      }
      default: {  // N, O, P, S and anything else: h fixed at 0
        bool can_plain = valence_fits(a, sigma_sum, 0, 0);
        bool can_double = !exocyclic_multi && valence_fits(a, sigma_sum, 0, 1);
        roles[i] = can_plain && can_double ? PiRole::Optional
                   : can_double            ? PiRole::Required
                   : can_plain             ? PiRole::Forbidden
                                           : PiRole::Infeasible;
        break;
      }
    }
  }
  return roles;
}

namespace {

// Pi-electron contribution toward the 4n+2 rule. Matched atoms supply one
// electron of their double bond; unmatched heteroatoms donate a lone pair;
// boron and carbocations contribute an empty orbital.
int pi_electrons(const Atom& a, bool matched) {
  if (matched) return 1;
  switch (a.element) {
    case Element::N:
    case Element::P:
    case Element::O:
    case Element::S:
      return 2;
    case Element::C:
      if (a.formal_charge < 0) return 2;
      return 0;
    default:
      return 0;
  }
}

}  // namespace

bool solve_kekule(const GraphView& g, const std::vector<PiRole>& roles,
                  std::vector<bool>& double_out,
                  std::vector<int>& failed_atoms) {
  const Molecule& m = *g.mol;
  int nb = m.bond_count();
  double_out.assign(nb, false);
  failed_atoms.clear();

  std::vector<int> pi_atoms;
  for (int i = 0; i < g.n(); ++i) {
    if (roles[i] == PiRole::Infeasible) {
      failed_atoms.push_back(m.atoms()[i].map_num);
      return false;
    }
    if (roles[i] != PiRole::None) pi_atoms.push_back(i);
  }

  // Connected aromatic systems (components over aromatic bonds).
  std::vector<int> comp(g.n(), -1);
  int ncomp = 0;
  for (int i : pi_atoms) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack = {i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& e : g.adj[v]) {
        if (m.bonds()[e.bond].order != BondOrder::Aromatic) continue;
        if (comp[e.nbr] < 0) {
          comp[e.nbr] = ncomp;
          stack.push_back(e.nbr);
        }
      }
    }
    ++ncomp;
  }

  std::vector<bool> matched(g.n(), false);
  // Required atoms in ascending map order for determinism.
  std::vector<int> required;
  for (int i : pi_atoms) {
    if (roles[i] == PiRole::Required) required.push_back(i);
  }
  std::sort(required.begin(), required.end(), [&](int x, int y) {
    return m.atoms()[x].map_num < m.atoms()[y].map_num;
  });

  // A complete matching must also leave every aromatic system with a
  // 4n+2 pi-electron count; otherwise keep searching.
  auto huckel_ok = [&]() {
    std::vector<int> electrons(ncomp, 0);
    for (int i : pi_atoms) {
      electrons[comp[i]] += pi_electrons(m.atoms()[i], matched[i]);
    }
    for (int c = 0; c < ncomp; ++c) {
      if (electrons[c] % 4 != 2) return false;
    }
    return true;
  };

  long steps = 0;
  const long kStepLimit = 2'000'000;

  std::function<bool(std::size_t)> solve = [&](std::size_t k) -> bool {
    if (++steps > kStepLimit) return false;
    while (k < required.size() && matched[required[k]]) ++k;
    if (k == required.size()) return huckel_ok();
    int v = required[k];
    std::vector<std::pair<int, int>> candidates;  // (nbr map, adj pos)
    for (std::size_t p = 0; p < g.adj[v].size(); ++p) {
      const AdjEntry& e = g.adj[v][p];
      if (m.bonds()[e.bond].order != BondOrder::Aromatic) continue;
      if (matched[e.nbr]) continue;
      PiRole r = roles[e.nbr];
      if (r != PiRole::Required && r != PiRole::Optional) continue;
      candidates.emplace_back(m.atoms()[e.nbr].map_num,
                              static_cast<int>(p));
    }
    std::sort(candidates.begin(), candidates.end());
    for (auto [map, p] : candidates) {
      const AdjEntry& e = g.adj[v][p];
      matched[v] = matched[e.nbr] = true;
      double_out[e.bond] = true;
      if (solve(k + 1)) return true;
      matched[v] = matched[e.nbr] = false;
      double_out[e.bond] = false;
    }
    return false;
  };

  if (!solve(0)) {
    for (int i : required) {
      if (!matched[i]) failed_atoms.push_back(m.atoms()[i].map_num);
    }
    if (failed_atoms.empty()) {
      for (int i : pi_atoms) failed_atoms.push_back(m.atoms()[i].map_num);
    }
    std::sort(failed_atoms.begin(), failed_atoms.end());
    return false;
  }
  return true;
}

bool stereo_phantom_h(const Molecule& mol, const Atom& a) {
  if (a.explicit_h.has_value()) return *a.explicit_h > 0;
  int sum = 0;
  for (const Bond& b : mol.bonds()) {
    if (b.a == a.map_num || b.b == a.map_num) sum += order_value(b.order);
  }
  auto v = smallest_valence_at_least(a.element, a.formal_charge, sum);
  return v.has_value() && *v > sum;
}

}  // namespace editcraft::internal
