#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "editcraft/smiles.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

using internal::GraphView;

// Per-bond slash assignment: value = "bond.b is up relative to bond.a".
struct DirectionPlan {
  std::vector<std::optional<bool>> up;
  std::vector<bool> emit;

  explicit DirectionPlan(int nbonds) : up(nbonds), emit(nbonds, false) {}
};

struct OrientedVar {
  int bond = -1;
  bool flipped = false;  // true when we mean up(b->a) instead of up(a->b)
};

// Pick the substituent bond that will carry the slash for one end of a
// stereo double bond. Returns (substituent map, bond idx) preferring the
// reference (lowest-map) neighbor, falling back to any single bond.
std::optional<std::pair<int, int>> slash_carrier(const Molecule& m,
                                                 const GraphView& g, int end,
                                                 int other) {
  int ei = g.atom_index(end);
  std::vector<std::pair<int, int>> singles;
  for (const auto& e : g.adj[ei]) {
    const Bond& b = m.bonds()[e.bond];
    int nbr = m.atoms()[e.nbr].map_num;
    if (nbr == other) continue;
    if (b.order != BondOrder::Single) continue;
    singles.push_back({nbr, e.bond});
  }
  if (singles.empty()) return std::nullopt;
  return *std::min_element(singles.begin(), singles.end());
}

int min_heavy_neighbor(const Molecule& m, int end, int other) {
  int best = -1;
  for (int n : m.neighbors(end)) {
    if (n == other) continue;
    if (best < 0 || n < best) best = n;
  }
  return best;
}

DirectionPlan plan_directions(const Molecule& m, const GraphView& g) {
  DirectionPlan plan(m.bond_count());

  struct Constraint {
    OrientedVar x, y;
    bool differ;  // x XOR y
  };
  std::vector<Constraint> constraints;

  for (int bi = 0; bi < m.bond_count(); ++bi) {
    const Bond& b = m.bonds()[bi];
    if (b.stereo == BondStereo::None) continue;

    auto ca = slash_carrier(m, g, b.a, b.b);
    auto cb = slash_carrier(m, g, b.b, b.a);
    if (!ca || !cb) {
      throw Error("stereo bond " + std::to_string(b.a) + "-" +
                  std::to_string(b.b) + " has no single-bond substituent");
    }
    int ref_a = min_heavy_neighbor(m, b.a, b.b);
    int ref_b = min_heavy_neighbor(m, b.b, b.a);

    // up(carrier_a -> a) == up(b -> carrier_b) encodes E on the carriers;
    // swap parity when a carrier is not the reference neighbor.
    bool differ = b.stereo == BondStereo::Z;
    if (ca->first != ref_a) differ = !differ;
    if (cb->first != ref_b) differ = !differ;

    const Bond& ba = m.bonds()[ca->second];
    const Bond& bb = m.bonds()[cb->second];
    OrientedVar x{ca->second, ba.a != ca->first};   // up(carrier_a -> a)
    OrientedVar y{cb->second, bb.a != b.b};         // up(b -> carrier_b)
    constraints.push_back({x, y, differ});
    plan.emit[ca->second] = true;
    plan.emit[cb->second] = true;

    // Substituent pairs on the same end point opposite ways.
    for (auto [end, other, carrier] :
         {std::tuple{b.a, b.b, *ca}, std::tuple{b.b, b.a, *cb}}) {
      int ei = g.atom_index(end);
      for (const auto& e : g.adj[ei]) {
        const Bond& sb = m.bonds()[e.bond];
        int nbr = m.atoms()[e.nbr].map_num;
        if (nbr == other || e.bond == carrier.second) continue;
        if (sb.order != BondOrder::Single) continue;
        OrientedVar u{carrier.second,
                      m.bonds()[carrier.second].a != carrier.first};
        OrientedVar v{e.bond, sb.a != nbr};
        constraints.push_back({u, v, true});
      }
    }
  }

  // Propagate until fixed point, seeding unset components with "up".
  bool progress = true;
  auto value_of = [&](const OrientedVar& v) -> std::optional<bool> {
    if (!plan.up[v.bond].has_value()) return std::nullopt;
    return *plan.up[v.bond] != v.flipped;
  };
  auto set_value = [&](const OrientedVar& v, bool val) {
    plan.up[v.bond] = val != v.flipped;
  };
  std::vector<bool> satisfied(constraints.size(), false);
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const Constraint& c = constraints[i];
      auto vx = value_of(c.x);
      auto vy = value_of(c.y);
      if (vx && vy) {
        if ((*vx != *vy) != c.differ) {
          throw Error("inconsistent stereo bond network");
        }
        satisfied[i] = true;
      } else if (vx) {
        set_value(c.y, c.differ ? !*vx : *vx);
        progress = true;
      } else if (vy) {
        set_value(c.x, c.differ ? !*vy : *vy);
        progress = true;
      }
    }
    if (!progress) {
      for (const Constraint& c : constraints) {
        if (!value_of(c.x) && !value_of(c.y)) {
          set_value(c.x, true);
          progress = true;
          break;
        }
      }
    }
  }
  return plan;
}

struct RingRef {
  int digit;
  int bond;
  int partner_idx;
  bool opening;
};

class Writer {
 public:
  Writer(const Molecule& m, const SmilesOptions& opts)
      : mol_(m), opts_(opts), g_(m), plan_(plan_directions(m, g_)) {
    h_ = total_h_counts(m);
    if (opts.canonical) {
      pos_ = internal::canonical_positions(m);
    } else {
      pos_.resize(m.atom_count());
      std::iota(pos_.begin(), pos_.end(), 0);
    }
  }

  std::string run() {
    int n = mol_.atom_count();
    visit_index_.assign(n, -1);
    ring_refs_.assign(n, {});
    children_.assign(n, {});
    parent_.assign(n, -1);
    parent_bond_.assign(n, -1);

    // Visit order: roots by position, children ascending position.
    std::vector<int> atoms_by_pos(n);
    std::iota(atoms_by_pos.begin(), atoms_by_pos.end(), 0);
    std::sort(atoms_by_pos.begin(), atoms_by_pos.end(),
              [&](int x, int y) { return pos_[x] < pos_[y]; });

    int timer = 0;
    std::vector<int> roots;
    for (int root : atoms_by_pos) {
      if (visit_index_[root] >= 0) continue;
      roots.push_back(root);
      dfs(root, timer);
    }

    assign_ring_digits();

    std::string out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (i) out += '.';
      emit(roots[i], out);
    }
    return out;
  }

 private:
  void dfs(int root, int& timer) {
    // Iterative DFS honoring child order by canonical position.
    struct Frame {
      int v;
      std::vector<int> todo;  // neighbor adj slots, in reverse visit order
    };
    visit_index_[root] = timer++;
    std::vector<Frame> stack;
    stack.push_back({root, sorted_adj(root)});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.todo.empty()) {
        stack.pop_back();
        continue;
      }
      int slot = f.todo.back();
      f.todo.pop_back();
      const auto& e = g_.adj[f.v][slot];
      if (e.bond == parent_bond_[f.v]) continue;
      if (visit_index_[e.nbr] >= 0) {
        // Back edge; record once, at the later-visited endpoint.
        if (visit_index_[f.v] > visit_index_[e.nbr]) {
          back_edges_.push_back({f.v, e.nbr, e.bond});
        }
        continue;
      }
      visit_index_[e.nbr] = timer++;
      parent_[e.nbr] = f.v;
      parent_bond_[e.nbr] = e.bond;
      children_[f.v].push_back(e.nbr);
      stack.push_back({e.nbr, sorted_adj(e.nbr)});
    }
  }

  std::vector<int> sorted_adj(int v) {
    std::vector<int> slots(g_.adj[v].size());
    std::iota(slots.begin(), slots.end(), 0);
    std::sort(slots.begin(), slots.end(), [&](int x, int y) {
      return pos_[g_.adj[v][x].nbr] > pos_[g_.adj[v][y].nbr];
    });  // reversed: consumed from the back
    return slots;
  }

  void assign_ring_digits() {
    // Closing refs ordered by partner visit index; digits reused greedily.
    std::sort(back_edges_.begin(), back_edges_.end(),
              [&](const auto& x, const auto& y) {
                if (visit_index_[std::get<1>(x)] != visit_index_[std::get<1>(y)])
                  return visit_index_[std::get<1>(x)] <
                         visit_index_[std::get<1>(y)];
                return visit_index_[std::get<0>(x)] <
                       visit_index_[std::get<0>(y)];
              });
    std::vector<std::vector<std::pair<int, int>>> closes_at(
        mol_.atom_count());  // (open visit, backedge idx)
    for (std::size_t i = 0; i < back_edges_.size(); ++i) {
      auto [later, earlier, bond] = back_edges_[i];
      (void)bond;
      closes_at[later].push_back(
          {visit_index_[earlier], static_cast<int>(i)});
    }

    std::vector<bool> digit_used(100, false);
    digit_used[0] = true;  // digit 0 unused by convention
    std::vector<int> digit_of(back_edges_.size(), -1);

    // Walk atoms in visit order; open digits at the earlier atom in the
    // order the closings will appear, close and free at the later atom.
    std::vector<int> by_visit(mol_.atom_count());
    for (int i = 0; i < mol_.atom_count(); ++i) {
      by_visit[visit_index_[i]] = i;
    }
    // Opening order at an atom: by the closing partner's visit index.
    std::vector<std::vector<int>> opens_at(mol_.atom_count());
    for (std::size_t i = 0; i < back_edges_.size(); ++i) {
      opens_at[std::get<1>(back_edges_[i])].push_back(static_cast<int>(i));
    }
    for (auto& v : opens_at) {
      std::sort(v.begin(), v.end(), [&](int x, int y) {
        return visit_index_[std::get<0>(back_edges_[x])] <
               visit_index_[std::get<0>(back_edges_[y])];
      });
    }

    for (int vi = 0; vi < mol_.atom_count(); ++vi) {
      int v = by_visit[vi];
      for (int be : opens_at[v]) {
        int digit = -1;
        for (int d = 1; d < 100; ++d) {
          if (!digit_used[d]) {
            digit = d;
            break;
          }
        }
        if (digit < 0) throw Error("ring closure digits exhausted");
        digit_used[digit] = true;
        digit_of[be] = digit;
        ring_refs_[v].push_back(
            {digit, std::get<2>(back_edges_[be]), std::get<0>(back_edges_[be]),
             true});
      }
      std::sort(closes_at[v].begin(), closes_at[v].end());
      for (auto [open_visit, be] : closes_at[v]) {
        (void)open_visit;
        int digit = digit_of[be];
        ring_refs_[v].push_back(
            {digit, std::get<2>(back_edges_[be]), std::get<1>(back_edges_[be]),
             false});
        digit_used[digit] = false;
      }
    }
  }

  // Bond token when traversing bond `bi` from atom `from` to atom `to`.
  std::string bond_token(int bi, int from_idx, int to_idx) {
    const Bond& b = mol_.bonds()[bi];
    switch (b.order) {
      case BondOrder::Double:
        return "=";
      case BondOrder::Triple:
        return "#";
      case BondOrder::Aromatic: {
        bool both = mol_.atoms()[from_idx].aromatic &&
                    mol_.atoms()[to_idx].aromatic;
        return both ? "" : ":";
      }
      case BondOrder::Single: {
        if (plan_.emit[bi] && plan_.up[bi].has_value()) {
          int from_map = mol_.atoms()[from_idx].map_num;
          bool up_from_to =
              b.a == from_map ? *plan_.up[bi] : !*plan_.up[bi];
          return up_from_to ? "/" : "\\";
        }
        bool both = mol_.atoms()[from_idx].aromatic &&
                    mol_.atoms()[to_idx].aromatic;
        return both ? "-" : "";
      }
    }
    return "";
  }

  // Hydrogen count a plain (bracketless) token would imply, or -1 when a
  // plain token cannot express this atom.
  int plain_h(int idx) {
    const Atom& a = mol_.atoms()[idx];
    if (!in_organic_subset(a.element) || a.formal_charge != 0) return -1;
    if (a.aromatic) {
      int sigma = 0;
      for (const auto& e : g_.adj[idx]) {
        const Bond& b = mol_.bonds()[e.bond];
        sigma += b.order == BondOrder::Aromatic ? 1 : order_value(b.order);
      }
      switch (a.element) {
        case Element::C:
          return sigma <= 3 ? 3 - sigma : 0;
        case Element::N:
        case Element::O:
        case Element::P:
        case Element::S:
          return 0;
        default:
          return -1;  // aromatic boron is always bracketed
      }
    }
    int sum = 0;
    for (const auto& e : g_.adj[idx]) {
      sum += order_value(mol_.bonds()[e.bond].order);
    }
    auto v = smallest_valence_at_least(a.element, 0, sum);
    return v ? *v - sum : -1;
  }

  std::string atom_token(int idx, const std::vector<int>& written_nbr_maps) {
    const Atom& a = mol_.atoms()[idx];
    std::string sym(symbol_of(a.element));
    if (a.aromatic) {
      for (auto& c : sym) c = static_cast<char>(std::tolower(c));
    }

    bool bracket = opts_.include_atom_maps || a.formal_charge != 0 ||
                   a.chirality != Chirality::None ||
                   !in_organic_subset(a.element) ||
                   plain_h(idx) != h_[idx];
    if (!bracket) return sym;

    std::string out = "[" + sym;
    if (a.chirality != Chirality::None) {
      // Parity between the as-written neighbor order and the stored
      // ascending-map convention decides the sense we print.
      std::vector<int> sorted = written_nbr_maps;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> work = written_nbr_maps;
      int swaps = 0;
      for (std::size_t i = 0; i < work.size(); ++i) {
        while (work[i] != sorted[i]) {
          auto j = std::find(work.begin() + i + 1, work.end(), sorted[i]) -
                   work.begin();
          std::swap(work[i], work[j]);
          ++swaps;
        }
      }
      Chirality as_written = a.chirality;
      if (swaps % 2 == 1) {
        as_written = as_written == Chirality::CW ? Chirality::CCW
                                                 : Chirality::CW;
      }
      out += as_written == Chirality::CCW ? "@" : "@@";
    }
    if (h_[idx] > 0) {
      out += "H";
      if (h_[idx] > 1) out += std::to_string(h_[idx]);
    }
    if (a.formal_charge != 0) {
      out += a.formal_charge > 0 ? "+" : "-";
      int mag = std::abs(a.formal_charge);
      if (mag > 1) out += std::to_string(mag);
    }
    if (opts_.include_atom_maps) {
      out += ":" + std::to_string(a.map_num);
    }
    out += "]";
    return out;
  }

  void emit(int root, std::string& out) {
    // Recursive over the spanning tree built during dfs().
    std::function<void(int)> rec = [&](int v) {
      std::vector<int> written;
      if (parent_[v] >= 0) {
        written.push_back(mol_.atoms()[parent_[v]].map_num);
      }
      if (h_[v] > 0) written.push_back(0);
      for (const RingRef& r : ring_refs_[v]) {
        written.push_back(mol_.atoms()[r.partner_idx].map_num);
      }
      for (int c : children_[v]) {
        written.push_back(mol_.atoms()[c].map_num);
      }

      out += atom_token(v, written);
      for (const RingRef& r : ring_refs_[v]) {
        if (!r.opening) {
          out += bond_token(r.bond, v, r.partner_idx);
        } else if (plan_.emit[r.bond] && plan_.up[r.bond].has_value() &&
                   mol_.bonds()[r.bond].order == BondOrder::Single) {
          // Slash on an opening digit keeps direction semantics intact.
          out += bond_token(r.bond, v, r.partner_idx);
        }
        if (r.digit >= 10) {
          out += "%" + std::to_string(r.digit);
        } else {
          out += std::to_string(r.digit);
        }
      }
      const auto& kids = children_[v];
      for (std::size_t i = 0; i < kids.size(); ++i) {
        bool last = i + 1 == kids.size();
        if (!last) out += "(";
        out += bond_token(parent_bond_[kids[i]], v, kids[i]);
        rec(kids[i]);
        if (!last) out += ")";
      }
    };
    rec(root);
  }

  const Molecule& mol_;
  SmilesOptions opts_;
  GraphView g_;
  DirectionPlan plan_;
  std::vector<int> h_;
  std::vector<int> pos_;
  std::vector<int> visit_index_;
  std::vector<int> parent_;
  std::vector<int> parent_bond_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<RingRef>> ring_refs_;
  std::vector<std::tuple<int, int, int>> back_edges_;  // later, earlier, bond
};

}  // namespace

std::string write_smiles(const Molecule& mol, const SmilesOptions& opts) {
  if (!mol.sanitized()) {
    throw Error("write_smiles requires a sanitized molecule");
  }
  if (mol.atom_count() == 0) return "";
  if (opts.kekulized_output) {
    Molecule k = kekulize(mol);
    SmilesOptions inner = opts;
    inner.kekulized_output = false;
    Writer w(k, inner);
    return w.run();
  }
  Writer w(mol, opts);
  return w.run();
}

}  // namespace editcraft
