#include <algorithm>
#include <cstdint>
#include <tuple>
#include <unordered_set>

#include "editcraft/smiles.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

using internal::GraphView;

struct CanonContext {
  const Molecule* mol;
  const GraphView* g;
  std::vector<std::uint64_t> seed;  // initial invariant class per atom
  long leaves = 0;
};

constexpr long kLeafBudget = 50'000;

int order_code(BondOrder o) { return static_cast<int>(o); }

// One round of Weisfeiler-Lehman style refinement until stable.
void refine(const CanonContext& ctx, std::vector<int>& color) {
  int n = ctx.g->n();
  for (;;) {
    std::vector<std::pair<std::vector<std::int64_t>, int>> keys(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::int64_t> k;
      k.push_back(color[i]);
      std::vector<std::int64_t> nb;
      for (const auto& e : ctx.g->adj[i]) {
        const Bond& b = ctx.mol->bonds()[e.bond];
        nb.push_back(static_cast<std::int64_t>(order_code(b.order)) * 100000 +
                     color[e.nbr]);
      }
      std::sort(nb.begin(), nb.end());
      k.insert(k.end(), nb.begin(), nb.end());
      keys[i] = {std::move(k), i};
    }
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> next(n);
    int cls = -1;
    const std::vector<std::int64_t>* prev = nullptr;
    for (const auto& [k, idx] : sorted) {
      if (!prev || k != *prev) {
        ++cls;
        prev = &k;
      }
      next[idx] = cls;
    }
    if (next == color) return;
    color = std::move(next);
  }
}

// Rank-normalized stereo descriptor so signatures order stereoisomers
// deterministically.
int normalized_chirality(const CanonContext& ctx, int atom_idx,
                         const std::vector<int>& pos) {
  const Atom& a = ctx.mol->atoms()[atom_idx];
  if (a.chirality == Chirality::None) return 0;
  std::vector<int> by_map = ctx.mol->neighbors(a.map_num);
  bool phantom = internal::stereo_phantom_h(*ctx.mol, a);
  std::vector<std::pair<int, int>> with_rank;  // (canonical pos, map)
  if (phantom) with_rank.push_back({-1, 0});
  for (int nm : by_map) {
    with_rank.push_back({pos[ctx.g->atom_index(nm)], nm});
  }
  // Parity between map-ascending order (the stored convention, phantom
  // first) and rank-ascending order.
  std::vector<std::pair<int, int>> by_rank = with_rank;
  std::sort(by_rank.begin(), by_rank.end());
  int swaps = 0;
  std::vector<std::pair<int, int>> work = with_rank;
  for (std::size_t i = 0; i < work.size(); ++i) {
    while (work[i] != by_rank[i]) {
      auto j = std::find(work.begin() + i + 1, work.end(), by_rank[i]) -
               work.begin();
      std::swap(work[i], work[j]);
      ++swaps;
    }
  }
  Chirality c = a.chirality;
  if (swaps % 2 == 1) {
    c = c == Chirality::CW ? Chirality::CCW : Chirality::CW;
  }
  return c == Chirality::CW ? 1 : 2;
}

int normalized_bond_stereo(const CanonContext& ctx, const Bond& b,
                           const std::vector<int>& pos) {
  if (b.stereo == BondStereo::None) return 0;
  int flips = 0;
  for (int end : {b.a, b.b}) {
    int other = end == b.a ? b.b : b.a;
    int ref_map = -1;    // lowest map
    int ref_rank = -1;   // lowest canonical position
    int ref_rank_map = -1;
    for (int n : ctx.mol->neighbors(end)) {
      if (n == other) continue;
      if (ref_map < 0 || n < ref_map) ref_map = n;
      int p = pos[ctx.g->atom_index(n)];
      if (ref_rank < 0 || p < ref_rank) {
        ref_rank = p;
        ref_rank_map = n;
      }
    }
    if (ref_map >= 0 && ref_rank_map != ref_map) ++flips;
  }
  BondStereo s = b.stereo;
  if (flips % 2 == 1) s = s == BondStereo::E ? BondStereo::Z : BondStereo::E;
  return s == BondStereo::E ? 1 : 2;
}

// Total order over complete rank assignments of the same molecule.
std::vector<std::int64_t> signature(const CanonContext& ctx,
                                    const std::vector<int>& color) {
  int n = ctx.g->n();
  std::vector<int> at_pos(n);  // canonical position -> atom index
  for (int i = 0; i < n; ++i) at_pos[color[i]] = i;

  std::vector<std::int64_t> sig;
  for (int p = 0; p < n; ++p) {
    int i = at_pos[p];
    sig.push_back(static_cast<std::int64_t>(ctx.seed[i]));
    sig.push_back(normalized_chirality(ctx, i, color));
    std::vector<std::int64_t> nb;
    for (const auto& e : ctx.g->adj[i]) {
      const Bond& b = ctx.mol->bonds()[e.bond];
      nb.push_back(static_cast<std::int64_t>(order_code(b.order)) * 100000 +
                   color[e.nbr] * 10 + normalized_bond_stereo(ctx, b, color));
    }
    std::sort(nb.begin(), nb.end());
    sig.push_back(static_cast<std::int64_t>(nb.size()));
    sig.insert(sig.end(), nb.begin(), nb.end());
  }
  return sig;
}

void search(CanonContext& ctx, std::vector<int> color,
            std::vector<std::int64_t>& best_sig, std::vector<int>& best) {
  refine(ctx, color);
  int n = ctx.g->n();

  // Find the smallest non-singleton class.
  std::vector<int> count(n, 0);
  for (int c : color) ++count[c];
  int target = -1;
  for (int c = 0; c < n; ++c) {
    if (count[c] > 1) {
      target = c;
      break;
    }
  }

  if (target < 0) {
    if (++ctx.leaves > kLeafBudget) {
      throw Error("canonicalization budget exceeded");
    }
    auto sig = signature(ctx, color);
    if (best.empty() || sig < best_sig) {
      best_sig = std::move(sig);
      best = color;
    }
    return;
  }

  for (int i = 0; i < n; ++i) {
    if (color[i] != target) continue;
    std::vector<int> next(n);
    for (int j = 0; j < n; ++j) {
      next[j] = color[j] * 2 + 1;
    }
    next[i] = color[i] * 2;  // individualize
    search(ctx, std::move(next), best_sig, best);
  }
}

}  // namespace

namespace internal {

std::vector<int> canonical_positions(const Molecule& mol) {
  int n = mol.atom_count();
  if (n == 0) return {};
  GraphView g(mol);

  auto h = total_h_counts(mol);
  auto bond_ring = ring_bonds(g);
  auto atom_ring = ring_atoms(g, bond_ring);

  CanonContext ctx;
  ctx.mol = &mol;
  ctx.g = &g;
  ctx.seed.resize(n);

  // Dense initial colors from the invariant tuple.
  std::vector<std::pair<std::tuple<int, int, int, int, int>, int>> init(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atoms()[i];
    auto tup = std::make_tuple(static_cast<int>(a.element), a.formal_charge,
                               static_cast<int>(g.adj[i].size()), h[i],
                               atom_ring[i] ? 1 : 0);
    init[i] = {tup, i};
    ctx.seed[i] =
        static_cast<std::uint64_t>(static_cast<int>(a.element)) * 1000000 +
        static_cast<std::uint64_t>(a.formal_charge + 8) * 10000 +
        static_cast<std::uint64_t>(g.adj[i].size()) * 1000 +
        static_cast<std::uint64_t>(h[i]) * 10 + (atom_ring[i] ? 1 : 0);
  }
  auto sorted = init;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> color(n);
  int cls = -1;
  const std::tuple<int, int, int, int, int>* prev = nullptr;
  for (const auto& [k, idx] : sorted) {
    if (!prev || k != *prev) {
      ++cls;
      prev = &k;
    }
    color[idx] = cls;
  }

  std::vector<std::int64_t> best_sig;
  std::vector<int> best;
  search(ctx, std::move(color), best_sig, best);
  return best;
}

}  // namespace internal

std::vector<int> canonical_rank(const Molecule& mol) {
  auto pos = internal::canonical_positions(mol);
  std::vector<int> out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out[pos[i]] = mol.atoms()[i].map_num;
  }
  return out;
}

Molecule assign_map_numbers(const Molecule& mol) {
  std::vector<int> order = canonical_rank(mol);  // map numbers, canonical
  std::unordered_map<int, int> old_to_new;
  std::unordered_set<int> used;
  for (const Atom& a : mol.atoms()) {
    if (a.map_num < kProvisionalMapBase) used.insert(a.map_num);
  }
  int next = 1;
  for (int map : order) {
    if (map < kProvisionalMapBase) {
      old_to_new[map] = map;
      continue;
    }
    while (used.count(next)) ++next;
    used.insert(next);
    old_to_new[map] = next;
  }
  return mol.renumbered(old_to_new);
}

}  // namespace editcraft
