#include <algorithm>
#include <functional>
#include <tuple>

#include "editcraft/molecule.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

using internal::GraphView;

struct Labeled {
  Molecule mol;  // kekulized copy
  std::vector<std::tuple<int, int, int>> label;  // element, charge, totalH
  std::vector<int> h;
};

Labeled prepare(const Molecule& m) {
  Labeled out{kekulize(m), {}, {}};
  out.h = total_h_counts(out.mol);
  const auto& atoms = out.mol.atoms();
  out.label.resize(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.label[i] = {static_cast<int>(atoms[i].element),
                    atoms[i].formal_charge, out.h[i]};
  }
  return out;
}

// Are the stereo annotations of `a` consistent with those of `b` under the
// atom-index mapping a->b?
bool stereo_consistent(const Labeled& a, const Labeled& b,
                       const GraphView& ga, const std::vector<int>& m) {
  auto map_of = [&](const Molecule& mol, int idx) {
    return mol.atoms()[idx].map_num;
  };

  // Chirality: permutation parity between the mapped neighbor sequences.
  for (int ia = 0; ia < ga.n(); ++ia) {
    const Atom& aa = a.mol.atoms()[ia];
    const Atom& ab = b.mol.atoms()[m[ia]];
    Chirality ca = aa.chirality;
    Chirality cb = ab.chirality;
    if (ca == Chirality::None && cb == Chirality::None) continue;
    if (ca == Chirality::None || cb == Chirality::None) return false;

    bool ha = internal::stereo_phantom_h(a.mol, aa);
    bool hb = internal::stereo_phantom_h(b.mol, ab);
    if (ha != hb) return false;

    // Neighbor maps of a's atom in ascending order, pushed through the
    // mapping; parity vs b's ascending order decides whether tags flip.
    std::vector<int> seq_a = a.mol.neighbors(aa.map_num);
    std::vector<int> mapped;
    if (ha) mapped.push_back(0);
    for (int nm : seq_a) {
      mapped.push_back(map_of(b.mol, m[ga.atom_index(nm)]));
    }
    std::vector<int> sorted_b = mapped;
    std::sort(sorted_b.begin(), sorted_b.end());
    int swaps = 0;
    std::vector<int> work = mapped;
    for (std::size_t i = 0; i < work.size(); ++i) {
      while (work[i] != sorted_b[i]) {
        auto j = std::find(work.begin() + i + 1, work.end(), sorted_b[i]) -
                 work.begin();
        std::swap(work[i], work[j]);
        ++swaps;
      }
    }
    bool flip = swaps % 2 == 1;
    Chirality expect = flip ? (ca == Chirality::CW ? Chirality::CCW
                                                   : Chirality::CW)
                            : ca;
    if (expect != cb) return false;
  }

  // Double-bond stereo: reference = lowest-map heavy neighbor on each end.
  auto ref_of = [&](const Molecule& mol, int end, int other) -> int {
    int best = -1;
    for (int n : mol.neighbors(end)) {
      if (n == other) continue;
      if (best < 0 || n < best) best = n;
    }
    return best;
  };
  for (const Bond& bond : a.mol.bonds()) {
    int ia1 = ga.atom_index(bond.a);
    int ia2 = ga.atom_index(bond.b);
    int mb1 = map_of(b.mol, m[ia1]);
    int mb2 = map_of(b.mol, m[ia2]);
    const Bond& other = b.mol.bond(mb1, mb2);
    BondStereo sa = bond.stereo;
    BondStereo sb = other.stereo;
    if (sa == BondStereo::None && sb == BondStereo::None) continue;
    if (sa == BondStereo::None || sb == BondStereo::None) return false;

    int flips = 0;
    for (auto [end, oth, bend, both] :
         {std::tuple{bond.a, bond.b, mb1, mb2},
          std::tuple{bond.b, bond.a, mb2, mb1}}) {
      int ref_a = ref_of(a.mol, end, oth);
      if (ref_a < 0) return false;
      int mapped_ref = map_of(b.mol, m[ga.atom_index(ref_a)]);
      int ref_b = ref_of(b.mol, bend, both);
      if (mapped_ref != ref_b) ++flips;
    }
    BondStereo expect = sa;
    if (flips % 2 == 1) {
      expect = sa == BondStereo::E ? BondStereo::Z : BondStereo::E;
    }
    if (expect != sb) return false;
  }
  return true;
}

}  // namespace

bool is_isomorphic(const Molecule& a, const Molecule& b) {
  if (a.atom_count() != b.atom_count()) return false;
  if (a.bond_count() != b.bond_count()) return false;

  Labeled la = prepare(a);
  Labeled lb = prepare(b);

  auto sig_a = la.label;
  auto sig_b = lb.label;
  std::sort(sig_a.begin(), sig_a.end());
  std::sort(sig_b.begin(), sig_b.end());
  if (sig_a != sig_b) return false;

  GraphView ga(la.mol);
  GraphView gb(lb.mol);

  const bool check_stereo = a.has_any_stereo() && b.has_any_stereo();

  int n = ga.n();
  std::vector<int> m(n, -1);        // a index -> b index
  std::vector<bool> used(n, false);

  // Order a's atoms: rarest label first, then by connectivity to the
  // already-ordered prefix so candidate pruning bites early.
  std::vector<int> order;
  {
    std::vector<int> freq(n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (la.label[i] == la.label[j]) ++freq[i];
      }
    }
    std::vector<bool> placed(n, false);
    for (int k = 0; k < n; ++k) {
      int pick = -1;
      bool pick_connected = false;
      for (int i = 0; i < n; ++i) {
        if (placed[i]) continue;
        bool connected = false;
        for (const auto& e : ga.adj[i]) {
          if (placed[e.nbr]) connected = true;
        }
        auto better = [&](int cand) {
          if (pick < 0) return true;
          if (connected != pick_connected) return connected;
          return freq[cand] < freq[pick];
        };
        if (better(i)) {
          pick = i;
          pick_connected = connected;
        }
      }
      placed[pick] = true;
      order.push_back(pick);
    }
  }

  std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
    if (k == order.size()) {
      return !check_stereo || stereo_consistent(la, lb, ga, m);
    }
    int ia = order[k];
    for (int ib = 0; ib < n; ++ib) {
      if (used[ib]) continue;
      if (la.label[ia] != lb.label[ib]) continue;
      if (ga.adj[ia].size() != gb.adj[ib].size()) continue;
      bool ok = true;
      for (const auto& e : ga.adj[ia]) {
        if (m[e.nbr] < 0) continue;
        const Bond& bond_a = la.mol.bonds()[e.bond];
        int mb = lb.mol.atoms()[m[e.nbr]].map_num;
        int ibmap = lb.mol.atoms()[ib].map_num;
        if (!lb.mol.has_bond(ibmap, mb)) {
          ok = false;
          break;
        }
        if (lb.mol.bond(ibmap, mb).order != bond_a.order) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      m[ia] = ib;
      used[ib] = true;
      if (extend(k + 1)) return true;
      m[ia] = -1;
      used[ib] = false;
    }
    return false;
  };

  return extend(0);
}

}  // namespace editcraft
