#include "editcraft/editextract.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "editcraft/smiles.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

using internal::GraphView;

struct McsInput {
  Molecule k;              // kekulized copy
  GraphView g;
  std::vector<int> pos;    // canonical position per atom index
  std::vector<int> by_pos; // atom index at each canonical position

  explicit McsInput(const Molecule& m)
      : k(kekulize(m)), g(k), pos(internal::canonical_positions(k)) {
    by_pos.resize(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      by_pos[pos[i]] = static_cast<int>(i);
    }
  }
};

struct McsState {
  const McsInput& s;
  const McsInput& t;
  long budget;
  long expansions = 0;
  bool exhausted = false;

  std::vector<int> s2t;     // src idx -> tgt idx or -1
  std::vector<int> t2s;
  std::vector<bool> s_excluded;
  double score = 0.0;
  int mapped = 0;

  double best_score = -1.0;
  std::vector<std::pair<int, int>> best_sig;  // (pos_s, pos_t) sorted
  std::vector<std::pair<int, int>> best_pairs;

  McsState(const McsInput& src, const McsInput& tgt, long max_expansions)
      : s(src), t(tgt), budget(max_expansions) {
    s2t.assign(src.g.n(), -1);
    t2s.assign(tgt.g.n(), -1);
    s_excluded.assign(src.g.n(), false);
  }

  void consider_current() {
    if (score < best_score) return;
    std::vector<std::pair<int, int>> sig;
    for (int i = 0; i < s.g.n(); ++i) {
      if (s2t[i] >= 0) sig.push_back({s.pos[i], t.pos[s2t[i]]});
    }
    std::sort(sig.begin(), sig.end());
    if (score > best_score || best_score < 0 ||
        (score == best_score && sig < best_sig)) {
      best_score = score;
      best_sig = sig;
      best_pairs.clear();
      for (int i = 0; i < s.g.n(); ++i) {
        if (s2t[i] >= 0) {
          best_pairs.push_back(
              {s.k.atoms()[i].map_num, t.k.atoms()[s2t[i]].map_num});
        }
      }
    }
  }

  double pair_delta(int si, int ti) const {
    const Atom& sa = s.k.atoms()[si];
    const Atom& ta = t.k.atoms()[ti];
    double d = 1.0;
    if (sa.element != ta.element) d -= 0.5;
    for (const auto& e : s.g.adj[si]) {
      if (s2t[e.nbr] < 0) continue;
      int tn = t.k.atoms()[s2t[e.nbr]].map_num;
      if (!t.k.has_bond(ta.map_num, tn)) continue;
      if (t.k.bond(ta.map_num, tn).order != s.k.bonds()[e.bond].order) {
        d -= 0.25;
      }
    }
    return d;
  }

  // Smallest-position unmapped src atom adjacent (in both graphs) to the
  // current mapping; -1 when the frontier is empty.
  int pick_frontier() const {
    int best = -1;
    for (int i = 0; i < s.g.n(); ++i) {
      if (s2t[i] >= 0 || s_excluded[i]) continue;
      bool frontier = false;
      for (const auto& e : s.g.adj[i]) {
        if (s2t[e.nbr] < 0) continue;
        // Needs at least one tgt-side bond to stay connected.
        int tm = t.k.atoms()[s2t[e.nbr]].map_num;
        for (const auto& te : t.g.adj[s2t[e.nbr]]) {
          if (t2s[te.nbr] < 0) {
            frontier = true;
            break;
          }
        }
        (void)tm;
        if (frontier) break;
      }
      if (!frontier) continue;
      if (best < 0 || s.pos[i] < s.pos[best]) best = i;
    }
    return best;
  }

  void extend(int seed_pos_floor) {
    if (exhausted) return;
    if (++expansions > budget) {
      exhausted = true;
      return;
    }
    consider_current();

    int remaining_t = t.g.n() - mapped;
    int remaining_s = 0;
    for (int i = 0; i < s.g.n(); ++i) {
      if (s2t[i] < 0 && !s_excluded[i] && s.pos[i] > seed_pos_floor) {
        ++remaining_s;
      }
    }
    if (score + std::min(remaining_s, remaining_t) < best_score) return;

    int si = pick_frontier();
    if (si < 0) return;
    if (s.pos[si] <= seed_pos_floor) {
      // Mappings whose minimum-position atom precedes the seed belong to
      // an earlier seed's subtree.
      s_excluded[si] = true;
      extend(seed_pos_floor);
      s_excluded[si] = false;
      return;
    }

    // Candidate tgt atoms: unmapped, charge-compatible, adjacent to the
    // image of at least one mapped neighbor of si via an existing bond.
    std::set<int> cand;
    for (const auto& e : s.g.adj[si]) {
      if (s2t[e.nbr] < 0) continue;
      for (const auto& te : t.g.adj[s2t[e.nbr]]) {
        if (t2s[te.nbr] >= 0) continue;
        const Atom& ta = t.k.atoms()[te.nbr];
        if (ta.formal_charge != s.k.atoms()[si].formal_charge) continue;
        cand.insert(te.nbr);
      }
    }
    std::vector<int> ordered(cand.begin(), cand.end());
    std::sort(ordered.begin(), ordered.end(),
              [&](int x, int y) { return t.pos[x] < t.pos[y]; });

    for (int ti : ordered) {
      double d = pair_delta(si, ti);
      s2t[si] = ti;
      t2s[ti] = si;
      score += d;
      ++mapped;
      extend(seed_pos_floor);
      --mapped;
      score -= d;
      s2t[si] = -1;
      t2s[ti] = -1;
      if (exhausted) return;
    }
    // Or leave si unmatched for this subtree.
    s_excluded[si] = true;
    extend(seed_pos_floor);
    s_excluded[si] = false;
  }

  void run() {
    best_score = 0.0;  // empty mapping is always available
    for (int sp = 0; sp < s.g.n() && !exhausted; ++sp) {
      int si = s.by_pos[sp];
      for (int tp = 0; tp < t.g.n() && !exhausted; ++tp) {
        int ti = t.by_pos[tp];
        if (t.k.atoms()[ti].formal_charge !=
            s.k.atoms()[si].formal_charge) {
          continue;
        }
        double d = 1.0;
        if (s.k.atoms()[si].element != t.k.atoms()[ti].element) d -= 0.5;
        s2t[si] = ti;
        t2s[ti] = si;
        score = d;
        mapped = 1;
        extend(sp);
        mapped = 0;
        score = 0.0;
        s2t[si] = -1;
        t2s[ti] = -1;
      }
    }
  }
};

}  // namespace

AtomMapping max_common_substructure(const Molecule& src, const Molecule& tgt,
                                    const SearchBudget& budget) {
  McsInput s(src), t(tgt);
  McsState state(s, t, budget.max_expansions);
  state.run();

  AtomMapping out;
  out.pairs = state.best_pairs;
  std::sort(out.pairs.begin(), out.pairs.end());
  out.score = state.best_score;
  out.optimal = !state.exhausted;
  return out;
}

namespace {

Chirality flipped(Chirality c) {
  return c == Chirality::CW ? Chirality::CCW : Chirality::CW;
}

BondStereo flipped(BondStereo s) {
  return s == BondStereo::E ? BondStereo::Z : BondStereo::E;
}

int permutation_swaps(std::vector<int> work, const std::vector<int>& target) {
  int swaps = 0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    while (work[i] != target[i]) {
      auto j = std::find(work.begin() + i + 1, work.end(), target[i]) -
               work.begin();
      std::swap(work[i], work[j]);
      ++swaps;
    }
  }
  return swaps;
}

}  // namespace

EditSequence extract_edits(const Molecule& src, const Molecule& tgt,
                           const SearchBudget& budget) {
  AtomMapping mapping = max_common_substructure(src, tgt, budget);

  Molecule ks = kekulize(src);
  Molecule kt = kekulize(tgt);

  std::unordered_map<int, int> s2t;  // src map -> tgt map
  std::unordered_map<int, int> t2s;
  for (auto [sm, tm] : mapping.pairs) {
    s2t[sm] = tm;
    t2s[tm] = sm;
  }

  EditSequence seq;

  // 1. Element mutations, ascending src map.
  for (auto [sm, tm] : mapping.pairs) {
    if (ks.atom(sm).element != kt.atom(tm).element) {
      seq.commands.push_back(
          EditCommand::mutate_atom(sm, kt.atom(tm).element));
    }
  }

  // 2. Bond-order changes on bonds present in both, ascending (a, b).
  std::vector<std::pair<int, int>> changed;
  for (const Bond& b : ks.bonds()) {
    if (!s2t.count(b.a) || !s2t.count(b.b)) continue;
    int ta = s2t[b.a];
    int tb = s2t[b.b];
    if (!kt.has_bond(ta, tb)) continue;
    if (kt.bond(ta, tb).order != b.order) {
      changed.push_back({std::min(b.a, b.b), std::max(b.a, b.b)});
    }
  }
  std::sort(changed.begin(), changed.end());
  for (auto [a, b] : changed) {
    int ta = s2t[a];
    int tb = s2t[b];
    seq.commands.push_back(
        EditCommand::change_bond(a, b, kt.bond(ta, tb).order));
  }

  // 3. Deletions: bonds between matched atoms missing in the target, then
  //    unmatched source atoms (their incident bonds go implicitly).
  std::vector<std::pair<int, int>> del_bonds;
  for (const Bond& b : ks.bonds()) {
    if (!s2t.count(b.a) || !s2t.count(b.b)) continue;
    if (!kt.has_bond(s2t[b.a], s2t[b.b])) {
      del_bonds.push_back({std::min(b.a, b.b), std::max(b.a, b.b)});
    }
  }
  std::sort(del_bonds.begin(), del_bonds.end());
  for (auto [a, b] : del_bonds) {
    seq.commands.push_back(EditCommand::del_bond(a, b));
  }
  std::vector<int> del_atoms;
  for (const Atom& a : ks.atoms()) {
    if (!s2t.count(a.map_num)) del_atoms.push_back(a.map_num);
  }
  std::sort(del_atoms.begin(), del_atoms.end());
  for (int m : del_atoms) seq.commands.push_back(EditCommand::del_atom(m));

  // 4. Additions: new atoms get ids 500, 501, ... in target canonical
  //    order (skipping ids the source already uses), then the bonds.
  auto t_pos = internal::canonical_positions(kt);
  std::vector<int> new_tgt;  // tgt map numbers of unmatched atoms
  for (const Atom& a : kt.atoms()) {
    if (!t2s.count(a.map_num)) new_tgt.push_back(a.map_num);
  }
  GraphView gt(kt);
  std::sort(new_tgt.begin(), new_tgt.end(), [&](int x, int y) {
    return t_pos[gt.atom_index(x)] < t_pos[gt.atom_index(y)];
  });
  int next_id = kNewAtomIdBase;
  std::unordered_map<int, int> tgt_to_result = t2s;  // tgt map -> result map
  for (auto& [tm, sm] : tgt_to_result) {
    (void)tm;
    (void)sm;
  }
  // Matched target atoms keep the source map number in the result.
  for (int tm : new_tgt) {
    while (src.has_atom(next_id)) ++next_id;
    seq.commands.push_back(
        EditCommand::add_atom(next_id, kt.atom(tm).element));
    tgt_to_result[tm] = next_id;
    ++next_id;
  }
  std::vector<std::pair<std::pair<int, int>, const Bond*>> add_bonds;
  for (const Bond& b : kt.bonds()) {
    bool matched_pair = t2s.count(b.a) && t2s.count(b.b);
    if (matched_pair && ks.has_bond(t2s[b.a], t2s[b.b])) continue;
    int ra = tgt_to_result.at(b.a);
    int rb = tgt_to_result.at(b.b);
    add_bonds.push_back({{std::min(ra, rb), std::max(ra, rb)}, &b});
  }
  std::sort(add_bonds.begin(), add_bonds.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [key, b] : add_bonds) {
    seq.commands.push_back(
        EditCommand::add_bond(key.first, key.second, b->order));
  }

  // 5. Stereo alignment against the structural result, only meaningful
  //    when the target carries stereo at all (isomorphism ignores stereo
  //    otherwise).
  ApplyPolicy verify_policy{.strict_stop = true,
                            .require_connected_result = false,
                            .resanitize = true};
  if (tgt.has_any_stereo()) {
    EditSequence structural = seq;
    structural.commands.push_back(EditCommand::stop());
    Molecule r;
    try {
      r = apply_edits(src, structural, verify_policy);
    } catch (const Error& e) {
      throw ExtractionFailed(std::string("structural edits do not apply: ") +
                             e.what());
    }

    std::unordered_map<int, int> t2r = tgt_to_result;  // tgt map -> r map
    std::unordered_map<int, int> r2t;
    for (auto [tm, rm] : t2r) r2t[rm] = tm;

    std::vector<EditCommand> chiral_cmds;
    for (const Atom& ra : r.atoms()) {
      int tm = r2t.at(ra.map_num);
      const Atom& ta = tgt.atom(tm);
      Chirality want = ta.chirality;
      if (want != Chirality::None) {
        // Transport the tag through the correspondence: parity between
        // the target's ascending neighbor sequence (mapped into r) and
        // r's own ascending order.
        std::vector<int> t_seq = tgt.neighbors(tm);
        bool phantom = internal::stereo_phantom_h(tgt, ta);
        std::vector<int> mapped;
        if (phantom) mapped.push_back(0);
        for (int n : t_seq) mapped.push_back(t2r.at(n));
        std::vector<int> sorted = mapped;
        std::sort(sorted.begin(), sorted.end());
        if (permutation_swaps(mapped, sorted) % 2 == 1) want = flipped(want);
      }
      if (ra.chirality != want) {
        chiral_cmds.push_back(EditCommand::set_chiral(ra.map_num, want));
      }
    }
    std::sort(chiral_cmds.begin(), chiral_cmds.end(),
              [](const EditCommand& x, const EditCommand& y) {
                return x.a < y.a;
              });
    for (const auto& c : chiral_cmds) seq.commands.push_back(c);

    auto ref_of = [](const Molecule& m, int end, int other) {
      int best = -1;
      for (int n : m.neighbors(end)) {
        if (n == other) continue;
        if (best < 0 || n < best) best = n;
      }
      return best;
    };
    std::vector<EditCommand> stereo_cmds;
    for (const Bond& tb : tgt.bonds()) {
      int ra = t2r.at(tb.a);
      int rb = t2r.at(tb.b);
      const Bond& rbond = r.bond(ra, rb);
      BondStereo want = tb.stereo;
      if (want != BondStereo::None) {
        int flips = 0;
        for (auto [tend, tother, rend, rother] :
             {std::tuple{tb.a, tb.b, ra, rb}, std::tuple{tb.b, tb.a, rb, ra}}) {
          int tref = ref_of(tgt, tend, tother);
          int rref = ref_of(r, rend, rother);
          if (tref >= 0 && rref >= 0 && t2r.at(tref) != rref) ++flips;
        }
        if (flips % 2 == 1) want = flipped(want);
      }
      if (rbond.stereo != want) {
        stereo_cmds.push_back(EditCommand::set_bond_stereo(
            std::min(ra, rb), std::max(ra, rb), want));
      }
    }
    std::sort(stereo_cmds.begin(), stereo_cmds.end(),
              [](const EditCommand& x, const EditCommand& y) {
                return std::pair(x.a, x.b) < std::pair(y.a, y.b);
              });
    for (const auto& c : stereo_cmds) seq.commands.push_back(c);
  }

  seq.commands.push_back(EditCommand::stop());

  // Guarantee check: re-apply and compare.
  try {
    Molecule result = apply_edits(src, seq, verify_policy);
    if (!is_isomorphic(result, tgt)) {
      throw ExtractionFailed(
          "extracted edits do not reproduce the target molecule");
    }
  } catch (const ExtractionFailed&) {
    throw;
  } catch (const Error& e) {
    throw ExtractionFailed(std::string("extracted edits failed to apply: ") +
                           e.what());
  }
  return seq;
}

bool verify_pair(const CliffPair& pair) {
  try {
    Molecule result = apply_edits(pair.source, pair.edits, ApplyPolicy{});
    return is_isomorphic(result, pair.target);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace editcraft
