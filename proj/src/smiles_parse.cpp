#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "editcraft/smiles.hpp"
#include "graph_scratch.hpp"

namespace editcraft {

namespace {

struct PAtom {
  Element element = Element::C;
  bool aromatic = false;
  int charge = 0;
  std::optional<int> explicit_h;
  int chiral = 0;           // 0 none, 1 '@', 2 '@@'
  int explicit_map = -1;
  std::size_t position = 0;
  // Written neighbor order for chirality: parse indices, -1 = implicit H.
  std::vector<int> written_nbrs;
};

struct PBond {
  int u = -1;
  int v = -1;
  char symbol = 0;                  // 0, '-', '=', '#', ':', '/', '\\'
  std::optional<bool> up_u_to_v;    // slash direction, oriented u -> v
  std::size_t position = 0;
};

struct RingSlot {
  int atom = -1;
  char symbol = 0;
  std::optional<bool> up_open_to_partner;
  std::size_t position = 0;
  std::size_t written_slot = 0;  // index into written_nbrs to resolve
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  void run() {
    if (s_.empty()) throw SyntaxError("empty SMILES", 0);
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(') {
        if (prev_ < 0) throw SyntaxError("branch before any atom", pos_);
        stack_.push_back(prev_);
        ++pos_;
      } else if (c == ')') {
        if (stack_.empty()) throw SyntaxError("unmatched ')'", pos_);
        if (pending_bond_) throw SyntaxError("dangling bond before ')'", pos_);
        prev_ = stack_.back();
        stack_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (!stack_.empty()) {
          throw SyntaxError("'.' inside a branch", pos_);
        }
        if (pending_bond_) throw SyntaxError("bond before '.'", pos_);
        prev_ = -1;
        ++pos_;
      } else if (is_bond_char(c)) {
        if (pending_bond_) throw SyntaxError("two bond symbols in a row", pos_);
        if (prev_ < 0) throw SyntaxError("bond before any atom", pos_);
        pending_bond_ = c;
        bond_pos_ = pos_;
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else {
        parse_atom();
      }
    }
    if (pending_bond_) throw SyntaxError("dangling bond at end", bond_pos_);
    if (!stack_.empty()) throw SyntaxError("unclosed '('", s_.size());
    for (const auto& [digit, slot] : rings_) {
      (void)digit;
      throw SyntaxError("unclosed ring bond", slot.position);
    }
  }

  Molecule build() const;

 private:
  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
           c == '\\';
  }

  void attach(int atom_idx) {
    if (prev_ >= 0) {
      PBond b;
      b.u = prev_;
      b.v = atom_idx;
      b.position = bond_pos_;
      if (pending_bond_) {
        char c = *pending_bond_;
        if (c == '/' || c == '\\') {
          b.symbol = '-';
          b.up_u_to_v = (c == '/');
        } else {
          b.symbol = c;
        }
      }
      bonds_.push_back(b);
      atoms_[prev_].written_nbrs.push_back(atom_idx);
      atoms_[atom_idx].written_nbrs.push_back(prev_);
    } else if (pending_bond_) {
      throw SyntaxError("bond with no preceding atom", bond_pos_);
    }
    pending_bond_.reset();
    prev_ = atom_idx;
  }

  void ring_closure() {
    int digit;
    std::size_t token_pos = pos_;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
        throw SyntaxError("'%' needs two digits", pos_);
      }
      digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      digit = s_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) throw SyntaxError("ring closure before any atom", token_pos);

    char sym = 0;
    std::optional<bool> dir;
    if (pending_bond_) {
      char c = *pending_bond_;
      if (c == '/' || c == '\\') {
        sym = '-';
        dir = (c == '/');
      } else {
        sym = c;
      }
      pending_bond_.reset();
    }

    auto it = rings_.find(digit);
    if (it == rings_.end()) {
      RingSlot slot;
      slot.atom = prev_;
      slot.symbol = sym;
      slot.up_open_to_partner = dir;
      slot.position = token_pos;
      slot.written_slot = atoms_[prev_].written_nbrs.size();
      atoms_[prev_].written_nbrs.push_back(-2);  // placeholder
      rings_[digit] = slot;
      return;
    }

    RingSlot slot = it->second;
    rings_.erase(it);
    if (slot.atom == prev_) {
      throw SyntaxError("ring bond closes on its own atom", token_pos);
    }
    char order_sym = 0;
    if (slot.symbol && sym && slot.symbol != sym) {
      throw SyntaxError("ring bond order mismatch", token_pos);
    }
    order_sym = slot.symbol ? slot.symbol : sym;

    PBond b;
    b.u = slot.atom;
    b.v = prev_;
    b.symbol = order_sym;
    b.position = token_pos;
    if (slot.up_open_to_partner && dir) {
      // Both ends directional: '/' at open (u->v up) and '/' at close
      // (v->u up) describe opposite geometry, so they must differ.
      if (*slot.up_open_to_partner == *dir) {
        throw SyntaxError("conflicting ring bond directions", token_pos);
      }
    }
    if (slot.up_open_to_partner) {
      b.up_u_to_v = *slot.up_open_to_partner;
    } else if (dir) {
      b.up_u_to_v = !*dir;  // written close-side: prev_ -> slot.atom
    }
    bonds_.push_back(b);
    atoms_[slot.atom].written_nbrs[slot.written_slot] = prev_;
    atoms_[prev_].written_nbrs.push_back(slot.atom);
  }

  Element read_element(bool& aromatic) {
    char c = s_[pos_];
    if (c == '*') throw UnsupportedFeature("wildcard atoms are unsupported");
    if (std::islower(static_cast<unsigned char>(c))) {
      static const std::string ok = "bcnops";
      if (ok.find(c) == std::string::npos) {
        throw SyntaxError(std::string("unknown aromatic atom '") + c + "'",
                          pos_);
      }
      aromatic = true;
      ++pos_;
      std::string sym(1, static_cast<char>(std::toupper(c)));
      return *element_from_symbol(sym);
    }
    if (!std::isupper(static_cast<unsigned char>(c))) {
      throw SyntaxError(std::string("expected atom, got '") + c + "'", pos_);
    }
    aromatic = false;
    if (pos_ + 1 < s_.size() &&
        std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
      std::string two = s_.substr(pos_, 2);
      if (auto e = element_from_symbol(two)) {
        pos_ += 2;
        return *e;
      }
    }
    std::string one = s_.substr(pos_, 1);
    if (auto e = element_from_symbol(one)) {
      ++pos_;
      return *e;
    }
    throw UnsupportedFeature("unsupported element at position " +
                             std::to_string(pos_) + " in '" + s_ + "'");
  }

  void parse_atom() {
    std::size_t start = pos_;
    PAtom atom;
    atom.position = start;

    if (s_[pos_] == '[') {
      ++pos_;
      if (pos_ < s_.size() &&
          std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        throw UnsupportedFeature("isotope labels are unsupported");
      }
      if (pos_ >= s_.size()) throw SyntaxError("unterminated bracket", start);
      atom.element = read_element(atom.aromatic);
      atom.explicit_h = 0;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '@') {
          atom.chiral = 2;
          ++pos_;
        } else {
          atom.chiral = 1;
        }
        if (pos_ < s_.size() &&
            std::isupper(static_cast<unsigned char>(s_[pos_]))) {
          // @TH1 / @AL1 / ... extended chirality classes
          if (s_[pos_] != 'H') {
            throw UnsupportedFeature("extended chirality is unsupported");
          }
        }
      }
      if (pos_ < s_.size() && s_[pos_] == 'H') {
        ++pos_;
        int count = 1;
        if (pos_ < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          count = 0;
          while (pos_ < s_.size() &&
                 std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            count = count * 10 + (s_[pos_] - '0');
            ++pos_;
          }
        }
        atom.explicit_h = count;
      }
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        char sign = s_[pos_];
        int mag = 1;
        ++pos_;
        if (pos_ < s_.size() &&
            std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          mag = 0;
          while (pos_ < s_.size() &&
                 std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            mag = mag * 10 + (s_[pos_] - '0');
            ++pos_;
          }
        } else {
          while (pos_ < s_.size() && s_[pos_] == sign) {
            ++mag;
            ++pos_;
          }
        }
        atom.charge = sign == '+' ? mag : -mag;
        if (atom.charge < -4 || atom.charge > 4) {
          throw SyntaxError("formal charge out of range [-4,4]", start);
        }
      }
      if (pos_ < s_.size() && s_[pos_] == ':') {
        ++pos_;
        if (pos_ >= s_.size() ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          throw SyntaxError("expected map number after ':'", pos_);
        }
        long map = 0;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          map = map * 10 + (s_[pos_] - '0');
          ++pos_;
          if (map >= kProvisionalMapBase) {
            throw SyntaxError("map number too large", start);
          }
        }
        if (map < 1) {
          throw SyntaxError("map numbers start at 1", start);
        }
        atom.explicit_map = static_cast<int>(map);
      }
      if (pos_ >= s_.size() || s_[pos_] != ']') {
        throw SyntaxError("expected ']'", pos_);
      }
      ++pos_;
    } else {
      atom.element = read_element(atom.aromatic);
      if (!in_organic_subset(atom.element)) {
        throw SyntaxError(
            std::string(symbol_of(atom.element)) + " must be bracketed",
            start);
      }
    }

    int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(atom);
    attach(idx);
    // The implicit hydrogen takes the neighbor slot right after the
    // preceding atom (first when the atom opens a chain).
    if (atom.chiral && atom.explicit_h.value_or(0) > 0) {
      auto& order = atoms_[idx].written_nbrs;
      order.insert(order.end(), -1);
    }
  }

  friend Molecule parse_impl(const std::string& text,
                             const SanitizePolicy& policy);

  const std::string& s_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<char> pending_bond_;
  std::size_t bond_pos_ = 0;
  std::vector<int> stack_;
  std::vector<PAtom> atoms_;
  std::vector<PBond> bonds_;
  std::map<int, RingSlot> rings_;
};

BondOrder order_from_symbol(char c, bool both_aromatic, std::size_t pos) {
  switch (c) {
    case 0: return both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
    case '-': return BondOrder::Single;
    case '=': return BondOrder::Double;
    case '#': return BondOrder::Triple;
    case ':': return BondOrder::Aromatic;
  }
  throw SyntaxError("bad bond symbol", pos);
}

Molecule parse_impl(const std::string& text, const SanitizePolicy& policy) {
  Parser p(text);
  p.run();

  const auto& patoms = p.atoms_;
  const auto& pbonds = p.bonds_;

  Molecule mol;
  std::vector<int> map_of(patoms.size());
  for (std::size_t i = 0; i < patoms.size(); ++i) {
    const PAtom& pa = patoms[i];
    Atom a;
    a.map_num = pa.explicit_map > 0
                    ? pa.explicit_map
                    : kProvisionalMapBase + static_cast<int>(i);
    a.element = pa.element;
    a.formal_charge = pa.charge;
    a.explicit_h = pa.explicit_h;
    a.aromatic = pa.aromatic;
    try {
      mol.add_atom(a);
    } catch (const DuplicateMapNumber&) {
      throw;
    }
    map_of[i] = a.map_num;
  }
  for (const PBond& pb : pbonds) {
    Bond b;
    b.a = map_of[pb.u];
    b.b = map_of[pb.v];
    bool both_aromatic = patoms[pb.u].aromatic && patoms[pb.v].aromatic;
    b.order = order_from_symbol(pb.symbol, both_aromatic, pb.position);
    try {
      mol.add_bond(b);
    } catch (const Error&) {
      throw SyntaxError("duplicate bond in input", pb.position);
    }
  }

  // Canonical map assignment for unannotated atoms. A kekulization dead
  // end here is a chemistry problem, not a numbering problem: surface it
  // as the sanitize report (over parse-order maps, so the report never
  // shows provisional ids).
  Molecule numbered;
  try {
    numbered = assign_map_numbers(mol);
  } catch (const KekulizationFailure&) {
    std::unordered_map<int, int> fallback;
    std::unordered_set<int> taken;
    for (const Atom& a : mol.atoms()) {
      if (a.map_num < kProvisionalMapBase) taken.insert(a.map_num);
    }
    int next = 1;
    for (const Atom& a : mol.atoms()) {
      if (a.map_num < kProvisionalMapBase) {
        fallback[a.map_num] = a.map_num;
      } else {
        while (taken.count(next)) ++next;
        taken.insert(next);
        fallback[a.map_num] = next;
      }
    }
    throw SanitizeError(sanitize_report(mol.renumbered(fallback), policy));
  }
  auto final_map = [&](int parse_idx) {
    int raw = map_of[parse_idx];
    if (raw < kProvisionalMapBase) return raw;
    // assign_map_numbers relabeled it; find by position: renumbered keeps
    // atom storage order, so parse_idx is still the index.
    return numbered.atoms()[parse_idx].map_num;
  };

  // Chirality tags: parity between written neighbor order and the stored
  // convention (ascending map, phantom H first).
  for (std::size_t i = 0; i < patoms.size(); ++i) {
    const PAtom& pa = patoms[i];
    if (!pa.chiral) continue;
    std::vector<int> written;
    for (int ref : pa.written_nbrs) {
      if (ref == -1) {
        written.push_back(0);
      } else if (ref >= 0) {
        written.push_back(final_map(ref));
      } else {
        throw SyntaxError("unresolved ring bond on chiral atom", pa.position);
      }
    }
    std::vector<int> sorted = written;
    std::sort(sorted.begin(), sorted.end());
    int swaps = 0;
    std::vector<int> work = written;
    for (std::size_t k = 0; k < work.size(); ++k) {
      while (work[k] != sorted[k]) {
        auto j = std::find(work.begin() + k + 1, work.end(), sorted[k]) -
                 work.begin();
        std::swap(work[k], work[j]);
        ++swaps;
      }
    }
    // '@' lists the remaining neighbors anticlockwise: CCW in written
    // order. An odd reorder toward ascending-map order flips the sense.
    Chirality tag = pa.chiral == 1 ? Chirality::CCW : Chirality::CW;
    if (swaps % 2 == 1) {
      tag = tag == Chirality::CW ? Chirality::CCW : Chirality::CW;
    }
    numbered.atom(final_map(static_cast<int>(i))).chirality = tag;
  }

  // Bond stereo from slash directions.
  for (const PBond& pb : pbonds) {
    Bond& bond = numbered.bond(final_map(pb.u), final_map(pb.v));
    if (bond.order != BondOrder::Double) continue;

    // Directional value toward/away from each end of this double bond.
    auto end_direction = [&](int end_parse) -> std::optional<std::pair<int, bool>> {
      // Returns (substituent map, up(sub -> end)).
      std::optional<std::pair<int, bool>> result;
      for (const PBond& db : pbonds) {
        if (!db.up_u_to_v.has_value()) continue;
        int sub = -1;
        bool up_sub_to_end = false;
        if (db.u == end_parse) {
          sub = db.v;
          up_sub_to_end = !*db.up_u_to_v;
        } else if (db.v == end_parse) {
          sub = db.u;
          up_sub_to_end = *db.up_u_to_v;
        } else {
          continue;
        }
        if ((db.u == pb.u && db.v == pb.v) || (db.u == pb.v && db.v == pb.u)) {
          continue;
        }
        if (result.has_value()) {
          // Two directional substituents on one end must disagree.
          if (result->second == up_sub_to_end) {
            throw SyntaxError("conflicting bond directions", db.position);
          }
          continue;
        }
        result = {final_map(sub), up_sub_to_end};
      }
      return result;
    };

    auto da = end_direction(pb.u);
    auto db = end_direction(pb.v);
    if (!da || !db) continue;

    int end_a = final_map(pb.u);
    int end_b = final_map(pb.v);
    auto ref_of = [&](int end, int other) {
      int best = -1;
      for (int n : numbered.neighbors(end)) {
        if (n == other) continue;
        if (best < 0 || n < best) best = n;
      }
      return best;
    };
    int ref_a = ref_of(end_a, end_b);
    int ref_b = ref_of(end_b, end_a);

    // v_a = up(sub_a -> A); v_b = up(B -> sub_b). Equal means the two
    // directional substituents are trans.
    bool v_a = da->second;
    bool v_b = !db->second;
    BondStereo tag = (v_a == v_b) ? BondStereo::E : BondStereo::Z;
    if (da->first != ref_a) tag = tag == BondStereo::E ? BondStereo::Z
                                                       : BondStereo::E;
    if (db->first != ref_b) tag = tag == BondStereo::E ? BondStereo::Z
                                                       : BondStereo::E;
    bond.stereo = tag;
  }

  SanitizeReport report = sanitize(numbered, policy);
  if (!report.ok) throw SanitizeError(std::move(report));
  return numbered;
}

}  // namespace

Molecule parse_smiles(const std::string& text, const SanitizePolicy& policy) {
  return parse_impl(text, policy);
}

}  // namespace editcraft
