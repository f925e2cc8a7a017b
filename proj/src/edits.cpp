#include "editcraft/edits.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "graph_scratch.hpp"

namespace editcraft {

using nlohmann::json;

std::string_view edit_kind_name(EditKind k) {
  switch (k) {
    case EditKind::DelAtom: return "DEL_ATOM";
    case EditKind::MutateAtom: return "MUTATE_ATOM";
    case EditKind::AddAtom: return "ADD_ATOM";
    case EditKind::DelBond: return "DEL_BOND";
    case EditKind::AddBond: return "ADD_BOND";
    case EditKind::ChangeBond: return "CHANGE_BOND";
    case EditKind::SetChiral: return "SET_CHIRAL";
    case EditKind::SetBondStereo: return "SET_BOND_STEREO";
    case EditKind::Stop: return "STOP";
  }
  return "?";
}

EditCommand EditCommand::del_atom(int map_num) {
  EditCommand c;
  c.kind = EditKind::DelAtom;
  c.a = map_num;
  return c;
}

EditCommand EditCommand::mutate_atom(int map_num, Element element) {
  EditCommand c;
  c.kind = EditKind::MutateAtom;
  c.a = map_num;
  c.element = element;
  return c;
}

EditCommand EditCommand::add_atom(int new_id, Element element) {
  EditCommand c;
  c.kind = EditKind::AddAtom;
  c.a = new_id;
  c.element = element;
  return c;
}

EditCommand EditCommand::del_bond(int a, int b) {
  EditCommand c;
  c.kind = EditKind::DelBond;
  c.a = a;
  c.b = b;
  return c;
}

EditCommand EditCommand::add_bond(int a, int b, BondOrder order) {
  EditCommand c;
  c.kind = EditKind::AddBond;
  c.a = a;
  c.b = b;
  c.order = order;
  return c;
}

EditCommand EditCommand::change_bond(int a, int b, BondOrder order) {
  EditCommand c;
  c.kind = EditKind::ChangeBond;
  c.a = a;
  c.b = b;
  c.order = order;
  return c;
}

EditCommand EditCommand::set_chiral(int map_num, Chirality tag) {
  EditCommand c;
  c.kind = EditKind::SetChiral;
  c.a = map_num;
  c.chiral = tag;
  return c;
}

EditCommand EditCommand::set_bond_stereo(int a, int b, BondStereo tag) {
  EditCommand c;
  c.kind = EditKind::SetBondStereo;
  c.a = a;
  c.b = b;
  c.stereo = tag;
  return c;
}

EditCommand EditCommand::stop() { return EditCommand{}; }

std::size_t EditSequence::edit_count() const {
  std::size_t n = 0;
  for (const EditCommand& c : commands) {
    if (c.kind != EditKind::Stop) ++n;
  }
  return n;
}

namespace {

using Kind = EditParseError::Kind;

[[noreturn]] void bad(Kind kind, const std::string& message) {
  throw EditParseError(kind, message);
}

int expect_int(const json& item, std::size_t cmd_idx, std::size_t arg_idx) {
  if (!item.is_number_integer()) {
    bad(Kind::BadArgument, "command " + std::to_string(cmd_idx) + " argument " +
                               std::to_string(arg_idx) +
                               " must be an integer");
  }
  return item.get<int>();
}

std::string expect_str(const json& item, std::size_t cmd_idx,
                       std::size_t arg_idx) {
  if (!item.is_string()) {
    bad(Kind::BadArgument, "command " + std::to_string(cmd_idx) + " argument " +
                               std::to_string(arg_idx) + " must be a string");
  }
  return item.get<std::string>();
}

Element expect_element(const json& item, std::size_t cmd_idx,
                       std::size_t arg_idx) {
  std::string sym = expect_str(item, cmd_idx, arg_idx);
  auto e = element_from_symbol(sym);
  if (!e) {
    bad(Kind::BadArgument, "command " + std::to_string(cmd_idx) +
                               ": unsupported element '" + sym + "'");
  }
  return *e;
}

BondOrder expect_order(const json& item, std::size_t cmd_idx,
                       std::size_t arg_idx) {
  std::string name = expect_str(item, cmd_idx, arg_idx);
  auto o = bond_order_from_name(name);
  if (!o) {
    bad(Kind::BadArgument, "command " + std::to_string(cmd_idx) +
                               ": unknown bond type '" + name + "'");
  }
  return *o;
}

void expect_arity(const json& arr, std::size_t want, std::size_t cmd_idx,
                  const std::string& name) {
  if (arr.size() != want) {
    bad(Kind::BadArity, name + " takes " + std::to_string(want - 1) +
                            " argument(s), got " +
                            std::to_string(arr.size() - 1) + " (command " +
                            std::to_string(cmd_idx) + ")");
  }
}

EditCommand decode_command(const json& arr, std::size_t idx) {
  if (!arr.is_array() || arr.empty() || !arr[0].is_string()) {
    bad(Kind::JsonMalformed,
        "command " + std::to_string(idx) +
            " must be a non-empty array starting with the command name");
  }
  std::string name = arr[0].get<std::string>();
  if (name == "DEL_ATOM") {
    expect_arity(arr, 2, idx, name);
    return EditCommand::del_atom(expect_int(arr[1], idx, 1));
  }
  if (name == "MUTATE_ATOM") {
    expect_arity(arr, 3, idx, name);
    return EditCommand::mutate_atom(expect_int(arr[1], idx, 1),
                                    expect_element(arr[2], idx, 2));
  }
  if (name == "ADD_ATOM") {
    expect_arity(arr, 3, idx, name);
    int id = expect_int(arr[1], idx, 1);
    if (id < kNewAtomIdBase) {
      bad(Kind::BadArgument,
          "ADD_ATOM id " + std::to_string(id) + " is below " +
              std::to_string(kNewAtomIdBase) + " (command " +
              std::to_string(idx) + ")");
    }
    return EditCommand::add_atom(id, expect_element(arr[2], idx, 2));
  }
  if (name == "DEL_BOND") {
    expect_arity(arr, 3, idx, name);
    return EditCommand::del_bond(expect_int(arr[1], idx, 1),
                                 expect_int(arr[2], idx, 2));
  }
  if (name == "ADD_BOND") {
    expect_arity(arr, 4, idx, name);
    return EditCommand::add_bond(expect_int(arr[1], idx, 1),
                                 expect_int(arr[2], idx, 2),
                                 expect_order(arr[3], idx, 3));
  }
  if (name == "CHANGE_BOND") {
    expect_arity(arr, 4, idx, name);
    return EditCommand::change_bond(expect_int(arr[1], idx, 1),
                                    expect_int(arr[2], idx, 2),
                                    expect_order(arr[3], idx, 3));
  }
  if (name == "SET_CHIRAL") {
    expect_arity(arr, 3, idx, name);
    std::string tag = expect_str(arr[2], idx, 2);
    Chirality c;
    if (tag == "CW") {
      c = Chirality::CW;
    } else if (tag == "CCW") {
      c = Chirality::CCW;
    } else if (tag == "NONE") {
      c = Chirality::None;
    } else {
      bad(Kind::BadArgument, "SET_CHIRAL tag must be CW, CCW or NONE, got '" +
                                 tag + "' (command " + std::to_string(idx) +
                                 ")");
    }
    return EditCommand::set_chiral(expect_int(arr[1], idx, 1), c);
  }
  if (name == "SET_BOND_STEREO") {
    expect_arity(arr, 4, idx, name);
    std::string tag = expect_str(arr[3], idx, 3);
    BondStereo s;
    if (tag == "E") {
      s = BondStereo::E;
    } else if (tag == "Z") {
      s = BondStereo::Z;
    } else if (tag == "NONE") {
      s = BondStereo::None;
    } else {
      bad(Kind::BadArgument, "SET_BOND_STEREO tag must be E, Z or NONE, got '" +
                                 tag + "' (command " + std::to_string(idx) +
                                 ")");
    }
    return EditCommand::set_bond_stereo(expect_int(arr[1], idx, 1),
                                        expect_int(arr[2], idx, 2), s);
  }
  if (name == "STOP") {
    expect_arity(arr, 1, idx, name);
    return EditCommand::stop();
  }
  bad(Kind::UnknownCommand,
      "unknown command '" + name + "' (command " + std::to_string(idx) + ")");
}

}  // namespace

void validate_sequence(const EditSequence& seq, bool strict) {
  bool seen_stop = false;
  for (std::size_t i = 0; i < seq.commands.size(); ++i) {
    const EditCommand& c = seq.commands[i];
    if (seen_stop && strict) {
      bad(Kind::CommandAfterStop,
          "command " + std::to_string(i) + " appears after STOP");
    }
    if (c.kind == EditKind::Stop) seen_stop = true;
    if (c.kind == EditKind::AddAtom && c.a < kNewAtomIdBase) {
      bad(Kind::BadArgument, "ADD_ATOM id " + std::to_string(c.a) +
                                 " is below " + std::to_string(kNewAtomIdBase));
    }
  }
  if (strict && !seen_stop) {
    bad(Kind::MissingStop, "edit sequence lacks the mandatory STOP");
  }
}

EditSequence parse_edit_json(const std::string& text, bool strict,
                             std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(Kind::JsonMalformed, std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    bad(Kind::JsonMalformed, "top level must be a JSON array");
  }

  EditSequence seq;
  bool seen_stop = false;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    EditCommand cmd = decode_command(doc[i], i);
    if (seen_stop) {
      if (strict) {
        bad(Kind::CommandAfterStop,
            "command " + std::to_string(i) + " appears after STOP");
      }
      if (warnings) {
        warnings->push_back("dropped command " + std::to_string(i) + " (" +
                            std::string(edit_kind_name(cmd.kind)) +
                            ") after STOP");
      }
      continue;
    }
    if (cmd.kind == EditKind::Stop) seen_stop = true;
    seq.commands.push_back(cmd);
  }
  if (!seen_stop) {
    if (strict) bad(Kind::MissingStop, "edit sequence lacks the mandatory STOP");
    if (warnings) warnings->push_back("appended missing STOP");
    seq.commands.push_back(EditCommand::stop());
  }
  return seq;
}

std::string serialize_edits(const EditSequence& seq) {
  validate_sequence(seq, true);
  json doc = json::array();
  for (const EditCommand& c : seq.commands) {
    json item = json::array();
    item.push_back(std::string(edit_kind_name(c.kind)));
    switch (c.kind) {
      case EditKind::DelAtom:
        item.push_back(c.a);
        break;
      case EditKind::MutateAtom:
        item.push_back(c.a);
        item.push_back(std::string(symbol_of(c.element)));
        break;
      case EditKind::AddAtom:
        item.push_back(c.a);
        item.push_back(std::string(symbol_of(c.element)));
        break;
      case EditKind::DelBond:
        item.push_back(c.a);
        item.push_back(c.b);
        break;
      case EditKind::AddBond:
      case EditKind::ChangeBond:
        item.push_back(c.a);
        item.push_back(c.b);
        item.push_back(std::string(bond_order_name(c.order)));
        break;
      case EditKind::SetChiral:
        item.push_back(c.a);
        item.push_back(c.chiral == Chirality::CW    ? "CW"
                       : c.chiral == Chirality::CCW ? "CCW"
                                                    : "NONE");
        break;
      case EditKind::SetBondStereo:
        item.push_back(c.a);
        item.push_back(c.b);
        item.push_back(c.stereo == BondStereo::E   ? "E"
                       : c.stereo == BondStereo::Z ? "Z"
                                                   : "NONE");
        break;
      case EditKind::Stop:
        break;
    }
    doc.push_back(item);
  }
  return doc.dump();
}

namespace {

using AK = ApplyError::Kind;

void require_atom(const Molecule& m, int map, std::size_t idx) {
  if (!m.has_atom(map)) {
    throw ApplyError(AK::UnknownAtom,
                     "command " + std::to_string(idx) +
                         " references unknown atom " + std::to_string(map),
                     static_cast<int>(idx));
  }
}

}  // namespace

Molecule apply_edits(const Molecule& mol, const EditSequence& seq,
                     const ApplyPolicy& policy) {
  validate_sequence(seq, policy.strict_stop);

  Molecule work = mol;
  work.invalidate();
  std::set<int> dirty;  // atoms whose hydrogen counts must be re-derived
  std::set<int> explicit_chiral;
  std::set<std::pair<int, int>> explicit_stereo;

  auto mark = [&](int map) { dirty.insert(map); };

  for (std::size_t i = 0; i < seq.commands.size(); ++i) {
    const EditCommand& c = seq.commands[i];
    switch (c.kind) {
      case EditKind::Stop:
        goto done;
      case EditKind::DelAtom: {
        require_atom(work, c.a, i);
        for (int n : work.neighbors(c.a)) mark(n);
        work.remove_atom(c.a);
        dirty.erase(c.a);
        explicit_chiral.erase(c.a);
        break;
      }
      case EditKind::MutateAtom: {
        require_atom(work, c.a, i);
        work.atom(c.a).element = c.element;
        mark(c.a);
        break;
      }
      case EditKind::AddAtom: {
        if (work.has_atom(c.a)) {
          throw ApplyError(AK::DuplicateAtomId,
                           "command " + std::to_string(i) + ": atom id " +
                               std::to_string(c.a) + " already exists",
                           static_cast<int>(i));
        }
        Atom a;
        a.map_num = c.a;
        a.element = c.element;
        work.add_atom(a);
        break;
      }
      case EditKind::DelBond: {
        require_atom(work, c.a, i);
        require_atom(work, c.b, i);
        if (!work.has_bond(c.a, c.b)) {
          throw ApplyError(AK::BondAbsent,
                           "command " + std::to_string(i) + ": no bond " +
                               std::to_string(c.a) + "-" + std::to_string(c.b),
                           static_cast<int>(i));
        }
        work.remove_bond(c.a, c.b);
        explicit_stereo.erase({std::min(c.a, c.b), std::max(c.a, c.b)});
        mark(c.a);
        mark(c.b);
        break;
      }
      case EditKind::AddBond: {
        if (c.a == c.b) {
          throw ApplyError(AK::SelfBond,
                           "command " + std::to_string(i) +
                               ": self bond on atom " + std::to_string(c.a),
                           static_cast<int>(i));
        }
        require_atom(work, c.a, i);
        require_atom(work, c.b, i);
        if (work.has_bond(c.a, c.b)) {
          throw ApplyError(AK::BondExists,
                           "command " + std::to_string(i) + ": bond " +
                               std::to_string(c.a) + "-" + std::to_string(c.b) +
                               " already exists",
                           static_cast<int>(i));
        }
        Bond b;
        b.a = c.a;
        b.b = c.b;
        b.order = c.order;
        work.add_bond(b);
        mark(c.a);
        mark(c.b);
        break;
      }
      case EditKind::ChangeBond: {
        require_atom(work, c.a, i);
        require_atom(work, c.b, i);
        if (!work.has_bond(c.a, c.b)) {
          throw ApplyError(AK::BondAbsent,
                           "command " + std::to_string(i) + ": no bond " +
                               std::to_string(c.a) + "-" + std::to_string(c.b),
                           static_cast<int>(i));
        }
        Bond& b = work.bond(c.a, c.b);
        b.order = c.order;
        if (c.order != BondOrder::Double) b.stereo = BondStereo::None;
        mark(c.a);
        mark(c.b);
        break;
      }
      case EditKind::SetChiral: {
        require_atom(work, c.a, i);
        work.atom(c.a).chirality = c.chiral;
        explicit_chiral.insert(c.a);
        break;
      }
      case EditKind::SetBondStereo: {
        require_atom(work, c.a, i);
        require_atom(work, c.b, i);
        if (!work.has_bond(c.a, c.b)) {
          throw ApplyError(AK::BondAbsent,
                           "command " + std::to_string(i) + ": no bond " +
                               std::to_string(c.a) + "-" + std::to_string(c.b),
                           static_cast<int>(i));
        }
        work.bond(c.a, c.b).stereo = c.stereo;
        explicit_stereo.insert({std::min(c.a, c.b), std::max(c.a, c.b)});
        break;
      }
    }
  }
done:

  // Touched atoms rejoin the implicit-hydrogen regime; new atoms already
  // carry no explicit count.
  for (int map : dirty) {
    if (work.has_atom(map)) work.atom(map).explicit_h.reset();
  }

  // Aromatic flags follow the aromatic bonds that remain.
  {
    std::unordered_set<int> aromatic_atoms;
    for (const Bond& b : work.bonds()) {
      if (b.order == BondOrder::Aromatic) {
        aromatic_atoms.insert(b.a);
        aromatic_atoms.insert(b.b);
      }
    }
    for (const Atom& a : work.atoms()) {
      bool want = aromatic_atoms.count(a.map_num) > 0;
      if (a.aromatic != want) work.atom(a.map_num).aromatic = want;
    }
  }

  // Inherited stereo that the edits invalidated is cleared; stereo the
  // script set explicitly must survive sanitize or the script is wrong.
  for (const Atom& a : work.atoms()) {
    if (a.chirality == Chirality::None) continue;
    if (explicit_chiral.count(a.map_num)) continue;
    int nbrs = work.degree(a.map_num) +
               (internal::stereo_phantom_h(work, a) ? 1 : 0);
    if (nbrs < 3) work.atom(a.map_num).chirality = Chirality::None;
  }
  std::vector<std::pair<int, int>> stale;
  for (const Bond& b : work.bonds()) {
    if (b.stereo == BondStereo::None) continue;
    if (explicit_stereo.count({std::min(b.a, b.b), std::max(b.a, b.b)})) {
      continue;
    }
    bool ok = b.order == BondOrder::Double && work.degree(b.a) >= 2 &&
              work.degree(b.b) >= 2;
    if (!ok) stale.push_back({b.a, b.b});
  }
  for (auto [a, b] : stale) work.bond(a, b).stereo = BondStereo::None;

  if (policy.resanitize) {
    SanitizePolicy relaxed{.require_connected = false};
    SanitizeReport report = sanitize_report(work, relaxed);
    if (!report.ok) throw ApplyError(std::move(report));
    if (policy.require_connected_result &&
        connected_components(work).size() > 1) {
      throw ApplyError(AK::DisconnectedResult,
                       "edit result has multiple fragments");
    }
    sanitize(work, relaxed);
  }
  return work;
}

}  // namespace editcraft
