#pragma once

#include <optional>
#include <string>
#include <vector>

#include "editcraft/molecule.hpp"

namespace editcraft {

// The nine-command editing action space plus STOP. Commands address atoms
// by map number; ids introduced by ADD_ATOM start at 500.
inline constexpr int kNewAtomIdBase = 500;

enum class EditKind {
  DelAtom,
  MutateAtom,
  AddAtom,
  DelBond,
  AddBond,
  ChangeBond,
  SetChiral,
  SetBondStereo,
  Stop,
};

std::string_view edit_kind_name(EditKind k);

struct EditCommand {
  EditKind kind = EditKind::Stop;
  int a = 0;
  int b = 0;
  Element element = Element::C;
  BondOrder order = BondOrder::Single;
  Chirality chiral = Chirality::None;
  BondStereo stereo = BondStereo::None;

  static EditCommand del_atom(int map_num);
  static EditCommand mutate_atom(int map_num, Element element);
  static EditCommand add_atom(int new_id, Element element);
  static EditCommand del_bond(int a, int b);
  static EditCommand add_bond(int a, int b, BondOrder order);
  static EditCommand change_bond(int a, int b, BondOrder order);
  static EditCommand set_chiral(int map_num, Chirality tag);
  static EditCommand set_bond_stereo(int a, int b, BondStereo tag);
  static EditCommand stop();

  bool operator==(const EditCommand&) const = default;
};

struct EditSequence {
  std::vector<EditCommand> commands;

  bool operator==(const EditSequence&) const = default;
  std::size_t size() const { return commands.size(); }
  // Command count excluding the trailing STOP.
  std::size_t edit_count() const;
};

class EditParseError : public Error {
 public:
  enum class Kind {
    JsonMalformed,
    UnknownCommand,
    BadArity,
    BadArgument,
    MissingStop,
    CommandAfterStop,
  };

  EditParseError(Kind kind, std::string message)
      : Error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ApplyError : public Error {
 public:
  enum class Kind {
    UnknownAtom,
    DuplicateAtomId,
    BondExists,
    BondAbsent,
    SelfBond,
    FinalSanitizeFailed,
    DisconnectedResult,
  };

  ApplyError(Kind kind, std::string message, int command_index = -1)
      : Error(std::move(message)), kind_(kind), command_index_(command_index) {}

  ApplyError(SanitizeReport report, int command_index = -1)
      : Error("final sanitize failed: " + report.summary()),
        kind_(Kind::FinalSanitizeFailed),
        command_index_(command_index),
        report_(std::move(report)) {}

  Kind kind() const { return kind_; }
  int command_index() const { return command_index_; }
  const std::optional<SanitizeReport>& report() const { return report_; }

 private:
  Kind kind_;
  int command_index_;
  std::optional<SanitizeReport> report_;
};

struct ApplyPolicy {
  bool strict_stop = true;
  bool require_connected_result = true;
  bool resanitize = true;
};

// Decode the wire form: a JSON array of arrays, first item the uppercase
// command name, arities exactly as documented. With strict=true a single
// trailing STOP is mandatory; with strict=false a missing STOP is
// tolerated and commands after STOP are dropped with a warning record.
EditSequence parse_edit_json(const std::string& text, bool strict = true,
                             std::vector<std::string>* warnings = nullptr);

// Canonical wire form: compact JSON, uppercase command names. Validates
// STOP placement. parse_edit_json(serialize_edits(s)) == s.
std::string serialize_edits(const EditSequence& seq);

// Validate command invariants and STOP placement (strict mode).
void validate_sequence(const EditSequence& seq, bool strict = true);

// Apply the sequence to a copy of `mol`. Atomic: either a fully applied,
// re-sanitized molecule is returned or an ApplyError is thrown and the
// input is untouched. Intermediate states may be invalid; only the final
// state is checked. Atoms whose bonding changed get their hydrogen counts
// re-derived from the valence table.
Molecule apply_edits(const Molecule& mol, const EditSequence& seq,
                     const ApplyPolicy& policy = {});

}  // namespace editcraft
