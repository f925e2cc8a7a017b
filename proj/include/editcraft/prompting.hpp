#pragma once

#include <string>
#include <vector>

#include "editcraft/constraints.hpp"
#include "editcraft/edits.hpp"
#include "editcraft/retrieval.hpp"

namespace editcraft {

enum class OutputKind { Edits, DirectSmiles };

struct PromptMode {
  OutputKind output_kind = OutputKind::Edits;
  int n_shots = 5;
};

struct ManifestEntry {
  std::string section;
  bool in_system = true;  // false: user part
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct PromptBundle {
  std::string system;
  std::string user;
  std::vector<ManifestEntry> manifest;
};

struct ModelResponse {
  std::string reasoning;
  EditSequence edits;        // EDITS mode
  Molecule molecule;         // DIRECT_SMILES mode
  std::string raw;
};

class ShotCountMismatch : public Error {
 public:
  ShotCountMismatch(std::size_t got, int want)
      : Error("prompt mode wants " + std::to_string(want) +
              " shots, got " + std::to_string(got)) {}
};

class ResponseParseError : public Error {
 public:
  enum class Kind {
    MissingSection,
    NoJsonFence,
    EditParseFailure,
    SmilesParseFailure,
  };

  ResponseParseError(Kind kind, std::string message, std::string raw)
      : Error(std::move(message)), kind_(kind), raw_(std::move(raw)) {}

  Kind kind() const { return kind_; }
  const std::string& raw() const { return raw_; }

 private:
  Kind kind_;
  std::string raw_;
};

// Byte-stable system prompt: persona, task, strict output format, and (in
// EDITS mode) the full command specification.
std::string render_system_prompt(const PromptMode& mode);

// One few-shot block: source SMILES with maps, rationale under
// [REASONING], canonical edit JSON in a fenced json block under [EDITS].
std::string render_exemplar(const Exemplar& ex);

// Direct-SMILES variant: the answer block carries the target SMILES.
std::string render_exemplar_direct(const Exemplar& ex);

// "CRITICAL BIOLOGICAL CONSTRAINTS:" block, one sentence per constraint,
// ascending map order. Empty list renders an empty string.
std::string render_constraint_block(
    const std::vector<InteractionConstraint>& constraints,
    const Molecule& mol);

// Assemble system + user texts with the fixed section order (persona/task/
// format/commands, constraints, exemplars, query); the manifest covers
// every byte of both parts.
PromptBundle assemble_prompt(const Molecule& query,
                             const std::vector<Exemplar>& shots,
                             const std::vector<InteractionConstraint>&
                                 constraints,
                             const PromptMode& mode);

// Strict parser for model responses. EDITS mode: reasoning between
// [REASONING] and [EDITS], payload from the first fenced json block.
// DIRECT_SMILES mode: payload from the first fenced smiles block, falling
// back to the last whitespace-delimited token that parses.
ModelResponse parse_model_response(const std::string& text,
                                   const PromptMode& mode);

}  // namespace editcraft
