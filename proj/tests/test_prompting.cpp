#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "editcraft/editextract.hpp"
#include "editcraft/ioutil.hpp"
#include "editcraft/prompting.hpp"
#include "editcraft/smiles.hpp"

using namespace editcraft;

namespace {

std::string golden_path(const std::string& name) {
  return std::string(EDITCRAFT_TEST_DATA_DIR) + "/golden/" + name;
}

std::string load_golden(const std::string& name) {
  return read_file(golden_path(name));
}

Exemplar demo_exemplar() {
  CliffPair pair;
  pair.source = parse_smiles("CCO");
  pair.target = parse_smiles("CCN");
  pair.edits = extract_edits(pair.source, pair.target);
  return make_exemplar("demo", pair,
                       "Replace the hydroxyl with an amine to reuse a "
                       "commodity building block.");
}

Molecule constrained_molecule() {
  // A secondary amine whose nitrogen is map 12 with carbon neighbors
  // 11 and 13, plus a tail carbon 23 next to carbon 22.
  return parse_smiles(
      "[CH3:11][NH:12][CH2:13][CH2:22][CH3:23]");
}

}  // namespace

TEST_CASE("system prompt matches the golden files byte-for-byte") {
  PromptMode edits;
  edits.output_kind = OutputKind::Edits;
  PromptMode direct;
  direct.output_kind = OutputKind::DirectSmiles;

  CHECK(render_system_prompt(edits) == load_golden("system_prompt_edits.txt"));
  CHECK(render_system_prompt(direct) ==
        load_golden("system_prompt_direct.txt"));
}

TEST_CASE("system prompt mode gating") {
  PromptMode edits;
  PromptMode direct;
  direct.output_kind = OutputKind::DirectSmiles;
  std::string e = render_system_prompt(edits);
  std::string d = render_system_prompt(direct);
  CHECK(e.find("[COMMANDS SPECIFICATION]") != std::string::npos);
  CHECK(e.find("DEL_ATOM") != std::string::npos);
  CHECK(d.find("[COMMANDS SPECIFICATION]") == std::string::npos);
  CHECK(d.find("```smiles") != std::string::npos);
  // Determinism.
  CHECK(render_system_prompt(edits) == e);
}

TEST_CASE("exemplar rendering") {
  Exemplar ex = demo_exemplar();
  std::string text = render_exemplar(ex);
  CHECK(text == render_exemplar(ex));
  CHECK(text.find("source_smiles: \"" + ex.source_smiles + "\"") == 0);
  CHECK(text.find("[REASONING]") != std::string::npos);
  CHECK(text.find("[EDITS]") != std::string::npos);
  CHECK(text.find("```json") != std::string::npos);
  CHECK(text.find("[\"STOP\"]") != std::string::npos);

  Exemplar empty = ex;
  empty.rationale.clear();
  std::string etext = render_exemplar(empty);
  CHECK(etext.find("[REASONING]\n\n") != std::string::npos);
}

TEST_CASE("constraint block renders the documented sentences") {
  Molecule mol = constrained_molecule();
  std::vector<InteractionConstraint> constraints;
  InteractionConstraint hbond;
  hbond.map_num = 12;
  hbond.element = Element::N;
  hbond.neighbors = {{Element::C, 11}, {Element::C, 13}};
  hbond.kind = InteractionKind::HydrogenBond;
  hbond.residue = "ASP156";
  InteractionConstraint hydrophobic;
  hydrophobic.map_num = 23;
  hydrophobic.element = Element::C;
  hydrophobic.neighbors = {{Element::C, 22}};
  hydrophobic.kind = InteractionKind::Hydrophobic;
  hydrophobic.residue = "LEU145";
  constraints = {hydrophobic, hbond};  // deliberately unsorted

  std::string block = render_constraint_block(constraints, mol);
  CHECK(block.find(
            "Atom with map number [12] (a N atom connected to [C:11, C:13]) "
            "forms a critical Hydrogen Bond with ASP156.") !=
        std::string::npos);
  CHECK(block.find(
            "Atom with map number [23] (a C atom connected to [C:22]) is "
            "involved in a key Hydrophobic interaction with LEU145.") !=
        std::string::npos);
  CHECK(block.rfind("CRITICAL BIOLOGICAL CONSTRAINTS:", 0) == 0);
  // Sorted by map number regardless of input order.
  CHECK(block.find("[12]") < block.find("[23]"));

  CHECK(render_constraint_block({}, mol).empty());

  InteractionConstraint bogus = hbond;
  bogus.map_num = 99;
  CHECK_THROWS_AS(render_constraint_block({bogus}, mol), UnknownAtomError);
}

TEST_CASE("assemble_prompt lays out sections in fixed order") {
  Molecule query = parse_smiles("CCO");
  Exemplar ex = demo_exemplar();
  PromptMode mode;
  mode.output_kind = OutputKind::Edits;
  mode.n_shots = 1;

  InteractionConstraint c;
  c.map_num = query.atoms()[0].map_num;
  c.element = query.atom(c.map_num).element;
  c.kind = InteractionKind::HydrogenBond;
  c.residue = "LYS43";
  for (int n : query.neighbors(c.map_num)) {
    c.neighbors.push_back({query.atom(n).element, n});
  }

  PromptBundle bundle = assemble_prompt(query, {ex}, {c}, mode);
  std::size_t sys_constraints = bundle.system.find("CRITICAL BIOLOGICAL");
  std::size_t sys_example = bundle.system.find("[EXAMPLE 1]");
  REQUIRE(sys_constraints != std::string::npos);
  REQUIRE(sys_example != std::string::npos);
  CHECK(sys_constraints < sys_example);
  CHECK(bundle.user.rfind("source_smiles: \"", 0) == 0);

  // Manifest covers every byte of both parts.
  std::size_t sys_covered = 0;
  std::size_t user_covered = 0;
  for (const ManifestEntry& e : bundle.manifest) {
    (e.in_system ? sys_covered : user_covered) += e.length;
  }
  CHECK(sys_covered == bundle.system.size());
  CHECK(user_covered == bundle.user.size());

  // Shot-count mismatch is an error.
  PromptMode five;
  five.n_shots = 5;
  CHECK_THROWS_AS(assemble_prompt(query, {ex}, {}, five), ShotCountMismatch);

  // Zero-shot direct mode has no exemplar section.
  PromptMode zero;
  zero.output_kind = OutputKind::DirectSmiles;
  zero.n_shots = 0;
  PromptBundle zb = assemble_prompt(query, {}, {}, zero);
  CHECK(zb.system.find("[EXAMPLE") == std::string::npos);
}

TEST_CASE("parse_model_response: edits mode") {
  PromptMode mode;
  mode.output_kind = OutputKind::Edits;

  std::string good =
      "[REASONING]\nThe hydroxyl is the liability.\n\n[EDITS]\n```json\n"
      R"([["MUTATE_ATOM",3,"N"],["STOP"]])"
      "\n```\n";
  ModelResponse r = parse_model_response(good, mode);
  CHECK(r.reasoning == "The hydroxyl is the liability.");
  CHECK(r.edits.commands.size() == 2);

  // Trailing prose after the fence is ignored.
  ModelResponse r2 =
      parse_model_response(good + "\nI hope this helps!", mode);
  CHECK(r2.edits == r.edits);

  // Missing sections.
  CHECK_THROWS_AS(parse_model_response("no markers at all", mode),
                  ResponseParseError);
  try {
    parse_model_response("[REASONING]\nwords but no edits section", mode);
    FAIL("expected ResponseParseError");
  } catch (const ResponseParseError& e) {
    CHECK(e.kind() == ResponseParseError::Kind::MissingSection);
    CHECK(e.raw().find("words") != std::string::npos);
  }
  try {
    parse_model_response("[REASONING]\nwords\n[EDITS]\nno fence here", mode);
    FAIL("expected ResponseParseError");
  } catch (const ResponseParseError& e) {
    CHECK(e.kind() == ResponseParseError::Kind::NoJsonFence);
  }
  try {
    parse_model_response(
        "[REASONING]\nwords\n[EDITS]\n```json\n[[\"NOT_A_CMD\",1],[\"STOP\"]]\n```",
        mode);
    FAIL("expected ResponseParseError");
  } catch (const ResponseParseError& e) {
    CHECK(e.kind() == ResponseParseError::Kind::EditParseFailure);
  }
}

TEST_CASE("parse_model_response: first fence wins") {
  PromptMode mode;
  std::string text =
      "[REASONING]\nr\n[EDITS]\n```json\n[[\"STOP\"]]\n```\n"
      "```json\n[[\"DEL_ATOM\",1],[\"STOP\"]]\n```\n";
  ModelResponse r = parse_model_response(text, mode);
  CHECK(r.edits.commands.size() == 1);
}

TEST_CASE("parse_model_response: direct mode") {
  PromptMode mode;
  mode.output_kind = OutputKind::DirectSmiles;

  std::string good =
      "[REASONING]\nSimplify.\n\n[SMILES]\n```smiles\nCCO\n```\n";
  ModelResponse r = parse_model_response(good, mode);
  CHECK(r.reasoning == "Simplify.");
  CHECK(is_isomorphic(r.molecule, parse_smiles("CCO")));

  // Fallback: last parseable token.
  std::string loose = "[REASONING]\nblah blah\nThe answer is CCN";
  ModelResponse r2 = parse_model_response(loose, mode);
  CHECK(is_isomorphic(r2.molecule, parse_smiles("CCN")));

  try {
    parse_model_response("[REASONING]\nnothing usable here!!", mode);
    FAIL("expected ResponseParseError");
  } catch (const ResponseParseError& e) {
    CHECK(e.kind() == ResponseParseError::Kind::SmilesParseFailure);
  }
}

TEST_CASE("render then parse recovers the edit payload exactly") {
  Exemplar ex = demo_exemplar();
  std::string synthetic =
      "[REASONING]\n" + ex.rationale + "\n\n[EDITS]\n```json\n" +
      serialize_edits(ex.edits) + "\n```\n";
  PromptMode mode;
  ModelResponse r = parse_model_response(synthetic, mode);
  CHECK(r.edits == ex.edits);
  CHECK(r.reasoning == ex.rationale);
}
