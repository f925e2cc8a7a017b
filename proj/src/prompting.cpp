#include "editcraft/prompting.hpp"

#include <algorithm>
#include <sstream>

#include "editcraft/smiles.hpp"

namespace editcraft {

namespace {

constexpr const char* kPersona =
    "You are an expert medicinal chemist and a computational chemist. Your "
    "primary skill is analyzing molecular structures to identify parts that "
    "are synthetically challenging and proposing minimal, chemically sound "
    "modifications to improve their synthesizability while preserving key "
    "pharmacophoric features.";

constexpr const char* kCommandsSpec =
    "[COMMANDS SPECIFICATION]\n"
    "[\"DEL_ATOM\", map_num]: Deletes the atom specified by the map number "
    "and its incident bonds.\n"
    "[\"MUTATE_ATOM\", map_num, new_symbol]: Changes the atomic element of "
    "the target atom (e.g., C to N).\n"
    "[\"ADD_ATOM\", new_id, symbol]: Introduces a new atom. To avoid index "
    "conflict, new IDs start from 500.\n"
    "[\"DEL_BOND\", map_num1, map_num2]: Removes the bond between two "
    "existing atoms.\n"
    "[\"ADD_BOND\", id1, id2, bond_type]: Creates a bond between atoms. Bond "
    "types include \"SINGLE\", \"DOUBLE\", \"TRIPLE\", and \"AROMATIC\".\n"
    "[\"CHANGE_BOND\", map_num1, map_num2, new_bond_type]: Modifies the "
    "order of an existing bond.\n"
    "[\"SET_CHIRAL\", id, tag]: Explicitly sets stereocenters (CW/CCW) or "
    "clears them (NONE).\n"
    "[\"SET_BOND_STEREO\", map_num1, map_num2, tag]: Explicitly sets double "
    "bond stereochemistry (E/Z) or clears it (NONE).\n"
    "[\"STOP\"]: A mandatory token indicating the end of the edit sequence.";

std::string smiles_with_maps(const Molecule& m) {
  SmilesOptions opts;
  opts.include_atom_maps = true;
  opts.canonical = true;
  return write_smiles(m, opts);
}

std::string smiles_plain(const Molecule& m) {
  SmilesOptions opts;
  opts.canonical = true;
  return write_smiles(m, opts);
}

}  // namespace

std::string render_system_prompt(const PromptMode& mode) {
  std::ostringstream os;
  os << kPersona << "\n\n";
  os << "[TASK]\n"
     << "You will be given a source molecule with atom map numbers. Your "
        "tasks are:\n"
     << "1. Reason Step-by-Step: First, analyze the molecule to identify "
        "synthetically problematic substructures. Then, propose a chemically "
        "sound modification.\n";
  if (mode.output_kind == OutputKind::Edits) {
    os << "2. Output Edits: Second, translate your proposed modification "
          "into a sequence of machine-readable commands in a JSON list.\n";
  } else {
    os << "2. Output SMILES: Second, write the complete SMILES string of "
          "the modified molecule.\n";
  }
  os << "\n[OUTPUT FORMAT]\n"
     << "You MUST provide your response in the following strict format. Do "
        "not add any text before '[REASONING]' or after the final '```'.\n\n"
     << "[REASONING]\n"
     << "Your detailed, step-by-step thinking process goes here. Explain "
        "what is wrong with the molecule and why your proposed fix is "
        "better.\n\n";
  if (mode.output_kind == OutputKind::Edits) {
    os << "[EDITS]\n"
       << "```json\n"
       << "[\n"
       << "    [\"COMMAND_1\", \"ARG_1\", ...],\n"
       << "    [\"STOP\"]\n"
       << "]\n"
       << "```\n\n"
       << kCommandsSpec << "\n";
  } else {
    os << "[SMILES]\n"
       << "```smiles\n"
       << "OPTIMIZED_SMILES_HERE\n"
       << "```\n";
  }
  return os.str();
}

std::string render_exemplar(const Exemplar& ex) {
  std::ostringstream os;
  os << "source_smiles: \"" << ex.source_smiles << "\"\n\n"
     << "[REASONING]\n"
     << ex.rationale << "\n\n"
     << "[EDITS]\n"
     << "```json\n"
     << serialize_edits(ex.edits) << "\n"
     << "```\n";
  return os.str();
}

std::string render_exemplar_direct(const Exemplar& ex) {
  Molecule target = parse_smiles(ex.target_smiles);
  std::ostringstream os;
  os << "source_smiles: \"" << ex.source_smiles << "\"\n\n"
     << "[REASONING]\n"
     << ex.rationale << "\n\n"
     << "[SMILES]\n"
     << "```smiles\n"
     << smiles_plain(target) << "\n"
     << "```\n";
  return os.str();
}

std::string render_constraint_block(
    const std::vector<InteractionConstraint>& constraints,
    const Molecule& mol) {
  if (constraints.empty()) return "";
  auto sorted = constraints;
  std::sort(sorted.begin(), sorted.end(),
            [](const InteractionConstraint& x, const InteractionConstraint& y) {
              if (x.map_num != y.map_num) return x.map_num < y.map_num;
              return static_cast<int>(x.kind) < static_cast<int>(y.kind);
            });

  std::ostringstream os;
  os << "CRITICAL BIOLOGICAL CONSTRAINTS:\n"
     << "The following atoms from the source molecule are critical for "
        "binding to the target protein and you should be careful when "
        "modifying them...\n";
  for (const InteractionConstraint& c : sorted) {
    if (!mol.has_atom(c.map_num)) throw UnknownAtomError(c.map_num);
    os << "Atom with map number [" << c.map_num << "] (a "
       << symbol_of(c.element) << " atom connected to [";
    for (std::size_t i = 0; i < c.neighbors.size(); ++i) {
      if (i) os << ", ";
      os << symbol_of(c.neighbors[i].first) << ":" << c.neighbors[i].second;
    }
    os << "]) ";
    switch (c.kind) {
      case InteractionKind::HydrogenBond:
        os << "forms a critical Hydrogen Bond with " << c.residue << ".";
        break;
      case InteractionKind::Hydrophobic:
        os << "is involved in a key Hydrophobic interaction with "
           << c.residue << ".";
        break;
      case InteractionKind::SaltBridge:
        os << "forms a critical Salt Bridge with " << c.residue << ".";
        break;
      case InteractionKind::PiStacking:
        os << "is involved in a key Pi-Stacking interaction with "
           << c.residue << ".";
        break;
      case InteractionKind::PiCation:
        os << "is involved in a key Pi-Cation interaction with " << c.residue
           << ".";
        break;
      case InteractionKind::HalogenBond:
        os << "forms a critical Halogen Bond with " << c.residue << ".";
        break;
      case InteractionKind::MetalComplex:
        os << "forms a critical Metal Complex with " << c.residue << ".";
        break;
    }
    os << "\n";
  }
  return os.str();
}

PromptBundle assemble_prompt(const Molecule& query,
                             const std::vector<Exemplar>& shots,
                             const std::vector<InteractionConstraint>&
                                 constraints,
                             const PromptMode& mode) {
  if (static_cast<int>(shots.size()) != mode.n_shots) {
    throw ShotCountMismatch(shots.size(), mode.n_shots);
  }

  PromptBundle bundle;
  auto add_system = [&](const std::string& name, const std::string& text) {
    bundle.manifest.push_back({name, true, bundle.system.size(), text.size()});
    bundle.system += text;
  };
  auto add_user = [&](const std::string& name, const std::string& text) {
    bundle.manifest.push_back({name, false, bundle.user.size(), text.size()});
    bundle.user += text;
  };

  add_system("system", render_system_prompt(mode));
  std::string block = render_constraint_block(constraints, query);
  if (!block.empty()) {
    add_system("constraints", "\n" + block);
  }
  for (std::size_t i = 0; i < shots.size(); ++i) {
    std::string body = mode.output_kind == OutputKind::Edits
                           ? render_exemplar(shots[i])
                           : render_exemplar_direct(shots[i]);
    add_system("exemplar[" + std::to_string(i) + "]",
               "\n[EXAMPLE " + std::to_string(i + 1) + "]\n" + body);
  }
  add_user("query", "source_smiles: \"" + smiles_with_maps(query) + "\"\n");
  return bundle;
}

namespace {

using RK = ResponseParseError::Kind;

// Content of the first ``` fence with the given tag, if any.
std::optional<std::string> first_fence(const std::string& text,
                                       const std::string& tag) {
  std::string open = "```" + tag;
  std::size_t at = text.find(open);
  if (at == std::string::npos) return std::nullopt;
  std::size_t body = text.find('\n', at);
  if (body == std::string::npos) return std::nullopt;
  ++body;
  std::size_t close = text.find("```", body);
  if (close == std::string::npos) return std::nullopt;
  return text.substr(body, close - body);
}

}  // namespace

ModelResponse parse_model_response(const std::string& text,
                                   const PromptMode& mode) {
  ModelResponse out;
  out.raw = text;

  std::size_t reasoning_at = text.find("[REASONING]");
  if (reasoning_at == std::string::npos) {
    throw ResponseParseError(RK::MissingSection, "missing [REASONING] section",
                             text);
  }
  std::size_t reasoning_start = reasoning_at + std::string("[REASONING]").size();

  auto trim = [](std::string s) {
    auto issp = [](char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
  };

  if (mode.output_kind == OutputKind::Edits) {
    std::size_t edits_at = text.find("[EDITS]", reasoning_start);
    if (edits_at == std::string::npos) {
      throw ResponseParseError(RK::MissingSection, "missing [EDITS] section",
                               text);
    }
    out.reasoning = trim(text.substr(reasoning_start,
                                     edits_at - reasoning_start));
    auto fence = first_fence(text, "json");
    if (!fence) {
      throw ResponseParseError(RK::NoJsonFence,
                               "no fenced json block in response", text);
    }
    try {
      out.edits = parse_edit_json(*fence);
    } catch (const EditParseError& e) {
      throw ResponseParseError(RK::EditParseFailure,
                               std::string("edit JSON rejected: ") + e.what(),
                               text);
    }
    return out;
  }

  // DIRECT_SMILES: reasoning runs to the [SMILES] marker when present,
  // else to the answer fence.
  std::size_t smiles_at = text.find("[SMILES]", reasoning_start);
  std::size_t reasoning_end = smiles_at != std::string::npos
                                  ? smiles_at
                                  : text.find("```", reasoning_start);
  if (reasoning_end == std::string::npos) reasoning_end = text.size();
  out.reasoning = trim(text.substr(reasoning_start,
                                   reasoning_end - reasoning_start));

  auto fence = first_fence(text, "smiles");
  if (fence) {
    std::string candidate = trim(*fence);
    try {
      out.molecule = parse_smiles(candidate);
      return out;
    } catch (const Error&) {
      // fall through to the token scan
    }
  }
  // Fallback: last whitespace-delimited token that parses.
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (it->find("```") != std::string::npos || *it == "[REASONING]" ||
        *it == "[SMILES]") {
      continue;
    }
    try {
      out.molecule = parse_smiles(*it);
      return out;
    } catch (const Error&) {
      continue;
    }
  }
  throw ResponseParseError(RK::SmilesParseFailure,
                           "no parseable SMILES in response", text);
}

}  // namespace editcraft
