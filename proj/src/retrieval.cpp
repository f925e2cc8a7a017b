#include "editcraft/retrieval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "editcraft/ioutil.hpp"
#include "editcraft/smiles.hpp"

namespace editcraft {

using nlohmann::json;

IndexBuildResult build_index(const std::vector<Exemplar>& exemplars) {
  IndexBuildResult result;
  std::set<std::string> ids;
  for (const Exemplar& ex : exemplars) {
    if (!ids.insert(ex.id).second) throw DuplicateId(ex.id);
    try {
      CliffPair pair;
      pair.source = parse_smiles(ex.source_smiles);
      pair.target = parse_smiles(ex.target_smiles);
      pair.edits = ex.edits;
      if (!verify_pair(pair)) {
        result.rejected.push_back(
            {ex.id, "edits do not transform source into target"});
        continue;
      }
      Fingerprint expect = morgan_fingerprint(pair.source, 2, 2048);
      if (!(expect == ex.fp2048)) {
        result.rejected.push_back(
            {ex.id, "stored fingerprint does not match the source molecule"});
        continue;
      }
    } catch (const Error& e) {
      result.rejected.push_back({ex.id, e.what()});
      continue;
    }
    result.index.entries.push_back(ex);
  }
  return result;
}

std::vector<RetrievalHit> query_top_k(const ExemplarIndex& index,
                                      const Fingerprint& query, int k) {
  if (k < 1) throw BadParameter("k must be >= 1");
  std::vector<std::pair<double, const Exemplar*>> scored;
  scored.reserve(index.entries.size());
  for (const Exemplar& ex : index.entries) {
    scored.push_back({tanimoto(query, ex.fp2048), &ex});
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& x, const auto& y) {
              if (x.first != y.first) return x.first > y.first;
              return x.second->id < y.second->id;
            });
  std::vector<RetrievalHit> out;
  for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k);
       ++i) {
    out.push_back({*scored[i].second, scored[i].first});
  }
  return out;
}

MiningResult mine_cliff_pairs(const std::vector<Molecule>& unsynth,
                              const std::vector<Molecule>& catalog,
                              double sim_threshold,
                              const PairFilter& extra_filter,
                              const SearchBudget& budget) {
  if (!(sim_threshold > 0.0 && sim_threshold <= 1.0)) {
    throw BadParameter("similarity threshold must be in (0,1]");
  }
  std::vector<Fingerprint> catalog_fp;
  catalog_fp.reserve(catalog.size());
  for (const Molecule& m : catalog) {
    catalog_fp.push_back(morgan_fingerprint(m, 2, 2048));
  }

  MiningResult result;
  for (std::size_t qi = 0; qi < unsynth.size(); ++qi) {
    Fingerprint qfp = morgan_fingerprint(unsynth[qi], 2, 2048);
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t ci = 0; ci < catalog.size(); ++ci) {
      double sim = tanimoto(qfp, catalog_fp[ci]);
      if (sim > best) {
        best = sim;
        best_idx = ci;
      }
    }
    if (best < 0) {
      result.skipped.push_back({qi, 0.0, "empty catalog"});
      continue;
    }
    // Strict inequality: a neighbor exactly at the threshold is skipped.
    if (!(best > sim_threshold)) {
      std::ostringstream os;
      os << "best similarity " << best << " not above threshold "
         << sim_threshold;
      result.skipped.push_back({qi, best, os.str()});
      continue;
    }
    if (extra_filter && !extra_filter(unsynth[qi], catalog[best_idx])) {
      result.skipped.push_back({qi, best, "rejected by pair filter"});
      continue;
    }
    CliffPair pair;
    pair.source = unsynth[qi];
    pair.target = catalog[best_idx];
    pair.similarity = best;
    try {
      pair.edits = extract_edits(pair.source, pair.target, budget);
    } catch (const Error& e) {
      result.skipped.push_back(
          {qi, best, std::string("edit extraction failed: ") + e.what()});
      continue;
    }
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

namespace {

std::string require_string(const json& obj, const char* field,
                           std::size_t line) {
  if (!obj.contains(field)) {
    throw SchemaError("missing field", line, field);
  }
  if (!obj[field].is_string()) {
    throw SchemaError("field must be a string", line, field);
  }
  return obj[field].get<std::string>();
}

}  // namespace

std::vector<Exemplar> parse_exemplar_jsonl(const std::string& content) {
  std::vector<Exemplar> out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno, "");
    }
    if (!obj.is_object()) {
      throw SchemaError("line must be a JSON object", lineno, "");
    }
    Exemplar ex;
    ex.id = require_string(obj, "id", lineno);
    ex.source_smiles = require_string(obj, "source_smiles", lineno);
    ex.target_smiles = require_string(obj, "target_smiles", lineno);
    ex.rationale = require_string(obj, "rationale", lineno);
    if (!obj.contains("edits")) {
      throw SchemaError("missing field", lineno, "edits");
    }
    try {
      ex.edits = parse_edit_json(obj["edits"].dump());
    } catch (const EditParseError& e) {
      throw SchemaError(std::string("bad edit sequence: ") + e.what(), lineno,
                        "edits");
    }
    std::string hex = require_string(obj, "fp2048", lineno);
    try {
      ex.fp2048 = Fingerprint::from_hex(hex, 2);
    } catch (const BadParameter& e) {
      throw SchemaError(e.what(), lineno, "fp2048");
    }
    if (ex.fp2048.length != 2048) {
      throw SchemaError("fingerprint must be 2048 bits", lineno, "fp2048");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string render_exemplar_jsonl(const std::vector<Exemplar>& exemplars) {
  std::ostringstream os;
  for (const Exemplar& ex : exemplars) {
    json obj;
    obj["id"] = ex.id;
    obj["source_smiles"] = ex.source_smiles;
    obj["target_smiles"] = ex.target_smiles;
    obj["edits"] = json::parse(serialize_edits(ex.edits));
    obj["rationale"] = ex.rationale;
    obj["fp2048"] = ex.fp2048.to_hex();
    os << obj.dump() << "\n";
  }
  return os.str();
}

std::vector<Exemplar> load_exemplars(const std::string& path) {
  return parse_exemplar_jsonl(read_file(path));
}

void save_exemplars(const std::vector<Exemplar>& exemplars,
                    const std::string& path) {
  write_file_atomic(path, render_exemplar_jsonl(exemplars));
}

Exemplar make_exemplar(const std::string& id, const CliffPair& pair,
                       const std::string& rationale) {
  Exemplar ex;
  ex.id = id;
  SmilesOptions mapped;
  mapped.include_atom_maps = true;
  mapped.canonical = true;
  ex.source_smiles = write_smiles(pair.source, mapped);
  ex.target_smiles = write_smiles(pair.target, mapped);
  ex.edits = pair.edits;
  ex.rationale = rationale;
  ex.fp2048 = morgan_fingerprint(pair.source, 2, 2048);
  return ex;
}

}  // namespace editcraft
