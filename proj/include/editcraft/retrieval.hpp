#pragma once

#include <functional>
#include <string>
#include <vector>

#include "editcraft/editextract.hpp"
#include "editcraft/fingerprint.hpp"

namespace editcraft {

// Knowledge-base entry: a verified cliff pair with its retrieval
// fingerprint (Morgan radius 2, 2048 bits over the source).
struct Exemplar {
  std::string id;
  std::string source_smiles;
  std::string target_smiles;
  EditSequence edits;
  std::string rationale;
  Fingerprint fp2048;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate exemplar id '" + id + "'") {}
};

struct ExemplarIndex {
  std::vector<Exemplar> entries;

  std::size_t size() const { return entries.size(); }
};

struct RejectedExemplar {
  std::string id;
  std::string reason;
};

struct IndexBuildResult {
  ExemplarIndex index;
  std::vector<RejectedExemplar> rejected;
};

// Validate entries (parsable molecules, verify_pair holds, fingerprint
// matches the source) and build the linear-scan index. Invalid entries are
// rejected with reasons; duplicate ids throw.
IndexBuildResult build_index(const std::vector<Exemplar>& exemplars);

struct RetrievalHit {
  Exemplar exemplar;
  double similarity = 0.0;
};

// Top-k nearest exemplars by Tanimoto over fp2048, descending; ties break
// by ascending id. Returns min(k, index size) hits.
std::vector<RetrievalHit> query_top_k(const ExemplarIndex& index,
                                      const Fingerprint& query, int k);

struct MiningSkip {
  std::size_t query_index = 0;
  double best_similarity = 0.0;
  std::string reason;
};

struct MiningResult {
  std::vector<CliffPair> pairs;
  std::vector<MiningSkip> skipped;
};

// Extra acceptance predicate for mined pairs (e.g. a pharmacophore-style
// co-filter); nullptr accepts everything.
using PairFilter = std::function<bool(const Molecule&, const Molecule&)>;

// For each query, find its nearest catalog neighbor by radius-2/2048
// Tanimoto and emit a verified cliff pair when similarity exceeds the
// threshold strictly. Queries without a qualifying neighbor are skipped
// with a log record.
MiningResult mine_cliff_pairs(const std::vector<Molecule>& unsynth,
                              const std::vector<Molecule>& catalog,
                              double sim_threshold,
                              const PairFilter& extra_filter = nullptr,
                              const SearchBudget& budget = {});

// JSONL store: one exemplar object per line with fields id, source_smiles,
// target_smiles, edits (wire form), rationale, fp2048 (hex).
std::vector<Exemplar> load_exemplars(const std::string& path);
void save_exemplars(const std::vector<Exemplar>& exemplars,
                    const std::string& path);
std::vector<Exemplar> parse_exemplar_jsonl(const std::string& content);
std::string render_exemplar_jsonl(const std::vector<Exemplar>& exemplars);

// Build an exemplar record from a verified pair.
Exemplar make_exemplar(const std::string& id, const CliffPair& pair,
                       const std::string& rationale);

}  // namespace editcraft
