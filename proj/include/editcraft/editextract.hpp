#pragma once

#include <utility>
#include <vector>

#include "editcraft/edits.hpp"
#include "editcraft/molecule.hpp"

namespace editcraft {

struct SearchBudget {
  long max_expansions = 200'000;
};

// Partial injective map between source and target atoms. Score rewards
// matched atoms (1 each) and penalizes element mismatches (0.5) and
// kekule-order mismatches on matched bonds (0.25).
struct AtomMapping {
  std::vector<std::pair<int, int>> pairs;  // (src map, tgt map)
  double score = 0.0;
  bool optimal = true;  // false when the expansion budget ran out
};

struct CliffPair {
  Molecule source;
  Molecule target;
  EditSequence edits;
  double similarity = 0.0;
};

class ExtractionFailed : public Error {
 public:
  using Error::Error;
};

// Best connected common-subgraph mapping found within the budget.
// Deterministic: equal-score mappings are tie-broken by the
// lexicographically smallest pair list under canonical ranks.
AtomMapping max_common_substructure(const Molecule& src, const Molecule& tgt,
                                    const SearchBudget& budget = {});

// Ground-truth edit sequence turning src into (an isomorph of) tgt,
// emitted in fixed order: mutations, bond-order changes, deletions
// (bonds then atoms), additions (atoms then bonds), stereo, STOP.
// The result is verified by re-application before it is returned.
EditSequence extract_edits(const Molecule& src, const Molecule& tgt,
                           const SearchBudget& budget = {});

// True iff applying pair.edits to pair.source yields pair.target
// (executor errors count as false).
bool verify_pair(const CliffPair& pair);

}  // namespace editcraft
