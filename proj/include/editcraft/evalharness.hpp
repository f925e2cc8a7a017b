#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "editcraft/llmclient.hpp"

namespace editcraft {

class EmptyRecordSet : public Error {
 public:
  EmptyRecordSet() : Error("no evaluation records") {}
};

// Pluggable stand-in for retrosynthesis software.
class SynthesizabilityOracle {
 public:
  virtual ~SynthesizabilityOracle() = default;
  virtual bool is_synthesizable(const Molecule& mol) = 0;
  virtual std::string name() const = 0;
  // Oracles that shell out per molecule are serialized by callers.
  virtual bool concurrent_safe() const { return true; }
};

class AlwaysTrueOracle : public SynthesizabilityOracle {
 public:
  bool is_synthesizable(const Molecule&) override { return true; }
  std::string name() const override { return "always-true"; }
};

class AlwaysFalseOracle : public SynthesizabilityOracle {
 public:
  bool is_synthesizable(const Molecule&) override { return false; }
  std::string name() const override { return "always-false"; }
};

// Canonical-form lookup in a fixed compound list.
class SetMembershipOracle : public SynthesizabilityOracle {
 public:
  explicit SetMembershipOracle(const std::vector<std::string>& smiles_list);
  static SetMembershipOracle from_file(const std::string& path);

  bool is_synthesizable(const Molecule& mol) override;
  std::string name() const override { return "set-membership"; }
  std::size_t size() const { return members_.size(); }

 private:
  std::unordered_set<std::string> members_;
};

// Invokes `command` (via /bin/sh) per molecule: SMILES on stdin, "1"/"0"
// on stdout; a timeout counts as not synthesizable.
class ExternalCommandOracle : public SynthesizabilityOracle {
 public:
  ExternalCommandOracle(std::string command, int timeout_ms = 30 * 60 * 1000);

  bool is_synthesizable(const Molecule& mol) override;
  std::string name() const override { return "cmd:" + command_; }
  bool concurrent_safe() const override { return false; }

 private:
  std::string command_;
  int timeout_ms_;
};

struct EvalRecord {
  std::string input_id;
  bool solved = false;
  std::optional<double> best_similarity;  // present iff solved
};

// Filter candidates to OK + oracle-positive and keep the best ECFP
// (radius 2, 4096 bits) Tanimoto similarity to the input.
EvalRecord score_candidates(const Molecule& input, const std::string& input_id,
                            const std::vector<CandidateResult>& candidates,
                            SynthesizabilityOracle& oracle);

struct SuccessTable {
  std::vector<double> thresholds;
  std::vector<double> rates;  // rate(t) = |solved && best > t| / n
  double total_solved = 0.0;
  std::size_t n = 0;

  bool operator==(const SuccessTable&) const = default;
};

inline const std::vector<double> kDefaultThresholds = {0.5, 0.6, 0.7, 0.8,
                                                       0.9};

// Per-threshold success rates with strict '>' comparisons.
SuccessTable success_table(const std::vector<EvalRecord>& records,
                           const std::vector<double>& thresholds =
                               kDefaultThresholds);

struct ReportText {
  std::string pretty;  // aligned table, percentages to 2 decimals
  std::string tsv;     // machine-readable, full-precision rates
};

ReportText render_report(const SuccessTable& table, const std::string& label);

struct ParsedReport {
  std::string label;
  SuccessTable table;
};

// Inverse of render_report's TSV form.
ParsedReport parse_report_tsv(const std::string& tsv);

}  // namespace editcraft
