#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "editcraft/prompting.hpp"

namespace editcraft {

struct ProviderConfig {
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env_var = "EDITCRAFT_API_KEY";
  double temperature = 1.0;
  int timeout_ms = 60'000;
  int max_retries = 3;   // extra completions after the first attempt
  int max_in_flight = 1; // parallel-run concurrency bound
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

class Timeout : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class AuthMissing : public ProviderError {
 public:
  explicit AuthMissing(const std::string& var)
      : ProviderError("API key environment variable '" + var +
                      "' is not set") {}
};

// Completion contract. Implementations must be safe for concurrent calls.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const PromptBundle& bundle,
                               const ProviderConfig& config) = 0;
};

// Replays scripted responses, either in call order or keyed by a hash of
// the prompt text. Exhausting the script raises ProviderError.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::vector<std::string> responses);
  static MockProvider from_jsonl_file(const std::string& path);
  static std::uint64_t prompt_hash(const PromptBundle& bundle);

  // Optional keyed mode: responses served by prompt hash instead of order.
  void key_by_prompt_hash(
      const std::vector<std::pair<std::uint64_t, std::string>>& table);

  std::string complete(const PromptBundle& bundle,
                       const ProviderConfig& config) override;

  std::size_t consumed() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Generic OpenAI-compatible chat-completions endpoint over HTTP(S).
class HttpChatProvider : public Provider {
 public:
  std::string complete(const PromptBundle& bundle,
                       const ProviderConfig& config) override;
};

enum class CandidateStatus { Ok, ParseFailed, ApplyFailed, ProviderFailed };

std::string_view candidate_status_name(CandidateStatus s);
std::optional<CandidateStatus> candidate_status_from_name(std::string_view);

struct CandidateResult {
  CandidateStatus status = CandidateStatus::ProviderFailed;
  std::optional<Molecule> molecule;      // present iff status == Ok
  std::optional<EditSequence> edits;     // EDITS mode, when parsed
  std::string reasoning;
  int attempts = 0;
  std::vector<std::string> transcript;   // raw response per attempt
  std::string error;                     // last failure detail
};

struct OptimizeContext {
  std::vector<Exemplar> shots;
  std::vector<InteractionConstraint> constraints;
  PromptMode mode;
  ApplyPolicy apply_policy;
};

// Prompt -> complete -> parse -> apply -> sanitize, retrying malformed
// completions with the identical prompt up to config.max_retries extra
// attempts. Failures become statuses, never exceptions.
CandidateResult optimize_once(const Molecule& query,
                              const OptimizeContext& context,
                              Provider& provider,
                              const ProviderConfig& config);

// n independent runs; results ordered by run index; concurrency bounded by
// config.max_in_flight.
std::vector<CandidateResult> optimize_parallel(const Molecule& query,
                                               const OptimizeContext& context,
                                               Provider& provider,
                                               const ProviderConfig& config,
                                               int n);

}  // namespace editcraft
