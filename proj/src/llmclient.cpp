#include "editcraft/llmclient.hpp"

#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "editcraft/ioutil.hpp"

namespace editcraft {

using nlohmann::json;

struct MockProvider::Impl {
  std::vector<std::string> responses;
  std::map<std::uint64_t, std::vector<std::string>> keyed;
  bool use_keys = false;
  std::size_t next = 0;
  std::mutex mu;
};

MockProvider::MockProvider(std::vector<std::string> responses)
    : impl_(std::make_shared<Impl>()) {
  impl_->responses = std::move(responses);
}

MockProvider MockProvider::from_jsonl_file(const std::string& path) {
  std::vector<std::string> responses;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), lineno, "");
    }
    if (!doc.is_string()) {
      throw SchemaError("mock script lines must be JSON strings", lineno, "");
    }
    responses.push_back(doc.get<std::string>());
  }
  return MockProvider(std::move(responses));
}

std::uint64_t MockProvider::prompt_hash(const PromptBundle& bundle) {
  // FNV-1a over system + NUL + user.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(bundle.system);
  h ^= 0;
  h *= 0x100000001b3ULL;
  feed(bundle.user);
  return h;
}

void MockProvider::key_by_prompt_hash(
    const std::vector<std::pair<std::uint64_t, std::string>>& table) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->use_keys = true;
  for (const auto& [k, v] : table) impl_->keyed[k].push_back(v);
}

std::string MockProvider::complete(const PromptBundle& bundle,
                                   const ProviderConfig&) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  if (impl_->use_keys) {
    auto it = impl_->keyed.find(prompt_hash(bundle));
    if (it == impl_->keyed.end() || it->second.empty()) {
      throw ProviderError("mock script has no response for this prompt");
    }
    std::string out = it->second.front();
    it->second.erase(it->second.begin());
    return out;
  }
  if (impl_->next >= impl_->responses.size()) {
    throw ProviderError("mock script exhausted after " +
                        std::to_string(impl_->responses.size()) +
                        " responses");
  }
  return impl_->responses[impl_->next++];
}

std::size_t MockProvider::consumed() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->next;
}

std::string HttpChatProvider::complete(const PromptBundle& bundle,
                                       const ProviderConfig& config) {
  if (config.endpoint_url.empty()) {
    throw ProviderError("no endpoint URL configured");
  }
  const char* key = nullptr;
  if (!config.api_key_env_var.empty()) {
    key = std::getenv(config.api_key_env_var.c_str());
    if (!key || !*key) throw AuthMissing(config.api_key_env_var);
  }

  // Split scheme://host[:port] from the path prefix.
  std::string url = config.endpoint_url;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("endpoint URL needs a scheme: " + url);
  }
  std::size_t host_start = scheme_end + 3;
  std::size_t path_start = url.find('/', host_start);
  std::string base =
      path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string prefix =
      path_start == std::string::npos ? "" : url.substr(path_start);
  if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  json body;
  body["model"] = config.model_name;
  body["temperature"] = config.temperature;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", bundle.system}},
      json{{"role", "user"}, {"content", bundle.user}},
  });

  httplib::Client client(base);
  client.set_connection_timeout(config.timeout_ms / 1000,
                                (config.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config.timeout_ms / 1000,
                          (config.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (key) headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write) {
      throw Timeout("request timed out or connection dropped");
    }
    throw ProviderError("transport error: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw ProviderError("HTTP " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 512));
  }
  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::parse_error&) {
    throw ProviderError("response is not valid JSON");
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw ProviderError("response has no choices");
  }
  const auto& msg = doc["choices"][0];
  if (msg.contains("message") && msg["message"].contains("content")) {
    return msg["message"]["content"].get<std::string>();
  }
  if (msg.contains("text")) return msg["text"].get<std::string>();
  throw ProviderError("response has no message content");
}

std::string_view candidate_status_name(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Ok: return "OK";
    case CandidateStatus::ParseFailed: return "PARSE_FAILED";
    case CandidateStatus::ApplyFailed: return "APPLY_FAILED";
    case CandidateStatus::ProviderFailed: return "PROVIDER_ERROR";
  }
  return "?";
}

std::optional<CandidateStatus> candidate_status_from_name(
    std::string_view name) {
  if (name == "OK") return CandidateStatus::Ok;
  if (name == "PARSE_FAILED") return CandidateStatus::ParseFailed;
  if (name == "APPLY_FAILED") return CandidateStatus::ApplyFailed;
  if (name == "PROVIDER_ERROR") return CandidateStatus::ProviderFailed;
  return std::nullopt;
}

CandidateResult optimize_once(const Molecule& query,
                              const OptimizeContext& context,
                              Provider& provider,
                              const ProviderConfig& config) {
  CandidateResult result;
  PromptBundle bundle;
  try {
    bundle = assemble_prompt(query, context.shots, context.constraints,
                             context.mode);
  } catch (const Error& e) {
    result.status = CandidateStatus::ProviderFailed;
    result.error = std::string("prompt assembly failed: ") + e.what();
    return result;
  }

  int max_attempts = 1 + std::max(0, config.max_retries);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    std::string raw;
    try {
      raw = provider.complete(bundle, config);
    } catch (const Error& e) {
      result.status = CandidateStatus::ProviderFailed;
      result.error = e.what();
      return result;
    }
    result.transcript.push_back(raw);

    ModelResponse parsed;
    try {
      parsed = parse_model_response(raw, context.mode);
    } catch (const ResponseParseError& e) {
      result.status = CandidateStatus::ParseFailed;
      result.error = e.what();
      continue;  // fresh completion, identical prompt
    }
    result.reasoning = parsed.reasoning;

    if (context.mode.output_kind == OutputKind::Edits) {
      result.edits = parsed.edits;
      try {
        result.molecule = apply_edits(query, parsed.edits,
                                      context.apply_policy);
      } catch (const Error& e) {
        result.status = CandidateStatus::ApplyFailed;
        result.error = e.what();
        result.molecule.reset();
        continue;
      }
    } else {
      result.molecule = parsed.molecule;
    }
    result.status = CandidateStatus::Ok;
    result.error.clear();
    return result;
  }
  return result;
}

std::vector<CandidateResult> optimize_parallel(const Molecule& query,
                                               const OptimizeContext& context,
                                               Provider& provider,
                                               const ProviderConfig& config,
                                               int n) {
  if (n < 1) throw BadParameter("optimize_parallel needs n >= 1");
  std::vector<CandidateResult> results(n);
  int limit = std::max(1, config.max_in_flight);
  if (limit == 1) {
    for (int i = 0; i < n; ++i) {
      results[i] = optimize_once(query, context, provider, config);
    }
    return results;
  }

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      results[i] = optimize_once(query, context, provider, config);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(limit, n); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace editcraft
