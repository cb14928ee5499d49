#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "duet/llm/templates.hpp"

namespace duet {

struct DecodeParams {
  double temperature = 0.0;
  std::int64_t seed = 0;
  std::chrono::milliseconds timeout{30'000};
};

// Everything a provider may key on. Remote providers only look at `prompt`;
// the scripted provider looks up fixtures by template and bindings.
struct CompletionRequest {
  TemplateId template_id;
  const Bindings* bindings = nullptr;
  std::string prompt;
  int attempt = 1;
  DecodeParams params;
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string name() const = 0;
  // Identical requests yield identical text. Deterministic providers also
  // skip retry backoff.
  virtual bool deterministic() const = 0;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// ---- scripted ----------------------------------------------------------------

struct FixtureEntry {
  TemplateId template_id;
  std::optional<std::string> fingerprint;
  // slot -> substring that the bound text must contain
  std::map<std::string, std::string> match;
  std::vector<std::string> responses;
  std::string source;  // file name, for diagnostics
};

// Replays canned responses. Lookup order for a request: an entry whose
// fingerprint equals the bindings fingerprint, then the first entry whose
// `match` substrings all occur in the bound slots, then the first entry with
// neither (the template's wildcard). Each entry keeps its own cursor; once
// its responses run out the last one repeats.
//
// Fixture file format:
//   {"fixtures": [{"template": "navigation_gen", "fingerprint": "...",
//                  "match": {"slot": "substring"}, "responses": [ ... ]}]}
// A response is either a string (sent as-is) or any JSON value (sent as its
// compact dump).
class ScriptedProvider final : public CompletionProvider {
 public:
  struct Call {
    TemplateId template_id;
    std::string fingerprint;
    std::size_t entry;
    std::size_t response;
  };

  ScriptedProvider() = default;

  static std::shared_ptr<ScriptedProvider> from_json(const Json& doc, const std::string& source = "");
  // Merges every *.json file in `dir`, in sorted file-name order.
  static std::shared_ptr<ScriptedProvider> from_directory(const std::filesystem::path& dir);

  void add(FixtureEntry entry);
  void add_all(const Json& doc, const std::string& source = "");

  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::string complete(const CompletionRequest& request) override;

  std::vector<Call> calls() const;
  std::size_t entry_count() const;
  void rewind();  // resets every cursor and the call log

 private:
  mutable std::mutex mutex_;
  std::vector<FixtureEntry> entries_;
  std::vector<std::size_t> cursors_;
  std::vector<Call> calls_;
};

// ---- remote --------------------------------------------------------------------

struct RemoteConfig {
  std::string url;  // full chat-completions endpoint
  std::string model;
  std::string token;  // bearer; empty means no Authorization header
  std::chrono::milliseconds timeout{30'000};
};

// Generic chat-completion HTTP contract: POST {model, messages, temperature,
// seed} and read choices[0].message.content.
class RemoteProvider final : public CompletionProvider {
 public:
  explicit RemoteProvider(RemoteConfig config);

  std::string name() const override { return "remote:" + config_.model; }
  bool deterministic() const override { return false; }
  std::string complete(const CompletionRequest& request) override;

 private:
  RemoteConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace duet
