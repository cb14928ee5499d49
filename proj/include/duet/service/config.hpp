#pragma once

// Service configuration, an INI file:
//
//   provider = scripted            ; or remote
//   fixtures = fixtures/barcelona  ; scripted only
//
//   [remote]
//   url = https://host/v1/chat/completions
//   model = some-model
//   timeout_ms = 30000
//
//   [gateway]
//   max_attempts = 3
//   per_attempt_timeout_ms = 30000
//   repair = true
//
//   [server]
//   host = 127.0.0.1
//   port = 8080
//   data_dir = data        ; empty disables persistence
//
//   [catalog]
//   dir = catalog
//
//   [orchestrator]
//   workers = 4
//   quiesce_timeout_ms = 60000
//
// Relative paths resolve against the config file's directory. The remote
// bearer token comes from the DUET_LLM_TOKEN environment variable only.

#include <filesystem>
#include <memory>
#include <string>

#include "duet/llm/gateway.hpp"
#include "duet/llm/provider.hpp"
#include "duet/loop/orchestrator.hpp"

namespace duet {

struct ServiceConfig {
  std::string provider = "scripted";
  std::filesystem::path fixtures;
  RemoteConfig remote;
  GatewayBudget gateway;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  std::filesystem::path catalog_dir = "catalog";
  OrchestratorOptions orchestrator;

  // Throws config_error for unreadable files, bad values or unknown providers.
  static ServiceConfig load(const std::filesystem::path& file);
  static ServiceConfig parse(const std::string& text, const std::filesystem::path& base_dir = {});
};

// Builds the configured provider. Throws config_error.
std::shared_ptr<CompletionProvider> make_provider(const ServiceConfig& config);

}  // namespace duet
