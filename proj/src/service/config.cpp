#include "duet/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace duet {

namespace {

namespace pt = boost::property_tree;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

// The ptree default-value overload swallows conversion failures, so look the
// key up first and convert separately.
template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  if (!tree.get_optional<std::string>(key)) return fallback;
  auto value = tree.get_optional<T>(key);
  if (!value) throw Error(ErrorCode::config_error, "config key '" + key + "' has a bad value");
  return *value;
}

}  // namespace

ServiceConfig ServiceConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::config_error, std::string("config: ") + e.what());
  }

  ServiceConfig c;
  c.provider = get<std::string>(tree, "provider", c.provider);
  if (c.provider != "scripted" && c.provider != "remote") {
    throw Error(ErrorCode::config_error, "unknown provider '" + c.provider + "'");
  }
  c.fixtures = resolve(base_dir, get<std::string>(tree, "fixtures", ""));

  c.remote.url = get<std::string>(tree, "remote.url", "");
  c.remote.model = get<std::string>(tree, "remote.model", "");
  c.remote.timeout = std::chrono::milliseconds(get<std::int64_t>(tree, "remote.timeout_ms", 30'000));
  if (const char* token = std::getenv("DUET_LLM_TOKEN")) c.remote.token = token;
  if (c.provider == "remote" && (c.remote.url.empty() || c.remote.model.empty())) {
    throw Error(ErrorCode::config_error, "remote provider needs remote.url and remote.model");
  }

  c.gateway.max_attempts = get<int>(tree, "gateway.max_attempts", c.gateway.max_attempts);
  c.gateway.per_attempt_timeout =
      std::chrono::milliseconds(get<std::int64_t>(tree, "gateway.per_attempt_timeout_ms", 30'000));
  c.gateway.repair_enabled = get<bool>(tree, "gateway.repair", true);
  if (c.gateway.max_attempts < 1) throw Error(ErrorCode::config_error, "gateway.max_attempts must be >= 1");

  c.host = get<std::string>(tree, "server.host", c.host);
  c.port = get<int>(tree, "server.port", c.port);
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::config_error, "server.port out of range");
  c.data_dir = resolve(base_dir, get<std::string>(tree, "server.data_dir", ""));
  c.catalog_dir = resolve(base_dir, get<std::string>(tree, "catalog.dir", "catalog"));

  const auto workers = get<int>(tree, "orchestrator.workers", 4);
  if (workers < 1) throw Error(ErrorCode::config_error, "orchestrator.workers must be >= 1");
  c.orchestrator.workers = static_cast<std::size_t>(workers);
  c.orchestrator.quiesce_timeout =
      std::chrono::milliseconds(get<std::int64_t>(tree, "orchestrator.quiesce_timeout_ms", 60'000));
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.parent_path());
}

std::shared_ptr<CompletionProvider> make_provider(const ServiceConfig& config) {
  if (config.provider == "remote") return std::make_shared<RemoteProvider>(config.remote);
  if (config.fixtures.empty()) {
    throw Error(ErrorCode::config_error, "scripted provider needs 'fixtures'");
  }
  return ScriptedProvider::from_directory(config.fixtures);
}

}  // namespace duet
