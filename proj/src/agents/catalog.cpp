#include "duet/agents/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace duet {

namespace {

[[noreturn]] void bad_catalog(const std::string& what) {
  throw Error(ErrorCode::config_error, "catalog: " + what);
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad_catalog("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc = Json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) bad_catalog(path.filename().string() + " is not valid JSON");
  return doc;
}

const Json& list_in(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
    bad_catalog(std::string("expected {\"") + key + "\": [...]}");
  }
  return doc[key];
}

std::string required_string(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string() ||
      j[key].get<std::string>().empty()) {
    bad_catalog(where + ": missing string '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::vector<std::string> strings(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) bad_catalog(std::string("'") + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) bad_catalog(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains(const std::vector<std::string>& v, std::string_view x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

const ApiParam* ApiDefinition::param_for(std::string_view key) const noexcept {
  for (const auto& p : params) {
    if (p.name == key) return &p;
  }
  for (const auto& p : params) {
    if (contains(p.aliases, key)) return &p;
  }
  return nullptr;
}

Catalog Catalog::load_directory(const std::filesystem::path& dir) {
  return from_json(read_file(dir / "platforms.json"), read_file(dir / "tasks.json"),
                   read_file(dir / "apis.json"));
}

Catalog Catalog::from_json(const Json& platforms, const Json& tasks, const Json& apis) {
  Catalog c;
  std::set<std::string> seen;
  for (const auto& p : list_in(platforms, "platforms")) {
    PlatformDefinition def{required_string(p, "id", "platform"),
                           required_string(p, "name", "platform"),
                           p.value("prompt_description", "")};
    if (!seen.insert(def.id).second) bad_catalog("duplicate platform '" + def.id + "'");
    c.platforms_.push_back(std::move(def));
  }

  seen.clear();
  for (const auto& t : list_in(tasks, "tasks")) {
    TaskDefinition def;
    def.id = required_string(t, "id", "task");
    def.name = required_string(t, "name", "task " + def.id);
    def.description = t.value("description", "");
    def.prompt_description = t.value("prompt_description", "");
    def.supported_platforms = strings(t, "supported_platforms");
    def.keywords = strings(t, "keywords");
    for (const auto& p : def.supported_platforms) {
      if (!c.find_platform(p)) bad_catalog("task '" + def.id + "' names unknown platform '" + p + "'");
    }
    if (!seen.insert(def.id).second) bad_catalog("duplicate task '" + def.id + "'");
    c.tasks_.push_back(std::move(def));
  }

  seen.clear();
  for (const auto& a : list_in(apis, "apis")) {
    ApiDefinition def;
    def.api_name = required_string(a, "api_name", "api");
    def.description = a.value("description", "");
    def.fetches_data = a.value("fetches_data", false);
    def.platforms = strings(a, "platforms");
    if (a.contains("data_model")) {
      if (!a["data_model"].is_object()) bad_catalog(def.api_name + ": data_model must be an object");
      def.data_model = a["data_model"];
    }
    if (a.contains("params")) {
      if (!a["params"].is_array()) bad_catalog(def.api_name + ": params must be an array");
      for (const auto& p : a["params"]) {
        ApiParam param;
        param.name = required_string(p, "name", def.api_name + " param");
        param.type = p.value("type", "string");
        param.description = p.value("description", "");
        param.aliases = strings(p, "aliases");
        def.params.push_back(std::move(param));
      }
    }
    for (const auto& p : def.platforms) {
      if (!c.find_platform(p)) bad_catalog("api '" + def.api_name + "' names unknown platform '" + p + "'");
    }
    if (!seen.insert(def.api_name).second) bad_catalog("duplicate api '" + def.api_name + "'");
    c.apis_.push_back(std::move(def));
  }
  return c;
}

const PlatformDefinition* Catalog::find_platform(std::string_view id) const noexcept {
  for (const auto& p : platforms_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const TaskDefinition* Catalog::find_task(std::string_view id) const noexcept {
  for (const auto& t : tasks_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const ApiDefinition* Catalog::find_api(std::string_view name) const noexcept {
  for (const auto& a : apis_) {
    if (a.api_name == name) return &a;
  }
  return nullptr;
}

const ApiDefinition& Catalog::api(std::string_view name) const {
  if (const auto* a = find_api(name)) return *a;
  throw Error(ErrorCode::unknown_api, "no api named '" + std::string(name) + "'",
              Json{{"api_name", std::string(name)}});
}

const TaskDefinition& Catalog::task_for_goal(std::string_view goal) const {
  if (tasks_.empty()) bad_catalog("no tasks defined");
  const std::string text = lower(goal);
  for (const auto& t : tasks_) {
    for (const auto& k : t.keywords) {
      if (!k.empty() && text.find(lower(k)) != std::string::npos) return t;
    }
  }
  return tasks_.front();
}

Json Catalog::apis_json() const {
  Json out = Json::array();
  for (const auto& a : apis_) {
    Json params = Json::array();
    for (const auto& p : a.params) {
      params.push_back(Json{{"name", p.name}, {"type", p.type}, {"description", p.description}});
    }
    out.push_back(Json{{"api_name", a.api_name}, {"description", a.description}, {"params", params}});
  }
  return out;
}

std::vector<std::string> Catalog::platforms_for(const ApiDefinition& api,
                                                const TaskDefinition& task,
                                                const Json& payload) const {
  if (payload.is_object() && payload.contains("platform") && payload["platform"].is_string()) {
    const auto wanted = payload["platform"].get<std::string>();
    if (contains(task.supported_platforms, wanted)) return {wanted};
  }
  std::vector<std::string> out;
  for (const auto& p : api.platforms) {
    if (contains(task.supported_platforms, p)) out.push_back(p);
  }
  if (out.empty()) out = task.supported_platforms;
  return out;
}

}  // namespace duet
