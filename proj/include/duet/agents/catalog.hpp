#pragma once

// Platform, task and API definitions the agents draw on. Loaded from
// platforms.json, tasks.json and apis.json so new domains need no code.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duet/error.hpp"

namespace duet {

struct PlatformDefinition {
  std::string id;
  std::string name;
  std::string prompt_description;  // stylistic hints for the service mocker
};

struct TaskDefinition {
  std::string id;
  std::string name;
  std::string description;
  std::string prompt_description;
  std::vector<std::string> supported_platforms;
  std::vector<std::string> keywords;  // goal substrings that select this task
};

struct ApiParam {
  std::string name;
  std::string type;
  std::string description;
  std::vector<std::string> aliases;  // user valueKeys that feed this param
};

struct ApiDefinition {
  std::string api_name;
  std::string description;
  bool fetches_data = false;
  std::vector<ApiParam> params;
  std::vector<std::string> platforms;
  Json data_model = Json::object();  // field -> description

  // Param named `key`, or whose aliases include it.
  const ApiParam* param_for(std::string_view key) const noexcept;
};

class Catalog {
 public:
  Catalog() = default;

  // Throws config_error on missing files, duplicate ids or tasks naming
  // unknown platforms.
  static Catalog load_directory(const std::filesystem::path& dir);
  static Catalog from_json(const Json& platforms, const Json& tasks, const Json& apis);

  const PlatformDefinition* find_platform(std::string_view id) const noexcept;
  const TaskDefinition* find_task(std::string_view id) const noexcept;
  const ApiDefinition* find_api(std::string_view name) const noexcept;
  const ApiDefinition& api(std::string_view name) const;  // throws unknown_api

  // First task whose keywords occur in the goal (case-insensitive), else the
  // first task. Throws config_error when the catalog has no tasks.
  const TaskDefinition& task_for_goal(std::string_view goal) const;

  // API list as shown to the planner: [{api_name, description, params}].
  Json apis_json() const;

  // Platforms to imitate for one call: the payload's "platform" if the task
  // supports it, else the API's platforms the task supports, else all of the
  // task's platforms.
  std::vector<std::string> platforms_for(const ApiDefinition& api, const TaskDefinition& task,
                                         const Json& payload) const;

  const std::vector<PlatformDefinition>& platforms() const noexcept { return platforms_; }
  const std::vector<TaskDefinition>& tasks() const noexcept { return tasks_; }
  const std::vector<ApiDefinition>& apis() const noexcept { return apis_; }

 private:
  std::vector<PlatformDefinition> platforms_;
  std::vector<TaskDefinition> tasks_;
  std::vector<ApiDefinition> apis_;
};

}  // namespace duet
