#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numgeo/error.hpp"
#include "numgeo/stimuli.hpp"

namespace numgeo {

namespace detail {
extern const std::string_view kBuiltinTemplatesJson;
}

TemplateSet::TemplateSet(std::map<TaskId, std::vector<std::string>> templates) : templates_(std::move(templates)) {
  for (const auto& [task, list] : templates_) {
    if (!is_template_task(task)) {
      throw Error(Errc::template_inconsistency, std::string(to_string(task)) + " cannot have templates");
    }
    if (list.size() != kTemplatesPerTask) {
      throw Error(Errc::template_inconsistency, std::string(to_string(task)) + " has " + std::to_string(list.size()) +
                                                    " templates, expected " + std::to_string(kTemplatesPerTask));
    }
  }
}

TemplateSet TemplateSet::builtin() { return from_json(detail::kBuiltinTemplatesJson); }

TemplateSet TemplateSet::from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::template_inconsistency, std::string("template file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::template_inconsistency, "template file must hold a JSON object");

  std::map<TaskId, std::vector<std::string>> templates;
  int version = 1;
  for (const auto& [key, value] : j.items()) {
    if (key == "version") {
      version = value.get<int>();
      continue;
    }
    auto task = try_parse_task(key);
    if (!task) throw Error(Errc::template_inconsistency, "unknown task '" + key + "' in template file");
    if (!value.is_array()) throw Error(Errc::template_inconsistency, "templates for " + key + " must be a list");
    auto& list = templates[*task];
    for (const auto& entry : value) {
      if (!entry.is_string()) throw Error(Errc::template_inconsistency, "templates for " + key + " must be strings");
      list.push_back(entry.get<std::string>());
    }
  }
  TemplateSet set(std::move(templates));
  set.version_ = version;
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open template file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string TemplateSet::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = version_;
  for (auto task : kTemplateTasks) {
    if (auto it = templates_.find(task); it != templates_.end()) j[std::string(to_string(task))] = it->second;
  }
  return j.dump(2);
}

const std::vector<std::string>& TemplateSet::for_task(TaskId task) const {
  auto it = templates_.find(task);
  if (it == templates_.end()) {
    throw Error(Errc::template_inconsistency, "no templates for task " + std::string(to_string(task)));
  }
  return it->second;
}

}  // namespace numgeo
