// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/service/schema.hpp"

#include <fstream>

#include "railgate/errors.hpp"

namespace railgate::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool has_type(const json& doc, const std::string& type) {
  if (type == "null") return doc.is_null();
  if (type == "boolean") return doc.is_boolean();
  if (type == "integer") return doc.is_number_integer();
  if (type == "number") return doc.is_number();
  if (type == "string") return doc.is_string();
  if (type == "array") return doc.is_array();
  if (type == "object") return doc.is_object();
  throw ConfigError("schema uses unsupported type '" + type + "'");
}

struct Validator {
  const std::map<std::string, json>& schemas;
  std::vector<std::string>& errors;

  void fail(const std::string& path, const std::string& message) const {
    errors.push_back((path.empty() ? "/" : path) + ": " + message);
  }

  const json& resolve(const json& root, const std::string& ref, const json** new_root) const {
    if (ref.rfind("#/definitions/", 0) == 0) {
      *new_root = &root;
      return root.at("definitions").at(ref.substr(14));
    }
    auto it = schemas.find(ref);
    if (it == schemas.end()) throw ConfigError("unresolved schema reference '" + ref + "'");
    *new_root = &it->second;
    return it->second;
  }

  void check(const json& root, const json& schema, const json& doc, const std::string& path) const {
    if (schema.contains("$ref")) {
      const json* next_root = nullptr;
      const json& target = resolve(root, schema["$ref"].get<std::string>(), &next_root);
      check(*next_root, target, doc, path);
      return;
    }
    if (schema.contains("type")) {
      const json& t = schema["type"];
      bool ok = false;
      if (t.is_string()) {
        ok = has_type(doc, t);
      } else {
        for (const auto& name : t) ok = ok || has_type(doc, name);
      }
      if (!ok) {
        fail(path, "expected type " + t.dump() + ", got " + doc.type_name());
        return;
      }
    }
    if (schema.contains("const") && doc != schema["const"]) fail(path, "expected " + schema["const"].dump());
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& v : schema["enum"]) found = found || v == doc;
      if (!found) fail(path, "value " + doc.dump() + " not in " + schema["enum"].dump());
    }
    if (doc.is_number()) {
      if (schema.contains("minimum") && doc.get<double>() < schema["minimum"].get<double>()) fail(path, "below minimum");
      if (schema.contains("maximum") && doc.get<double>() > schema["maximum"].get<double>()) fail(path, "above maximum");
    }
    if (doc.is_string() && schema.contains("minLength") &&
        doc.get<std::string>().size() < schema["minLength"].get<size_t>()) {
      fail(path, "string shorter than " + schema["minLength"].dump());
    }
    if (doc.is_array()) {
      if (schema.contains("minItems") && doc.size() < schema["minItems"].get<size_t>()) fail(path, "too few items");
      if (schema.contains("items")) {
        for (size_t i = 0; i < doc.size(); ++i) check(root, schema["items"], doc[i], path + "/" + std::to_string(i));
      }
    }
    if (doc.is_object()) {
      if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
          if (!doc.contains(key.get<std::string>())) fail(path, "missing required property '" + key.get<std::string>() + "'");
        }
      }
      const json empty = json::object();
      const json& props = schema.contains("properties") ? schema["properties"] : empty;
      for (const auto& [key, value] : doc.items()) {
        const std::string sub = path + "/" + key;
        if (props.contains(key)) {
          check(root, props[key], value, sub);
        } else if (schema.contains("additionalProperties")) {
          const json& extra = schema["additionalProperties"];
          if (extra.is_boolean()) {
            if (!extra.get<bool>()) fail(sub, "unexpected property");
          } else {
            check(root, extra, value, sub);
          }
        }
      }
    }
    if (schema.contains("oneOf")) {
      int matches = 0;
      for (const auto& option : schema["oneOf"]) {
        std::vector<std::string> sub_errors;
        Validator{schemas, sub_errors}.check(root, option, doc, path);
        if (sub_errors.empty()) ++matches;
      }
      if (matches != 1) fail(path, "matches " + std::to_string(matches) + " of the oneOf alternatives");
    }
  }
};

}  // namespace

SchemaSet::SchemaSet(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + ": schema directory not found");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    try {
      schemas_[entry.path().filename().string()] = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(entry.path().string() + ": " + e.what());
    }
  }
}

std::vector<std::string> SchemaSet::validate(const std::string& schema_file, const json& doc) const {
  auto it = schemas_.find(schema_file);
  if (it == schemas_.end()) throw ConfigError("unknown schema '" + schema_file + "'");
  std::vector<std::string> errors;
  Validator{schemas_, errors}.check(it->second, it->second, doc, "");
  return errors;
}

}  // namespace railgate::service
