// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

// Validator for the JSON Schema subset used by the files in schemas/:
// type (name or list), properties, required, additionalProperties (bool or
// schema), items, enum, const, minimum, maximum, minLength, minItems, oneOf,
// and local "$ref": "#/definitions/<name>" or "<file>.json" references.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace railgate::service {

class SchemaSet {
 public:
  /// Loads every *.json file in `dir`, keyed by file name.
  explicit SchemaSet(const std::filesystem::path& dir);

  /// Errors as "<json pointer>: message"; empty when `doc` conforms.
  std::vector<std::string> validate(const std::string& schema_file, const nlohmann::json& doc) const;

 private:
  std::map<std::string, nlohmann::json> schemas_;
};

}  // namespace railgate::service
