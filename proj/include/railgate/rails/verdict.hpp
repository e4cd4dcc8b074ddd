// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

namespace railgate::rails {

enum class Rail { kFactCheck, kHallucination, kJailbreak, kOutputModeration };

inline const char* rail_name(Rail rail) {
  switch (rail) {
    case Rail::kFactCheck: return "fact_check";
    case Rail::kHallucination: return "hallucination";
    case Rail::kJailbreak: return "jailbreak";
    case Rail::kOutputModeration: return "output_moderation";
  }
  return "?";
}

struct RailVerdict {
  Rail rail = Rail::kJailbreak;
  bool allowed = false;
  std::string raw_judgment;
  std::optional<std::string> detail;
};

}  // namespace railgate::rails
