// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

#include "railgate/eval/eval.hpp"

namespace railgate::eval {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json accuracies(const TopicalMetrics& m) {
  return {{"user_intent_acc", m.user_intent_acc},
          {"bot_intent_acc", m.bot_intent_acc},
          {"bot_message_acc", opt(m.bot_message_acc)},
          {"threshold", opt(m.settings.threshold)},
          {"errors", m.errors}};
}

std::string fixed3(const json& v) {
  if (v.is_null()) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v.get<double>());
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width(header.size());
  for (size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (size_t c = 0; c < cells.size(); ++c) out += " " + cells[c] + std::string(width[c] - cells[c].size(), ' ') + " |";
    return out + "\n";
  };
  std::string out = line(header);
  out += "|";
  for (size_t w : width) out += std::string(w + 2, '-') + "|";
  out += "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string int_cell(const json& v) { return std::to_string(v.get<int>()); }

}  // namespace

json topical_json(const std::vector<TopicalRow>& rows) {
  json out{{"kind", "topical"}, {"rows", json::array()}};
  for (const auto& r : rows) {
    const TopicalOptions& s = r.exact.settings;
    out["rows"].push_back({{"label", r.label},
                           {"k", s.k},
                           {"seed", s.seed},
                           {"n_samples", r.exact.n_samples},
                           {"n_intents", r.exact.n_intents},
                           {"exact", accuracies(r.exact)},
                           {"sim", r.sim ? accuracies(*r.sim) : json(nullptr)}});
  }
  return out;
}

json moderation_json(const std::vector<ModerationMetrics>& runs) {
  json out{{"kind", "moderation"}, {"runs", json::array()}};
  for (const auto& m : runs) {
    out["runs"].push_back({{"mode", moderation_mode_name(m.mode)},
                           {"harmful_blocked_rate", m.harmful_blocked_rate},
                           {"helpful_allowed_rate", m.helpful_allowed_rate},
                           {"n_harmful", m.n_harmful},
                           {"n_helpful", m.n_helpful},
                           {"harmful_blocked", m.harmful_blocked},
                           {"helpful_allowed", m.helpful_allowed},
                           {"errors", m.errors}});
  }
  return out;
}

json factcheck_json(const FactCheckMetrics& m) {
  return {{"kind", "factcheck"},
          {"accuracy", m.accuracy},
          {"positive_accuracy", m.positive_accuracy},
          {"negative_accuracy", m.negative_accuracy},
          {"true_positive", m.true_positive},
          {"true_negative", m.true_negative},
          {"false_positive", m.false_positive},
          {"false_negative", m.false_negative},
          {"errors", m.errors}};
}

json hallucination_json(const HallucinationMetrics& m) {
  return {{"kind", "hallucination"},
          {"intercepted_rate", m.intercepted_rate},
          {"deflected_rate", m.deflected_rate},
          {"n_questions", m.n_questions},
          {"answered", m.answered},
          {"deflected", m.deflected},
          {"flagged", m.flagged},
          {"errors", m.errors}};
}

std::string report(const json& doc, ReportFormat format) {
  if (format == ReportFormat::kJson) return doc.dump(2) + "\n";
  const std::string kind = doc.at("kind");
  if (kind == "topical") {
    std::string sim = "sim";
    for (const auto& r : doc["rows"]) {
      if (!r["sim"].is_null() && !r["sim"]["threshold"].is_null()) {
        sim = "sim=" + shortest(r["sim"]["threshold"].get<double>());
        break;
      }
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : doc["rows"]) {
      const json& e = r["exact"];
      const json none{{"user_intent_acc", nullptr}, {"bot_intent_acc", nullptr}, {"bot_message_acc", nullptr}};
      const json& s = r["sim"].is_null() ? none : r["sim"];
      rows.push_back({r["label"], fixed3(e["user_intent_acc"]), fixed3(s["user_intent_acc"]), fixed3(e["bot_intent_acc"]),
                      fixed3(s["bot_intent_acc"]), fixed3(e["bot_message_acc"]), fixed3(s["bot_message_acc"])});
    }
    return render_table({"Setting", "Us int, no sim", "Us int, " + sim, "Bt int, no sim", "Bt int, " + sim,
                         "Bt msg, no sim", "Bt msg, " + sim},
                        rows);
  }
  if (kind == "moderation") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : doc["runs"]) {
      rows.push_back({r["mode"], fixed3(r["harmful_blocked_rate"]), fixed3(r["helpful_allowed_rate"]),
                      int_cell(r["n_harmful"]), int_cell(r["n_helpful"]), int_cell(r["errors"])});
    }
    return render_table({"Rails", "Harmful blocked", "Helpful allowed", "Harmful", "Helpful", "Errors"}, rows);
  }
  if (kind == "factcheck") {
    return render_table({"Accuracy", "Positive acc", "Negative acc", "TP", "TN", "FP", "FN", "Errors"},
                        {{fixed3(doc["accuracy"]), fixed3(doc["positive_accuracy"]), fixed3(doc["negative_accuracy"]),
                          int_cell(doc["true_positive"]), int_cell(doc["true_negative"]), int_cell(doc["false_positive"]),
                          int_cell(doc["false_negative"]), int_cell(doc["errors"])}});
  }
  if (kind == "hallucination") {
    return render_table({"Intercepted", "Deflected", "Questions", "Answered", "Flagged", "Errors"},
                        {{fixed3(doc["intercepted_rate"]), fixed3(doc["deflected_rate"]), int_cell(doc["n_questions"]),
                          int_cell(doc["answered"]), int_cell(doc["flagged"]), int_cell(doc["errors"])}});
  }
  throw std::invalid_argument("unknown report kind '" + kind + "'");
}

std::string to_jsonl(const std::vector<json>& log) {
  std::string out;
  for (const auto& j : log) out += j.dump() + "\n";
  return out;
}

}  // namespace railgate::eval
