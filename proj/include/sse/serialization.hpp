#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "sse/input_model.hpp"
#include "sse/sse_model.hpp"

namespace sse {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON model document:
//   {"format": "sse-model", "version": 1, "checksum": "<fnv1a-64 hex>",
//    "payload": {"input_model": [...], "config": {...}, "diagnostics": {...},
//                "subdomains": [...]}}
// Numbers are JSON doubles written in shortest round-trip form, so a reloaded
// model predicts bit-identically. See docs/FORMATS.md.
std::string serialize(const SseModel& model);
SseModel deserialize(const std::string& text);

void save_model(const SseModel& model, const std::string& path);
SseModel load_model(const std::string& path);

nlohmann::json input_model_to_json(const InputModel& input);
InputModel input_model_from_json(const nlohmann::json& j);

// FNV-1a 64-bit hash, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

} // namespace sse
