#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace sciqa {

// Helpers for digging structured data out of chatty model replies.
// Replies routinely wrap JSON in prose or markdown code fences, so the
// parsers here locate the first balanced bracket region instead of
// requiring the whole reply to be valid JSON.

// Removes ``` / ```json fence lines, leaving the fenced content intact.
std::string strip_code_fences(const std::string& text);

// Returns the first substring of `text` that forms a balanced
// `open`...`close` region, skipping over string literals and escapes.
std::optional<std::string> extract_balanced(const std::string& text, char open, char close);

// First parseable JSON array / object found in the reply, if any.
std::optional<nlohmann::json> first_json_array(const std::string& reply);
std::optional<nlohmann::json> first_json_object(const std::string& reply);

// First numeric literal in the reply ("Confidence: 85 because..." -> 85).
std::optional<double> first_number(const std::string& reply);

std::string trim(const std::string& s);

}  // namespace sciqa
