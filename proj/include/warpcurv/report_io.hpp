#pragma once

#include <string>

#include <json.hpp>

namespace warpcurv {

/// Serializes with sorted keys and %.17g floats; identical inputs yield
/// byte-identical text on every run.
std::string dump_json(const nlohmann::json& value);

std::string format_double(double v);

/// Writes via a temporary file and rename so failed runs leave no partial
/// output behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace warpcurv
