#pragma once

#include <json.hpp>
#include <string>

namespace sscf::schema {

/// Minimal JSON-schema checker covering the subset used by the shipped
/// schemas: type, required, properties, items, enum.
bool validate(const nlohmann::json& schema, const nlohmann::json& doc,
              std::string* error = nullptr);

}  // namespace sscf::schema
