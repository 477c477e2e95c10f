#include "sscf/jsonschema.hpp"

namespace sscf::schema {

namespace {

using nlohmann::json;

bool type_matches(const std::string& type, const json& doc) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

bool validate_at(const json& schema, const json& doc, const std::string& path,
                 std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = path + ": " + msg;
    return false;
  };
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    if (t.is_string()) {
      if (!type_matches(t.get<std::string>(), doc))
        return fail("expected type " + t.get<std::string>());
    } else if (t.is_array()) {
      bool any = false;
      for (const auto& tt : t)
        if (type_matches(tt.get<std::string>(), doc)) any = true;
      if (!any) return fail("no allowed type matches");
    }
  }
  if (schema.contains("enum")) {
    bool any = false;
    for (const auto& v : schema["enum"])
      if (v == doc) any = true;
    if (!any) return fail("value not in enum");
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>()))
          return fail("missing required key '" + key.get<std::string>() + "'");
      }
    }
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
        if (doc.contains(it.key())) {
          if (!validate_at(it.value(), doc[it.key()], path + "/" + it.key(), error))
            return false;
        }
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    for (size_t i = 0; i < doc.size(); ++i) {
      if (!validate_at(schema["items"], doc[i], path + "[" + std::to_string(i) + "]", error))
        return false;
    }
  }
  return true;
}

}  // namespace

bool validate(const nlohmann::json& schema, const nlohmann::json& doc,
              std::string* error) {
  return validate_at(schema, doc, "$", error);
}

}  // namespace sscf::schema
