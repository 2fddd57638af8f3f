#pragma once

#include <string>

#include <json.hpp>

namespace testing {

/// Checks the subset of JSON Schema used in docs/: type (string or list),
/// enum, required, properties, additionalProperties = false and items.
/// Returns an empty string on success, otherwise the first violation.
inline std::string schema_violation(const nlohmann::json& v, const nlohmann::json& schema, const std::string& at = "$") {
    auto type_ok = [&](const std::string& t) {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "integer") return v.is_number_integer();
        if (t == "number") return v.is_number();
        if (t == "null") return v.is_null();
        return false;
    };
    if (schema.contains("type")) {
        bool ok = false;
        if (schema["type"].is_array()) {
            for (const auto& t : schema["type"]) ok = ok || type_ok(t.get<std::string>());
        } else {
            ok = type_ok(schema["type"].get<std::string>());
        }
        if (!ok) return at + ": wrong type";
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"]) found = found || e == v;
        if (!found) return at + ": not in enum";
    }
    if (v.is_object()) {
        if (schema.contains("required")) {
            for (const auto& k : schema["required"]) {
                if (!v.contains(k.get<std::string>())) return at + ": missing " + k.get<std::string>();
            }
        }
        const auto props = schema.value("properties", nlohmann::json::object());
        for (const auto& [k, sub] : v.items()) {
            if (props.contains(k)) {
                if (auto e = schema_violation(sub, props[k], at + "." + k); !e.empty()) return e;
            } else if (schema.value("additionalProperties", true) == false) {
                return at + ": unexpected " + k;
            }
        }
    }
    if (v.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto e = schema_violation(v[i], schema["items"], at + "[" + std::to_string(i) + "]"); !e.empty()) return e;
        }
    }
    return {};
}

}  // namespace testing
