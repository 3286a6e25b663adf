#pragma once

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "gridplan/errors.hpp"

namespace gridplan {

using Json = nlohmann::json;

/// Strict reader for one JSON object: typed field access with the element
/// path in every error, and rejection of fields nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ParseError(path_ + ": missing field '" + key + "'");
    return convert<T>(j_.at(key), key);
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return convert<T>(j_.at(key), key);
  }

  template <class T>
  T value(const std::string& key, T fallback) {
    auto v = optional<T>(key);
    return v ? *v : fallback;
  }

  /// Raw access to a nested value; marks the key as consumed.
  const Json* child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  /// Throws on the first field that was never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw ParseError(path_ + ": unknown field '" + it.key() + "'");
  }

 private:
  template <class T>
  T convert(const Json& v, const std::string& key) const {
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path_ + "." + key + ": " + e.what());
    }
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
}

inline void expect_format(ObjectReader& r, const std::string& format, int version) {
  auto f = r.required<std::string>("format");
  if (f != format) throw ParseError(r.path() + ": expected format '" + format + "', found '" + f + "'");
  auto v = r.required<int>("version");
  if (v != version) throw ParseError(r.path() + ": unsupported version " + std::to_string(v));
}

}  // namespace gridplan
