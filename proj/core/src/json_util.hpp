#pragma once

// Internal helpers for reading nlohmann::json documents with field-path
// context in error messages. Not installed.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ecosched/error.hpp"

namespace ecosched::detail {

using Json = nlohmann::json;

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // nlohmann reports the byte just past the offending token
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line_of_offset(text, byte));
  }
}

class Field {
 public:
  Field(const Json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const Json& json() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError((path_.empty() ? std::string("document") : path_) + ": " + what);
  }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      bool known = false;
      for (auto k : allowed) known = known || k == key;
      if (!known) child_path_fail(key, "unknown key");
    }
  }

  bool has(std::string_view key) const { return value_.contains(key); }

  Field at(std::string_view key) const {
    auto it = value_.find(key);
    if (it == value_.end()) child_path_fail(std::string(key), "missing required key");
    return Field(*it, join(key));
  }

  Field at(std::size_t index) const {
    return Field(value_.at(index), path_ + "[" + std::to_string(index) + "]");
  }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected a boolean");
    return value_.get<bool>();
  }

 private:
  std::string join(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  [[noreturn]] void child_path_fail(const std::string& key, const std::string& what) const {
    throw ParseError(join(key) + ": " + what);
  }

  const Json& value_;
  std::string path_;
};

}  // namespace ecosched::detail
